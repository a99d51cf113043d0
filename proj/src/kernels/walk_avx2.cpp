// Compiled with -mavx2 when the target is x86-64; only called after a
// runtime CPU check.

#include "roughwalk/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace roughwalk::kernels {

#if defined(__AVX2__)

namespace {

// 32×32→64 products of all eight lanes, split into high and low words.
inline void mul_hilo(__m256i a, __m256i m, __m256i& hi, __m256i& lo) {
  const __m256i even = _mm256_mul_epu32(a, m);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

struct Block8 {
  __m256i w[4];
};

inline Block8 philox8(__m256i c0, __m256i c1, __m256i c2, __m256i c3, std::uint32_t key0, std::uint32_t key1) {
  const __m256i m0 = _mm256_set1_epi32(static_cast<int>(kPhiloxM0));
  const __m256i m1 = _mm256_set1_epi32(static_cast<int>(kPhiloxM1));
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key0 += kPhiloxW0;
      key1 += kPhiloxW1;
    }
    __m256i hi0, lo0, hi1, lo1;
    mul_hilo(c0, m0, hi0, lo0);
    mul_hilo(c2, m1, hi1, lo1);
    const __m256i k0 = _mm256_set1_epi32(static_cast<int>(key0));
    const __m256i k1 = _mm256_set1_epi32(static_cast<int>(key1));
    c0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
    c1 = lo1;
    c2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
    c3 = lo0;
  }
  return {{c0, c1, c2, c3}};
}

// Words (lo, hi) of lanes 0..7 → uniforms of lanes 0..3 and 4..7.
inline void to_uniforms(__m256i lo, __m256i hi, __m256d& first, __m256d& second) {
  const __m256i a = _mm256_unpacklo_epi32(lo, hi);  // lanes 0,1,4,5
  const __m256i b = _mm256_unpackhi_epi32(lo, hi);  // lanes 2,3,6,7
  const __m256i exponent = _mm256_set1_epi64x(0x3FF0000000000000LL);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256i g0 = _mm256_permute2x128_si256(a, b, 0x20);
  const __m256i g1 = _mm256_permute2x128_si256(a, b, 0x31);
  first = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(g0, 12), exponent)), one);
  second = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(g1, 12), exponent)), one);
}

inline __m128i mask64_to_32(__m256d mask) {
  const __m256i pick = _mm256_setr_epi32(0, 2, 4, 6, 0, 2, 4, 6);
  return _mm256_castsi256_si128(_mm256_permutevar8x32_epi32(_mm256_castpd_si256(mask), pick));
}

struct Group {
  __m128i cell;
  __m256d x[kAvx2MaxDim];
  __m256d a[kAvx2MaxDim * (kAvx2MaxDim - 1) / 2];
};

struct Tables {
  const int* offsets;
  const double* cdf;  // padded by max_degree
  const int* to_cell;
  const double* increment;
  int dim;
  int max_degree;
};

inline void step(Group& g, __m256d u, const Tables& tb) {
  const __m128i base = _mm_i32gather_epi32(tb.offsets, g.cell, 4);
  const __m128i end = _mm_i32gather_epi32(tb.offsets, _mm_add_epi32(g.cell, _mm_set1_epi32(1)), 4);
  const __m128i last = _mm_sub_epi32(_mm_sub_epi32(end, base), _mm_set1_epi32(1));
  __m128i chosen = base;
  for (int k = 0; k + 1 < tb.max_degree; ++k) {
    const __m128i kk = _mm_set1_epi32(k);
    const __m128i valid = _mm_cmpgt_epi32(last, kk);
    const __m256d c = _mm256_i32gather_pd(tb.cdf, _mm_add_epi32(base, kk), 8);
    const __m128i ge = mask64_to_32(_mm256_cmp_pd(u, c, _CMP_GE_OQ));
    chosen = _mm_sub_epi32(chosen, _mm_and_si128(ge, valid));
  }
  g.cell = _mm_i32gather_epi32(tb.to_cell, chosen, 4);
  const __m128i inc_base = _mm_mullo_epi32(chosen, _mm_set1_epi32(tb.dim));
  __m256d inc[kAvx2MaxDim];
  for (int i = 0; i < tb.dim; ++i) {
    inc[i] = _mm256_i32gather_pd(tb.increment, _mm_add_epi32(inc_base, _mm_set1_epi32(i)), 8);
  }
  const __m256d half = _mm256_set1_pd(0.5);
  int slot = 0;
  for (int i = 0; i < tb.dim; ++i) {
    for (int j = i + 1; j < tb.dim; ++j, ++slot) {
      const __m256d cross = _mm256_sub_pd(_mm256_mul_pd(g.x[i], inc[j]), _mm256_mul_pd(g.x[j], inc[i]));
      g.a[slot] = _mm256_add_pd(g.a[slot], _mm256_mul_pd(half, cross));
    }
  }
  for (int i = 0; i < tb.dim; ++i) g.x[i] = _mm256_add_pd(g.x[i], inc[i]);
}

void store(const Group& g, int dim, double* displacement, double* area) {
  alignas(32) double lanes[4];
  const int m = dim * (dim - 1) / 2;
  for (int i = 0; i < dim; ++i) {
    _mm256_store_pd(lanes, g.x[i]);
    for (int l = 0; l < 4; ++l) displacement[l * dim + i] = lanes[l];
  }
  for (int s = 0; s < m; ++s) {
    _mm256_store_pd(lanes, g.a[s]);
    for (int l = 0; l < 4; ++l) area[l * m + s] = lanes[l];
  }
}

}  // namespace

bool avx2_compiled() { return true; }

void endpoints_avx2(const CompiledModel& model, std::size_t start_cell, std::uint64_t n_steps,
                    std::uint64_t seed, std::uint64_t first_id, std::size_t count, double* displacement,
                    double* area) {
  const std::size_t d = model.dim;
  const std::size_t m = d * (d - 1) / 2;
  if (d > kAvx2MaxDim) {
    endpoints_scalar(model, start_cell, n_steps, seed, first_id, count, displacement, area);
    return;
  }
  std::vector<int> offsets(model.offsets.begin(), model.offsets.end());
  std::vector<int> to_cell(model.to_cell.begin(), model.to_cell.end());
  std::vector<double> cdf(model.cdf);
  cdf.resize(cdf.size() + model.max_degree + 1, 1.0);
  const Tables tb{offsets.data(), cdf.data(), to_cell.data(), model.increment.data(), static_cast<int>(d),
                  static_cast<int>(model.max_degree)};
  const auto key0 = static_cast<std::uint32_t>(seed);
  const auto key1 = static_cast<std::uint32_t>(seed >> 32);

  const std::size_t full = count / 8 * 8;
  for (std::size_t k = 0; k < full; k += 8) {
    Group g[2];
    for (auto& grp : g) {
      grp.cell = _mm_set1_epi32(static_cast<int>(start_cell));
      for (auto& x : grp.x) x = _mm256_setzero_pd();
      for (auto& a : grp.a) a = _mm256_setzero_pd();
    }
    alignas(32) std::uint32_t ids_lo[8], ids_hi[8];
    for (int l = 0; l < 8; ++l) {
      const StreamKey key = walk_stream(seed, first_id + k + static_cast<std::size_t>(l));
      ids_lo[l] = static_cast<std::uint32_t>(key.stream);
      ids_hi[l] = static_cast<std::uint32_t>(key.stream >> 32);
    }
    const __m256i c2 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ids_lo));
    const __m256i c3 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ids_hi));
    for (std::uint64_t s = 0; s < n_steps; s += 2) {
      const std::uint64_t block = s >> 1;
      const Block8 r = philox8(_mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(block))),
                               _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(block >> 32))), c2,
                               c3, key0, key1);
      __m256d u0, u1;
      to_uniforms(r.w[0], r.w[1], u0, u1);
      step(g[0], u0, tb);
      step(g[1], u1, tb);
      if (s + 1 < n_steps) {
        to_uniforms(r.w[2], r.w[3], u0, u1);
        step(g[0], u0, tb);
        step(g[1], u1, tb);
      }
    }
    store(g[0], static_cast<int>(d), displacement + k * d, area + k * m);
    store(g[1], static_cast<int>(d), displacement + (k + 4) * d, area + (k + 4) * m);
  }
  if (full < count) {
    endpoints_scalar(model, start_cell, n_steps, seed, first_id + full, count - full, displacement + full * d,
                     area + full * m);
  }
}

#else

bool avx2_compiled() { return false; }

void endpoints_avx2(const CompiledModel& model, std::size_t start_cell, std::uint64_t n_steps,
                    std::uint64_t seed, std::uint64_t first_id, std::size_t count, double* displacement,
                    double* area) {
  endpoints_scalar(model, start_cell, n_steps, seed, first_id, count, displacement, area);
}

#endif

}  // namespace roughwalk::kernels
