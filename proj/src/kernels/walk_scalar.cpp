#include <algorithm>
#include <array>

#include "roughwalk/kernels.hpp"

namespace roughwalk::kernels {

void endpoints_scalar(const CompiledModel& model, std::size_t start_cell, std::uint64_t n_steps,
                      std::uint64_t seed, std::uint64_t first_id, std::size_t count, double* displacement,
                      double* area) {
  const std::size_t d = model.dim;
  const std::size_t m = d * (d - 1) / 2;
  std::vector<double> x(d);
  for (std::size_t k = 0; k < count; ++k) {
    const StreamKey key = walk_stream(seed, first_id + k);
    double* a = area + k * m;
    std::fill(x.begin(), x.end(), 0.0);
    std::fill(a, a + m, 0.0);
    std::size_t cell = start_cell;
    for (std::uint64_t s = 0; s < n_steps; s += 2) {
      const PhiloxBlock block = stream_block(key, s >> 1);
      const unsigned halves = s + 1 < n_steps ? 2U : 1U;
      for (unsigned h = 0; h < halves; ++h) {
        const std::uint32_t t = model.choose(cell, block_uniform(block, h));
        const double* inc = model.increment.data() + std::size_t{t} * d;
        std::size_t slot = 0;
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = i + 1; j < d; ++j, ++slot) {
            a[slot] += 0.5 * (x[i] * inc[j] - x[j] * inc[i]);
          }
        }
        for (std::size_t i = 0; i < d; ++i) x[i] += inc[i];
        cell = model.to_cell[t];
      }
    }
    std::copy(x.begin(), x.end(), displacement + k * d);
  }
}

}  // namespace roughwalk::kernels
