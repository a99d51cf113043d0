#include <cstdlib>

#include "roughwalk/kernels.hpp"
#include "roughwalk/parallel.hpp"

namespace roughwalk {

namespace {

constexpr std::size_t kChunk = 256;

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace

std::size_t default_workers() {
  if (const char* env = std::getenv("ROUGHWALK_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<std::size_t>(n);
  }
  return 1;
}

const char* to_string(KernelIsa isa) {
  switch (isa) {
    case KernelIsa::kScalar:
      return "scalar";
    case KernelIsa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

std::optional<KernelIsa> parse_kernel_isa(const std::string& name) {
  if (name == "scalar") return KernelIsa::kScalar;
  if (name == "avx2") return KernelIsa::kAvx2;
  return std::nullopt;
}

bool kernel_available(KernelIsa isa) {
  switch (isa) {
    case KernelIsa::kScalar:
      return true;
    case KernelIsa::kAvx2:
      return kernels::avx2_compiled() && cpu_has_avx2();
  }
  return false;
}

KernelIsa select_kernel() {
  if (const char* env = std::getenv("ROUGHWALK_KERNEL")) {
    if (auto isa = parse_kernel_isa(env); isa && kernel_available(*isa)) return *isa;
  }
  return kernel_available(KernelIsa::kAvx2) ? KernelIsa::kAvx2 : KernelIsa::kScalar;
}

void simulate_endpoints_into(const CompiledModel& model, std::size_t start_cell, std::uint64_t n_steps,
                             std::uint64_t seed, std::uint64_t first_id, std::size_t count,
                             std::span<double> displacement, std::span<double> area, KernelIsa isa) {
  const std::size_t d = model.dim;
  const std::size_t m = d * (d - 1) / 2;
  if (start_cell >= model.n_cells) throw ModelError("start cell out of range");
  if (displacement.size() < count * d || area.size() < count * m) {
    throw DimensionMismatch(count * d, displacement.size());
  }
  if (isa == KernelIsa::kAvx2 && kernel_available(KernelIsa::kAvx2)) {
    kernels::endpoints_avx2(model, start_cell, n_steps, seed, first_id, count, displacement.data(), area.data());
  } else {
    kernels::endpoints_scalar(model, start_cell, n_steps, seed, first_id, count, displacement.data(),
                              area.data());
  }
}

EndpointBatch simulate_endpoints(const CompiledModel& model, std::size_t start_cell, std::uint64_t n_steps,
                                 std::uint64_t seed, std::size_t count, std::size_t workers,
                                 std::optional<KernelIsa> isa, std::uint64_t first_id) {
  EndpointBatch out;
  out.dim = model.dim;
  out.count = count;
  out.n_steps = n_steps;
  const std::size_t d = model.dim;
  const std::size_t m = d * (d - 1) / 2;
  out.displacement.assign(count * d, 0.0);
  out.area.assign(count * m, 0.0);
  const KernelIsa chosen = isa.value_or(select_kernel());
  const std::size_t n_chunks = (count + kChunk - 1) / kChunk;
  parallel_for(n_chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t n = std::min(kChunk, count - begin);
    simulate_endpoints_into(model, start_cell, n_steps, seed, first_id + begin, n,
                            std::span<double>(out.displacement).subspan(begin * d, n * d),
                            std::span<double>(out.area).subspan(begin * m, n * m), chosen);
  });
  return out;
}

}  // namespace roughwalk
