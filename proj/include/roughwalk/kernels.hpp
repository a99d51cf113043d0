#pragma once

// Batched terminal-value simulation: many independent trajectories advanced
// n steps, keeping only the embedded displacement X_n − X_0 and the area A_n.
//
// The scalar kernel is the reference. The AVX2 kernel runs eight trajectories
// per pass (Philox in 32-bit lanes, walk state in two 4×double groups) and
// reproduces the scalar results bit for bit: both consume uniform number s of
// stream walk_stream(seed, id) at step s and evaluate the same IEEE
// operations in the same order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roughwalk/sampler.hpp"

namespace roughwalk {

enum class KernelIsa { kScalar, kAvx2 };

const char* to_string(KernelIsa isa);
std::optional<KernelIsa> parse_kernel_isa(const std::string& name);

/// True when the variant was compiled in and the CPU supports it.
bool kernel_available(KernelIsa isa);

/// Widest available variant, unless $ROUGHWALK_KERNEL names another one.
KernelIsa select_kernel();

struct EndpointBatch {
  std::size_t dim = 0;
  std::size_t count = 0;
  std::uint64_t n_steps = 0;
  std::vector<double> displacement;  // count × dim
  std::vector<double> area;          // count × d(d−1)/2, upper triangle

  std::span<const double> displacement_of(std::size_t k) const {
    return std::span<const double>(displacement).subspan(k * dim, dim);
  }
  std::span<const double> area_of(std::size_t k) const {
    const std::size_t m = dim * (dim - 1) / 2;
    return std::span<const double>(area).subspan(k * m, m);
  }
};

/// Simulates trajectories first_id .. first_id+count−1 into the given spans.
void simulate_endpoints_into(const CompiledModel& model, std::size_t start_cell, std::uint64_t n_steps,
                             std::uint64_t seed, std::uint64_t first_id, std::size_t count,
                             std::span<double> displacement, std::span<double> area, KernelIsa isa);

/// Shards `count` trajectories over `workers` threads in fixed-size chunks;
/// the result does not depend on the worker count.
EndpointBatch simulate_endpoints(const CompiledModel& model, std::size_t start_cell, std::uint64_t n_steps,
                                 std::uint64_t seed, std::size_t count, std::size_t workers = 1,
                                 std::optional<KernelIsa> isa = std::nullopt, std::uint64_t first_id = 0);

namespace kernels {

void endpoints_scalar(const CompiledModel& model, std::size_t start_cell, std::uint64_t n_steps,
                      std::uint64_t seed, std::uint64_t first_id, std::size_t count, double* displacement,
                      double* area);

/// Largest dimension handled by the vector kernel; larger models use the scalar one.
inline constexpr std::size_t kAvx2MaxDim = 4;

bool avx2_compiled();
void endpoints_avx2(const CompiledModel& model, std::size_t start_cell, std::uint64_t n_steps,
                    std::uint64_t seed, std::uint64_t first_id, std::size_t count, double* displacement,
                    double* area);

}  // namespace kernels

}  // namespace roughwalk
