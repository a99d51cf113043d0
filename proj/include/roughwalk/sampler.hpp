#pragma once

// Seedable simulation of Λ-invariant chains and their decomposition into
// pseudo-excursions between successive returns of π₀(X_n) to π₀(X₀).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "roughwalk/graph_core.hpp"
#include "roughwalk/philox.hpp"

namespace roughwalk {

/// Flat, sampling-ready form of a validated model. Transitions are grouped by
/// source cell in model-file order; zero-probability entries are dropped.
struct CompiledModel {
  std::size_t dim = 0;
  std::size_t rank = 0;
  std::size_t n_cells = 0;
  std::uint32_t max_degree = 0;
  std::vector<std::uint32_t> offsets;       // n_cells + 1
  std::vector<double> cdf;                  // cumulative prob within the source cell
  std::vector<std::uint32_t> to_cell;
  std::vector<std::int64_t> delta_lattice;  // rank per transition
  std::vector<double> increment;            // dim per transition
  std::vector<double> cell_position;        // dim per cell
  std::vector<double> basis;                // dim×rank, row-major

  /// Inverse CDF: index of the first transition of `cell` whose cumulative prob exceeds u.
  std::uint32_t choose(std::size_t cell, double u) const {
    const std::uint32_t begin = offsets[cell];
    const std::uint32_t last = offsets[cell + 1] - 1;
    std::uint32_t k = begin;
    while (k < last && u >= cdf[k]) ++k;
    return k;
  }
};

/// Validates (throwing on failure) and flattens.
CompiledModel compile(const PeriodicGraphModel& model);

struct Trajectory {
  std::shared_ptr<const PeriodicGraphModel> model;
  GraphPoint start;
  std::vector<GraphPoint> points;  // n_steps + 1, points[0] == start
  std::uint64_t seed = 0;
  std::uint64_t trajectory_id = 0;

  std::size_t n_steps() const { return points.empty() ? 0 : points.size() - 1; }
  /// Embedded coordinates, computed on each call.
  std::vector<Vec> embedded() const;
};

/// Same (model, start, n_steps, seed, trajectory_id) gives the same points.
Trajectory sample_trajectory(std::shared_ptr<const PeriodicGraphModel> model, const GraphPoint& start,
                             std::size_t n_steps, std::uint64_t seed, std::uint64_t trajectory_id = 0);

/// One pseudo-excursion, translated by −λ_k so that it starts at the
/// representative of π₀(X₀). The path ends at step `length`.
struct Excursion {
  std::size_t index = 0;
  std::uint64_t start_time = 0;
  std::size_t length = 0;
  std::size_t dim = 0;
  std::size_t rank = 0;
  std::vector<std::int64_t> rel_lattice;  // (length+1)·rank
  std::vector<std::uint32_t> cells;       // length+1
  std::vector<double> rel_path;           // (length+1)·dim, embedded
  LatticeVec lattice_displacement;        // λ_{k+1} − λ_k
  Vec displacement;                       // B·(λ_{k+1} − λ_k)

  Eigen::Map<const Vec> point(std::size_t n) const {
    return Eigen::Map<const Vec>(rel_path.data() + n * dim, static_cast<Eigen::Index>(dim));
  }
  GraphPoint rel_point(std::size_t n) const;
  std::vector<Vec> path() const;
};

struct ExcursionDecomposition {
  std::vector<std::uint64_t> times;  // T_0 .. T_m
  std::vector<Excursion> excursions; // m complete excursions
  std::uint64_t tail_start = 0;      // T_m
  std::vector<GraphPoint> tail;      // X_{T_m} .. X_n

  std::size_t tail_length() const { return tail.empty() ? 0 : tail.size() - 1; }
};

ExcursionDecomposition decompose_excursions(const Trajectory& trajectory);

/// Complete excursions of one unbounded trajectory, generated lazily. The
/// returned reference stays valid until the next call to next().
class ExcursionStream {
 public:
  ExcursionStream(std::shared_ptr<const CompiledModel> model, std::size_t start_cell, std::uint64_t seed,
                  std::uint64_t trajectory_id = 0);

  const Excursion& next();
  /// Steps consumed so far (= T_k after k excursions).
  std::uint64_t time() const { return time_; }

 private:
  std::shared_ptr<const CompiledModel> model_;
  std::size_t start_cell_;
  UniformStream uniforms_;
  std::uint64_t time_ = 0;
  std::size_t produced_ = 0;
  Excursion current_;
};

/// Embedded point B·λ + cell for flat lattice storage.
void embed_flat(const CompiledModel& model, std::span<const std::int64_t> lattice, std::size_t cell,
                std::span<double> out);

}  // namespace roughwalk
