#pragma once

// Hand-rolled generators for the property tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "roughwalk/graph_core.hpp"

namespace roughwalk::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Integer-valued path of n+1 points with steps in [−2,2]^d.
inline std::vector<Vec> random_integer_path(Rng& rng, std::size_t dim, std::size_t n) {
  std::vector<Vec> path;
  Vec x = Vec::Zero(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uniform_int(rng, -5, 5);
  path.push_back(x);
  for (std::size_t k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += uniform_int(rng, -2, 2);
    path.push_back(x);
  }
  return path;
}

inline std::vector<Vec> random_real_path(Rng& rng, std::size_t dim, std::size_t n) {
  std::vector<Vec> path;
  Vec x = Vec::Zero(static_cast<Eigen::Index>(dim));
  path.push_back(x);
  for (std::size_t k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += uniform_real(rng, -1.0, 1.0);
    path.push_back(x);
  }
  return path;
}

inline Mat random_matrix(Rng& rng, std::size_t dim) {
  Mat m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = uniform_real(rng, -2.0, 2.0);
  }
  return m;
}

inline Mat random_spd(Rng& rng, std::size_t dim) {
  const Mat a = random_matrix(rng, dim);
  return a * a.transpose() + 0.1 * Mat::Identity(a.rows(), a.cols());
}

/// Irreducible Λ-invariant chain: 1–4 cells on the first axis, a sheared
/// lattice, a cycle through all cells plus random extra jumps.
inline PeriodicGraphModel random_model(Rng& rng, std::size_t dim) {
  PeriodicGraphModel m;
  m.dim = dim;
  const auto d = static_cast<Eigen::Index>(dim);
  const int n_cells = uniform_int(rng, 1, 4);
  m.lattice_basis = LatticeBasis::Identity(d, d);
  m.lattice_basis(0, 0) = n_cells + 1;
  if (dim > 1) m.lattice_basis(0, 1) = uniform_int(rng, 0, 1);
  for (int c = 0; c < n_cells; ++c) {
    Vec x = Vec::Zero(d);
    x[0] = c;
    m.cells.push_back(x);
  }
  auto random_delta = [&] {
    LatticeVec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = uniform_int(rng, -1, 1);
    return v;
  };
  for (int c = 0; c < n_cells; ++c) {
    std::vector<Transition> row;
    row.push_back({static_cast<std::size_t>(c), random_delta(), static_cast<std::size_t>((c + 1) % n_cells), 0.0});
    const int extra = uniform_int(rng, 1, 3);
    for (int e = 0; e < extra; ++e) {
      row.push_back({static_cast<std::size_t>(c), random_delta(), static_cast<std::size_t>(uniform_int(rng, 0, n_cells - 1)), 0.0});
    }
    double total = 0.0;
    for (auto& t : row) total += (t.prob = uniform_real(rng, 0.1, 1.0));
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k].prob = k + 1 < row.size() ? row[k].prob / total : 1.0 - acc;
      acc += row[k].prob;
      m.transitions.push_back(row[k]);
    }
  }
  return m;
}

}  // namespace roughwalk::testing
