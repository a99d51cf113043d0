#pragma once

// Periodic graphs G = Λ·G₀ in a vector space E, Λ-invariant transition laws,
// and the projected chain on the fundamental cell.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roughwalk/errors.hpp"

namespace roughwalk {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using LatticeVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using LatticeBasis = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kStochasticTolerance = 1e-12;

/// One allowed jump: from (λ, from_cell) to (λ + delta_lattice, to_cell).
struct Transition {
  std::size_t from_cell = 0;
  LatticeVec delta_lattice;
  std::size_t to_cell = 0;
  double prob = 0.0;
};

/// A Λ-invariant Markov chain on a periodic graph, stored on the quotient:
/// the lattice basis (d×r, columns generate Λ), one representative per cell
/// of G₀, and the transition list out of each cell.
struct PeriodicGraphModel {
  std::size_t dim = 0;
  LatticeBasis lattice_basis;
  std::vector<Vec> cells;
  std::vector<Transition> transitions;

  std::size_t rank() const { return static_cast<std::size_t>(lattice_basis.cols()); }
  std::size_t n_cells() const { return cells.size(); }

  /// Embedded jump vector of a transition: embed(to) + B·δλ − embed(from).
  Vec increment(const Transition& t) const;
};

/// A point x = (λ, x₀) of G.
struct GraphPoint {
  LatticeVec lattice;
  std::size_t cell = 0;

  friend bool operator==(const GraphPoint& a, const GraphPoint& b) {
    return a.cell == b.cell && a.lattice == b.lattice;
  }
};

struct IrreducibilityResult {
  bool irreducible = false;
  std::vector<std::vector<std::size_t>> classes;  // strongly connected components
};

struct ValidationReport {
  bool is_stochastic = false;
  bool is_irreducible = false;
  std::optional<bool> has_central_symmetry;
  double increment_bound_R = 0.0;
  std::vector<std::string> messages;
  std::vector<double> row_sums;
  std::vector<std::vector<std::size_t>> classes;

  bool usable() const { return is_stochastic && is_irreducible; }
};

/// Cell involution for the optional central-symmetry check: the model is
/// symmetric when every jump δ out of cell c has the same probability as the
/// jump −δ out of cell partner[c].
struct CentralSymmetry {
  std::vector<std::size_t> partner;
};

/// Checks row sums, irreducibility of Q₀ and computes R. Throws ModelError
/// when the model is structurally malformed.
ValidationReport validate(const PeriodicGraphModel& model,
                          const std::optional<CentralSymmetry>& symmetry = std::nullopt);

/// validate() and throw NotStochastic / NotIrreducible on the first failure.
void ensure_valid(const PeriodicGraphModel& model);

/// Throws ModelError unless every index and shape is consistent.
void check_well_formed(const PeriodicGraphModel& model);

Mat project_transition_law(const PeriodicGraphModel& model);

IrreducibilityResult check_irreducible(const Mat& q0);

Vec embed(const PeriodicGraphModel& model, const GraphPoint& point);

/// Finds the unique (λ, x₀) with B·λ + cells[x₀] = x, if any.
std::optional<GraphPoint> locate(const PeriodicGraphModel& model, const Vec& x);

/// Lower-triangular Cholesky whitener M with M·C·Mᵀ = I.
Mat whitening_transform(const Mat& covariance);

// Built-in models -----------------------------------------------------------

/// Z'_n = Σ i^{k-1} U_k with P(U=1)=p on Z², Λ=(2Z)², cells ordered
/// (0,0),(1,0),(1,1),(0,1) so that Q₀ is the cyclic shift.
PeriodicGraphModel rotating_model(double p);

/// Simple symmetric walk on Z² with increments uniform in {±e₁, ±e₂}.
PeriodicGraphModel simple_walk_model();

/// Cubic model on Z³ with Λ=(2Z)³, parametrized by u (v = 1−u), with the
/// centrally symmetric row for cell (1,0,1).
PeriodicGraphModel cubic_model(double u);

/// The cubic table exactly as printed, including the row for cell (1,0,1)
/// whose entries sum to (2u+4v)/3. Fails validation on purpose.
PeriodicGraphModel cubic_model_raw_table(double u);

/// The involution x₀ ↦ x₀ + (1,1,1) mod 2 on the cubic model's cells.
CentralSymmetry cubic_central_symmetry();

struct ModelParameters {
  double p = 0.9;
  double u = 0.9;
};

/// Registry lookup: "rotating", "cubic", "cubic-raw", "simple".
PeriodicGraphModel builtin_model(const std::string& name, const ModelParameters& params);
std::vector<std::string> builtin_model_names();

}  // namespace roughwalk
