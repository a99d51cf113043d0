#pragma once

// Constants of the invariance principle: drift v, mean return time β,
// excursion covariance C, mean excursion area, the drift correction Corr and
// the area anomaly Γ = M·(E[A] + E[Corr])·Mᵀ with M the Cholesky whitener of C.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roughwalk/graph_core.hpp"
#include "roughwalk/kernels.hpp"
#include "roughwalk/rough_algebra.hpp"
#include "roughwalk/sampler.hpp"

namespace roughwalk {

struct AnomalyErrors {
  Vec v;
  double beta = 0.0;
  Mat C;
  AreaMatrix mean_exc_area;
  AreaMatrix mean_corr;
  AreaMatrix gamma;
};

struct AnomalyReport {
  std::size_t dim = 0;
  Vec v;                     // per step
  double beta = 0.0;         // E[T₁]
  Mat C;                     // Cov(X_{T₁} − T₁v)
  AreaMatrix mean_exc_area;  // E[A_{L}(ℰ)]
  AreaMatrix mean_corr;      // E[Corr]
  AreaMatrix gamma;
  Mat whitener;              // M, M·C·Mᵀ = I
  Mat mean_sq_increment;     // E[Σ_k (ΔX_k − v)(ΔX_k − v)ᵀ] / β, per step
  std::size_t n_excursions = 0;
  std::uint64_t total_steps = 0;
  std::size_t n_batches = 0;
  AnomalyErrors std_errors;

  /// Γ recomputed from C, mean_exc_area and mean_corr.
  AreaMatrix gamma_from_parts() const;
};

struct EstimateOptions {
  std::size_t n_batches = 32;
  std::size_t workers = 1;
  /// Keep only excursions with L ≤ this (conditional law); others are skipped.
  std::optional<std::size_t> max_excursion_length;
};

AnomalyReport estimate_constants(const PeriodicGraphModel& model, const GraphPoint& start,
                                 std::size_t n_excursions, std::uint64_t seed,
                                 const EstimateOptions& options = {});

/// (2p−1)² / (8p(1−p)).
double gamma_closed_form_rotating(double p);

struct EnumerationResult {
  AreaMatrix gamma;
  double covered_mass = 0.0;
  Vec v;
  double beta = 0.0;
  Mat C;
  AreaMatrix mean_exc_area;
  AreaMatrix mean_corr;
  std::size_t max_states = 0;  // widest layer of the (cell, λ) frontier
};

/// Exact expectations over excursions of length ≤ max_len. Paths are merged
/// by their current graph point, which keeps the frontier polynomial in
/// max_len; frontier states of mass ≤ prob_floor are dropped. Expectations
/// are conditional on the covered paths.
EnumerationResult exact_gamma_enumeration(const PeriodicGraphModel& model, const GraphPoint& start,
                                          std::size_t max_len, double prob_floor = 0.0);

/// Corr = ½ Σ_{k<l} ((ΔX_l − ΔX_k)⊗v − v⊗(ΔX_l − ΔX_k)), in O(L).
AreaMatrix corr_term(const Excursion& excursion, const Vec& v);

/// Signed area of the excursion path.
AreaMatrix excursion_area(const Excursion& excursion);

/// Area of the path with increments ΔX_k − v.
AreaMatrix centered_area(const Excursion& excursion, const Vec& v);

/// Long-run per-step moments of the chain from the fundamental matrix of Q₀.
struct StationaryMoments {
  Vec pi;                 // stationary law of Q₀
  Vec drift;              // v
  Mat covariance;         // lim Cov(X_n)/n
  Mat second_moment;      // E_π[(ΔX − v)(ΔX − v)ᵀ]
  AreaMatrix area_rate;   // lim E[A_n(X − nv)]/n
  AreaMatrix gamma;       // whitened area rate
  double beta(std::size_t cell) const { return 1.0 / pi[static_cast<Eigen::Index>(cell)]; }
};

StationaryMoments stationary_moments(const PeriodicGraphModel& model);

/// Γ from terminal values of many independent trajectories of n steps:
/// M·E[A_n]·Mᵀ/n with M the whitener of Cov(X_n)/n.
struct EndpointGamma {
  AreaMatrix gamma;
  AreaMatrix std_error;
  Mat covariance;  // Cov(X_n)/n
};

EndpointGamma endpoint_gamma(const EndpointBatch& batch);

nlohmann::json to_json(const AnomalyReport& report);

/// CSV summary: one row per parameter value of a sweep.
std::string report_csv_header(std::size_t dim);
std::string report_csv_row(const AnomalyReport& report, const std::string& label, double parameter);

}  // namespace roughwalk
