#pragma once

// Scalar difference equations driven by a 2-d chain, the corrected Euler
// scheme of the limit equation, and the SU(2) Cayley walk.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "roughwalk/anomaly.hpp"
#include "roughwalk/sampler.hpp"

namespace roughwalk {

/// f, g and their derivatives, checked against central differences on
/// construction.
class VectorField1D {
 public:
  using Fn = std::function<double(double)>;

  VectorField1D(Fn f, Fn g, Fn df, Fn dg, std::span<const double> test_points = kDefaultTestPoints);

  double f(double u) const { return f_(u); }
  double g(double u) const { return g_(u); }
  double df(double u) const { return df_(u); }
  double dg(double u) const { return dg_(u); }

  static VectorField1D constant(double f, double g);
  /// f(u) = a·u + b, g(u) = c·u + e.
  static VectorField1D affine(double a, double b, double c, double e);

  static constexpr double kDefaultTestPoints[] = {-2.0, -1.0, -0.3, 0.0, 0.4, 1.0, 2.5};

 private:
  Fn f_, g_, df_, dg_;
};

/// U_{n+1} = U_n + ε[f(U_n)(X_{n+1}−X_n) + g(U_n)(Y_{n+1}−Y_n)].
std::vector<double> drive_difference_eq(const VectorField1D& vf, double u0, std::span<const Vec> path, double eps);

/// ε = 1/√N.
double donsker_eps(std::size_t n_scale);

/// U += f·ΔB¹ + g·ΔB² + ½(f′f + g′g)·K·dt + ½(f′g − fg′)·γ·dt.
std::vector<double> corrected_euler(const VectorField1D& vf, double u0,
                                    std::span<const Eigen::Vector2d> increments, double dt, double K,
                                    double gamma);

/// Coefficients of the limit equation for a 2-d chain: the Brownian
/// covariance per unit time (one step of the chain = 1/N), the Itô-type
/// coefficient K and the anomaly coefficient γ of the scalar scheme.
struct SdeCoefficients {
  Eigen::Matrix2d brownian_cov = Eigen::Matrix2d::Identity();
  double K = 1.0;
  double gamma = 0.0;
};

/// K = tr(C/β − Q)/2 and γ = −2·(E[A]+E[Corr])⁰¹/β.
SdeCoefficients sde_coefficients(const AnomalyReport& report);
SdeCoefficients sde_coefficients(const StationaryMoments& moments);

/// Terminal values U_T of the chain-driven scheme with ε = 1/√N over ⌊N·T⌋
/// steps, one walk stream per path.
std::vector<double> discrete_terminal_values(const CompiledModel& model, std::size_t start_cell,
                                             const VectorField1D& vf, double u0, std::size_t n_scale,
                                             double horizon, std::size_t n_paths, std::uint64_t seed,
                                             std::size_t workers = 1);

/// Full path U_0..U_{⌊N·T⌋} of the chain-driven scheme for one path id.
std::vector<double> discrete_path(const CompiledModel& model, std::size_t start_cell, const VectorField1D& vf,
                                  double u0, std::size_t n_scale, double horizon, std::uint64_t seed,
                                  std::uint64_t path_id);

/// Terminal values of corrected_euler with Gaussian increments of covariance
/// brownian_cov·dt, one Gaussian stream per path.
std::vector<double> euler_terminal_values(const VectorField1D& vf, double u0, const SdeCoefficients& coeffs,
                                          std::size_t n_steps, double horizon, std::size_t n_paths,
                                          std::uint64_t seed, std::size_t workers = 1);

/// Full Euler path for one path id (the same numbers as euler_terminal_values).
std::vector<double> euler_path(const VectorField1D& vf, double u0, const SdeCoefficients& coeffs,
                               std::size_t n_steps, double horizon, std::uint64_t seed, std::uint64_t path_id);

/// Solution at time t of m′ = (K/2)m + γ/2, m(0) = u0.
double linear_mean_ode(double u0, double K, double gamma, double t);

// SU(2) -----------------------------------------------------------------------

using Mat2c = Eigen::Matrix2cd;

struct SU2State {
  Mat2c U = Mat2c::Identity();

  double unitarity_error() const;  // ‖U·U* − I‖_max
  double det_error() const;        // |det U − 1|
};

/// σ₁, σ₂, σ₃ for k = 0, 1, 2.
Mat2c pauli(int k);

/// U·(I + iεH)(I − iεH)⁻¹, H = Σ δx_k σ_k.
SU2State su2_cayley_step(const SU2State& state, const Eigen::Vector3d& delta_x, double eps);

}  // namespace roughwalk
