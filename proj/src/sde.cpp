#include "roughwalk/sde.hpp"

#include <cmath>
#include <string>

#include "roughwalk/parallel.hpp"
#include "roughwalk/philox.hpp"

namespace roughwalk {

namespace {

void check_derivative(const VectorField1D::Fn& fn, const VectorField1D::Fn& dfn, double x, const char* name) {
  const double h = 1e-5 * std::max(1.0, std::abs(x));
  const double fd = (fn(x + h) - fn(x - h)) / (2.0 * h);
  const double exact = dfn(x);
  if (std::abs(fd - exact) > 1e-6 * std::max(1.0, std::abs(exact))) {
    throw Error(std::string("derivative of ") + name + " disagrees with finite differences at u = " +
                std::to_string(x));
  }
}

inline double checked(double u, std::size_t step) {
  if (!std::isfinite(u)) throw NonFinite(step, u);
  return u;
}

}  // namespace

VectorField1D::VectorField1D(Fn f, Fn g, Fn df, Fn dg, std::span<const double> test_points)
    : f_(std::move(f)), g_(std::move(g)), df_(std::move(df)), dg_(std::move(dg)) {
  for (double x : test_points) {
    check_derivative(f_, df_, x, "f");
    check_derivative(g_, dg_, x, "g");
  }
}

VectorField1D VectorField1D::constant(double f, double g) {
  return affine(0.0, f, 0.0, g);
}

VectorField1D VectorField1D::affine(double a, double b, double c, double e) {
  return VectorField1D([a, b](double u) { return a * u + b; }, [c, e](double u) { return c * u + e; },
                       [a](double) { return a; }, [c](double) { return c; });
}

std::vector<double> drive_difference_eq(const VectorField1D& vf, double u0, std::span<const Vec> path, double eps) {
  std::vector<double> u;
  if (path.empty()) return u;
  if (path.front().size() != 2) throw DimensionMismatch(2, static_cast<std::size_t>(path.front().size()));
  u.reserve(path.size());
  u.push_back(u0);
  for (std::size_t n = 1; n < path.size(); ++n) {
    const double dx = path[n][0] - path[n - 1][0];
    const double dy = path[n][1] - path[n - 1][1];
    const double un = u.back();
    u.push_back(checked(un + eps * (vf.f(un) * dx + vf.g(un) * dy), n));
  }
  return u;
}

double donsker_eps(std::size_t n_scale) { return 1.0 / std::sqrt(static_cast<double>(n_scale)); }

std::vector<double> corrected_euler(const VectorField1D& vf, double u0,
                                    std::span<const Eigen::Vector2d> increments, double dt, double K,
                                    double gamma) {
  if (!(dt > 0.0)) throw OutOfRange("dt must be positive");
  std::vector<double> u;
  u.reserve(increments.size() + 1);
  u.push_back(u0);
  for (std::size_t n = 0; n < increments.size(); ++n) {
    const double x = u.back();
    const double f = vf.f(x), g = vf.g(x), df = vf.df(x), dg = vf.dg(x);
    const double next = x + f * increments[n][0] + g * increments[n][1] + 0.5 * (df * f + dg * g) * K * dt +
                        0.5 * (df * g - f * dg) * gamma * dt;
    u.push_back(checked(next, n + 1));
  }
  return u;
}

SdeCoefficients sde_coefficients(const AnomalyReport& r) {
  if (r.dim != 2) throw DimensionMismatch(2, r.dim);
  SdeCoefficients c;
  c.brownian_cov = r.C / r.beta;
  c.K = 0.5 * (c.brownian_cov - r.mean_sq_increment).trace();
  c.gamma = -2.0 * (r.mean_exc_area(0, 1) + r.mean_corr(0, 1)) / r.beta;
  return c;
}

SdeCoefficients sde_coefficients(const StationaryMoments& m) {
  if (m.drift.size() != 2) throw DimensionMismatch(2, static_cast<std::size_t>(m.drift.size()));
  SdeCoefficients c;
  c.brownian_cov = m.covariance;
  c.K = 0.5 * (m.covariance - m.second_moment).trace();
  c.gamma = -2.0 * m.area_rate(0, 1);
  return c;
}

namespace {

// Runs one chain-driven path; `visit(step, U)` sees every state.
template <class Visit>
double run_discrete(const CompiledModel& model, std::size_t start_cell, const VectorField1D& vf, double u0,
                    std::size_t n_scale, double horizon, std::uint64_t seed, std::uint64_t path_id, Visit&& visit) {
  if (model.dim != 2) throw DimensionMismatch(2, model.dim);
  if (start_cell >= model.n_cells) throw ModelError("start cell out of range");
  const double eps = donsker_eps(n_scale);
  const auto n_steps = static_cast<std::size_t>(std::floor(static_cast<double>(n_scale) * horizon));
  UniformStream uniforms(walk_stream(seed, path_id));
  std::size_t cell = start_cell;
  double u = u0;
  visit(std::size_t{0}, u);
  for (std::size_t s = 0; s < n_steps; ++s) {
    const std::uint32_t t = model.choose(cell, uniforms.next());
    const double* inc = model.increment.data() + std::size_t{t} * 2;
    u = checked(u + eps * (vf.f(u) * inc[0] + vf.g(u) * inc[1]), s + 1);
    cell = model.to_cell[t];
    visit(s + 1, u);
  }
  return u;
}

}  // namespace

std::vector<double> discrete_path(const CompiledModel& model, std::size_t start_cell, const VectorField1D& vf,
                                  double u0, std::size_t n_scale, double horizon, std::uint64_t seed,
                                  std::uint64_t path_id) {
  std::vector<double> path;
  run_discrete(model, start_cell, vf, u0, n_scale, horizon, seed, path_id,
               [&](std::size_t, double u) { path.push_back(u); });
  return path;
}

std::vector<double> discrete_terminal_values(const CompiledModel& model, std::size_t start_cell,
                                             const VectorField1D& vf, double u0, std::size_t n_scale,
                                             double horizon, std::size_t n_paths, std::uint64_t seed,
                                             std::size_t workers) {
  std::vector<double> out(n_paths);
  constexpr std::size_t kChunk = 64;
  parallel_for((n_paths + kChunk - 1) / kChunk, workers, [&](std::size_t c) {
    for (std::size_t p = c * kChunk; p < std::min(n_paths, (c + 1) * kChunk); ++p) {
      out[p] = run_discrete(model, start_cell, vf, u0, n_scale, horizon, seed, p, [](std::size_t, double) {});
    }
  });
  return out;
}

namespace {

std::vector<Eigen::Vector2d> gaussian_increments(const Eigen::Matrix2d& chol, double dt, std::size_t n_steps,
                                                 std::uint64_t seed, std::uint64_t path_id) {
  GaussianStream normals(gaussian_stream(seed, path_id));
  const double scale = std::sqrt(dt);
  std::vector<Eigen::Vector2d> inc(n_steps);
  for (auto& x : inc) {
    const double z0 = normals.next();
    const double z1 = normals.next();
    x = chol * Eigen::Vector2d(z0, z1) * scale;
  }
  return inc;
}

Eigen::Matrix2d cholesky_factor(const Eigen::Matrix2d& cov) {
  Eigen::LLT<Eigen::Matrix2d> llt(cov);
  if (llt.info() != Eigen::Success) throw DegenerateCovariance(1, 2);
  return llt.matrixL();
}

}  // namespace

std::vector<double> euler_path(const VectorField1D& vf, double u0, const SdeCoefficients& coeffs,
                               std::size_t n_steps, double horizon, std::uint64_t seed, std::uint64_t path_id) {
  const double dt = horizon / static_cast<double>(n_steps);
  const auto inc = gaussian_increments(cholesky_factor(coeffs.brownian_cov), dt, n_steps, seed, path_id);
  return corrected_euler(vf, u0, inc, dt, coeffs.K, coeffs.gamma);
}

std::vector<double> euler_terminal_values(const VectorField1D& vf, double u0, const SdeCoefficients& coeffs,
                                          std::size_t n_steps, double horizon, std::size_t n_paths,
                                          std::uint64_t seed, std::size_t workers) {
  if (n_steps == 0) throw OutOfRange("Euler scheme needs at least one step");
  const Eigen::Matrix2d chol = cholesky_factor(coeffs.brownian_cov);
  const double dt = horizon / static_cast<double>(n_steps);
  std::vector<double> out(n_paths);
  constexpr std::size_t kChunk = 64;
  parallel_for((n_paths + kChunk - 1) / kChunk, workers, [&](std::size_t c) {
    for (std::size_t p = c * kChunk; p < std::min(n_paths, (c + 1) * kChunk); ++p) {
      const auto inc = gaussian_increments(chol, dt, n_steps, seed, p);
      out[p] = corrected_euler(vf, u0, inc, dt, coeffs.K, coeffs.gamma).back();
    }
  });
  return out;
}

double linear_mean_ode(double u0, double K, double gamma, double t) {
  if (K == 0.0) return u0 + 0.5 * gamma * t;
  const double e = std::exp(0.5 * K * t);
  return u0 * e + gamma / K * (e - 1.0);
}

double SU2State::unitarity_error() const {
  return (U * U.adjoint() - Mat2c::Identity()).cwiseAbs().maxCoeff();
}

double SU2State::det_error() const { return std::abs(U.determinant() - std::complex<double>(1.0, 0.0)); }

Mat2c pauli(int k) {
  using C = std::complex<double>;
  Mat2c s;
  switch (k) {
    case 0:
      s << C(0, 0), C(1, 0), C(1, 0), C(0, 0);
      break;
    case 1:
      s << C(0, 0), C(0, -1), C(0, 1), C(0, 0);
      break;
    case 2:
      s << C(1, 0), C(0, 0), C(0, 0), C(-1, 0);
      break;
    default:
      throw OutOfRange("Pauli index must be 0, 1 or 2");
  }
  return s;
}

SU2State su2_cayley_step(const SU2State& state, const Eigen::Vector3d& dx, double eps) {
  const std::complex<double> ie(0.0, eps);
  const Mat2c h = dx[0] * pauli(0) + dx[1] * pauli(1) + dx[2] * pauli(2);
  const Mat2c num = Mat2c::Identity() + ie * h;
  const Mat2c den = Mat2c::Identity() - ie * h;
  const std::complex<double> det = den.determinant();
  if (!(std::abs(det) > 1e-300) || !std::isfinite(std::abs(det))) throw SingularStep("I − iεH is singular");
  return {state.U * num * den.inverse()};
}

}  // namespace roughwalk
