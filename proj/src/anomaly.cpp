#include "roughwalk/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "roughwalk/parallel.hpp"

namespace roughwalk {

namespace {

constexpr double kTwoRouteTolerance = 1e-10;

Vec step_of(const Excursion& e, std::size_t k) { return e.point(k) - e.point(k - 1); }

void add_area_step(AreaMatrix& a, const Vec& x, const Vec& delta) {
  const std::size_t d = a.dim();
  auto up = a.upper();
  std::size_t slot = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j, ++slot) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      up[slot] += 0.5 * (x[ii] * delta[jj] - x[jj] * delta[ii]);
    }
  }
}

AreaMatrix wedge_half(const Vec& w, const Vec& v) {
  const std::size_t d = static_cast<std::size_t>(w.size());
  AreaMatrix out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      out.set(i, j, 0.5 * (w[ii] * v[jj] - v[ii] * w[jj]));
    }
  }
  return out;
}

// W = Σ_{k<l} (a_l − a_k) = Σ_k (2k − 1 − L) a_k.
Vec pair_difference_sum(const Excursion& e) {
  Vec w = Vec::Zero(static_cast<Eigen::Index>(e.dim));
  const double L = static_cast<double>(e.length);
  for (std::size_t k = 1; k <= e.length; ++k) {
    w += (2.0 * static_cast<double>(k) - 1.0 - L) * step_of(e, k);
  }
  return w;
}

AreaMatrix whiten(const AreaMatrix& a, const Mat& m) { return area_linear_transform(a, m); }

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Standard error of the grand mean from batch estimates.
constexpr std::size_t kEndpointGroups = 32;

double batch_se(const std::vector<double>& xs) {
  if (xs.size() < 2) return std::nan("");
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

struct FirstPass {
  std::size_t n = 0;
  double sum_len = 0.0;
  Vec sum_d;
};

struct SecondPass {
  std::size_t n = 0;
  std::uint64_t steps = 0;
  double sum_len = 0.0;
  Vec sum_d;
  Mat sum_dd;  // of d − L·v
  AreaMatrix sum_area;
  AreaMatrix sum_corr;
  Mat sum_sq;  // Σ over steps of (a − v)(a − v)ᵀ
};

template <class Fn>
void for_each_excursion(const std::shared_ptr<const CompiledModel>& cm, std::size_t start_cell,
                        std::uint64_t seed, std::uint64_t batch, std::size_t count,
                        const std::optional<std::size_t>& max_len, Fn&& fn) {
  ExcursionStream stream(cm, start_cell, seed, batch);
  std::size_t accepted = 0;
  while (accepted < count) {
    const Excursion& e = stream.next();
    if (max_len && e.length > *max_len) continue;
    fn(e);
    ++accepted;
  }
}

}  // namespace

AreaMatrix excursion_area(const Excursion& e) {
  AreaMatrix a(e.dim);
  Vec x = Vec::Zero(static_cast<Eigen::Index>(e.dim));
  for (std::size_t k = 1; k <= e.length; ++k) {
    const Vec delta = step_of(e, k);
    add_area_step(a, x, delta);
    x += delta;
  }
  return a;
}

AreaMatrix centered_area(const Excursion& e, const Vec& v) {
  AreaMatrix a(e.dim);
  Vec x = Vec::Zero(static_cast<Eigen::Index>(e.dim));
  for (std::size_t k = 1; k <= e.length; ++k) {
    const Vec delta = step_of(e, k) - v;
    add_area_step(a, x, delta);
    x += delta;
  }
  return a;
}

AreaMatrix corr_term(const Excursion& e, const Vec& v) {
  if (static_cast<std::size_t>(v.size()) != e.dim) throw DimensionMismatch(e.dim, static_cast<std::size_t>(v.size()));
  return wedge_half(pair_difference_sum(e), v);
}

AreaMatrix AnomalyReport::gamma_from_parts() const {
  return whiten(mean_exc_area + mean_corr, whitening_transform(C));
}

double gamma_closed_form_rotating(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must lie in (0,1)");
  return (2.0 * p - 1.0) * (2.0 * p - 1.0) / (8.0 * p * (1.0 - p));
}

AnomalyReport estimate_constants(const PeriodicGraphModel& model, const GraphPoint& start,
                                 std::size_t n_excursions, std::uint64_t seed, const EstimateOptions& options) {
  if (n_excursions < 2) throw InsufficientData("need at least 2 complete excursions");
  auto cm = std::make_shared<const CompiledModel>(compile(model));
  if (start.cell >= cm->n_cells) throw ModelError("start cell out of range");
  const std::size_t d = cm->dim;
  const auto dd = static_cast<Eigen::Index>(d);
  const std::size_t B = std::max<std::size_t>(1, std::min(options.n_batches, n_excursions));
  std::vector<std::size_t> sizes(B, n_excursions / B);
  for (std::size_t b = 0; b < n_excursions % B; ++b) ++sizes[b];

  std::vector<FirstPass> first(B);
  parallel_for(B, options.workers, [&](std::size_t b) {
    FirstPass& fp = first[b];
    fp.sum_d = Vec::Zero(dd);
    for_each_excursion(cm, start.cell, seed, b, sizes[b], options.max_excursion_length, [&](const Excursion& e) {
      ++fp.n;
      fp.sum_len += static_cast<double>(e.length);
      fp.sum_d += e.displacement;
    });
  });
  double total_len = 0.0;
  Vec total_d = Vec::Zero(dd);
  for (const auto& fp : first) {
    total_len += fp.sum_len;
    total_d += fp.sum_d;
  }
  const Vec v = total_d / total_len;

  std::vector<SecondPass> second(B);
  parallel_for(B, options.workers, [&](std::size_t b) {
    SecondPass& sp = second[b];
    sp.sum_d = Vec::Zero(dd);
    sp.sum_dd = Mat::Zero(dd, dd);
    sp.sum_area = AreaMatrix(d);
    sp.sum_corr = AreaMatrix(d);
    sp.sum_sq = Mat::Zero(dd, dd);
    for_each_excursion(cm, start.cell, seed, b, sizes[b], options.max_excursion_length, [&](const Excursion& e) {
      const double L = static_cast<double>(e.length);
      ++sp.n;
      sp.steps += e.length;
      sp.sum_len += L;
      sp.sum_d += e.displacement;
      const Vec centered = e.displacement - L * v;
      sp.sum_dd += centered * centered.transpose();
      const AreaMatrix area = excursion_area(e);
      const AreaMatrix corr = corr_term(e, v);
      const AreaMatrix via_centering = centered_area(e, v) - area;
      const double scale = 1.0 + area.max_abs() + corr.max_abs();
      if ((via_centering - corr).max_abs() > kTwoRouteTolerance * scale) {
        throw Error("drift correction: direct and centered-path routes disagree");
      }
      sp.sum_area += area;
      sp.sum_corr += corr;
      for (std::size_t k = 1; k <= e.length; ++k) {
        const Vec a = step_of(e, k) - v;
        sp.sum_sq += a * a.transpose();
      }
    });
  });

  AnomalyReport r;
  r.dim = d;
  r.v = v;
  r.n_batches = B;
  SecondPass total;
  total.sum_d = Vec::Zero(dd);
  total.sum_dd = Mat::Zero(dd, dd);
  total.sum_area = AreaMatrix(d);
  total.sum_corr = AreaMatrix(d);
  total.sum_sq = Mat::Zero(dd, dd);
  for (const auto& sp : second) {
    total.n += sp.n;
    total.steps += sp.steps;
    total.sum_len += sp.sum_len;
    total.sum_d += sp.sum_d;
    total.sum_dd += sp.sum_dd;
    total.sum_area += sp.sum_area;
    total.sum_corr += sp.sum_corr;
    total.sum_sq += sp.sum_sq;
  }
  const double n = static_cast<double>(total.n);
  r.n_excursions = total.n;
  r.total_steps = total.steps;
  r.beta = total.sum_len / n;
  r.C = total.sum_dd / (n - 1.0);
  r.mean_exc_area = total.sum_area * (1.0 / n);
  r.mean_corr = total.sum_corr * (1.0 / n);
  r.mean_sq_increment = total.sum_sq / total.sum_len;
  r.whitener = whitening_transform(r.C);
  r.gamma = whiten(r.mean_exc_area + r.mean_corr, r.whitener);

  // Batch means.
  AnomalyErrors& se = r.std_errors;
  se.v = Vec::Constant(dd, std::nan(""));
  se.C = Mat::Constant(dd, dd, std::nan(""));
  se.mean_exc_area = AreaMatrix(d);
  se.mean_corr = AreaMatrix(d);
  se.gamma = AreaMatrix(d);
  std::vector<double> xs(B);
  for (std::size_t b = 0; b < B; ++b) xs[b] = second[b].sum_len / static_cast<double>(second[b].n);
  se.beta = batch_se(xs);
  for (Eigen::Index i = 0; i < dd; ++i) {
    for (std::size_t b = 0; b < B; ++b) xs[b] = second[b].sum_d[i] / second[b].sum_len;
    se.v[i] = batch_se(xs);
    for (Eigen::Index j = 0; j < dd; ++j) {
      std::vector<double> cs;
      for (const auto& sp : second) {
        if (sp.n >= 2) cs.push_back(sp.sum_dd(i, j) / static_cast<double>(sp.n - 1));
      }
      se.C(i, j) = batch_se(cs);
    }
  }
  std::vector<AreaMatrix> area_b, corr_b;
  for (const auto& sp : second) {
    const double nb = static_cast<double>(sp.n);
    area_b.push_back(sp.sum_area * (1.0 / nb));
    corr_b.push_back(sp.sum_corr * (1.0 / nb));
  }
  // Delete-one-batch jackknife for Γ, re-whitened per reduced sample.
  std::vector<AreaMatrix> gamma_jk;
  if (B >= 2) {
    for (const auto& sp : second) {
      const double nj = n - static_cast<double>(sp.n);
      const Mat cj = (total.sum_dd - sp.sum_dd) / (nj - 1.0);
      const AreaMatrix mj = (total.sum_area - sp.sum_area + total.sum_corr - sp.sum_corr) * (1.0 / nj);
      gamma_jk.push_back(whiten(mj, whitening_transform(cj)));
    }
  }
  for (std::size_t s = 0; s < r.gamma.n_components(); ++s) {
    for (std::size_t b = 0; b < B; ++b) xs[b] = area_b[b].upper()[s];
    se.mean_exc_area.upper()[s] = batch_se(xs);
    for (std::size_t b = 0; b < B; ++b) xs[b] = corr_b[b].upper()[s];
    se.mean_corr.upper()[s] = batch_se(xs);
    se.gamma.upper()[s] = std::nan("");
    if (gamma_jk.empty()) continue;
    for (std::size_t b = 0; b < B; ++b) xs[b] = gamma_jk[b].upper()[s];
    se.gamma.upper()[s] = static_cast<double>(B - 1) * batch_se(xs);
  }
  return r;
}

EnumerationResult exact_gamma_enumeration(const PeriodicGraphModel& model, const GraphPoint& start,
                                          std::size_t max_len, double prob_floor) {
  if (max_len < 1) throw OutOfRange("max_len must be at least 1");
  const CompiledModel cm = compile(model);
  if (start.cell >= cm.n_cells) throw ModelError("start cell out of range");
  const std::size_t d = cm.dim;
  const std::size_t r = cm.rank;
  const auto dd = static_cast<Eigen::Index>(d);

  struct State {
    double mass = 0.0;
    Vec x;             // embedded position relative to the start representative
    AreaMatrix area;   // Σ mass·A over merged paths
    Vec ksum;          // Σ mass·Σ_k k·a_k
  };
  using Key = std::vector<std::int64_t>;  // λ followed by the cell
  std::map<Key, State> layer;
  Key origin(r + 1, 0);
  origin[r] = static_cast<std::int64_t>(start.cell);
  layer[origin] = State{1.0, Vec::Zero(dd), AreaMatrix(d), Vec::Zero(dd)};

  double mass = 0.0, m_len = 0.0, m_len2 = 0.0;
  Vec m_d = Vec::Zero(dd), m_ld = Vec::Zero(dd), m_w = Vec::Zero(dd);
  Mat m_dd = Mat::Zero(dd, dd);
  AreaMatrix m_area(d);
  EnumerationResult out;

  for (std::size_t depth = 0; depth < max_len && !layer.empty(); ++depth) {
    out.max_states = std::max(out.max_states, layer.size());
    std::map<Key, State> next;
    const double k = static_cast<double>(depth + 1);
    for (const auto& [key, s] : layer) {
      const std::size_t cell = static_cast<std::size_t>(key[r]);
      for (std::uint32_t t = cm.offsets[cell]; t < cm.offsets[cell + 1]; ++t) {
        const double q = cm.cdf[t] - (t == cm.offsets[cell] ? 0.0 : cm.cdf[t - 1]);
        const Eigen::Map<const Vec> a(cm.increment.data() + std::size_t{t} * d, dd);
        State ns;
        ns.mass = q * s.mass;
        ns.x = s.x + a;
        ns.area = s.area;
        AreaMatrix step(d);
        add_area_step(step, s.x, a);
        ns.area += step * s.mass;
        ns.area *= q;
        ns.ksum = q * (s.ksum + s.mass * k * a);
        if (cm.to_cell[t] == start.cell) {
          const double L = k;
          const Vec& disp = ns.x;
          mass += ns.mass;
          m_len += ns.mass * L;
          m_len2 += ns.mass * L * L;
          m_d += ns.mass * disp;
          m_dd += ns.mass * disp * disp.transpose();
          m_ld += ns.mass * L * disp;
          m_area += ns.area;
          m_w += 2.0 * ns.ksum - (L + 1.0) * ns.mass * disp;
          continue;
        }
        if (ns.mass <= prob_floor) continue;
        Key nk(key);
        for (std::size_t j = 0; j < r; ++j) nk[j] += cm.delta_lattice[std::size_t{t} * r + j];
        nk[r] = static_cast<std::int64_t>(cm.to_cell[t]);
        auto [it, inserted] = next.try_emplace(nk);
        State& dst = it->second;
        if (inserted) {
          dst = std::move(ns);
        } else {
          dst.mass += ns.mass;
          dst.area += ns.area;
          dst.ksum += ns.ksum;
        }
      }
    }
    layer = std::move(next);
  }
  if (mass <= 0.0) throw InsufficientData("no excursion completed within max_len");
  out.covered_mass = mass;
  out.beta = m_len / mass;
  const Vec ed = m_d / mass;
  out.v = ed / out.beta;
  const Vec eld = m_ld / mass;
  const Vec& v = out.v;
  out.C = m_dd / mass - eld * v.transpose() - v * eld.transpose() + (m_len2 / mass) * v * v.transpose();
  out.mean_exc_area = m_area * (1.0 / mass);
  out.mean_corr = wedge_half(m_w / mass, v);
  out.gamma = whiten(out.mean_exc_area + out.mean_corr, whitening_transform(out.C));
  return out;
}

StationaryMoments stationary_moments(const PeriodicGraphModel& model) {
  const CompiledModel cm = compile(model);
  const auto n = static_cast<Eigen::Index>(cm.n_cells);
  const std::size_t d = cm.dim;
  const auto dd = static_cast<Eigen::Index>(d);
  const Mat q0 = project_transition_law(model);

  // π solves πQ₀ = π, Σπ = 1.
  Mat system(n + 1, n);
  system.topRows(n) = q0.transpose() - Mat::Identity(n, n);
  system.row(n).setOnes();
  Vec rhs = Vec::Zero(n + 1);
  rhs[n] = 1.0;
  StationaryMoments sm;
  sm.pi = system.colPivHouseholderQr().solve(rhs);

  auto prob = [&](std::uint32_t t, std::size_t cell) {
    return cm.cdf[t] - (t == cm.offsets[cell] ? 0.0 : cm.cdf[t - 1]);
  };
  auto inc = [&](std::uint32_t t) { return Eigen::Map<const Vec>(cm.increment.data() + std::size_t{t} * d, dd); };

  Mat mean_step = Mat::Zero(n, dd);  // row x: E[ΔX | cell x]
  for (std::size_t c = 0; c < cm.n_cells; ++c) {
    for (std::uint32_t t = cm.offsets[c]; t < cm.offsets[c + 1]; ++t) {
      mean_step.row(static_cast<Eigen::Index>(c)) += prob(t, c) * inc(t).transpose();
    }
  }
  sm.drift = mean_step.transpose() * sm.pi;
  const Mat centered_step = mean_step.rowwise() - sm.drift.transpose();
  const Mat fundamental = (Mat::Identity(n, n) - q0 + Vec::Ones(n) * sm.pi.transpose()).inverse();
  const Mat h = fundamental * centered_step;  // Σ_{m≥0} Q₀^m (E[ΔX|·] − v)

  Mat cross = Mat::Zero(dd, dd);
  sm.second_moment = Mat::Zero(dd, dd);
  for (std::size_t c = 0; c < cm.n_cells; ++c) {
    const double w = sm.pi[static_cast<Eigen::Index>(c)];
    for (std::uint32_t t = cm.offsets[c]; t < cm.offsets[c + 1]; ++t) {
      const Vec a = inc(t) - sm.drift;
      const double pw = w * prob(t, c);
      sm.second_moment += pw * a * a.transpose();
      cross += pw * a * h.row(static_cast<Eigen::Index>(cm.to_cell[t]));
    }
  }
  sm.covariance = sm.second_moment + cross + cross.transpose();
  sm.area_rate = AreaMatrix::from_dense(cross);
  sm.gamma = whiten(sm.area_rate, whitening_transform(sm.covariance));
  return sm;
}

EndpointGamma endpoint_gamma(const EndpointBatch& batch) {
  if (batch.count < 2) throw InsufficientData("need at least 2 trajectories");
  if (batch.n_steps == 0) throw InsufficientData("trajectories have no steps");
  const std::size_t d = batch.dim;
  const std::size_t m = d * (d - 1) / 2;
  const auto dd = static_cast<Eigen::Index>(d);
  const double steps = static_cast<double>(batch.n_steps);

  // Per-group sums of X, XXᵀ and A over contiguous trajectory groups.
  struct Group {
    double n = 0.0;
    Vec sx;
    Mat sxx;
    AreaMatrix sa;
  };
  const std::size_t G = std::min<std::size_t>(kEndpointGroups, batch.count);
  std::vector<Group> groups(G, Group{0.0, Vec::Zero(dd), Mat::Zero(dd, dd), AreaMatrix(d)});
  Group total{0.0, Vec::Zero(dd), Mat::Zero(dd, dd), AreaMatrix(d)};
  AreaMatrix a(d);
  for (std::size_t k = 0; k < batch.count; ++k) {
    Group& g = groups[k * G / batch.count];
    const Vec x = Eigen::Map<const Vec>(batch.displacement_of(k).data(), dd);
    const auto src = batch.area_of(k);
    std::copy(src.begin(), src.end(), a.upper().begin());
    g.n += 1.0;
    g.sx += x;
    g.sxx += x * x.transpose();
    g.sa += a;
  }
  for (const auto& g : groups) {
    total.n += g.n;
    total.sx += g.sx;
    total.sxx += g.sxx;
    total.sa += g.sa;
  }
  auto estimate = [&](const Group& s, Mat* covariance) {
    const Vec mean = s.sx / s.n;
    const Mat cov = (s.sxx - s.n * mean * mean.transpose()) / ((s.n - 1.0) * steps);
    if (covariance) *covariance = cov;
    return whiten(s.sa * (1.0 / (s.n * steps)), whitening_transform(cov));
  };

  EndpointGamma out;
  out.gamma = estimate(total, &out.covariance);
  out.std_error = AreaMatrix(d);
  if (G < 2) {
    for (auto& x : out.std_error.upper()) x = std::nan("");
    return out;
  }
  std::vector<AreaMatrix> jk;
  for (const auto& g : groups) {
    jk.push_back(estimate(Group{total.n - g.n, total.sx - g.sx, total.sxx - g.sxx, total.sa - g.sa}, nullptr));
  }
  std::vector<double> xs(G);
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t b = 0; b < G; ++b) xs[b] = jk[b].upper()[s];
    out.std_error.upper()[s] = static_cast<double>(G - 1) * batch_se(xs);
  }
  return out;
}

namespace {

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

nlohmann::json mat_json(const Mat& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(row);
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const AnomalyReport& r) {
  nlohmann::json j;
  j["dim"] = r.dim;
  j["v"] = vec_json(r.v);
  j["beta"] = r.beta;
  j["C"] = mat_json(r.C);
  j["mean_exc_area"] = mat_json(r.mean_exc_area.dense());
  j["mean_corr"] = mat_json(r.mean_corr.dense());
  j["gamma"] = mat_json(r.gamma.dense());
  j["whitener"] = mat_json(r.whitener);
  j["mean_sq_increment"] = mat_json(r.mean_sq_increment);
  j["n_excursions"] = r.n_excursions;
  j["total_steps"] = r.total_steps;
  j["n_batches"] = r.n_batches;
  const auto& se = r.std_errors;
  j["std_errors"] = {{"v", vec_json(se.v)},
                     {"beta", se.beta},
                     {"C", mat_json(se.C)},
                     {"mean_exc_area", mat_json(se.mean_exc_area.dense().cwiseAbs())},
                     {"mean_corr", mat_json(se.mean_corr.dense().cwiseAbs())},
                     {"gamma", mat_json(se.gamma.dense().cwiseAbs())}};
  return j;
}

std::string report_csv_header(std::size_t dim) {
  std::ostringstream os;
  os << "label,parameter,n_excursions,beta,beta_se";
  for (std::size_t i = 0; i < dim; ++i) os << ",v_" << i << ",v_" << i << "_se";
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) os << ",C_" << i << j;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) os << ",gamma_" << i << j << ",gamma_" << i << j << "_se";
  }
  return os.str();
}

std::string report_csv_row(const AnomalyReport& r, const std::string& label, double parameter) {
  std::ostringstream os;
  os << label << ',' << parameter << std::setprecision(17) << ',' << r.n_excursions << ',' << r.beta << ',' << r.std_errors.beta;
  for (std::size_t i = 0; i < r.dim; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    os << ',' << r.v[ii] << ',' << r.std_errors.v[ii];
  }
  for (std::size_t i = 0; i < r.dim; ++i) {
    for (std::size_t j = i; j < r.dim; ++j) {
      os << ',' << r.C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  for (std::size_t i = 0; i < r.dim; ++i) {
    for (std::size_t j = i + 1; j < r.dim; ++j) {
      os << ',' << r.gamma(i, j) << ',' << std::abs(r.std_errors.gamma(i, j));
    }
  }
  return os.str();
}

}  // namespace roughwalk
