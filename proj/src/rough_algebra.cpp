#include "roughwalk/rough_algebra.hpp"

#include <algorithm>
#include <cmath>

namespace roughwalk {

namespace {

void require_dim(std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionMismatch(expected, got);
}

}  // namespace

AreaMatrix AreaMatrix::from_dense(const Mat& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  }
  const auto d = static_cast<std::size_t>(m.rows());
  AreaMatrix a(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      a.set(i, j, 0.5 * (m(ii, jj) - m(jj, ii)));
    }
  }
  return a;
}

Mat AreaMatrix::dense() const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Mat m = Mat::Zero(d, d);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j);
    }
  }
  return m;
}

AreaMatrix& AreaMatrix::operator+=(const AreaMatrix& o) {
  require_dim(dim_, o.dim_);
  for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] += o.upper_[k];
  return *this;
}

AreaMatrix& AreaMatrix::operator-=(const AreaMatrix& o) {
  require_dim(dim_, o.dim_);
  for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] -= o.upper_[k];
  return *this;
}

AreaMatrix& AreaMatrix::operator*=(double s) {
  for (double& x : upper_) x *= s;
  return *this;
}

double AreaMatrix::max_abs() const {
  double m = 0.0;
  for (double x : upper_) m = std::max(m, std::abs(x));
  return m;
}

AreaAccumulator::AreaAccumulator(const Vec& origin)
    : origin_(origin), displacement_(Vec::Zero(origin.size())), area_(static_cast<std::size_t>(origin.size())) {}

void AreaAccumulator::push(const Vec& point) {
  require_dim(static_cast<std::size_t>(origin_.size()), static_cast<std::size_t>(point.size()));
  push_increment(point - origin_ - displacement_);
}

void AreaAccumulator::push_increment(const Vec& delta) {
  const auto d = static_cast<std::size_t>(displacement_.size());
  require_dim(d, static_cast<std::size_t>(delta.size()));
  // A_{n+1} = A_n + ½(x_n^i Δ^j − x_n^j Δ^i), x measured from the origin.
  auto upper = area_.upper();
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j, ++k) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      upper[k] += 0.5 * (displacement_[ii] * delta[jj] - displacement_[jj] * delta[ii]);
    }
  }
  displacement_ += delta;
}

AreaMatrix discrete_area(std::span<const Vec> points) {
  if (points.empty()) throw InsufficientData("discrete_area needs at least one point");
  AreaAccumulator acc(points.front());
  for (std::size_t k = 1; k < points.size(); ++k) acc.push(points[k]);
  return acc.area();
}

std::vector<AreaMatrix> area_sequence(std::span<const Vec> points) {
  if (points.empty()) return {};
  std::vector<AreaMatrix> out;
  out.reserve(points.size());
  AreaAccumulator acc(points.front());
  out.push_back(acc.area());
  for (std::size_t k = 1; k < points.size(); ++k) {
    acc.push(points[k]);
    out.push_back(acc.area());
  }
  return out;
}

RoughPoint path_signature(std::span<const Vec> points, std::size_t s, std::size_t t) {
  if (s > t || t >= points.size()) throw OutOfRange("path_signature: bad interval");
  const auto piece = points.subspan(s, t - s + 1);
  return {points[t] - points[s], discrete_area(piece)};
}

RoughPoint chen_product(const RoughPoint& a, const RoughPoint& b) {
  const std::size_t d = a.dim();
  require_dim(d, b.dim());
  require_dim(d, a.level2.dim());
  require_dim(d, b.level2.dim());
  RoughPoint out{a.level1 + b.level1, a.level2 + b.level2};
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      out.level2.add(i, j, 0.5 * (a.level1[ii] * b.level1[jj] - a.level1[jj] * b.level1[ii]));
    }
  }
  return out;
}

RoughPoint inverse(const RoughPoint& a) { return {-a.level1, a.level2 * -1.0}; }

RoughPoint dilate(const RoughPoint& a, double eps) { return {a.level1 * eps, a.level2 * (eps * eps)}; }

double operator_norm(const AreaMatrix& a) {
  const std::size_t d = a.dim();
  if (d < 2) return 0.0;
  if (d == 2) return std::abs(a(0, 1));
  Eigen::JacobiSVD<Mat> svd(a.dense());
  return svd.singularValues()[0];
}

double homogeneous_norm(const RoughPoint& a) {
  return std::max(a.level1.norm(), std::sqrt(operator_norm(a.level2)));
}

RoughPoint donsker_embed(std::span<const Vec> base, std::span<const AreaMatrix> areas,
                         std::size_t n_scale, double t) {
  if (n_scale == 0) throw OutOfRange("donsker_embed: scale must be positive");
  if (base.empty() || areas.size() != base.size()) {
    throw OutOfRange("donsker_embed: base and area sequences must be nonempty and aligned");
  }
  const double nt = static_cast<double>(n_scale) * t;
  const double last = static_cast<double>(base.size() - 1);
  if (!(t >= 0.0) || nt > last) throw OutOfRange("donsker_embed: N·t exceeds available data");
  const auto k = static_cast<std::size_t>(std::floor(nt));
  const double frac = nt - static_cast<double>(k);
  const double root = std::sqrt(static_cast<double>(n_scale));
  const double scale = static_cast<double>(n_scale);
  if (frac == 0.0) return {base[k] / root, areas[k] * (1.0 / scale)};
  Vec level1 = (base[k] + frac * (base[k + 1] - base[k])) / root;
  AreaMatrix level2 = (areas[k] + (areas[k + 1] - areas[k]) * frac) * (1.0 / scale);
  return {std::move(level1), std::move(level2)};
}

AreaMatrix area_linear_transform(const AreaMatrix& a, const Mat& m) {
  require_dim(a.dim(), static_cast<std::size_t>(m.cols()));
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  }
  return AreaMatrix::from_dense(m * a.dense() * m.transpose());
}

nlohmann::json to_json(const RoughPoint& p) {
  nlohmann::json j;
  j["level1"] = std::vector<double>(p.level1.data(), p.level1.data() + p.level1.size());
  j["level2_upper_triangle"] = std::vector<double>(p.level2.upper().begin(), p.level2.upper().end());
  return j;
}

RoughPoint rough_point_from_json(const nlohmann::json& j) {
  const auto l1 = j.at("level1").get<std::vector<double>>();
  const auto l2 = j.at("level2_upper_triangle").get<std::vector<double>>();
  RoughPoint p = RoughPoint::identity(l1.size());
  for (std::size_t i = 0; i < l1.size(); ++i) p.level1[static_cast<Eigen::Index>(i)] = l1[i];
  if (l2.size() != p.level2.n_components()) throw DimensionMismatch(p.level2.n_components(), l2.size());
  std::copy(l2.begin(), l2.end(), p.level2.upper().begin());
  return p;
}

}  // namespace roughwalk
