#pragma once

// Level-2 rough-path algebra: signed area, the group G²(E) with the Chen
// product, dilations, a homogeneous norm and the Donsker embedding.
//
// Area convention: A^{ij} = ½ Σ_{k<l} (Δx^i_k Δx^j_l − Δx^j_k Δx^i_l), so a
// counterclockwise unit square in the (i,j) plane, i<j, has area +1.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "roughwalk/graph_core.hpp"

namespace roughwalk {

/// Antisymmetric d×d matrix stored as its strict upper triangle, row-major.
class AreaMatrix {
 public:
  AreaMatrix() = default;
  explicit AreaMatrix(std::size_t dim) : dim_(dim), upper_(dim * (dim - (dim > 0 ? 1 : 0)) / 2, 0.0) {}

  /// Antisymmetric part of a square matrix: (M − Mᵀ)/2.
  static AreaMatrix from_dense(const Mat& m);

  std::size_t dim() const { return dim_; }
  std::size_t n_components() const { return upper_.size(); }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return i < j ? upper_[slot(i, j)] : -upper_[slot(j, i)];
  }
  /// Adds `value` at (i,j) and −value at (j,i).
  void add(std::size_t i, std::size_t j, double value) {
    if (i == j) return;
    if (i < j) {
      upper_[slot(i, j)] += value;
    } else {
      upper_[slot(j, i)] -= value;
    }
  }
  void set(std::size_t i, std::size_t j, double value) {
    if (i == j) return;
    if (i < j) {
      upper_[slot(i, j)] = value;
    } else {
      upper_[slot(j, i)] = -value;
    }
  }

  std::span<const double> upper() const { return upper_; }
  std::span<double> upper() { return upper_; }

  Mat dense() const;

  AreaMatrix& operator+=(const AreaMatrix& o);
  AreaMatrix& operator-=(const AreaMatrix& o);
  AreaMatrix& operator*=(double s);
  friend AreaMatrix operator+(AreaMatrix a, const AreaMatrix& b) { return a += b; }
  friend AreaMatrix operator-(AreaMatrix a, const AreaMatrix& b) { return a -= b; }
  friend AreaMatrix operator*(AreaMatrix a, double s) { return a *= s; }
  friend AreaMatrix operator*(double s, AreaMatrix a) { return a *= s; }
  friend bool operator==(const AreaMatrix& a, const AreaMatrix& b) {
    return a.dim_ == b.dim_ && a.upper_ == b.upper_;
  }

  double max_abs() const;

  /// Index of (i,j), i<j, in the upper-triangle storage.
  static std::size_t slot_of(std::size_t dim, std::size_t i, std::size_t j) {
    return i * (2 * dim - i - 1) / 2 + (j - i - 1);
  }

 private:
  std::size_t slot(std::size_t i, std::size_t j) const { return slot_of(dim_, i, j); }

  std::size_t dim_ = 0;
  std::vector<double> upper_;
};

/// Element of G²(E): increment plus signed area.
struct RoughPoint {
  Vec level1;
  AreaMatrix level2;

  static RoughPoint identity(std::size_t dim) { return {Vec::Zero(static_cast<Eigen::Index>(dim)), AreaMatrix(dim)}; }
  std::size_t dim() const { return static_cast<std::size_t>(level1.size()); }
};

/// Incremental area of a path, one point at a time, in O(d²) per point.
class AreaAccumulator {
 public:
  explicit AreaAccumulator(const Vec& origin);

  void push(const Vec& point);
  /// Appends a raw increment.
  void push_increment(const Vec& delta);

  const AreaMatrix& area() const { return area_; }
  /// Current position minus origin.
  const Vec& displacement() const { return displacement_; }
  RoughPoint signature() const { return {displacement_, area_}; }

 private:
  Vec origin_;
  Vec displacement_;
  AreaMatrix area_;
};

AreaMatrix discrete_area(std::span<const Vec> points);

/// Areas A_0..A_{n} of every prefix of `points`.
std::vector<AreaMatrix> area_sequence(std::span<const Vec> points);

/// (x_t − x_s, area of points[s..t]).
RoughPoint path_signature(std::span<const Vec> points, std::size_t s, std::size_t t);

RoughPoint chen_product(const RoughPoint& a, const RoughPoint& b);

RoughPoint inverse(const RoughPoint& a);

RoughPoint dilate(const RoughPoint& a, double eps);

/// Operator 2-norm of an antisymmetric matrix.
double operator_norm(const AreaMatrix& a);

/// max(‖level1‖, ‖level2‖_op^{1/2}); homogeneous under dilate.
double homogeneous_norm(const RoughPoint& a);

/// Piecewise-linear embedding at scale N evaluated at time t.
RoughPoint donsker_embed(std::span<const Vec> base, std::span<const AreaMatrix> areas,
                         std::size_t n_scale, double t);

/// M·A·Mᵀ: the area of the mapped path x ↦ Mx.
AreaMatrix area_linear_transform(const AreaMatrix& a, const Mat& m);

nlohmann::json to_json(const RoughPoint& p);
RoughPoint rough_point_from_json(const nlohmann::json& j);

}  // namespace roughwalk
