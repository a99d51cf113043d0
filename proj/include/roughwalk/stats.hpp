#pragma once

// Mergeable streaming moments up to order four, cumulants, histograms and
// their CSV forms.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roughwalk/errors.hpp"

namespace roughwalk {

/// Power sums of (x − shift) with the shift fixed to the first sample.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t dim = 1);

  void add(std::span<const double> sample);
  void add(double x) { add(std::span<const double>(&x, 1)); }
  void merge(const MomentAccumulator& other);

  std::size_t dim() const { return dim_; }
  std::uint64_t count() const { return count_; }

  double mean(std::size_t i) const;
  /// Population central moment of order 2..4.
  double central_moment(std::size_t i, int order) const;
  /// Population covariance.
  Eigen::MatrixXd covariance() const;

 private:
  double s(std::size_t i, int order) const { return sums_[i * 4 + static_cast<std::size_t>(order - 1)]; }

  std::size_t dim_;
  std::uint64_t count_ = 0;
  std::vector<double> shift_;
  std::vector<double> sums_;   // dim × 4: Σ y, Σ y², Σ y³, Σ y⁴
  std::vector<double> cross_;  // dim × dim: Σ y_i y_j
};

struct Cumulants {
  double mean = 0.0;
  double variance = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double kurtosis = 0.0;  // m₄/m₂², NaN when the variance vanishes
  double mean_se = 0.0;
  double variance_se = 0.0;
  double kurtosis_se = 0.0;  // √(24/n), the Gaussian reference value
};

struct CumulantReport {
  std::vector<Cumulants> coords;
  Eigen::MatrixXd covariance;
};

/// Throws InsufficientCount below 4 samples.
CumulantReport cumulants(const MomentAccumulator& acc);

class Histogram {
 public:
  Histogram(double lower, double upper, std::size_t n_bins);

  void add(double x);
  void merge(const Histogram& other);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  std::size_t n_bins() const { return counts_.size(); }
  double bin_left(std::size_t b) const;
  double bin_right(std::size_t b) const;
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t underflow() const { return underflow_; }
  std::uint64_t overflow() const { return overflow_; }
  std::uint64_t total() const;

 private:
  double lower_;
  double upper_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t underflow_ = 0;
  std::uint64_t overflow_ = 0;
};

/// bin_left,bin_right,count
void write_histogram_csv(std::ostream& os, const Histogram& h);

struct StatRow {
  std::string name;
  std::string coordinates;
  double value = 0.0;
  double std_error = 0.0;  // NaN when undefined
};

/// name,coordinates,value,std_error
void write_statistics_csv(std::ostream& os, const std::vector<StatRow>& rows);

/// Rows for every coordinate of a cumulant report; `prefix` names the variable.
std::vector<StatRow> statistic_rows(const CumulantReport& report, const std::string& prefix,
                                    const std::vector<std::string>& coordinate_names);

}  // namespace roughwalk
