#include "roughwalk/stats.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace roughwalk {

MomentAccumulator::MomentAccumulator(std::size_t dim)
    : dim_(dim), shift_(dim, 0.0), sums_(dim * 4, 0.0), cross_(dim * dim, 0.0) {}

void MomentAccumulator::add(std::span<const double> x) {
  if (x.size() != dim_) throw DimensionMismatch(dim_, x.size());
  if (count_ == 0) shift_.assign(x.begin(), x.end());
  ++count_;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double y = x[i] - shift_[i];
    const double y2 = y * y;
    sums_[i * 4] += y;
    sums_[i * 4 + 1] += y2;
    sums_[i * 4 + 2] += y2 * y;
    sums_[i * 4 + 3] += y2 * y2;
    for (std::size_t j = 0; j < dim_; ++j) cross_[i * dim_ + j] += y * (x[j] - shift_[j]);
  }
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (o.dim_ != dim_) throw DimensionMismatch(dim_, o.dim_);
  if (o.count_ == 0) return;
  if (count_ == 0) {
    *this = o;
    return;
  }
  // Re-express o's sums around this shift: y = y' + δ.
  const double n = static_cast<double>(o.count_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double dl = o.shift_[i] - shift_[i];
    const double s1 = o.s(i, 1), s2 = o.s(i, 2), s3 = o.s(i, 3), s4 = o.s(i, 4);
    sums_[i * 4] += s1 + n * dl;
    sums_[i * 4 + 1] += s2 + 2.0 * dl * s1 + n * dl * dl;
    sums_[i * 4 + 2] += s3 + 3.0 * dl * s2 + 3.0 * dl * dl * s1 + n * dl * dl * dl;
    sums_[i * 4 + 3] += s4 + 4.0 * dl * s3 + 6.0 * dl * dl * s2 + 4.0 * dl * dl * dl * s1 + n * dl * dl * dl * dl;
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    const double di = o.shift_[i] - shift_[i];
    for (std::size_t j = 0; j < dim_; ++j) {
      const double dj = o.shift_[j] - shift_[j];
      cross_[i * dim_ + j] += o.cross_[i * dim_ + j] + di * o.s(j, 1) + dj * o.s(i, 1) + n * di * dj;
    }
  }
  count_ += o.count_;
}

double MomentAccumulator::mean(std::size_t i) const {
  return shift_[i] + s(i, 1) / static_cast<double>(count_);
}

double MomentAccumulator::central_moment(std::size_t i, int order) const {
  const double n = static_cast<double>(count_);
  const double m1 = s(i, 1) / n, m2 = s(i, 2) / n, m3 = s(i, 3) / n, m4 = s(i, 4) / n;
  switch (order) {
    case 2:
      return std::max(0.0, m2 - m1 * m1);
    case 3:
      return m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
    case 4:
      return std::max(0.0, m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1);
    default:
      throw OutOfRange("central moment order must be 2, 3 or 4");
  }
}

Eigen::MatrixXd MomentAccumulator::covariance() const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd c(d, d);
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cross_[i * dim_ + j] / n - (s(i, 1) / n) * (s(j, 1) / n);
    }
  }
  return c;
}

CumulantReport cumulants(const MomentAccumulator& acc) {
  if (acc.count() < 4) throw InsufficientCount("need at least 4 samples for fourth-order statistics");
  CumulantReport r;
  const double n = static_cast<double>(acc.count());
  for (std::size_t i = 0; i < acc.dim(); ++i) {
    Cumulants c;
    const double m2 = acc.central_moment(i, 2);
    const double m3 = acc.central_moment(i, 3);
    const double m4 = acc.central_moment(i, 4);
    c.mean = acc.mean(i);
    c.variance = m2;
    c.k3 = m3;
    c.k4 = m4 - 3.0 * m2 * m2;
    c.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : std::numeric_limits<double>::quiet_NaN();
    c.mean_se = std::sqrt(m2 / n);
    c.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    c.kurtosis_se = std::sqrt(24.0 / n);
    r.coords.push_back(c);
  }
  r.covariance = acc.covariance();
  return r;
}

Histogram::Histogram(double lower, double upper, std::size_t n_bins)
    : lower_(lower), upper_(upper), counts_(n_bins, 0) {
  if (!(upper > lower) || n_bins == 0) throw OutOfRange("histogram needs upper > lower and at least one bin");
}

double Histogram::bin_left(std::size_t b) const {
  return lower_ + (upper_ - lower_) * static_cast<double>(b) / static_cast<double>(counts_.size());
}

double Histogram::bin_right(std::size_t b) const { return bin_left(b + 1); }

void Histogram::add(double x) {
  if (std::isnan(x) || x < lower_) {
    ++underflow_;
    return;
  }
  if (x >= upper_) {
    ++overflow_;
    return;
  }
  auto b = static_cast<std::size_t>((x - lower_) / (upper_ - lower_) * static_cast<double>(counts_.size()));
  b = std::min(b, counts_.size() - 1);
  ++counts_[b];
}

void Histogram::merge(const Histogram& o) {
  if (o.lower_ != lower_ || o.upper_ != upper_ || o.counts_.size() != counts_.size()) {
    throw DimensionMismatch(counts_.size(), o.counts_.size());
  }
  for (std::size_t b = 0; b < counts_.size(); ++b) counts_[b] += o.counts_[b];
  underflow_ += o.underflow_;
  overflow_ += o.overflow_;
}

std::uint64_t Histogram::total() const {
  std::uint64_t t = underflow_ + overflow_;
  for (auto c : counts_) t += c;
  return t;
}

void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_left,bin_right,count\n" << std::setprecision(17);
  for (std::size_t b = 0; b < h.n_bins(); ++b) {
    os << h.bin_left(b) << ',' << h.bin_right(b) << ',' << h.counts()[b] << '\n';
  }
}

void write_statistics_csv(std::ostream& os, const std::vector<StatRow>& rows) {
  os << "name,coordinates,value,std_error\n" << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.name << ',' << r.coordinates << ',' << r.value << ',';
    if (!std::isnan(r.std_error)) os << r.std_error;
    os << '\n';
  }
}

std::vector<StatRow> statistic_rows(const CumulantReport& report, const std::string& prefix,
                                    const std::vector<std::string>& names) {
  std::vector<StatRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < report.coords.size(); ++i) {
    const auto& c = report.coords[i];
    const std::string& at = names.at(i);
    rows.push_back({prefix + "_mean", at, c.mean, c.mean_se});
    rows.push_back({prefix + "_variance", at, c.variance, c.variance_se});
    rows.push_back({prefix + "_std", at, std::sqrt(c.variance), c.variance > 0 ? c.variance_se / (2.0 * std::sqrt(c.variance)) : nan});
    rows.push_back({prefix + "_k3", at, c.k3, nan});
    rows.push_back({prefix + "_k4", at, c.k4, nan});
    rows.push_back({prefix + "_kurtosis", at, c.kurtosis, c.kurtosis_se});
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      rows.push_back({prefix + "_covariance", names[i] + ":" + names[j],
                      report.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), nan});
    }
  }
  return rows;
}

}  // namespace roughwalk
