#include "roughwalk/errors.hpp"

#include <sstream>

namespace roughwalk {

namespace {

std::string describe_classes(const std::vector<std::vector<std::size_t>>& classes) {
  std::ostringstream os;
  os << "projected chain is not irreducible; communicating classes:";
  for (const auto& c : classes) {
    os << " {";
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << "}";
  }
  return os.str();
}

}  // namespace

NotStochastic::NotStochastic(std::size_t cell_, double sum_)
    : Error("transition probabilities of cell " + std::to_string(cell_) + " sum to " +
            std::to_string(sum_) + ", not 1"),
      cell(cell_),
      sum(sum_) {}

NotIrreducible::NotIrreducible(std::vector<std::vector<std::size_t>> classes_)
    : Error(describe_classes(classes_)), classes(std::move(classes_)) {}

DegenerateCovariance::DegenerateCovariance(std::size_t rank_, std::size_t dim_)
    : Error("degenerate covariance: rank " + std::to_string(rank_) + " < dimension " +
            std::to_string(dim_)),
      rank(rank_),
      dim(dim_) {}

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t got)
    : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
            std::to_string(got)) {}

NonFinite::NonFinite(std::size_t step_, double value_)
    : Error("state became non-finite at step " + std::to_string(step_)), step(step_), value(value_) {}

}  // namespace roughwalk
