#include "roughwalk/graph_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace roughwalk {

namespace {

constexpr double kLatticeSolveTolerance = 1e-9;

// Solves B·λ = x for integer λ; nullopt when x ∉ Λ.
std::optional<LatticeVec> solve_lattice(const LatticeBasis& basis, const Vec& x) {
  const std::size_t r = static_cast<std::size_t>(basis.cols());
  if (r == 0) {
    if (x.cwiseAbs().maxCoeff() < kLatticeSolveTolerance) return LatticeVec(0);
    return std::nullopt;
  }
  const Mat b = basis.cast<double>();
  const Vec sol = b.colPivHouseholderQr().solve(x);
  LatticeVec lambda(static_cast<Eigen::Index>(r));
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    lambda[i] = static_cast<std::int64_t>(std::llround(sol[i]));
  }
  const Vec back = b * lambda.cast<double>();
  if ((back - x).cwiseAbs().maxCoeff() > kLatticeSolveTolerance) return std::nullopt;
  return lambda;
}

void tarjan(std::size_t v, const Mat& q0, std::vector<int>& index, std::vector<int>& low,
            std::vector<bool>& on_stack, std::vector<std::size_t>& stack, int& counter,
            std::vector<std::vector<std::size_t>>& out) {
  index[v] = low[v] = counter++;
  stack.push_back(v);
  on_stack[v] = true;
  for (Eigen::Index w = 0; w < q0.cols(); ++w) {
    if (q0(static_cast<Eigen::Index>(v), w) <= 0.0) continue;
    const auto wu = static_cast<std::size_t>(w);
    if (index[wu] < 0) {
      tarjan(wu, q0, index, low, on_stack, stack, counter, out);
      low[v] = std::min(low[v], low[wu]);
    } else if (on_stack[wu]) {
      low[v] = std::min(low[v], index[wu]);
    }
  }
  if (low[v] == index[v]) {
    std::vector<std::size_t> component;
    std::size_t w = 0;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack[w] = false;
      component.push_back(w);
    } while (w != v);
    std::sort(component.begin(), component.end());
    out.push_back(std::move(component));
  }
}

}  // namespace

Vec PeriodicGraphModel::increment(const Transition& t) const {
  return cells[t.to_cell] + lattice_basis.cast<double>() * t.delta_lattice.cast<double>() -
         cells[t.from_cell];
}

void check_well_formed(const PeriodicGraphModel& model) {
  if (model.dim == 0) throw ModelError("model dimension must be positive");
  if (static_cast<std::size_t>(model.lattice_basis.rows()) != model.dim) {
    throw ModelError("lattice basis must have dim_E rows");
  }
  if (model.rank() > 0) {
    Eigen::FullPivLU<Mat> lu(model.lattice_basis.cast<double>());
    if (static_cast<std::size_t>(lu.rank()) != model.rank()) {
      throw ModelError("lattice basis columns are linearly dependent");
    }
  }
  if (model.cells.empty()) throw ModelError("model has no cells");
  for (std::size_t c = 0; c < model.cells.size(); ++c) {
    if (static_cast<std::size_t>(model.cells[c].size()) != model.dim) {
      throw ModelError("cell " + std::to_string(c) + " has wrong dimension");
    }
  }
  for (std::size_t i = 0; i < model.transitions.size(); ++i) {
    const auto& t = model.transitions[i];
    const std::string where = "transition " + std::to_string(i);
    if (t.from_cell >= model.n_cells() || t.to_cell >= model.n_cells()) {
      throw ModelError(where + " references a cell out of range");
    }
    if (static_cast<std::size_t>(t.delta_lattice.size()) != model.rank()) {
      throw ModelError(where + " has a lattice delta of wrong rank");
    }
    if (!(t.prob >= 0.0) || !(t.prob <= 1.0)) {
      throw ModelError(where + " has a probability outside [0,1]");
    }
  }
  for (std::size_t a = 0; a < model.cells.size(); ++a) {
    for (std::size_t b = a + 1; b < model.cells.size(); ++b) {
      if (solve_lattice(model.lattice_basis, model.cells[b] - model.cells[a])) {
        throw ModelError("cells " + std::to_string(a) + " and " + std::to_string(b) +
                         " coincide modulo the lattice");
      }
    }
  }
}

Mat project_transition_law(const PeriodicGraphModel& model) {
  const auto n = static_cast<Eigen::Index>(model.n_cells());
  Mat q0 = Mat::Zero(n, n);
  for (const auto& t : model.transitions) {
    q0(static_cast<Eigen::Index>(t.from_cell), static_cast<Eigen::Index>(t.to_cell)) += t.prob;
  }
  return q0;
}

IrreducibilityResult check_irreducible(const Mat& q0) {
  const auto n = static_cast<std::size_t>(q0.rows());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> classes;
  int counter = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) tarjan(v, q0, index, low, on_stack, stack, counter, classes);
  }
  std::sort(classes.begin(), classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  IrreducibilityResult result;
  result.irreducible = classes.size() == 1;
  result.classes = std::move(classes);
  return result;
}

ValidationReport validate(const PeriodicGraphModel& model,
                          const std::optional<CentralSymmetry>& symmetry) {
  check_well_formed(model);
  ValidationReport report;

  const Mat q0 = project_transition_law(model);
  report.is_stochastic = true;
  for (Eigen::Index c = 0; c < q0.rows(); ++c) {
    // Summed in model-file order, not from q0, so the reported sum is the one an author sees.
    double sum = 0.0;
    for (const auto& t : model.transitions) {
      if (static_cast<Eigen::Index>(t.from_cell) == c) sum += t.prob;
    }
    report.row_sums.push_back(sum);
    if (std::abs(sum - 1.0) > kStochasticTolerance) {
      report.is_stochastic = false;
      std::ostringstream os;
      os << "NotStochastic: cell " << c << " probabilities sum to " << sum;
      report.messages.push_back(os.str());
    }
  }

  const auto irr = check_irreducible(q0);
  report.is_irreducible = irr.irreducible;
  report.classes = irr.classes;
  if (!irr.irreducible) report.messages.push_back(NotIrreducible(irr.classes).what());

  for (const auto& t : model.transitions) {
    report.increment_bound_R = std::max(report.increment_bound_R, model.increment(t).norm());
  }

  if (symmetry) {
    if (symmetry->partner.size() != model.n_cells()) {
      throw ModelError("central symmetry map must cover every cell");
    }
    // Aggregate prob per (cell, increment) on a fine grid so that equal jumps compare equal.
    using Key = std::pair<std::size_t, std::vector<std::int64_t>>;
    std::map<Key, double> law;
    auto key_of = [](std::size_t cell, const Vec& inc) {
      std::vector<std::int64_t> k(static_cast<std::size_t>(inc.size()));
      for (Eigen::Index i = 0; i < inc.size(); ++i) {
        k[static_cast<std::size_t>(i)] = std::llround(inc[i] * 1e9);
      }
      return Key{cell, k};
    };
    for (const auto& t : model.transitions) law[key_of(t.from_cell, model.increment(t))] += t.prob;
    bool symmetric = true;
    for (const auto& [key, prob] : law) {
      std::vector<std::int64_t> mirrored = key.second;
      for (auto& x : mirrored) x = -x;
      const auto it = law.find(Key{symmetry->partner[key.first], mirrored});
      const double other = it == law.end() ? 0.0 : it->second;
      if (std::abs(other - prob) > kStochasticTolerance) {
        symmetric = false;
        std::ostringstream os;
        os << "central symmetry broken at cell " << key.first << ": " << prob << " vs " << other
           << " at cell " << symmetry->partner[key.first];
        report.messages.push_back(os.str());
      }
    }
    report.has_central_symmetry = symmetric;
  }
  return report;
}

void ensure_valid(const PeriodicGraphModel& model) {
  const auto report = validate(model);
  for (std::size_t c = 0; c < report.row_sums.size(); ++c) {
    if (std::abs(report.row_sums[c] - 1.0) > kStochasticTolerance) {
      throw NotStochastic(c, report.row_sums[c]);
    }
  }
  if (!report.is_irreducible) throw NotIrreducible(report.classes);
}

Vec embed(const PeriodicGraphModel& model, const GraphPoint& point) {
  return model.lattice_basis.cast<double>() * point.lattice.cast<double>() + model.cells[point.cell];
}

std::optional<GraphPoint> locate(const PeriodicGraphModel& model, const Vec& x) {
  for (std::size_t c = 0; c < model.n_cells(); ++c) {
    if (auto lambda = solve_lattice(model.lattice_basis, x - model.cells[c])) {
      return GraphPoint{std::move(*lambda), c};
    }
  }
  return std::nullopt;
}

Mat whitening_transform(const Mat& covariance) {
  if (covariance.rows() != covariance.cols()) {
    throw DimensionMismatch(static_cast<std::size_t>(covariance.rows()),
                            static_cast<std::size_t>(covariance.cols()));
  }
  const auto d = static_cast<std::size_t>(covariance.rows());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, covariance.cwiseAbs().maxCoeff())) {
    throw ModelError("covariance matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(covariance, Eigen::EigenvaluesOnly);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()[i] > 1e-12) ++rank;
  }
  if (rank < d) throw DegenerateCovariance(rank, d);
  const Eigen::LLT<Mat> llt(covariance);
  const Mat lower = llt.matrixL();
  return lower.triangularView<Eigen::Lower>().solve(Mat::Identity(covariance.rows(), covariance.cols()));
}

// Built-in models -------------------------------------------------------------

namespace {

void add_jump(PeriodicGraphModel& model, std::size_t from, const Vec& step, double prob) {
  const Vec target = model.cells[from] + step;
  const auto where = locate(model, target);
  if (!where) throw ModelError("built-in model jump leaves the graph");
  model.transitions.push_back(Transition{from, where->lattice, where->cell, prob});
}

Vec vec2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec vec3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

void require_open_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in (0,1)");
  }
}

// Rows in table order: (+e1, -e1, +e2, -e2, +e3, -e3).
using CubicTable = std::vector<std::array<double, 6>>;

PeriodicGraphModel cubic_from_table(const CubicTable& table) {
  PeriodicGraphModel m;
  m.dim = 3;
  m.lattice_basis = 2 * LatticeBasis::Identity(3, 3);
  m.cells = {vec3(0, 0, 0), vec3(1, 0, 0), vec3(0, 1, 0), vec3(1, 1, 0),
             vec3(0, 0, 1), vec3(1, 0, 1), vec3(0, 1, 1), vec3(1, 1, 1)};
  for (std::size_t c = 0; c < table.size(); ++c) {
    for (int k = 0; k < 3; ++k) {
      for (int s = 0; s < 2; ++s) {
        const double prob = table[c][static_cast<std::size_t>(2 * k + s)];
        if (prob == 0.0) continue;
        Vec step = Vec::Zero(3);
        step[k] = s == 0 ? 1.0 : -1.0;
        add_jump(m, c, step, prob);
      }
    }
  }
  return m;
}

CubicTable cubic_table(double u, bool corrected) {
  const double v = 1.0 - u;
  CubicTable t = {
      {u / 2, v / 2, u / 2, v / 2, 0, 0},          // (0,0,0)
      {0, 0, u / 2, v / 2, u / 2, v / 2},          // (1,0,0)
      {u / 3, v / 3, v / 3, u / 3, u / 3, v / 3},  // (0,1,0)
      {v / 2, u / 2, 0, 0, u / 2, v / 2},          // (1,1,0)
      {u / 2, v / 2, 0, 0, v / 2, u / 2},          // (0,0,1)
      {v / 3, v / 3, u / 3, v / 3, v / 3, u / 3},  // (1,0,1) as printed
      {0, 0, v / 2, u / 2, v / 2, u / 2},          // (0,1,1)
      {v / 2, u / 2, v / 2, u / 2, 0, 0},          // (1,1,1)
  };
  // Mirror of cell (0,1,0)'s +e1 entry under x ↦ x+(1,1,1), δ ↦ −δ.
  if (corrected) t[5][1] = u / 3;
  return t;
}

}  // namespace

PeriodicGraphModel rotating_model(double p) {
  require_open_unit(p, "p");
  PeriodicGraphModel m;
  m.dim = 2;
  m.lattice_basis = 2 * LatticeBasis::Identity(2, 2);
  m.cells = {vec2(0, 0), vec2(1, 0), vec2(1, 1), vec2(0, 1)};
  const Vec directions[4] = {vec2(1, 0), vec2(0, 1), vec2(-1, 0), vec2(0, -1)};
  for (std::size_t c = 0; c < 4; ++c) {
    add_jump(m, c, directions[c], p);
    add_jump(m, c, -directions[c], 1.0 - p);
  }
  return m;
}

PeriodicGraphModel simple_walk_model() {
  PeriodicGraphModel m;
  m.dim = 2;
  m.lattice_basis = LatticeBasis::Identity(2, 2);
  m.cells = {vec2(0, 0)};
  for (const Vec& step : {vec2(1, 0), vec2(0, 1), vec2(-1, 0), vec2(0, -1)}) {
    add_jump(m, 0, step, 0.25);
  }
  return m;
}

PeriodicGraphModel cubic_model(double u) {
  require_open_unit(u, "u");
  return cubic_from_table(cubic_table(u, true));
}

PeriodicGraphModel cubic_model_raw_table(double u) {
  require_open_unit(u, "u");
  return cubic_from_table(cubic_table(u, false));
}

CentralSymmetry cubic_central_symmetry() {
  // Cells are indexed by the bits (x, y, z) = (c&1, c>>1&1, c>>2&1); flipping all three is c^7.
  CentralSymmetry s;
  for (std::size_t c = 0; c < 8; ++c) s.partner.push_back(c ^ 7U);
  return s;
}

PeriodicGraphModel builtin_model(const std::string& name, const ModelParameters& params) {
  if (name == "rotating") return rotating_model(params.p);
  if (name == "cubic") return cubic_model(params.u);
  if (name == "cubic-raw") return cubic_model_raw_table(params.u);
  if (name == "simple") return simple_walk_model();
  throw ModelError("unknown built-in model '" + name + "'");
}

std::vector<std::string> builtin_model_names() { return {"rotating", "cubic", "cubic-raw", "simple"}; }

}  // namespace roughwalk
