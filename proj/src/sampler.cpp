#include "roughwalk/sampler.hpp"

namespace roughwalk {

CompiledModel compile(const PeriodicGraphModel& model) {
  ensure_valid(model);
  CompiledModel cm;
  cm.dim = model.dim;
  cm.rank = model.rank();
  cm.n_cells = model.n_cells();
  cm.offsets.assign(cm.n_cells + 1, 0);
  for (std::size_t c = 0; c < cm.n_cells; ++c) {
    cm.offsets[c] = static_cast<std::uint32_t>(cm.to_cell.size());
    double cumulative = 0.0;
    for (const auto& t : model.transitions) {
      if (t.from_cell != c || t.prob == 0.0) continue;
      cumulative += t.prob;
      cm.cdf.push_back(cumulative);
      cm.to_cell.push_back(static_cast<std::uint32_t>(t.to_cell));
      for (Eigen::Index i = 0; i < t.delta_lattice.size(); ++i) cm.delta_lattice.push_back(t.delta_lattice[i]);
      const Vec inc = model.increment(t);
      for (Eigen::Index i = 0; i < inc.size(); ++i) cm.increment.push_back(inc[i]);
    }
    cm.max_degree = std::max(cm.max_degree, static_cast<std::uint32_t>(cm.to_cell.size()) - cm.offsets[c]);
  }
  cm.offsets[cm.n_cells] = static_cast<std::uint32_t>(cm.to_cell.size());
  for (const auto& cell : model.cells) {
    for (Eigen::Index i = 0; i < cell.size(); ++i) cm.cell_position.push_back(cell[i]);
  }
  for (Eigen::Index i = 0; i < model.lattice_basis.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.lattice_basis.cols(); ++j) {
      cm.basis.push_back(static_cast<double>(model.lattice_basis(i, j)));
    }
  }
  return cm;
}

void embed_flat(const CompiledModel& model, std::span<const std::int64_t> lattice, std::size_t cell,
                std::span<double> out) {
  for (std::size_t i = 0; i < model.dim; ++i) {
    double x = model.cell_position[cell * model.dim + i];
    for (std::size_t j = 0; j < model.rank; ++j) {
      x += model.basis[i * model.rank + j] * static_cast<double>(lattice[j]);
    }
    out[i] = x;
  }
}

std::vector<Vec> Trajectory::embedded() const {
  std::vector<Vec> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(embed(*model, p));
  return out;
}

Trajectory sample_trajectory(std::shared_ptr<const PeriodicGraphModel> model, const GraphPoint& start,
                             std::size_t n_steps, std::uint64_t seed, std::uint64_t trajectory_id) {
  const CompiledModel cm = compile(*model);
  if (start.cell >= cm.n_cells || static_cast<std::size_t>(start.lattice.size()) != cm.rank) {
    throw ModelError("start point does not belong to the model");
  }
  Trajectory traj{std::move(model), start, {}, seed, trajectory_id};
  traj.points.reserve(n_steps + 1);
  traj.points.push_back(start);
  UniformStream uniforms(walk_stream(seed, trajectory_id));
  GraphPoint current = start;
  for (std::size_t s = 0; s < n_steps; ++s) {
    const std::uint32_t t = cm.choose(current.cell, uniforms.next());
    for (std::size_t j = 0; j < cm.rank; ++j) {
      current.lattice[static_cast<Eigen::Index>(j)] += cm.delta_lattice[t * cm.rank + j];
    }
    current.cell = cm.to_cell[t];
    traj.points.push_back(current);
  }
  return traj;
}

GraphPoint Excursion::rel_point(std::size_t n) const {
  LatticeVec lambda(static_cast<Eigen::Index>(rank));
  for (std::size_t j = 0; j < rank; ++j) lambda[static_cast<Eigen::Index>(j)] = rel_lattice[n * rank + j];
  return {std::move(lambda), cells[n]};
}

std::vector<Vec> Excursion::path() const {
  std::vector<Vec> out;
  out.reserve(length + 1);
  for (std::size_t n = 0; n <= length; ++n) out.emplace_back(point(n));
  return out;
}

namespace {

void finish_excursion(Excursion& e, const Mat& basis) {
  e.lattice_displacement = e.rel_point(e.length).lattice;
  e.displacement = basis * e.lattice_displacement.cast<double>();
}

}  // namespace

ExcursionDecomposition decompose_excursions(const Trajectory& trajectory) {
  ExcursionDecomposition out;
  if (trajectory.points.empty()) throw InsufficientData("empty trajectory");
  const auto& model = *trajectory.model;
  const Mat basis = model.lattice_basis.cast<double>();
  const std::size_t home = trajectory.points.front().cell;
  const std::size_t r = model.rank();
  const std::size_t d = model.dim;

  out.times.push_back(0);
  for (std::size_t n = 1; n < trajectory.points.size(); ++n) {
    if (trajectory.points[n].cell == home) out.times.push_back(n);
  }
  for (std::size_t k = 0; k + 1 < out.times.size(); ++k) {
    Excursion e;
    e.index = k;
    e.start_time = out.times[k];
    e.length = static_cast<std::size_t>(out.times[k + 1] - out.times[k]);
    e.dim = d;
    e.rank = r;
    const LatticeVec& base = trajectory.points[out.times[k]].lattice;
    for (std::size_t n = 0; n <= e.length; ++n) {
      const GraphPoint& p = trajectory.points[e.start_time + n];
      const LatticeVec rel = p.lattice - base;
      for (std::size_t j = 0; j < r; ++j) e.rel_lattice.push_back(rel[static_cast<Eigen::Index>(j)]);
      e.cells.push_back(static_cast<std::uint32_t>(p.cell));
      const Vec x = embed(model, GraphPoint{rel, p.cell});
      for (std::size_t i = 0; i < d; ++i) e.rel_path.push_back(x[static_cast<Eigen::Index>(i)]);
    }
    finish_excursion(e, basis);
    out.excursions.push_back(std::move(e));
  }
  out.tail_start = out.times.back();
  out.tail.assign(trajectory.points.begin() + static_cast<std::ptrdiff_t>(out.tail_start),
                  trajectory.points.end());
  return out;
}

ExcursionStream::ExcursionStream(std::shared_ptr<const CompiledModel> model, std::size_t start_cell,
                                 std::uint64_t seed, std::uint64_t trajectory_id)
    : model_(std::move(model)), start_cell_(start_cell), uniforms_(walk_stream(seed, trajectory_id)) {
  if (start_cell_ >= model_->n_cells) throw ModelError("start cell out of range");
  current_.dim = model_->dim;
  current_.rank = model_->rank;
}

const Excursion& ExcursionStream::next() {
  const CompiledModel& cm = *model_;
  const std::size_t r = cm.rank;
  const std::size_t d = cm.dim;
  Excursion& e = current_;
  e.index = produced_++;
  e.start_time = time_;
  e.rel_lattice.assign(r, 0);
  e.cells.assign(1, static_cast<std::uint32_t>(start_cell_));
  e.rel_path.resize(d);
  embed_flat(cm, std::span<const std::int64_t>(e.rel_lattice.data(), r), start_cell_, e.rel_path);

  std::size_t cell = start_cell_;
  std::size_t n = 0;
  do {
    const std::uint32_t t = cm.choose(cell, uniforms_.next());
    e.rel_lattice.resize((n + 2) * r);
    for (std::size_t j = 0; j < r; ++j) {
      e.rel_lattice[(n + 1) * r + j] = e.rel_lattice[n * r + j] + cm.delta_lattice[t * r + j];
    }
    cell = cm.to_cell[t];
    e.cells.push_back(static_cast<std::uint32_t>(cell));
    e.rel_path.resize((n + 2) * d);
    embed_flat(cm, std::span<const std::int64_t>(e.rel_lattice.data() + (n + 1) * r, r), cell,
               std::span<double>(e.rel_path.data() + (n + 1) * d, d));
    ++n;
  } while (cell != start_cell_);
  e.length = n;
  time_ += n;

  e.lattice_displacement.resize(static_cast<Eigen::Index>(r));
  for (std::size_t j = 0; j < r; ++j) {
    e.lattice_displacement[static_cast<Eigen::Index>(j)] = e.rel_lattice[n * r + j];
  }
  e.displacement.resize(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    double x = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
      x += cm.basis[i * r + j] * static_cast<double>(e.rel_lattice[n * r + j]);
    }
    e.displacement[static_cast<Eigen::Index>(i)] = x;
  }
  return e;
}

}  // namespace roughwalk
