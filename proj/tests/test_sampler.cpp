#include <doctest.h>

#include <cmath>
#include <memory>

#include "roughwalk/rough_algebra.hpp"
#include "roughwalk/sampler.hpp"
#include "support.hpp"

using namespace roughwalk;

namespace {

std::shared_ptr<const PeriodicGraphModel> shared(PeriodicGraphModel m) {
  return std::make_shared<const PeriodicGraphModel>(std::move(m));
}

GraphPoint origin(std::size_t rank, std::size_t cell = 0) {
  return {LatticeVec::Zero(static_cast<Eigen::Index>(rank)), cell};
}

void check_reconstruction(const Trajectory& traj, const ExcursionDecomposition& dec) {
  const auto& model = *traj.model;
  for (std::size_t k = 0; k < dec.excursions.size(); ++k) {
    const auto& e = dec.excursions[k];
    const GraphPoint& base = traj.points[dec.times[k]];
    for (std::size_t m = 0; m <= e.length; ++m) {
      const GraphPoint& x = traj.points[dec.times[k] + m];
      const GraphPoint rel = e.rel_point(m);
      CHECK(x.cell == rel.cell);
      CHECK(x.lattice == LatticeVec(base.lattice + rel.lattice));
      const Vec lhs = embed(model, x);
      const Vec rhs = model.lattice_basis.cast<double>() * base.lattice.cast<double>() + Vec(e.point(m));
      CHECK(lhs == rhs);
    }
  }
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniform stream layout and range") {
  const auto key = walk_stream(42, 7);
  UniformStream s(key);
  for (std::uint64_t i = 0; i < 64; ++i) {
    const double u = s.next();
    CHECK(u == block_uniform(stream_block(key, i / 2), static_cast<unsigned>(i % 2)));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  UniformStream offset(key, 33);
  UniformStream fresh(key);
  for (int i = 0; i < 33; ++i) fresh.next();
  CHECK(offset.next() == fresh.next());
  CHECK(bits_to_unit(0) == 0.0);
  CHECK(bits_to_unit(~std::uint64_t{0}) == 1.0 - std::ldexp(1.0, -52));
  CHECK(walk_stream(1, 5).stream != gaussian_stream(1, 5).stream);
}

TEST_CASE("Gaussian stream has unit variance") {
  GaussianStream g(gaussian_stream(3, 0));
  double s1 = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = g.next();
    s1 += z;
    s2 += z * z;
  }
  const double mean = s1 / n;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - mean * mean - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("sample_trajectory: zero steps gives the start point") {
  const auto traj = sample_trajectory(shared(rotating_model(0.9)), origin(2, 2), 0, 1);
  REQUIRE(traj.points.size() == 1);
  CHECK(traj.points[0] == origin(2, 2));
  CHECK(traj.n_steps() == 0);
}

TEST_CASE("sample_trajectory: rotating model projects to the cyclic shift") {
  const auto model = shared(rotating_model(0.9));
  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    const auto traj = sample_trajectory(model, origin(2), 200, seed);
    for (std::size_t n = 1; n < traj.points.size(); ++n) {
      CHECK(traj.points[n].cell == (traj.points[n - 1].cell + 1) % 4);
    }
  }
}

TEST_CASE("sample_trajectory is deterministic and follows positive transitions") {
  testing::Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto model = shared(testing::random_model(rng, 2));
    const auto a = sample_trajectory(model, origin(2), 300, 5, static_cast<std::uint64_t>(trial));
    const auto b = sample_trajectory(model, origin(2), 300, 5, static_cast<std::uint64_t>(trial));
    CHECK(a.points == b.points);
    for (std::size_t n = 1; n < a.points.size(); ++n) {
      bool found = false;
      for (const auto& t : model->transitions) {
        found |= t.prob > 0 && t.from_cell == a.points[n - 1].cell && t.to_cell == a.points[n].cell &&
                 LatticeVec(a.points[n - 1].lattice + t.delta_lattice) == a.points[n].lattice;
      }
      CHECK(found);
    }
  }
  const auto model = shared(rotating_model(0.5));
  CHECK(sample_trajectory(model, origin(2), 100, 1).points != sample_trajectory(model, origin(2), 100, 2).points);
}

TEST_CASE("decompose_excursions: rotating model") {
  const auto model = shared(rotating_model(0.9));
  const auto dec = decompose_excursions(sample_trajectory(model, origin(2), 12, 3));
  REQUIRE(dec.excursions.size() == 3);
  for (const auto& e : dec.excursions) CHECK(e.length == 4);
  CHECK(dec.times == std::vector<std::uint64_t>{0, 4, 8, 12});
  CHECK(dec.tail_length() == 0);

  const auto short_dec = decompose_excursions(sample_trajectory(model, origin(2), 2, 3));
  CHECK(short_dec.excursions.empty());
  CHECK(short_dec.tail_length() == 2);
}

TEST_CASE("decompose_excursions: reconstruction is exact on the cubic model") {
  const auto model = shared(cubic_model(0.9));
  for (std::uint64_t id = 0; id < 5; ++id) {
    const auto traj = sample_trajectory(model, origin(3, id % 8), 5000, 17, id);
    const auto dec = decompose_excursions(traj);
    CHECK(dec.excursions.size() > 100);
    for (const auto& e : dec.excursions) {
      CHECK(e.length >= 1);
      CHECK(e.cells.front() == traj.points[0].cell);
      CHECK(e.cells.back() == traj.points[0].cell);
      CHECK(Vec(e.point(0)) == model->cells[traj.points[0].cell]);
    }
    check_reconstruction(traj, dec);
  }
}

TEST_CASE("decompose_excursions: reconstruction and area decomposition on random models") {
  testing::Rng rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const auto dim = static_cast<std::size_t>(testing::uniform_int(rng, 2, 3));
    const auto model = shared(testing::random_model(rng, dim));
    const auto start = origin(dim, static_cast<std::size_t>(testing::uniform_int(rng, 0, static_cast<int>(model->n_cells()) - 1)));
    const auto traj = sample_trajectory(model, start, 400, 8, static_cast<std::uint64_t>(trial));
    const auto dec = decompose_excursions(traj);
    check_reconstruction(traj, dec);

    const auto pts = traj.embedded();
    const std::size_t tm = dec.tail_start;
    AreaMatrix sum(dim);
    std::vector<Vec> lambda_path;
    for (std::size_t k = 0; k < dec.times.size(); ++k) {
      lambda_path.push_back(model->lattice_basis.cast<double>() * traj.points[dec.times[k]].lattice.cast<double>());
    }
    for (const auto& e : dec.excursions) sum += discrete_area(e.path());
    sum += discrete_area(lambda_path);
    CHECK(discrete_area(std::span<const Vec>(pts).first(tm + 1)) == sum);
  }
}

TEST_CASE("decompose_excursions is translation invariant") {
  const auto model = shared(cubic_model(0.9));
  LatticeVec mu(3);
  mu << 5, -3, 12;
  const auto a = decompose_excursions(sample_trajectory(model, {LatticeVec::Zero(3), 2}, 3000, 4));
  const auto b = decompose_excursions(sample_trajectory(model, {mu, 2}, 3000, 4));
  REQUIRE(a.excursions.size() == b.excursions.size());
  for (std::size_t k = 0; k < a.excursions.size(); ++k) {
    CHECK(a.excursions[k].rel_path == b.excursions[k].rel_path);
    CHECK(a.excursions[k].rel_lattice == b.excursions[k].rel_lattice);
  }
}

TEST_CASE("excursion stream agrees with decomposition") {
  const auto pm = cubic_model(0.9);
  const auto cm = std::make_shared<const CompiledModel>(compile(pm));
  for (std::uint64_t id = 0; id < 4; ++id) {
    ExcursionStream stream(cm, 3, 21, id);
    const auto dec = decompose_excursions(sample_trajectory(shared(pm), origin(3, 3), 2000, 21, id));
    for (const auto& e : dec.excursions) {
      const auto& s = stream.next();
      CHECK(s.length == e.length);
      CHECK(s.start_time == e.start_time);
      CHECK(s.rel_path == e.rel_path);
      CHECK(s.rel_lattice == e.rel_lattice);
      CHECK(s.cells == e.cells);
      CHECK(s.displacement == e.displacement);
    }
  }
  ExcursionStream rot(std::make_shared<const CompiledModel>(compile(rotating_model(0.7))), 0, 1);
  for (int k = 0; k < 1000; ++k) CHECK(rot.next().length == 4);
  CHECK(rot.time() == 4000);
}

TEST_CASE("cubic model: two estimators of the mean return time agree") {
  const auto pm = cubic_model(0.9);
  const auto cm = std::make_shared<const CompiledModel>(compile(pm));
  ExcursionStream stream(cm, 0, 31);
  const int n_exc = 100000;
  double s1 = 0.0, s2 = 0.0;
  for (int k = 0; k < n_exc; ++k) {
    const double l = static_cast<double>(stream.next().length);
    s1 += l;
    s2 += l * l;
  }
  const double beta1 = s1 / n_exc;
  const double sd = std::sqrt(s2 / n_exc - beta1 * beta1);
  const std::size_t n = 1000000;
  const auto traj = sample_trajectory(std::make_shared<const PeriodicGraphModel>(pm), origin(3), n, 32);
  std::size_t returns = 0;
  for (std::size_t t = 1; t <= n; ++t) returns += traj.points[t].cell == 0;
  const double beta2 = static_cast<double>(n) / static_cast<double>(returns);
  const double se = std::hypot(sd / std::sqrt(n_exc), sd / std::sqrt(static_cast<double>(returns)));
  CHECK(std::abs(beta1 - beta2) < 3 * se);
  CHECK(std::abs(beta1 - 9.0) < 3 * sd / std::sqrt(n_exc));
  // κ(n)/n → 1/β.
  CHECK(std::abs(static_cast<double>(returns) / n - 1.0 / beta1) < 0.01);
}

TEST_CASE("rotating model: successive excursion displacements are uncorrelated") {
  ExcursionStream stream(std::make_shared<const CompiledModel>(compile(rotating_model(0.9))), 0, 51);
  const int n = 100000;
  std::vector<double> x(n + 1);
  for (auto& xi : x) xi = stream.next().displacement[0];
  double mx = 0, my = 0;
  for (int k = 0; k < n; ++k) {
    mx += x[k];
    my += x[k + 1];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (int k = 0; k < n; ++k) {
    sxy += (x[k] - mx) * (x[k + 1] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (x[k + 1] - my) * (x[k + 1] - my);
  }
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 3.0 / std::sqrt(n));
}

TEST_CASE("compile drops zero-probability transitions and rejects invalid models") {
  auto m = rotating_model(0.9);
  m.transitions.push_back({0, LatticeVec::Zero(2), 0, 0.0});
  const auto cm = compile(m);
  CHECK(cm.offsets.back() == 8);
  CHECK(cm.max_degree == 2);
  CHECK_THROWS_AS(compile(cubic_model_raw_table(0.9)), NotStochastic);
}
