#include <doctest.h>

#include <cmath>

#include "roughwalk/graph_core.hpp"
#include "support.hpp"

using namespace roughwalk;

namespace {

PeriodicGraphModel single_self_loop() {
  PeriodicGraphModel m;
  m.dim = 1;
  m.lattice_basis = LatticeBasis::Identity(1, 1);
  m.cells = {Vec::Zero(1)};
  m.transitions = {{0, LatticeVec::Zero(1), 0, 1.0}};
  return m;
}

LatticeVec lat(std::initializer_list<std::int64_t> xs) {
  LatticeVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("validate: rotating model is usable with R = 1") {
  for (double p : {0.1, 0.5, 0.9}) {
    const auto report = validate(rotating_model(p));
    CHECK(report.is_stochastic);
    CHECK(report.is_irreducible);
    CHECK(report.usable());
    CHECK(report.increment_bound_R == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("validate: single self-loop is usable with R = 0") {
  const auto report = validate(single_self_loop());
  CHECK(report.usable());
  CHECK(report.increment_bound_R == 0.0);
}

TEST_CASE("validate: raw cubic table is not stochastic at cell (1,0,1)") {
  const double u = 0.9, v = 0.1;
  const auto model = cubic_model_raw_table(u);
  const auto report = validate(model);
  CHECK_FALSE(report.is_stochastic);
  CHECK(report.row_sums[5] == doctest::Approx((2 * u + 4 * v) / 3).epsilon(1e-14));
  CHECK(report.row_sums[5] == doctest::Approx(0.7333333333333333).epsilon(1e-12));
  REQUIRE(report.messages.size() >= 1);
  CHECK(report.messages.front().find("cell 5") != std::string::npos);
  try {
    ensure_valid(model);
    FAIL("expected NotStochastic");
  } catch (const NotStochastic& e) {
    CHECK(e.cell == 5);
    CHECK(e.sum == doctest::Approx((2 * u + 4 * v) / 3));
  }
}

TEST_CASE("validate: corrected cubic model is usable and centrally symmetric") {
  const auto model = cubic_model(0.9);
  const auto report = validate(model, cubic_central_symmetry());
  CHECK(report.usable());
  REQUIRE(report.has_central_symmetry.has_value());
  CHECK(*report.has_central_symmetry);
  CHECK(report.increment_bound_R == 1.0);
  const auto raw = validate(cubic_model_raw_table(0.9), cubic_central_symmetry());
  CHECK_FALSE(*raw.has_central_symmetry);
}

TEST_CASE("validate: reducible and malformed models") {
  PeriodicGraphModel m;
  m.dim = 1;
  m.lattice_basis = LatticeBasis::Identity(1, 1) * 3;
  m.cells = {Vec::Zero(1), Vec::Ones(1)};
  m.transitions = {{0, lat({1}), 0, 1.0}, {1, lat({-1}), 1, 1.0}};
  const auto report = validate(m);
  CHECK(report.is_stochastic);
  CHECK_FALSE(report.is_irreducible);
  CHECK(report.classes.size() == 2);
  CHECK_THROWS_AS(ensure_valid(m), NotIrreducible);

  auto bad = single_self_loop();
  bad.transitions[0].to_cell = 3;
  CHECK_THROWS_AS(validate(bad), ModelError);
  bad = single_self_loop();
  bad.transitions[0].prob = -0.5;
  CHECK_THROWS_AS(validate(bad), ModelError);
  bad = single_self_loop();
  bad.cells.push_back(Vec::Ones(1));
  CHECK_THROWS_AS(validate(bad), ModelError);  // 0 and 1 coincide modulo Z
  bad = single_self_loop();
  bad.transitions[0].delta_lattice = lat({0, 0});
  CHECK_THROWS_AS(validate(bad), ModelError);
}

TEST_CASE("project_transition_law: rotating model is the cyclic shift") {
  const Mat q0 = project_transition_law(rotating_model(0.9));
  Mat shift = Mat::Zero(4, 4);
  for (int c = 0; c < 4; ++c) shift(c, (c + 1) % 4) = 1.0;
  CHECK(q0 == shift);
}

TEST_CASE("project_transition_law: single cell and cubic rows") {
  CHECK(project_transition_law(single_self_loop()) == Mat::Ones(1, 1));
  const auto model = cubic_model(0.9);
  const Mat q0 = project_transition_law(model);
  REQUIRE(q0.rows() == 8);
  for (Eigen::Index c = 0; c < 8; ++c) {
    double sum = 0.0;
    for (const auto& t : model.transitions) {
      if (static_cast<Eigen::Index>(t.from_cell) == c) sum += t.prob;
    }
    CHECK(q0.row(c).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("check_irreducible examples") {
  CHECK(check_irreducible(project_transition_law(rotating_model(0.3))).irreducible);
  const auto id = check_irreducible(Mat::Identity(2, 2));
  CHECK_FALSE(id.irreducible);
  REQUIRE(id.classes.size() == 2);
  CHECK(id.classes[0] == std::vector<std::size_t>{0});
  CHECK(id.classes[1] == std::vector<std::size_t>{1});
  CHECK(check_irreducible(project_transition_law(cubic_model(0.9))).irreducible);
}

TEST_CASE("embed examples") {
  const auto rot = rotating_model(0.9);
  CHECK(embed(rot, {lat({0, 0}), 0}) == Vec::Zero(2));
  CHECK(embed(rot, {lat({1, 0}), 1}) == (Vec(2) << 3, 0).finished());
  const auto cub = cubic_model(0.9);
  CHECK(embed(cub, {lat({1, 1, 1}), 2}) == (Vec(3) << 2, 3, 2).finished());
}

TEST_CASE("embed is additive in the lattice coordinate") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = static_cast<std::size_t>(testing::uniform_int(rng, 1, 4));
    const auto m = testing::random_model(rng, dim);
    const auto d = static_cast<Eigen::Index>(dim);
    LatticeVec lambda(d), mu(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      lambda[i] = testing::uniform_int(rng, -1000, 1000);
      mu[i] = testing::uniform_int(rng, -1000, 1000);
    }
    const auto cell = static_cast<std::size_t>(testing::uniform_int(rng, 0, static_cast<int>(m.n_cells()) - 1));
    const Vec lhs = embed(m, {LatticeVec(lambda + mu), cell});
    const Vec rhs = embed(m, {lambda, cell}) + m.lattice_basis.cast<double>() * mu.cast<double>();
    CHECK(lhs == rhs);
    const auto where = locate(m, lhs);
    REQUIRE(where.has_value());
    CHECK(where->cell == cell);
    CHECK(where->lattice == LatticeVec(lambda + mu));
  }
}

TEST_CASE("locate rejects points off the graph") {
  const auto rot = rotating_model(0.9);
  CHECK_FALSE(locate(rot, (Vec(2) << 0.5, 0).finished()).has_value());
  const auto where = locate(rot, (Vec(2) << -3, 5).finished());
  REQUIRE(where.has_value());
  CHECK(where->cell == 2);  // (1,1)
  CHECK(where->lattice == lat({-2, 2}));
}

TEST_CASE("whitening_transform examples") {
  CHECK((whitening_transform(Mat::Identity(3, 3)) - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((whitening_transform(4 * Mat::Identity(2, 2)) - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-15);
  const Mat m = whitening_transform(0.72 * Mat::Identity(2, 2));
  CHECK((m - Mat::Identity(2, 2) / std::sqrt(0.72)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("whitening_transform on random SPD matrices") {
  testing::Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dim = static_cast<std::size_t>(testing::uniform_int(rng, 1, 6));
    const Mat c = testing::random_spd(rng, dim);
    const Mat m = whitening_transform(c);
    const auto d = static_cast<Eigen::Index>(dim);
    CHECK((m * c * m.transpose() - Mat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(m.isLowerTriangular());
  }
}

TEST_CASE("whitening_transform rejects degenerate covariance") {
  Mat c(2, 2);
  c << 1, 1, 1, 1;
  try {
    whitening_transform(c);
    FAIL("expected DegenerateCovariance");
  } catch (const DegenerateCovariance& e) {
    CHECK(e.rank == 1);
    CHECK(e.dim == 2);
  }
}

TEST_CASE("builtin registry") {
  CHECK(builtin_model("rotating", {0.75, 0.9}).n_cells() == 4);
  CHECK(builtin_model("cubic", {0.9, 0.8}).n_cells() == 8);
  CHECK(builtin_model("simple", {}).n_cells() == 1);
  CHECK_THROWS_AS(builtin_model("nope", {}), ModelError);
  CHECK_THROWS_AS(rotating_model(0.0), std::domain_error);
  CHECK_THROWS_AS(cubic_model(1.0), std::domain_error);
}

TEST_CASE("random models are usable") {
  testing::Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = testing::random_model(rng, static_cast<std::size_t>(testing::uniform_int(rng, 1, 3)));
    CHECK(validate(m).usable());
  }
}
