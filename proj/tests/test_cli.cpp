#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "roughwalk/cli.hpp"
#include "roughwalk/io.hpp"

using namespace roughwalk;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("roughwalk_cli_" + name + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const std::string kRawTable = std::string(ROUGHWALK_TEST_DATA) + "/cubic_raw_table.json";

}  // namespace

TEST_CASE("validate exit codes") {
  CHECK(cli({"validate", "--model", "rotating", "--p", "0.9"}).code == kExitOk);
  CHECK(cli({"validate", "--model", "cubic", "--u", "0.9"}).code == kExitOk);
  const auto raw = cli({"validate", "--model-file", kRawTable});
  CHECK(raw.code == kExitInvalid);
  CHECK(raw.out.find("NotStochastic") != std::string::npos);
  CHECK(raw.out.find("cell 5") != std::string::npos);
  const auto js = cli({"validate", "--model", "cubic", "--u", "0.9", "--format", "json"});
  CHECK(js.code == kExitOk);
  const auto j = nlohmann::json::parse(js.out);
  CHECK(j["is_stochastic"] == true);
  CHECK(j["is_irreducible"] == true);
}

TEST_CASE("raw table file round-trips through the model reader") {
  const auto m = load_model(kRawTable);
  CHECK(m.n_cells() == 8);
  CHECK(model_to_json(m) == model_to_json(cubic_model_raw_table(0.9)));
  CHECK(model_to_json(model_from_json(model_to_json(cubic_model(0.9)))) == model_to_json(cubic_model(0.9)));
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"dim_E": 2})")), ModelError);
}

TEST_CASE("usage errors exit with status 1") {
  CHECK(cli({}).code == kExitInvalid);
  CHECK(cli({"frobnicate"}).code == kExitInvalid);
  CHECK(cli({"validate", "--model", "nope"}).code == kExitInvalid);
  CHECK(cli({"validate", "--model", "rotating", "--model-file", kRawTable}).code == kExitInvalid);
  CHECK(cli({"estimate-anomaly", "--model", "rotating", "--p", "1.5"}).code == kExitInvalid);
  CHECK(cli({"validate", "--model-file", "/nonexistent/model.json"}).code == kExitInvalid);
  CHECK(cli({"estimate-anomaly", "--model", "cubic-raw"}).code == kExitInvalid);
}

TEST_CASE("numerical failures exit with status 2") {
  const auto dir = scratch("degenerate");
  const fs::path file = dir / "flat.json";
  std::ofstream(file) << R"({"dim_E": 2, "lattice_basis": [[1, 0], [0, 1]], "cells": [[0, 0]],
    "transitions": [{"from_cell": 0, "delta_lattice": [1, 0], "to_cell": 0, "prob": 0.5},
                    {"from_cell": 0, "delta_lattice": [-1, 0], "to_cell": 0, "prob": 0.5}]})";
  CHECK(cli({"validate", "--model-file", file.string()}).code == kExitOk);
  const auto r = cli({"estimate-anomaly", "--model-file", file.string(), "--excursions", "1000"});
  CHECK(r.code == kExitNumerical);
  CHECK(r.err.find("degenerate covariance") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("estimate-anomaly sweeps write one row per parameter") {
  const auto r = cli({"estimate-anomaly", "--model", "rotating", "--p", "0.5", "0.75", "0.9", "--excursions", "2000"});
  REQUIRE(r.code == kExitOk);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].rfind("label,parameter,", 0) == 0);
  CHECK(lines[1].rfind("rotating,0.5,2000,4,", 0) == 0);
  CHECK(lines[2].rfind("rotating,0.75,", 0) == 0);
  CHECK(lines[3].rfind("rotating,0.9,", 0) == 0);

  const auto js = cli({"estimate-anomaly", "--model", "cubic", "--u", "0.9", "--excursions", "5000", "--format", "json"});
  REQUIRE(js.code == kExitOk);
  const auto j = nlohmann::json::parse(js.out)["report"];
  CHECK(j["dim"] == 3);
  CHECK(j["n_excursions"] == 5000);
  CHECK(j["gamma"][0][1].get<double>() > 0);
  CHECK(j["gamma"][2][0].get<double>() < 0);
}

TEST_CASE("estimate-anomaly does not depend on the worker count") {
  const std::vector<std::string> base = {"estimate-anomaly", "--model", "cubic", "--u", "0.9", "--excursions", "20000",
                                         "--seed", "7", "--format", "json"};
  auto with = [&](const std::string& w) {
    auto args = base;
    args.insert(args.end(), {"--workers", w});
    const auto r = cli(args);
    REQUIRE(r.code == kExitOk);
    return nlohmann::json::parse(r.out)["report"];
  };
  const auto ref = with("1");
  for (const char* w : {"2", "8"}) {
    const auto j = with(w);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double x = ref["gamma"][a][b].get<double>(), y = j["gamma"][a][b].get<double>();
        CHECK(std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(x)));
      }
    }
  }
}

TEST_CASE("simulate writes histograms and statistics") {
  const auto dir = scratch("simulate");
  const auto r = cli({"simulate", "--model", "rotating", "--p", "0.9", "--steps", "400", "--trajectories", "300", "--out",
                      dir.string(), "--dump-trajectories", "2", "--dump-excursions", "--dump-endpoints", "--bins", "40"});
  REQUIRE(r.code == kExitOk);
  for (const char* f : {"hist_coord_0.csv", "hist_coord_1.csv", "hist_area_01.csv", "statistics.csv",
                        "trajectory_0.csv", "trajectory_1.csv", "excursions.csv", "endpoints.csv"}) {
    CHECK(fs::exists(dir / f));
  }
  const auto hist = lines_of(slurp(dir / "hist_coord_0.csv"));
  CHECK(hist.front() == "bin_left,bin_right,count");
  CHECK(hist.size() == 41);
  const auto stats = lines_of(slurp(dir / "statistics.csv"));
  CHECK(stats.front() == "name,coordinates,value,std_error");
  CHECK(slurp(dir / "statistics.csv").find("area_variance,01,") != std::string::npos);
  const auto traj = lines_of(slurp(dir / "trajectory_0.csv"));
  CHECK(traj.front() == "step,lattice_0,lattice_1,cell,x_0,x_1");
  CHECK(traj.size() == 402);
  const auto exc = lines_of(slurp(dir / "excursions.csv"));
  CHECK(exc.front() == "k,T_k,L_k,displacement_0,displacement_1,area_01");
  CHECK(exc.size() == 101);
  CHECK(lines_of(slurp(dir / "endpoints.csv")).size() == 301);

  const auto dir2 = scratch("simulate_workers");
  REQUIRE(cli({"simulate", "--model", "rotating", "--p", "0.9", "--steps", "400", "--trajectories", "300", "--out",
               dir2.string(), "--bins", "40", "--workers", "8", "--kernel", "scalar"})
              .code == kExitOk);
  CHECK(slurp(dir / "statistics.csv") == slurp(dir2 / "statistics.csv"));
  CHECK(slurp(dir / "hist_area_01.csv") == slurp(dir2 / "hist_area_01.csv"));
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("simulate with zero steps writes header-only files") {
  const auto dir = scratch("zero");
  REQUIRE(cli({"simulate", "--model", "rotating", "--steps", "0", "--trajectories", "10", "--out", dir.string()}).code ==
          kExitOk);
  CHECK(slurp(dir / "hist_coord_0.csv") == "bin_left,bin_right,count\n");
  CHECK(slurp(dir / "hist_area_01.csv") == "bin_left,bin_right,count\n");
  CHECK(slurp(dir / "statistics.csv").rfind("name,coordinates,value,std_error\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("sde writes the three-scheme report") {
  const auto r = cli({"sde", "--N", "400", "--paths", "500", "--euler-steps", "100"});
  REQUIRE(r.code == kExitOk);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "scheme,n_paths,mean,mean_se,variance,variance_se");
  CHECK(lines[1].rfind("discrete,500,", 0) == 0);
  CHECK(lines[2].rfind("corrected_euler,500,", 0) == 0);
  CHECK(lines[3].rfind("uncorrected_euler,500,", 0) == 0);
  CHECK(lines[4].rfind("ode_mean,,0.7042875779324", 0) == 0);

  const auto dir = scratch("sde");
  const auto paths = (dir / "paths.csv").string();
  REQUIRE(cli({"sde", "--N", "100", "--paths", "20", "--euler-steps", "50", "--dump-paths", "2", "--paths-out", paths})
              .code == kExitOk);
  const auto dumped = lines_of(slurp(paths));
  CHECK(dumped.front().find("path_id") != std::string::npos);
  CHECK(dumped.front().find(",t,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("export-model writes a loadable model") {
  const auto r = cli({"export-model", "--model", "rotating", "--p", "0.75"});
  REQUIRE(r.code == kExitOk);
  const auto m = model_from_json(nlohmann::json::parse(r.out));
  CHECK(model_to_json(m) == model_to_json(rotating_model(0.75)));
}
