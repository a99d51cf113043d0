#include "roughwalk/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "roughwalk/anomaly.hpp"
#include "roughwalk/io.hpp"
#include "roughwalk/kernels.hpp"
#include "roughwalk/parallel.hpp"
#include "roughwalk/sde.hpp"
#include "roughwalk/stats.hpp"

namespace roughwalk {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string model_name;
  std::string model_file;
  std::vector<double> p{0.9};
  std::vector<double> u{0.9};
  std::size_t steps = 1000;
  std::size_t trajectories = 10000;
  std::size_t excursions = 1000000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out;
  std::string format = "csv";
};

void add_model_options(CLI::App& cmd, RunConfig& cfg) {
  auto* name = cmd.add_option("--model", cfg.model_name, "built-in model: rotating, cubic, cubic-raw, simple");
  auto* file = cmd.add_option("--model-file", cfg.model_file, "JSON model file");
  name->excludes(file);
  file->excludes(name);
  cmd.add_option("--p", cfg.p, "rotating-model parameter(s)")->expected(1, -1);
  cmd.add_option("--u", cfg.u, "cubic-model parameter(s)")->expected(1, -1);
}

void add_common_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--seed", cfg.seed, "master seed");
  cmd.add_option("--workers", cfg.workers, "worker threads (default $ROUGHWALK_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--out", cfg.out, "output path ('-' or empty for stdout)");
  cmd.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

// One model per parameter value; a model file ignores the parameters.
struct ModelCase {
  std::string label;
  double parameter = 0.0;
  PeriodicGraphModel model;
};

std::vector<ModelCase> model_cases(const RunConfig& cfg) {
  if (!cfg.model_file.empty()) return {{cfg.model_file, 0.0, load_model(cfg.model_file)}};
  const std::string name = cfg.model_name.empty() ? "rotating" : cfg.model_name;
  std::vector<ModelCase> out;
  if (name == "rotating") {
    for (double p : cfg.p) out.push_back({name, p, builtin_model(name, {p, 0.9})});
  } else if (name == "cubic" || name == "cubic-raw") {
    for (double u : cfg.u) out.push_back({name, u, builtin_model(name, {0.9, u})});
  } else {
    out.push_back({name, 0.0, builtin_model(name, {})});
  }
  return out;
}

ModelCase single_case(const RunConfig& cfg) {
  auto cases = model_cases(cfg);
  if (cases.size() != 1) throw CLI::ValidationError("this command takes a single parameter value");
  return std::move(cases.front());
}

// Writes to --out, or to `fallback` when --out is empty or "-".
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  fn(os);
}

std::string vec_text(const Vec& v) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

// validate ---------------------------------------------------------------------

int cmd_validate(const RunConfig& cfg, const std::vector<std::size_t>& partner, std::ostream& out) {
  const ModelCase mc = single_case(cfg);
  std::optional<CentralSymmetry> symmetry;
  if (!partner.empty()) {
    symmetry = CentralSymmetry{partner};
  } else if (mc.label == "cubic" || mc.label == "cubic-raw") {
    symmetry = cubic_central_symmetry();
  }
  const ValidationReport rep = validate(mc.model, symmetry);
  emit(cfg.out, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      nlohmann::json j;
      j["model"] = mc.label;
      j["is_stochastic"] = rep.is_stochastic;
      j["is_irreducible"] = rep.is_irreducible;
      j["has_central_symmetry"] = rep.has_central_symmetry ? nlohmann::json(*rep.has_central_symmetry) : nlohmann::json();
      j["increment_bound_R"] = rep.increment_bound_R;
      j["row_sums"] = rep.row_sums;
      j["classes"] = rep.classes;
      j["messages"] = rep.messages;
      os << j.dump(2) << '\n';
      return;
    }
    os << "model: " << mc.label << " (" << mc.model.n_cells() << " cells, dim " << mc.model.dim << ", rank "
       << mc.model.rank() << ")\n";
    os << "stochastic: " << (rep.is_stochastic ? "yes" : "no") << '\n';
    for (std::size_t c = 0; c < rep.row_sums.size(); ++c) {
      if (std::abs(rep.row_sums[c] - 1.0) > kStochasticTolerance) {
        os << "  NotStochastic: cell " << c << " at " << vec_text(mc.model.cells[c]) << " sums to "
           << std::setprecision(12) << rep.row_sums[c] << '\n';
      }
    }
    os << "irreducible: " << (rep.is_irreducible ? "yes" : "no") << '\n';
    if (!rep.is_irreducible) os << "  " << NotIrreducible(rep.classes).what() << '\n';
    os << "increment bound R: " << rep.increment_bound_R << '\n';
    if (rep.has_central_symmetry) os << "central symmetry: " << (*rep.has_central_symmetry ? "yes" : "no") << '\n';
  });
  return rep.usable() ? kExitOk : kExitInvalid;
}

// estimate-anomaly -------------------------------------------------------------

int cmd_estimate(const RunConfig& cfg, std::optional<std::size_t> max_len, std::ostream& out) {
  const auto cases = model_cases(cfg);
  EstimateOptions opt;
  opt.workers = cfg.workers;
  opt.max_excursion_length = max_len;
  std::vector<AnomalyReport> reports;
  for (const auto& mc : cases) {
    GraphPoint start{LatticeVec::Zero(static_cast<Eigen::Index>(mc.model.rank())), 0};
    reports.push_back(estimate_constants(mc.model, start, cfg.excursions, cfg.seed, opt));
  }
  emit(cfg.out, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      nlohmann::json all = nlohmann::json::array();
      for (std::size_t k = 0; k < cases.size(); ++k) {
        nlohmann::json j;
        j["model"] = cases[k].label;
        j["parameter"] = cases[k].parameter;
        j["seed"] = cfg.seed;
        j["report"] = to_json(reports[k]);
        all.push_back(j);
      }
      os << (all.size() == 1 ? all.front() : all).dump(2) << '\n';
      return;
    }
    os << report_csv_header(reports.front().dim) << '\n';
    for (std::size_t k = 0; k < cases.size(); ++k) {
      os << report_csv_row(reports[k], cases[k].label, cases[k].parameter) << '\n';
    }
  });
  return kExitOk;
}

// simulate ---------------------------------------------------------------------

struct SimulateOptions {
  std::string normalize = "model";
  std::size_t bins = 100;
  double coord_range = 5.0;
  double area_range = 4.0;
  std::size_t dump_trajectories = 0;
  bool dump_excursions = false;
  bool dump_endpoints = false;
  std::string kernel;
};

std::string pair_name(std::size_t i, std::size_t j) { return std::to_string(i) + std::to_string(j); }

// Header only when no trajectory was simulated.
void write_histogram(std::ostream& os, const Histogram& h, bool empty) {
  if (empty) {
    os << "bin_left,bin_right,count\n";
  } else {
    write_histogram_csv(os, h);
  }
}

int cmd_simulate(const RunConfig& cfg, const SimulateOptions& so, std::ostream& out) {
  const ModelCase mc = single_case(cfg);
  auto model = std::make_shared<const PeriodicGraphModel>(mc.model);
  const CompiledModel cm = compile(*model);
  const std::size_t d = cm.dim;
  const std::size_t m = d * (d - 1) / 2;
  const fs::path dir = cfg.out.empty() || cfg.out == "-" ? fs::path("simulate_out") : fs::path(cfg.out);
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) throw Error("cannot write " + (dir / name).string());
    return os;
  };

  std::optional<KernelIsa> isa;
  if (!so.kernel.empty()) {
    isa = parse_kernel_isa(so.kernel);
    if (!isa) throw CLI::ValidationError("--kernel must be scalar or avx2");
  }

  std::vector<Histogram> coord_hist(d, Histogram(-so.coord_range, so.coord_range, so.bins));
  std::vector<Histogram> area_hist(m, Histogram(-so.area_range, so.area_range, so.bins));
  std::vector<StatRow> rows;
  const bool empty = cfg.steps == 0 || cfg.trajectories == 0;

  EndpointBatch batch;
  if (!empty) {
    batch = simulate_endpoints(cm, 0, cfg.steps, cfg.seed, cfg.trajectories, cfg.workers, isa);
    const double n = static_cast<double>(cfg.steps);
    Vec center = Vec::Zero(static_cast<Eigen::Index>(d));
    Vec sigma2 = Vec::Ones(static_cast<Eigen::Index>(d));
    if (so.normalize == "model") {
      const StationaryMoments sm = stationary_moments(*model);
      center = n * sm.drift;
      sigma2 = sm.covariance.diagonal();
    } else if (so.normalize == "empirical") {
      MomentAccumulator acc(d);
      for (std::size_t k = 0; k < batch.count; ++k) acc.add(batch.displacement_of(k));
      for (std::size_t i = 0; i < d; ++i) {
        center[static_cast<Eigen::Index>(i)] = acc.mean(i);
        sigma2[static_cast<Eigen::Index>(i)] = acc.central_moment(i, 2) / n;
      }
    }
    const double area_div = so.normalize == "none" ? 1.0 : n;
    const double coord_div = so.normalize == "none" ? 1.0 : std::sqrt(n);
    MomentAccumulator coords(d), areas(m);
    std::vector<double> x(d), a(m);
    for (std::size_t k = 0; k < batch.count; ++k) {
      const auto disp = batch.displacement_of(k);
      const auto ar = batch.area_of(k);
      for (std::size_t i = 0; i < d; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        x[i] = (disp[i] - (so.normalize == "none" ? 0.0 : center[ii])) / (coord_div * std::sqrt(sigma2[ii]));
        coord_hist[i].add(x[i]);
      }
      for (std::size_t i = 0, s = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j, ++s) {
          a[s] = ar[s] / (area_div * std::sqrt(sigma2[static_cast<Eigen::Index>(i)] * sigma2[static_cast<Eigen::Index>(j)]));
          area_hist[s].add(a[s]);
        }
      }
      coords.add(x);
      if (m > 0) areas.add(a);
    }
    std::vector<std::string> coord_names, area_names;
    for (std::size_t i = 0; i < d; ++i) coord_names.push_back(std::to_string(i));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) area_names.push_back(pair_name(i, j));
    }
    const double nan = std::nan("");
    rows.push_back({"n_steps", "", n, nan});
    rows.push_back({"n_trajectories", "", static_cast<double>(batch.count), nan});
    if (batch.count >= 4) {
      for (auto& r : statistic_rows(cumulants(coords), "coord", coord_names)) rows.push_back(r);
      if (m > 0) {
        for (auto& r : statistic_rows(cumulants(areas), "area", area_names)) rows.push_back(r);
      }
    }
    if (batch.count >= 2 && m > 0) {
      const EndpointGamma eg = endpoint_gamma(batch);
      for (std::size_t s = 0; s < m; ++s) rows.push_back({"gamma_endpoint", area_names[s], eg.gamma.upper()[s], eg.std_error.upper()[s]});
    }
  }

  for (std::size_t i = 0; i < d; ++i) {
    auto os = open("hist_coord_" + std::to_string(i) + ".csv");
    write_histogram(os, coord_hist[i], empty);
  }
  for (std::size_t i = 0, s = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j, ++s) {
      auto os = open("hist_area_" + pair_name(i, j) + ".csv");
      write_histogram(os, area_hist[s], empty);
    }
  }
  {
    auto os = open("statistics.csv");
    write_statistics_csv(os, rows);
  }
  if (so.dump_endpoints) {
    auto os = open("endpoints.csv");
    os << "trajectory_id";
    for (std::size_t i = 0; i < d; ++i) os << ",x_" << i;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) os << ",area_" << pair_name(i, j);
    }
    os << '\n' << std::setprecision(17);
    for (std::size_t k = 0; k < batch.count; ++k) {
      os << k;
      for (double v : batch.displacement_of(k)) os << ',' << v;
      for (double v : batch.area_of(k)) os << ',' << v;
      os << '\n';
    }
  }
  const GraphPoint start{LatticeVec::Zero(static_cast<Eigen::Index>(cm.rank)), 0};
  for (std::size_t k = 0; k < so.dump_trajectories; ++k) {
    auto os = open("trajectory_" + std::to_string(k) + ".csv");
    if (empty) {
      write_trajectory_header(os, cm.rank, d);
    } else {
      write_trajectory_csv(os, sample_trajectory(model, start, cfg.steps, cfg.seed, k));
    }
  }
  if (so.dump_excursions) {
    auto os = open("excursions.csv");
    write_excursion_header(os, d);
    if (!empty) {
      const auto dec = decompose_excursions(sample_trajectory(model, start, cfg.steps, cfg.seed, 0));
      for (const auto& e : dec.excursions) write_excursion_row(os, e);
    }
  }
  out << "simulated " << (empty ? 0 : cfg.trajectories) << " trajectories of " << cfg.steps << " steps ("
      << to_string(isa.value_or(select_kernel())) << " kernel) into " << dir.string() << '\n';
  return kExitOk;
}

// sde --------------------------------------------------------------------------

struct SdeOptions {
  std::size_t n_scale = 10000;
  std::size_t paths = 10000;
  std::size_t euler_steps = 1000;
  double u0 = 1.0;
  double horizon = 1.0;
  std::string field = "linear";
  std::string coefficients = "exact";
  std::size_t dump_paths = 0;
  std::string paths_out;
};

VectorField1D make_field(const std::string& name) {
  if (name == "linear") return VectorField1D::affine(1.0, 0.0, 0.0, 1.0);     // f = u, g = 1
  if (name == "geometric") return VectorField1D::affine(1.0, 0.0, 0.0, 0.0);  // f = u, g = 0
  if (name == "rotation") return VectorField1D::affine(0.0, 1.0, 1.0, 0.0);   // f = 1, g = u
  if (name == "constant") return VectorField1D::constant(1.0, 1.0);
  throw CLI::ValidationError("--field must be linear, geometric, rotation or constant");
}

struct SchemeSummary {
  std::string scheme;
  std::size_t n = 0;
  double mean = 0.0, mean_se = 0.0, variance = 0.0, variance_se = 0.0;
};

SchemeSummary summarize(const std::string& name, const std::vector<double>& xs) {
  MomentAccumulator acc(1);
  for (double x : xs) acc.add(x);
  SchemeSummary s{name, xs.size()};
  if (xs.size() < 4) throw InsufficientCount("need at least 4 paths");
  const Cumulants c = cumulants(acc).coords.front();
  s.mean = c.mean;
  s.mean_se = c.mean_se;
  s.variance = c.variance;
  s.variance_se = c.variance_se;
  return s;
}

int cmd_sde(const RunConfig& cfg, const SdeOptions& so, std::ostream& out) {
  const ModelCase mc = single_case(cfg);
  if (mc.model.dim != 2) throw CLI::ValidationError("the sde command needs a 2-dimensional model");
  const CompiledModel cm = compile(mc.model);
  const VectorField1D vf = make_field(so.field);
  SdeCoefficients coeffs;
  if (so.coefficients == "estimated") {
    GraphPoint start{LatticeVec::Zero(static_cast<Eigen::Index>(cm.rank)), 0};
    EstimateOptions opt;
    opt.workers = cfg.workers;
    coeffs = sde_coefficients(estimate_constants(mc.model, start, cfg.excursions, cfg.seed, opt));
  } else {
    coeffs = sde_coefficients(stationary_moments(mc.model));
  }
  SdeCoefficients plain = coeffs;
  plain.gamma = 0.0;

  std::vector<SchemeSummary> rows;
  rows.push_back(summarize("discrete", discrete_terminal_values(cm, 0, vf, so.u0, so.n_scale, so.horizon, so.paths,
                                                                cfg.seed, cfg.workers)));
  rows.push_back(summarize("corrected_euler", euler_terminal_values(vf, so.u0, coeffs, so.euler_steps, so.horizon,
                                                                    so.paths, cfg.seed, cfg.workers)));
  rows.push_back(summarize("uncorrected_euler", euler_terminal_values(vf, so.u0, plain, so.euler_steps, so.horizon,
                                                                      so.paths, cfg.seed, cfg.workers)));
  const bool linear = so.field == "linear";
  emit(cfg.out, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      nlohmann::json j;
      j["K"] = coeffs.K;
      j["gamma"] = coeffs.gamma;
      j["brownian_cov"] = {{coeffs.brownian_cov(0, 0), coeffs.brownian_cov(0, 1)},
                           {coeffs.brownian_cov(1, 0), coeffs.brownian_cov(1, 1)}};
      j["schemes"] = nlohmann::json::array();
      for (const auto& r : rows) {
        j["schemes"].push_back({{"scheme", r.scheme}, {"n_paths", r.n}, {"mean", r.mean}, {"mean_se", r.mean_se},
                                {"variance", r.variance}, {"variance_se", r.variance_se}});
      }
      if (linear) j["ode_mean"] = linear_mean_ode(so.u0, coeffs.K, coeffs.gamma, so.horizon);
      os << j.dump(2) << '\n';
      return;
    }
    os << "scheme,n_paths,mean,mean_se,variance,variance_se\n" << std::setprecision(17);
    for (const auto& r : rows) {
      os << r.scheme << ',' << r.n << ',' << r.mean << ',' << r.mean_se << ',' << r.variance << ',' << r.variance_se
         << '\n';
    }
    if (linear) os << "ode_mean,," << linear_mean_ode(so.u0, coeffs.K, coeffs.gamma, so.horizon) << ",,,\n";
  });
  if (so.dump_paths > 0) {
    const std::string path = so.paths_out.empty() ? "sde_paths.csv" : so.paths_out;
    emit(path, out, [&](std::ostream& os) {
      os << "scheme,path_id,t,U\n" << std::setprecision(17);
      for (std::size_t p = 0; p < so.dump_paths; ++p) {
        const auto disc = discrete_path(cm, 0, vf, so.u0, so.n_scale, so.horizon, cfg.seed, p);
        for (std::size_t s = 0; s < disc.size(); ++s) {
          os << "discrete," << p << ',' << static_cast<double>(s) / static_cast<double>(so.n_scale) << ',' << disc[s]
             << '\n';
        }
        const auto eul = euler_path(vf, so.u0, coeffs, so.euler_steps, so.horizon, cfg.seed, p);
        for (std::size_t s = 0; s < eul.size(); ++s) {
          os << "corrected_euler," << p << ','
             << so.horizon * static_cast<double>(s) / static_cast<double>(so.euler_steps) << ',' << eul[s] << '\n';
        }
      }
    });
  }
  return kExitOk;
}

// export-model -----------------------------------------------------------------

int cmd_export(const RunConfig& cfg, std::ostream& out) {
  const ModelCase mc = single_case(cfg);
  emit(cfg.out, out, [&](std::ostream& os) { os << model_to_json(mc.model).dump(2) << '\n'; });
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random walks on periodic graphs: rough-path lifts, area anomaly and driven SDEs", "roughwalk"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.workers = default_workers();

  auto* validate_cmd = app.add_subcommand("validate", "check a model: row sums, irreducibility, increment bound");
  std::vector<std::size_t> partner;
  add_model_options(*validate_cmd, cfg);
  add_common_options(*validate_cmd, cfg);
  validate_cmd->add_option("--symmetry", partner, "cell involution for the central-symmetry check");

  auto* estimate_cmd = app.add_subcommand("estimate-anomaly", "estimate v, beta, C and the area anomaly");
  std::optional<std::size_t> max_len;
  add_model_options(*estimate_cmd, cfg);
  add_common_options(*estimate_cmd, cfg);
  estimate_cmd->add_option("--excursions", cfg.excursions, "complete excursions")->check(CLI::Range(2ULL, 1ULL << 40));
  estimate_cmd->add_option("--max-length", max_len, "keep only excursions of at most this length");

  auto* simulate_cmd = app.add_subcommand("simulate", "terminal-value histograms and statistics");
  SimulateOptions so;
  add_model_options(*simulate_cmd, cfg);
  add_common_options(*simulate_cmd, cfg);
  simulate_cmd->add_option("--steps", cfg.steps, "steps per trajectory");
  simulate_cmd->add_option("--trajectories", cfg.trajectories, "independent trajectories");
  simulate_cmd->add_option("--normalize", so.normalize, "model, empirical or none")
      ->check(CLI::IsMember({"model", "empirical", "none"}));
  simulate_cmd->add_option("--bins", so.bins, "histogram bins")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--coord-range", so.coord_range, "coordinate histogram half-width");
  simulate_cmd->add_option("--area-range", so.area_range, "area histogram half-width");
  simulate_cmd->add_option("--dump-trajectories", so.dump_trajectories, "write the first k full trajectories");
  simulate_cmd->add_flag("--dump-excursions", so.dump_excursions, "write the excursions of trajectory 0");
  simulate_cmd->add_flag("--dump-endpoints", so.dump_endpoints, "write every terminal value");
  simulate_cmd->add_option("--kernel", so.kernel, "scalar or avx2 (default: widest available)");

  auto* sde_cmd = app.add_subcommand("sde", "chain-driven scheme vs corrected and uncorrected Euler");
  SdeOptions sdo;
  add_model_options(*sde_cmd, cfg);
  add_common_options(*sde_cmd, cfg);
  sde_cmd->add_option("--N", sdo.n_scale, "chain steps per unit time")->check(CLI::PositiveNumber);
  sde_cmd->add_option("--paths", sdo.paths, "paths per scheme");
  sde_cmd->add_option("--euler-steps", sdo.euler_steps, "Euler steps per unit time")->check(CLI::PositiveNumber);
  sde_cmd->add_option("--u0", sdo.u0, "initial value");
  sde_cmd->add_option("--horizon", sdo.horizon, "final time")->check(CLI::PositiveNumber);
  sde_cmd->add_option("--field", sdo.field, "linear (f=u, g=1), geometric, rotation or constant");
  sde_cmd->add_option("--coefficients", sdo.coefficients, "exact or estimated")
      ->check(CLI::IsMember({"exact", "estimated"}));
  sde_cmd->add_option("--excursions", cfg.excursions, "excursions when coefficients are estimated");
  sde_cmd->add_option("--dump-paths", sdo.dump_paths, "write the first k paths of each scheme");
  sde_cmd->add_option("--paths-out", sdo.paths_out, "file for --dump-paths (default sde_paths.csv)");

  auto* export_cmd = app.add_subcommand("export-model", "write a built-in model as JSON");
  add_model_options(*export_cmd, cfg);
  add_common_options(*export_cmd, cfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*validate_cmd) return cmd_validate(cfg, partner, out);
    if (*estimate_cmd) return cmd_estimate(cfg, max_len, out);
    if (*simulate_cmd) return cmd_simulate(cfg, so, out);
    if (*sde_cmd) return cmd_sde(cfg, sdo, out);
    if (*export_cmd) return cmd_export(cfg, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NotStochastic& e) {
    err << "NotStochastic: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NotIrreducible& e) {
    err << "NotIrreducible: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInvalid;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) { return run(args, out, err); }

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace roughwalk
