#include "roughwalk/io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "roughwalk/anomaly.hpp"

namespace roughwalk {

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ModelError(std::string("model file: missing key '") + key + "'");
  return j.at(key);
}

}  // namespace

PeriodicGraphModel model_from_json(const nlohmann::json& j) {
  try {
    PeriodicGraphModel m;
    m.dim = require(j, "dim_E").get<std::size_t>();
    const auto& basis = require(j, "lattice_basis");
    const auto d = static_cast<Eigen::Index>(m.dim);
    if (!basis.is_array() || basis.empty()) throw ModelError("model file: lattice_basis must be a non-empty array");
    if (basis.front().is_array()) {
      if (static_cast<Eigen::Index>(basis.size()) != d) throw ModelError("model file: lattice_basis needs dim_E rows");
      const auto r = static_cast<Eigen::Index>(basis.front().size());
      m.lattice_basis.resize(d, r);
      for (Eigen::Index i = 0; i < d; ++i) {
        const auto& row = basis.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != r) throw ModelError("model file: ragged lattice_basis");
        for (Eigen::Index k = 0; k < r; ++k) m.lattice_basis(i, k) = row.at(static_cast<std::size_t>(k)).get<std::int64_t>();
      }
    } else {
      if (basis.size() % m.dim != 0) throw ModelError("model file: flat lattice_basis length is not a multiple of dim_E");
      const auto r = static_cast<Eigen::Index>(basis.size() / m.dim);
      m.lattice_basis.resize(d, r);
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index k = 0; k < r; ++k) {
          m.lattice_basis(i, k) = basis.at(static_cast<std::size_t>(i * r + k)).get<std::int64_t>();
        }
      }
    }
    for (const auto& c : require(j, "cells")) {
      Vec x(d);
      if (static_cast<Eigen::Index>(c.size()) != d) throw ModelError("model file: cell has wrong dimension");
      for (Eigen::Index i = 0; i < d; ++i) x[i] = c.at(static_cast<std::size_t>(i)).get<double>();
      m.cells.push_back(std::move(x));
    }
    for (const auto& t : require(j, "transitions")) {
      Transition tr;
      tr.from_cell = require(t, "from_cell").get<std::size_t>();
      tr.to_cell = require(t, "to_cell").get<std::size_t>();
      tr.prob = require(t, "prob").get<double>();
      const auto& dl = require(t, "delta_lattice");
      tr.delta_lattice.resize(static_cast<Eigen::Index>(dl.size()));
      for (std::size_t k = 0; k < dl.size(); ++k) tr.delta_lattice[static_cast<Eigen::Index>(k)] = dl[k].get<std::int64_t>();
      m.transitions.push_back(std::move(tr));
    }
    check_well_formed(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("model file: ") + e.what());
  }
}

nlohmann::json model_to_json(const PeriodicGraphModel& m) {
  nlohmann::json j;
  j["dim_E"] = m.dim;
  nlohmann::json basis = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.lattice_basis.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.lattice_basis.cols(); ++k) row.push_back(m.lattice_basis(i, k));
    basis.push_back(row);
  }
  j["lattice_basis"] = basis;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : m.cells) j["cells"].push_back(std::vector<double>(c.data(), c.data() + c.size()));
  j["transitions"] = nlohmann::json::array();
  for (const auto& t : m.transitions) {
    j["transitions"].push_back({{"from_cell", t.from_cell},
                                {"delta_lattice", std::vector<std::int64_t>(t.delta_lattice.data(),
                                                                            t.delta_lattice.data() + t.delta_lattice.size())},
                                {"to_cell", t.to_cell},
                                {"prob", t.prob}});
  }
  return j;
}

PeriodicGraphModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

void write_trajectory_header(std::ostream& os, std::size_t rank, std::size_t dim) {
  os << "step";
  for (std::size_t j = 0; j < rank; ++j) os << ",lattice_" << j;
  os << ",cell";
  for (std::size_t i = 0; i < dim; ++i) os << ",x_" << i;
  os << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto& model = *traj.model;
  write_trajectory_header(os, model.rank(), model.dim);
  os << std::setprecision(17);
  for (std::size_t n = 0; n < traj.points.size(); ++n) {
    const auto& p = traj.points[n];
    os << n;
    for (Eigen::Index j = 0; j < p.lattice.size(); ++j) os << ',' << p.lattice[j];
    os << ',' << p.cell;
    const Vec x = embed(model, p);
    for (Eigen::Index i = 0; i < x.size(); ++i) os << ',' << x[i];
    os << '\n';
  }
}

void write_excursion_header(std::ostream& os, std::size_t dim) {
  os << "k,T_k,L_k";
  for (std::size_t i = 0; i < dim; ++i) os << ",displacement_" << i;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) os << ",area_" << i << j;
  }
  os << '\n';
}

void write_excursion_row(std::ostream& os, const Excursion& e) {
  os << std::setprecision(17) << e.index << ',' << e.start_time << ',' << e.length;
  for (Eigen::Index i = 0; i < e.displacement.size(); ++i) os << ',' << e.displacement[i];
  const AreaMatrix a = excursion_area(e);
  for (double x : a.upper()) os << ',' << x;
  os << '\n';
}

}  // namespace roughwalk
