#pragma once

// Model files (JSON) and trajectory / excursion dumps (CSV).

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "roughwalk/graph_core.hpp"
#include "roughwalk/sampler.hpp"

namespace roughwalk {

/// Keys: dim_E, lattice_basis (row-major, nested rows or flat d·r array),
/// cells, transitions [{from_cell, delta_lattice, to_cell, prob}].
/// Throws ModelError on missing keys or bad shapes.
PeriodicGraphModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const PeriodicGraphModel& model);
PeriodicGraphModel load_model(const std::string& path);

/// step, lattice_0.., cell, x_0..
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_header(std::ostream& os, std::size_t rank, std::size_t dim);

/// k, T_k, L_k, displacement_0.., area_ij..
void write_excursion_header(std::ostream& os, std::size_t dim);
void write_excursion_row(std::ostream& os, const Excursion& e);

}  // namespace roughwalk
