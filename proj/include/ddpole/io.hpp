#pragma once

#include <string>

#include <json.hpp>

#include "ddpole/baselines.hpp"
#include "ddpole/plant.hpp"
#include "ddpole/synthesis.hpp"

namespace ddpole::io {

using nlohmann::json;

// Shortest round-trip decimal representation.
std::string format_double(double v);

// Trajectory CSV: header "t,u_1..u_m,x_1..x_n", one row per time step,
// with a JSON sidecar "<path>.json" holding {"m":, "n":, "T":}.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

// System JSON: {"A": [[...]], "B": [[...]]}.
json system_to_json(const LtiSystem& sys);
LtiSystem system_from_json(const json& j);
LtiSystem read_system(const std::string& path);

// Pole spec JSON: {"poles": [{"re":..,"im":..}, ...], "X": optional complex matrix}.
json pole_spec_to_json(const PoleSpec& spec);
PoleSpec pole_spec_from_json(const json& j);
PoleSpec read_pole_spec(const std::string& path);

json gain_result_to_json(const GainResult& result);
json identified_model_to_json(const IdentifiedModel& model);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

void write_json(const json& j, const std::string& path);
json read_json(const std::string& path);

} // namespace ddpole::io
