#pragma once

#include "json.hpp"

#include "core/physics.hpp"

namespace nfloc {

// Field names carry units, e.g. transmit_power_watts, bandwidth_hz,
// rho_squared_dbm_override. Missing fields keep the reference value;
// unknown fields are rejected with a Config error.
nlohmann::json params_to_json(const PhysicalParams& params);
PhysicalParams params_from_json(const nlohmann::json& doc);

}  // namespace nfloc
