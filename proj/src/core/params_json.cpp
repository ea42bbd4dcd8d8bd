#include "core/params_json.hpp"

#include <set>
#include <string>

namespace nfloc {

namespace {

using nlohmann::json;

json coil_to_json(const CoilSpec& c) {
  return {{"surface_area_m2", c.surface_area},
          {"turns", c.turns},
          {"resistance_ohm", c.resistance}};
}

template <typename T>
void read_field(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& doc, const std::set<std::string>& known, const char* where) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::Config, std::string(where) + " must be a JSON object");
  }
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) {
      throw Error(ErrorCode::Config,
                  std::string("unknown field '") + item.key() + "' in " + where);
    }
  }
}

CoilSpec coil_from_json(const json& doc, CoilSpec coil, const char* where) {
  reject_unknown(doc, {"surface_area_m2", "turns", "resistance_ohm"}, where);
  read_field(doc, "surface_area_m2", coil.surface_area);
  read_field(doc, "turns", coil.turns);
  read_field(doc, "resistance_ohm", coil.resistance);
  return coil;
}

void read_override(const json& doc, const char* key, std::optional<double>& out) {
  if (!doc.contains(key)) return;
  if (doc.at(key).is_null()) {
    out.reset();
    return;
  }
  double v = 0.0;
  read_field(doc, key, v);
  out = v;
}

}  // namespace

json params_to_json(const PhysicalParams& p) {
  json doc = {{"permeability_h_per_m", p.permeability},
              {"angular_frequency_rad_per_s", p.angular_frequency},
              {"agent_coil", coil_to_json(p.agent)},
              {"anchor_coil", coil_to_json(p.anchor)},
              {"transmit_power_watts", p.transmit_power},
              {"temperature_kelvin", p.temperature},
              {"bandwidth_hz", p.bandwidth},
              {"noise_figure_linear", p.noise_figure},
              {"boltzmann_j_per_kelvin", p.boltzmann}};
  doc["rho_squared_dbm_override"] = p.rho_squared_dbm ? json(*p.rho_squared_dbm) : json(nullptr);
  doc["sigma_squared_dbm_override"] =
      p.sigma_squared_dbm ? json(*p.sigma_squared_dbm) : json(nullptr);
  return doc;
}

PhysicalParams params_from_json(const json& doc) {
  reject_unknown(doc,
                 {"permeability_h_per_m", "angular_frequency_rad_per_s", "agent_coil",
                  "anchor_coil", "transmit_power_watts", "temperature_kelvin", "bandwidth_hz",
                  "noise_figure_linear", "boltzmann_j_per_kelvin", "rho_squared_dbm_override",
                  "sigma_squared_dbm_override"},
                 "params");
  PhysicalParams p = PhysicalParams::reference();
  read_field(doc, "permeability_h_per_m", p.permeability);
  read_field(doc, "angular_frequency_rad_per_s", p.angular_frequency);
  if (doc.contains("agent_coil")) p.agent = coil_from_json(doc["agent_coil"], p.agent, "agent_coil");
  if (doc.contains("anchor_coil"))
    p.anchor = coil_from_json(doc["anchor_coil"], p.anchor, "anchor_coil");
  read_field(doc, "transmit_power_watts", p.transmit_power);
  read_field(doc, "temperature_kelvin", p.temperature);
  read_field(doc, "bandwidth_hz", p.bandwidth);
  read_field(doc, "noise_figure_linear", p.noise_figure);
  read_field(doc, "boltzmann_j_per_kelvin", p.boltzmann);
  read_override(doc, "rho_squared_dbm_override", p.rho_squared_dbm);
  read_override(doc, "sigma_squared_dbm_override", p.sigma_squared_dbm);
  try {
    validate(p);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  return p;
}

}  // namespace nfloc
