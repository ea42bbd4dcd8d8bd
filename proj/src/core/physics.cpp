#include "core/physics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "core/rng.hpp"

namespace nfloc {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidParameter, std::string(name) + " must be positive and finite");
  }
}

void validate_coil(const CoilSpec& coil, const char* which) {
  const std::string prefix(which);
  require_positive(coil.surface_area, (prefix + ".surface_area").c_str());
  if (coil.turns <= 0) {
    throw Error(ErrorCode::InvalidParameter, prefix + ".turns must be a positive integer");
  }
  require_positive(coil.resistance, (prefix + ".resistance").c_str());
}

double wrap_two_pi(double angle) {
  double a = std::fmod(angle, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a = 0.0;
  return a;
}

}  // namespace

PhysicalParams PhysicalParams::reference() {
  PhysicalParams p = reference_closed_form();
  p.rho_squared_dbm = -50.4;
  p.sigma_squared_dbm = -128.8;
  return p;
}

PhysicalParams PhysicalParams::reference_closed_form() {
  PhysicalParams p;
  p.permeability = 4e-7 * kPi;
  p.angular_frequency = 2.0 * kPi * 13.56e6;
  p.agent = CoilSpec{0.050 * 0.035, 4, 4.0};
  p.anchor = CoilSpec{0.150 * 0.100, 50, 17.0};
  p.transmit_power = dbm_to_watts(10.0);
  p.temperature = 300.0;
  p.bandwidth = 500.0;
  p.noise_figure = db_to_ratio(8.0);
  return p;
}

void validate(const PhysicalParams& params) {
  require_positive(params.permeability, "permeability");
  require_positive(params.angular_frequency, "angular_frequency");
  validate_coil(params.agent, "agent");
  validate_coil(params.anchor, "anchor");
  require_positive(params.transmit_power, "transmit_power");
  require_positive(params.temperature, "temperature");
  require_positive(params.bandwidth, "bandwidth");
  require_positive(params.noise_figure, "noise_figure");
  require_positive(params.boltzmann, "boltzmann");
  if (params.rho_squared_dbm && !std::isfinite(*params.rho_squared_dbm)) {
    throw Error(ErrorCode::InvalidParameter, "rho_squared_dbm override must be finite");
  }
  if (params.sigma_squared_dbm && !std::isfinite(*params.sigma_squared_dbm)) {
    throw Error(ErrorCode::InvalidParameter, "sigma_squared_dbm override must be finite");
  }
}

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }
double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }
double ratio_to_db(double ratio) { return 10.0 * std::log10(ratio); }

double coupling_constant(const PhysicalParams& params) {
  validate(params);
  const auto& ag = params.agent;
  const auto& an = params.anchor;
  return params.angular_frequency * params.permeability * ag.surface_area * an.surface_area *
         ag.turns * an.turns * std::sqrt(params.transmit_power) /
         (4.0 * kPi * std::sqrt(ag.resistance * an.resistance));
}

double noise_variance(const PhysicalParams& params) {
  validate(params);
  return params.boltzmann * params.temperature * params.noise_figure * params.bandwidth;
}

double effective_rho(const PhysicalParams& params) {
  if (params.rho_squared_dbm) {
    validate(params);
    return std::sqrt(dbm_to_watts(*params.rho_squared_dbm));
  }
  return coupling_constant(params);
}

double effective_sigma2(const PhysicalParams& params) {
  if (params.sigma_squared_dbm) {
    validate(params);
    return dbm_to_watts(*params.sigma_squared_dbm);
  }
  return noise_variance(params);
}

LinkGeometry link_geometry(const Vec3& agent_pos, const Anchor& anchor) {
  const Vec3 r = agent_pos - anchor.position;
  const double d = r.norm();
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw SingularGeometryError(anchor.index, "agent position coincides with anchor " +
                                                  std::to_string(anchor.index));
  }
  const Vec3 e = r / d;
  const Vec3& on = anchor.orientation.vec();
  LinkGeometry g;
  g.distance = d;
  g.direction = UnitVec3::normalized(e);
  g.scaled_field = 1.5 * e * e.dot(on) - 0.5 * on;
  return g;
}

UnitVec3 orientation_from_spherical(const SphericalOrientation& a) {
  const double st = std::sin(a.theta);
  return UnitVec3::normalized(
      Vec3(std::cos(a.phi) * st, std::sin(a.phi) * st, std::cos(a.theta)));
}

SphericalOrientation spherical_from_orientation(const UnitVec3& o) {
  const Vec3& v = o.vec();
  const double z = std::clamp(v.z(), -1.0, 1.0);
  SphericalOrientation a;
  a.theta = std::acos(z);
  if (std::hypot(v.x(), v.y()) < 1e-12) {
    a.phi = 0.0;
  } else {
    a.phi = wrap_two_pi(std::atan2(v.y(), v.x()));
  }
  return a;
}

SphericalOrientation canonicalize(const SphericalOrientation& angles) {
  double theta = wrap_two_pi(angles.theta);
  double phi = angles.phi;
  if (theta > kPi) {
    theta = 2.0 * kPi - theta;
    phi += kPi;
  }
  return {wrap_two_pi(phi), theta};
}

double signal(const Vec3& position, const UnitVec3& orientation, const Anchor& anchor,
              double rho) {
  const LinkGeometry g = link_geometry(position, anchor);
  return rho / (g.distance * g.distance * g.distance) * g.scaled_field.dot(orientation.vec());
}

double signal(const Pose& agent, const Anchor& anchor, double rho) {
  return signal(agent.position, orientation_from_spherical(agent.orientation), anchor, rho);
}

MeasurementVector forward_model(const Vec3& position, const UnitVec3& orientation,
                                const AnchorTopology& topology, double rho) {
  MeasurementVector s(static_cast<Eigen::Index>(topology.size()));
  for (const auto& anchor : topology) {
    s[static_cast<Eigen::Index>(anchor.index)] = signal(position, orientation, anchor, rho);
  }
  return s;
}

MeasurementVector forward_model(const Pose& agent, const AnchorTopology& topology, double rho) {
  return forward_model(agent.position, orientation_from_spherical(agent.orientation), topology,
                       rho);
}

double mutual_inductance(const Pose& agent, const Anchor& anchor, const PhysicalParams& params) {
  validate(params);
  const LinkGeometry g = link_geometry(agent.position, anchor);
  const UnitVec3 o = orientation_from_spherical(agent.orientation);
  const double d3 = g.distance * g.distance * g.distance;
  return params.permeability / (2.0 * kPi) * params.agent.surface_area *
         params.anchor.surface_area * params.agent.turns * params.anchor.turns / d3 *
         g.scaled_field.dot(o.vec());
}

double signal_from_mutual_inductance(double inductance, const PhysicalParams& params) {
  validate(params);
  return params.angular_frequency * inductance *
         std::sqrt(params.transmit_power /
                   (4.0 * params.agent.resistance * params.anchor.resistance));
}

double alignment_loss_percentile(double q, std::uint64_t samples, std::uint64_t seed) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "quantile must lie in (0, 1)");
  }
  if (samples < 10000) {
    throw Error(ErrorCode::InvalidArgument, "alignment percentile needs at least 1e4 samples");
  }
  Rng rng(derive_seed(seed, 0));
  std::vector<double> factors(samples);
  for (auto& f : factors) {
    const Vec3 e = uniform_on_sphere(rng).vec();
    const Vec3 on = uniform_on_sphere(rng).vec();
    const Vec3 oag = uniform_on_sphere(rng).vec();
    const Vec3 b = 1.5 * e * e.dot(on) - 0.5 * on;
    const double a = b.dot(oag);
    f = a * a;
  }
  // nearest-rank quantile
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples)));
  rank = std::clamp<std::size_t>(rank, 1, samples) - 1;
  std::nth_element(factors.begin(), factors.begin() + static_cast<std::ptrdiff_t>(rank),
                   factors.end());
  return ratio_to_db(factors[rank]);
}

double crossing_distance(double rho_squared_w, double sigma_squared_w, double alignment_db,
                         double margin_db) {
  return std::pow(rho_squared_w * db_to_ratio(alignment_db) /
                      (sigma_squared_w * db_to_ratio(margin_db)),
                  1.0 / 6.0);
}

PowerCurve power_curve(const PhysicalParams& params, std::span<const double> distances,
                       double alignment_db) {
  const double rho = effective_rho(params);
  const double sigma2 = effective_sigma2(params);
  PowerCurve curve;
  curve.rho_squared_dbm = watts_to_dbm(rho * rho);
  curve.sigma_squared_dbm = watts_to_dbm(sigma2);
  curve.alignment_db = alignment_db;
  curve.points.reserve(distances.size());
  for (double d : distances) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::InvalidArgument, "power curve distances must be positive");
    }
    // power law in dB: rho^2 [dBm] - 60 log10(d)
    const double coax = curve.rho_squared_dbm - 60.0 * std::log10(d);
    curve.points.push_back({d, coax, coax + alignment_db});
  }
  return curve;
}

}  // namespace nfloc
