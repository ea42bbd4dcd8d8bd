#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/types.hpp"

namespace nfloc {

struct CoilSpec {
  double surface_area = 0.0;  // m^2
  int turns = 0;
  double resistance = 0.0;  // Ohm
};

struct PhysicalParams {
  double permeability = 0.0;       // H/m
  double angular_frequency = 0.0;  // rad/s
  CoilSpec agent;
  CoilSpec anchor;
  double transmit_power = 0.0;  // W
  double temperature = 0.0;     // K
  double bandwidth = 0.0;       // Hz
  double noise_figure = 0.0;    // linear power ratio
  double boltzmann = 1.380649e-23;
  std::optional<double> rho_squared_dbm;
  std::optional<double> sigma_squared_dbm;

  // Table of technical parameters for the 13.56 MHz reference setup,
  // including the tabulated received/noise powers as overrides.
  static PhysicalParams reference();

  // Same inputs without the dBm overrides.
  static PhysicalParams reference_closed_form();
};

// Throws InvalidParameter on non-positive / non-finite entries.
void validate(const PhysicalParams& params);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_ratio(double db);
double ratio_to_db(double ratio);

// rho = w mu S_ag S_anc N_ag N_anc sqrt(P_t) / (4 pi sqrt(R_ag R_anc)), in sqrt(W).
// Ignores any override.
double coupling_constant(const PhysicalParams& params);

// sigma^2 = k_B T F B in W. Ignores any override.
double noise_variance(const PhysicalParams& params);

// Override if present, closed form otherwise.
double effective_rho(const PhysicalParams& params);
double effective_sigma2(const PhysicalParams& params);

struct LinkGeometry {
  double distance = 0.0;
  UnitVec3 direction;
  Vec3 scaled_field = Vec3::Zero();  // b = (3/2 e e^T - 1/2 I) o_n
};

// Throws SingularGeometryError if agent_pos coincides with the anchor.
LinkGeometry link_geometry(const Vec3& agent_pos, const Anchor& anchor);

UnitVec3 orientation_from_spherical(const SphericalOrientation& angles);

// phi = 0 at the poles (|sin theta| < 1e-12).
SphericalOrientation spherical_from_orientation(const UnitVec3& o);

// Wraps phi into [0, 2pi) and theta into [0, pi], flipping phi by pi when
// theta is reflected. Describes the same direction.
SphericalOrientation canonicalize(const SphericalOrientation& angles);

// s_n = (rho / d^3) b_n^T o_ag
double signal(const Pose& agent, const Anchor& anchor, double rho);
double signal(const Vec3& position, const UnitVec3& orientation,
              const Anchor& anchor, double rho);

// Noiseless measurement vector s = rho D^-3 B^T o.
MeasurementVector forward_model(const Pose& agent,
                                const AnchorTopology& topology, double rho);
MeasurementVector forward_model(const Vec3& position,
                                const UnitVec3& orientation,
                                const AnchorTopology& topology, double rho);

// M_n = (mu / 2pi) S_ag S_anc N_ag N_anc d^-3 b^T o_ag, in H.
double mutual_inductance(const Pose& agent, const Anchor& anchor,
                         const PhysicalParams& params);

// Converts a mutual inductance to the received power-wave amplitude,
// s = w M sqrt(P_t / (4 R_ag R_anc)).
double signal_from_mutual_inductance(double inductance,
                                     const PhysicalParams& params);

// q-quantile of the alignment factor (b^T o_ag)^2 in dB, with e, o_n, o_ag
// independently uniform on the sphere. Requires 0 < q < 1, samples >= 1e4.
double alignment_loss_percentile(double q, std::uint64_t samples,
                                 std::uint64_t seed);

struct PowerCurvePoint {
  double distance;        // m
  double coaxial_dbm;     // rho^2 / d^6
  double misaligned_dbm;  // coaxial + alignment loss
};

struct PowerCurve {
  double rho_squared_dbm;
  double sigma_squared_dbm;
  double alignment_db;
  std::vector<PowerCurvePoint> points;
};

PowerCurve power_curve(const PhysicalParams& params,
                       std::span<const double> distances, double alignment_db);

// Distance at which received power (with alignment loss) equals
// sigma^2 + margin_db: d = (rho^2 a / (sigma^2 m))^(1/6).
double crossing_distance(double rho_squared_w, double sigma_squared_w,
                         double alignment_db = 0.0, double margin_db = 0.0);

}  // namespace nfloc
