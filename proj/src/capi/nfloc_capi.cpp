#include "nfloc/nfloc.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "core/error.hpp"
#include "core/estimators.hpp"
#include "core/experiment.hpp"
#include "core/fisher.hpp"
#include "core/params_json.hpp"
#include "core/physics.hpp"
#include "core/topology.hpp"

struct nfloc_params {
  nfloc::PhysicalParams value;
};

struct nfloc_topology {
  nfloc::AnchorTopology value;
};

struct nfloc_config {
  nfloc::ExperimentConfig value;
};

namespace {

thread_local std::string g_last_error;

nfloc_status status_of(nfloc::ErrorCode code) {
  using nfloc::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidParameter: return NFLOC_ERR_INVALID_PARAMETER;
    case ErrorCode::InvalidArgument: return NFLOC_ERR_INVALID_ARGUMENT;
    case ErrorCode::SingularGeometry: return NFLOC_ERR_SINGULAR_GEOMETRY;
    case ErrorCode::UnboundedPose: return NFLOC_ERR_UNBOUNDED_POSE;
    case ErrorCode::RankDeficient: return NFLOC_ERR_RANK_DEFICIENT;
    case ErrorCode::DegenerateRhs: return NFLOC_ERR_DEGENERATE_RHS;
    case ErrorCode::DimensionMismatch: return NFLOC_ERR_DIMENSION_MISMATCH;
    case ErrorCode::NumericalFailure: return NFLOC_ERR_NUMERICAL_FAILURE;
    case ErrorCode::Config: return NFLOC_ERR_CONFIG;
    case ErrorCode::Io: return NFLOC_ERR_IO;
  }
  return NFLOC_ERR_INTERNAL;
}

nfloc_status fail(nfloc_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
nfloc_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return NFLOC_OK;
  } catch (const nfloc::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(NFLOC_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NFLOC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NFLOC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NFLOC_ERR_INTERNAL, "unknown exception");
  }
}

#define NFLOC_REQUIRE(ptr)                                              \
  do {                                                                  \
    if (!(ptr)) return fail(NFLOC_ERR_NULL_POINTER, #ptr " is NULL");   \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nfloc::Pose to_pose(const nfloc_pose& p) {
  return nfloc::Pose{nfloc::Vec3(p.position[0], p.position[1], p.position[2]), {p.phi, p.theta}};
}

nfloc_pose from_pose(const nfloc::Pose& p) {
  nfloc_pose out{};
  for (int i = 0; i < 3; ++i) out.position[i] = p.position[i];
  out.phi = p.orientation.phi;
  out.theta = p.orientation.theta;
  return out;
}

nfloc::SolverOptions to_options(const nfloc_solver_options* o) {
  nfloc::SolverOptions s;
  if (!o) return s;
  s.max_iterations = o->max_iterations;
  s.min_step = o->min_step;
  s.initial_damping = o->initial_damping;
  s.damping_increase = o->damping_increase;
  s.damping_decrease = o->damping_decrease;
  s.gradient_tolerance = o->gradient_tolerance;
  s.fd_relative_step = o->fd_relative_step;
  if (s.max_iterations < 1 || !(s.min_step > 0) || !(s.initial_damping > 0) ||
      !(s.damping_increase > 1) || !(s.damping_decrease > 1) || !(s.gradient_tolerance >= 0) ||
      !(s.fd_relative_step > 0)) {
    throw nfloc::Error(nfloc::ErrorCode::InvalidArgument, "invalid solver options");
  }
  return s;
}

nfloc_termination to_termination(nfloc::Termination t) {
  switch (t) {
    case nfloc::Termination::StepTolerance: return NFLOC_TERM_STEP_TOLERANCE;
    case nfloc::Termination::GradientTolerance: return NFLOC_TERM_GRADIENT_TOLERANCE;
    case nfloc::Termination::MaxIterations: return NFLOC_TERM_MAX_ITERATIONS;
    case nfloc::Termination::NumericalFailure: return NFLOC_TERM_NUMERICAL_FAILURE;
    case nfloc::Termination::Direct: return NFLOC_TERM_DIRECT;
  }
  return NFLOC_TERM_NUMERICAL_FAILURE;
}

nfloc::Algorithm to_algorithm(nfloc_algorithm a) {
  switch (a) {
    case NFLOC_ALG_ML5D: return nfloc::Algorithm::ML5D;
    case NFLOC_ALG_ML3D: return nfloc::Algorithm::ML3D;
    case NFLOC_ALG_WLS: return nfloc::Algorithm::WLS;
    case NFLOC_ALG_CASCADE: return nfloc::Algorithm::Cascade;
    case NFLOC_ALG_BASELINE: return nfloc::Algorithm::Baseline;
  }
  throw nfloc::Error(nfloc::ErrorCode::InvalidArgument, "unknown algorithm");
}

nfloc_estimate from_estimate(const nfloc::PoseEstimate& e) {
  nfloc_estimate out{};
  out.pose = from_pose(e.pose);
  out.has_orientation = e.has_orientation ? 1 : 0;
  out.residual_cost = e.residual_cost;
  out.iterations = e.iterations;
  out.refine_iterations = e.refine_iterations;
  out.termination = to_termination(e.termination);
  return out;
}

nfloc::MeasurementVector measurement(const double* y, std::size_t count) {
  nfloc::MeasurementVector v(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) v[static_cast<Eigen::Index>(i)] = y[i];
  return v;
}

}  // namespace

extern "C" {

const char* nfloc_version(void) { return "0.1.0"; }

const char* nfloc_status_string(nfloc_status status) {
  switch (status) {
    case NFLOC_OK: return "ok";
    case NFLOC_ERR_INVALID_PARAMETER: return "invalid-parameter";
    case NFLOC_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case NFLOC_ERR_SINGULAR_GEOMETRY: return "singular-geometry";
    case NFLOC_ERR_UNBOUNDED_POSE: return "unbounded-pose";
    case NFLOC_ERR_RANK_DEFICIENT: return "rank-deficiency";
    case NFLOC_ERR_DEGENERATE_RHS: return "degenerate-rhs";
    case NFLOC_ERR_DIMENSION_MISMATCH: return "dimension-mismatch";
    case NFLOC_ERR_NUMERICAL_FAILURE: return "numerical-failure";
    case NFLOC_ERR_CONFIG: return "config";
    case NFLOC_ERR_IO: return "io";
    case NFLOC_ERR_NULL_POINTER: return "null-pointer";
    case NFLOC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* nfloc_last_error_message(void) { return g_last_error.c_str(); }

void nfloc_solver_options_default(nfloc_solver_options* out) {
  if (!out) return;
  const nfloc::SolverOptions s;
  out->max_iterations = s.max_iterations;
  out->min_step = s.min_step;
  out->initial_damping = s.initial_damping;
  out->damping_increase = s.damping_increase;
  out->damping_decrease = s.damping_decrease;
  out->gradient_tolerance = s.gradient_tolerance;
  out->fd_relative_step = s.fd_relative_step;
}

void nfloc_string_free(char* s) { std::free(s); }

nfloc_status nfloc_params_reference(nfloc_params** out) {
  NFLOC_REQUIRE(out);
  return guarded([&] { *out = new nfloc_params{nfloc::PhysicalParams::reference()}; });
}

nfloc_status nfloc_params_reference_closed_form(nfloc_params** out) {
  NFLOC_REQUIRE(out);
  return guarded([&] { *out = new nfloc_params{nfloc::PhysicalParams::reference_closed_form()}; });
}

nfloc_status nfloc_params_from_json(const char* json, nfloc_params** out) {
  NFLOC_REQUIRE(json);
  NFLOC_REQUIRE(out);
  return guarded([&] {
    *out = new nfloc_params{nfloc::params_from_json(nlohmann::json::parse(json))};
  });
}

nfloc_status nfloc_params_to_json(const nfloc_params* params, char** json_out) {
  NFLOC_REQUIRE(params);
  NFLOC_REQUIRE(json_out);
  return guarded([&] { *json_out = dup_string(nfloc::params_to_json(params->value).dump(2)); });
}

nfloc_status nfloc_params_rho(const nfloc_params* params, double* rho_out) {
  NFLOC_REQUIRE(params);
  NFLOC_REQUIRE(rho_out);
  return guarded([&] { *rho_out = nfloc::effective_rho(params->value); });
}

nfloc_status nfloc_params_sigma2(const nfloc_params* params, double* sigma2_out) {
  NFLOC_REQUIRE(params);
  NFLOC_REQUIRE(sigma2_out);
  return guarded([&] { *sigma2_out = nfloc::effective_sigma2(params->value); });
}

void nfloc_params_free(nfloc_params* params) { delete params; }

nfloc_status nfloc_topology_create(const double* positions, const double* orientations,
                                   size_t count, nfloc_topology** out) {
  NFLOC_REQUIRE(positions);
  NFLOC_REQUIRE(orientations);
  NFLOC_REQUIRE(out);
  return guarded([&] {
    std::vector<nfloc::Anchor> anchors(count);
    for (size_t i = 0; i < count; ++i) {
      anchors[i].position =
          nfloc::Vec3(positions[3 * i], positions[3 * i + 1], positions[3 * i + 2]);
      anchors[i].orientation = nfloc::UnitVec3::normalized(
          nfloc::Vec3(orientations[3 * i], orientations[3 * i + 1], orientations[3 * i + 2]));
    }
    *out = new nfloc_topology{nfloc::AnchorTopology(std::move(anchors))};
  });
}

nfloc_status nfloc_topology_generate(size_t count, double side_x, double side_y, double height,
                                     nfloc_topology** out) {
  NFLOC_REQUIRE(out);
  return guarded([&] {
    nfloc::Room room;
    room.side_x = side_x;
    room.side_y = side_y;
    room.height = height;
    *out = new nfloc_topology{nfloc::generate_topology(count, room)};
  });
}

size_t nfloc_topology_size(const nfloc_topology* topology) {
  return topology ? topology->value.size() : 0;
}

nfloc_status nfloc_topology_anchor(const nfloc_topology* topology, size_t index,
                                   double position[3], double orientation[3]) {
  NFLOC_REQUIRE(topology);
  if (index >= topology->value.size()) {
    return fail(NFLOC_ERR_INVALID_ARGUMENT, "anchor index out of range");
  }
  const auto& a = topology->value[index];
  for (int i = 0; i < 3; ++i) {
    if (position) position[i] = a.position[i];
    if (orientation) orientation[i] = a.orientation[i];
  }
  return NFLOC_OK;
}

void nfloc_topology_free(nfloc_topology* topology) { delete topology; }

nfloc_status nfloc_forward_model(const nfloc_pose* pose, const nfloc_topology* topology,
                                 double rho, double* out, size_t out_len) {
  NFLOC_REQUIRE(pose);
  NFLOC_REQUIRE(topology);
  NFLOC_REQUIRE(out);
  if (out_len != topology->value.size()) {
    return fail(NFLOC_ERR_DIMENSION_MISMATCH, "output length does not match topology");
  }
  return guarded([&] {
    const auto s = nfloc::forward_model(to_pose(*pose), topology->value, rho);
    for (size_t i = 0; i < out_len; ++i) out[i] = s[static_cast<Eigen::Index>(i)];
  });
}

nfloc_status nfloc_bounds_compute(const nfloc_pose* pose, const nfloc_topology* topology,
                                  double rho, double sigma2, double condition_cap,
                                  nfloc_bounds* out) {
  NFLOC_REQUIRE(pose);
  NFLOC_REQUIRE(topology);
  NFLOC_REQUIRE(out);
  return guarded([&] {
    const double cap = condition_cap > 0 ? condition_cap : nfloc::kDefaultConditionCap;
    const auto b = nfloc::bounds(to_pose(*pose), topology->value, rho, sigma2, cap);
    *out = nfloc_bounds{b.peb,
                        b.naive_peb,
                        b.angle_bound_phi,
                        b.angle_bound_theta,
                        b.angle_bound_rms,
                        b.naive_angle_bound_rms,
                        b.fim_condition};
  });
}

nfloc_status nfloc_estimate_pose(nfloc_algorithm algorithm, const double* measurements,
                                 size_t count, const nfloc_topology* topology, double rho,
                                 double sigma2, const nfloc_pose* init,
                                 const nfloc_solver_options* options, nfloc_estimate* out) {
  NFLOC_REQUIRE(measurements);
  NFLOC_REQUIRE(topology);
  NFLOC_REQUIRE(out);
  if (!init && algorithm != NFLOC_ALG_BASELINE) {
    return fail(NFLOC_ERR_NULL_POINTER, "init is NULL");
  }
  return guarded([&] {
    const nfloc::Pose start = init ? to_pose(*init) : nfloc::Pose{};
    *out = from_estimate(nfloc::estimate(to_algorithm(algorithm), measurement(measurements, count),
                                         topology->value, rho, sigma2, start,
                                         to_options(options)));
  });
}

nfloc_status nfloc_multi_start(nfloc_algorithm algorithm, const double* measurements,
                               size_t count, const nfloc_topology* topology, double rho,
                               double sigma2, int starts, const double lower[3],
                               const double upper[3], uint64_t seed,
                               const nfloc_solver_options* options, nfloc_estimate* out) {
  NFLOC_REQUIRE(measurements);
  NFLOC_REQUIRE(topology);
  NFLOC_REQUIRE(lower);
  NFLOC_REQUIRE(upper);
  NFLOC_REQUIRE(out);
  return guarded([&] {
    const nfloc::Box box{nfloc::Vec3(lower[0], lower[1], lower[2]),
                         nfloc::Vec3(upper[0], upper[1], upper[2])};
    const nfloc::InitSampler sampler(box, seed);
    const auto res = nfloc::multi_start(to_algorithm(algorithm), measurement(measurements, count),
                                        topology->value, rho, sigma2, starts, sampler,
                                        to_options(options));
    nfloc_estimate est = from_estimate(res.best);
    est.iterations = res.total_iterations;
    *out = est;
  });
}

nfloc_status nfloc_alignment_loss_percentile(double q, uint64_t samples, uint64_t seed,
                                             double* out_db) {
  NFLOC_REQUIRE(out_db);
  return guarded([&] { *out_db = nfloc::alignment_loss_percentile(q, samples, seed); });
}

nfloc_status nfloc_config_load(const char* path, nfloc_config** out) {
  NFLOC_REQUIRE(out);
  return guarded([&] {
    if (!path) {
      *out = new nfloc_config{nfloc::ExperimentConfig{}};
      return;
    }
    std::ifstream is(path);
    if (!is) throw nfloc::Error(nfloc::ErrorCode::Io, std::string("cannot open ") + path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw nfloc::Error(nfloc::ErrorCode::Config, std::string(path) + ": " + e.what());
    }
    *out = new nfloc_config{nfloc::config_from_json(doc)};
  });
}

nfloc_status nfloc_config_from_json(const char* json, nfloc_config** out) {
  NFLOC_REQUIRE(json);
  NFLOC_REQUIRE(out);
  return guarded([&] {
    *out = new nfloc_config{nfloc::config_from_json(nlohmann::json::parse(json))};
  });
}

nfloc_status nfloc_config_to_json(const nfloc_config* config, char** json_out) {
  NFLOC_REQUIRE(config);
  NFLOC_REQUIRE(json_out);
  return guarded([&] { *json_out = dup_string(nfloc::config_to_json(config->value).dump(2)); });
}

nfloc_status nfloc_config_set_seed(nfloc_config* config, uint64_t seed) {
  NFLOC_REQUIRE(config);
  config->value.seed = seed;
  return NFLOC_OK;
}

nfloc_status nfloc_config_set_trials(nfloc_config* config, size_t trials) {
  NFLOC_REQUIRE(config);
  if (trials < 1) return fail(NFLOC_ERR_CONFIG, "trials must be >= 1");
  config->value.trials = trials;
  return NFLOC_OK;
}

nfloc_status nfloc_config_set_threads(nfloc_config* config, unsigned threads) {
  NFLOC_REQUIRE(config);
  config->value.threads = threads;
  return NFLOC_OK;
}

nfloc_status nfloc_config_room(const nfloc_config* config, double dims[3]) {
  NFLOC_REQUIRE(config);
  NFLOC_REQUIRE(dims);
  dims[0] = config->value.room.side_x;
  dims[1] = config->value.room.side_y;
  dims[2] = config->value.room.height;
  return NFLOC_OK;
}

nfloc_status nfloc_config_topology(const nfloc_config* config, nfloc_topology** out) {
  NFLOC_REQUIRE(config);
  NFLOC_REQUIRE(out);
  return guarded([&] { *out = new nfloc_topology{config->value.topology()}; });
}

nfloc_status nfloc_config_params(const nfloc_config* config, nfloc_params** out) {
  NFLOC_REQUIRE(config);
  NFLOC_REQUIRE(out);
  return guarded([&] { *out = new nfloc_params{config->value.params}; });
}

void nfloc_config_free(nfloc_config* config) { delete config; }

nfloc_status nfloc_experiment_run(const nfloc_config* config, const char* kind,
                                  const char* out_dir, nfloc_format format,
                                  char** summary_json) {
  NFLOC_REQUIRE(config);
  NFLOC_REQUIRE(kind);
  NFLOC_REQUIRE(out_dir);
  return guarded([&] {
    const auto fmt = format == NFLOC_FORMAT_JSON ? nfloc::OutputFormat::Json
                                                 : nfloc::OutputFormat::Csv;
    const auto result = nfloc::run_experiment(kind, config->value);
    nfloc::write_result(result, config->value, out_dir, fmt);
    if (summary_json) *summary_json = dup_string(result.summary.dump(2));
  });
}

}  // extern "C"
