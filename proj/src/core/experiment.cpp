#include "core/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

#include "core/fisher.hpp"
#include "core/params_json.hpp"

namespace nfloc {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

template <typename T>
T get_field(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& doc, const std::set<std::string>& known, const char* where) {
  if (!doc.is_object()) throw Error(ErrorCode::Config, std::string(where) + " must be an object");
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) {
      throw Error(ErrorCode::Config, "unknown field '" + item.key() + "' in " + where);
    }
  }
}

std::vector<Algorithm> parse_algorithms(const json& doc, const char* key,
                                        std::vector<Algorithm> fallback) {
  if (!doc.contains(key)) return fallback;
  std::vector<Algorithm> out;
  for (const auto& name : get_field<std::vector<std::string>>(doc, key, {})) {
    out.push_back(parse_algorithm(name));
  }
  return out;
}

Vec3 vec3_field(const json& doc, const char* key, const char* where) {
  const auto v = get_field<std::vector<double>>(doc, key, {});
  if (v.size() != 3) {
    throw Error(ErrorCode::Config, std::string(where) + "." + key + " needs 3 entries");
  }
  return Vec3(v[0], v[1], v[2]);
}

double angle_difference(double a, double b) {
  double d = std::remainder(a - b, 2.0 * kPi);
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double fraction(std::size_t count, std::size_t total) {
  return total ? static_cast<double>(count) / static_cast<double>(total) : std::nan("");
}

ordered_json real_json(double v) {
  if (!std::isfinite(v)) return format_real(v);
  return v;
}

Cell cell(std::size_t v) { return static_cast<std::int64_t>(v); }
Cell cell(int v) { return static_cast<std::int64_t>(v); }
Cell cell(const char* s) { return std::string(s); }
Cell cell(std::string s) { return s; }
Cell seed_cell(std::uint64_t seed) { return std::to_string(seed); }

}  // namespace

AnchorTopology ExperimentConfig::topology() const {
  if (anchors) return AnchorTopology(*anchors);
  return generate_topology(anchor_count, room);
}

const Table& ExperimentResult::table(const std::string& stem) const {
  for (const auto& [name, t] : tables) {
    if (name == stem) return t;
  }
  throw Error(ErrorCode::InvalidArgument, "no table '" + stem + "' in result");
}

ExperimentConfig config_from_json(const json& doc) {
  reject_unknown(doc,
                 {"room", "anchor_count", "anchors", "params", "trials", "noise_realizations",
                  "seed", "algorithms", "multi_start_algorithms", "init_count", "threads",
                  "solver", "success_threshold_m", "condition_cap", "peb_sweep", "power_curve"},
                 "config");
  ExperimentConfig c;
  if (doc.contains("room")) {
    const json& r = doc["room"];
    reject_unknown(r, {"side_x_m", "side_y_m", "height_m"}, "room");
    c.room.side_x = get_field(r, "side_x_m", c.room.side_x);
    c.room.side_y = get_field(r, "side_y_m", c.room.side_y);
    c.room.height = get_field(r, "height_m", c.room.height);
  }
  validate(c.room);
  c.anchor_count = get_field(doc, "anchor_count", c.anchor_count);
  if (doc.contains("anchors")) {
    std::vector<Anchor> anchors;
    for (const auto& a : doc["anchors"]) {
      reject_unknown(a, {"position_m", "orientation"}, "anchors[]");
      Anchor anchor;
      anchor.position = vec3_field(a, "position_m", "anchors[]");
      try {
        anchor.orientation = UnitVec3::normalized(vec3_field(a, "orientation", "anchors[]"));
      } catch (const Error& e) {
        throw Error(ErrorCode::Config, std::string("anchors[].orientation: ") + e.what());
      }
      anchors.push_back(anchor);
    }
    c.anchor_count = anchors.size();
    c.anchors = std::move(anchors);
  }
  if (doc.contains("params")) c.params = params_from_json(doc["params"]);
  c.trials = get_field(doc, "trials", c.trials);
  c.noise_realizations = get_field(doc, "noise_realizations", c.noise_realizations);
  c.seed = get_field(doc, "seed", c.seed);
  c.algorithms = parse_algorithms(doc, "algorithms", c.algorithms);
  c.multi_start_algorithms =
      parse_algorithms(doc, "multi_start_algorithms", c.multi_start_algorithms);
  c.init_count = get_field(doc, "init_count", c.init_count);
  c.threads = get_field(doc, "threads", c.threads);
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    reject_unknown(s,
                   {"max_iterations", "min_step", "initial_damping", "damping_increase",
                    "damping_decrease", "gradient_tolerance", "fd_relative_step"},
                   "solver");
    c.solver.max_iterations = get_field(s, "max_iterations", c.solver.max_iterations);
    c.solver.min_step = get_field(s, "min_step", c.solver.min_step);
    c.solver.initial_damping = get_field(s, "initial_damping", c.solver.initial_damping);
    c.solver.damping_increase = get_field(s, "damping_increase", c.solver.damping_increase);
    c.solver.damping_decrease = get_field(s, "damping_decrease", c.solver.damping_decrease);
    c.solver.gradient_tolerance = get_field(s, "gradient_tolerance", c.solver.gradient_tolerance);
    c.solver.fd_relative_step = get_field(s, "fd_relative_step", c.solver.fd_relative_step);
  }
  c.success_threshold = get_field(doc, "success_threshold_m", c.success_threshold);
  c.condition_cap = get_field(doc, "condition_cap", c.condition_cap);
  if (doc.contains("peb_sweep")) {
    const json& s = doc["peb_sweep"];
    reject_unknown(s, {"side_lengths_m", "anchor_counts"}, "peb_sweep");
    c.sweep.side_lengths = get_field(s, "side_lengths_m", c.sweep.side_lengths);
    c.sweep.anchor_counts = get_field(s, "anchor_counts", c.sweep.anchor_counts);
  }
  if (doc.contains("power_curve")) {
    const json& p = doc["power_curve"];
    reject_unknown(p,
                   {"min_distance_m", "max_distance_m", "points", "alignment_quantile",
                    "alignment_samples"},
                   "power_curve");
    c.power.min_distance = get_field(p, "min_distance_m", c.power.min_distance);
    c.power.max_distance = get_field(p, "max_distance_m", c.power.max_distance);
    c.power.points = get_field(p, "points", c.power.points);
    c.power.alignment_quantile = get_field(p, "alignment_quantile", c.power.alignment_quantile);
    c.power.alignment_samples = get_field(p, "alignment_samples", c.power.alignment_samples);
  }

  if (c.trials < 1) throw Error(ErrorCode::Config, "trials must be >= 1");
  if (c.noise_realizations < 1) throw Error(ErrorCode::Config, "noise_realizations must be >= 1");
  if (c.anchor_count < 1) throw Error(ErrorCode::Config, "anchor_count must be >= 1");
  if (c.init_count < 1) throw Error(ErrorCode::Config, "init_count must be >= 1");
  if (c.solver.max_iterations < 1 || !(c.solver.min_step > 0.0) ||
      !(c.solver.initial_damping > 0.0) || !(c.solver.damping_increase > 1.0) ||
      !(c.solver.damping_decrease > 1.0) || !(c.solver.gradient_tolerance >= 0.0) ||
      !(c.solver.fd_relative_step > 0.0)) {
    throw Error(ErrorCode::Config, "solver options must be positive (damping factors > 1)");
  }
  if (!(c.success_threshold > 0.0)) throw Error(ErrorCode::Config, "success_threshold_m must be > 0");
  if (!(c.power.min_distance > 0.0) || !(c.power.max_distance > c.power.min_distance) ||
      c.power.points < 2) {
    throw Error(ErrorCode::Config, "power_curve needs 0 < min < max distance and >= 2 points");
  }
  try {
    (void)c.topology();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, std::string("topology: ") + e.what());
  }
  return c;
}

ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json doc;
  doc["room"] = {{"side_x_m", c.room.side_x}, {"side_y_m", c.room.side_y},
                 {"height_m", c.room.height}};
  doc["anchor_count"] = c.anchor_count;
  if (c.anchors) {
    ordered_json arr = ordered_json::array();
    for (const auto& a : *c.anchors) {
      arr.push_back({{"position_m", {a.position.x(), a.position.y(), a.position.z()}},
                     {"orientation", {a.orientation[0], a.orientation[1], a.orientation[2]}}});
    }
    doc["anchors"] = arr;
  }
  doc["params"] = ordered_json::parse(params_to_json(c.params).dump());
  doc["trials"] = c.trials;
  doc["noise_realizations"] = c.noise_realizations;
  doc["seed"] = c.seed;
  auto names = [](const std::vector<Algorithm>& algs) {
    ordered_json arr = ordered_json::array();
    for (auto a : algs) arr.push_back(to_string(a));
    return arr;
  };
  doc["algorithms"] = names(c.algorithms);
  doc["multi_start_algorithms"] = names(c.multi_start_algorithms);
  doc["init_count"] = c.init_count;
  doc["solver"] = {{"max_iterations", c.solver.max_iterations},
                   {"min_step", c.solver.min_step},
                   {"initial_damping", c.solver.initial_damping},
                   {"damping_increase", c.solver.damping_increase},
                   {"damping_decrease", c.solver.damping_decrease},
                   {"gradient_tolerance", c.solver.gradient_tolerance},
                   {"fd_relative_step", c.solver.fd_relative_step}};
  doc["success_threshold_m"] = c.success_threshold;
  doc["condition_cap"] = c.condition_cap;
  doc["peb_sweep"] = {{"side_lengths_m", c.sweep.side_lengths},
                      {"anchor_counts", c.sweep.anchor_counts}};
  doc["power_curve"] = {{"min_distance_m", c.power.min_distance},
                        {"max_distance_m", c.power.max_distance},
                        {"points", c.power.points},
                        {"alignment_quantile", c.power.alignment_quantile},
                        {"alignment_samples", c.power.alignment_samples}};
  // threads is deliberately not echoed: it must not affect output bytes.
  return doc;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

ExperimentResult run_topology(const ExperimentConfig& config) {
  const AnchorTopology topo = config.topology();
  Table t({"anchor", "x_m", "y_m", "z_m", "orientation_x", "orientation_y", "orientation_z"});
  for (const auto& a : topo) {
    t.add_row({cell(a.index), a.position.x(), a.position.y(), a.position.z(), a.orientation[0],
               a.orientation[1], a.orientation[2]});
  }
  ExperimentResult r{"topology", {}, {}};
  r.tables.emplace_back("topology", std::move(t));
  r.summary["anchors"] = topo.size();
  return r;
}

ExperimentResult run_power_curve(const ExperimentConfig& config) {
  const auto& pc = config.power;
  std::vector<double> grid(static_cast<std::size_t>(pc.points));
  const double l0 = std::log10(pc.min_distance), l1 = std::log10(pc.max_distance);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) /
                                      static_cast<double>(grid.size() - 1));
  }
  grid.front() = pc.min_distance;
  grid.back() = pc.max_distance;
  const double alignment_db =
      alignment_loss_percentile(pc.alignment_quantile, pc.alignment_samples, config.seed);
  const PowerCurve curve = power_curve(config.params, grid, alignment_db);

  Table t({"distance_m", "coaxial_dbm", "misaligned_dbm", "noise_floor_dbm",
           "noise_floor_plus_10db_dbm"});
  for (const auto& p : curve.points) {
    t.add_row({p.distance, p.coaxial_dbm, p.misaligned_dbm, curve.sigma_squared_dbm,
               curve.sigma_squared_dbm + 10.0});
  }
  const double rho2 = dbm_to_watts(curve.rho_squared_dbm);
  const double sigma2 = dbm_to_watts(curve.sigma_squared_dbm);
  const auto& first = curve.points.front();
  const auto& last = curve.points.back();

  ExperimentResult r{"power-curve", {}, {}};
  r.tables.emplace_back("power_curve", std::move(t));
  r.summary["rho_squared_dbm"] = curve.rho_squared_dbm;
  r.summary["sigma_squared_dbm"] = curve.sigma_squared_dbm;
  r.summary["alignment_quantile"] = pc.alignment_quantile;
  r.summary["alignment_samples"] = pc.alignment_samples;
  r.summary["alignment_loss_db"] = alignment_db;
  r.summary["crossing_coaxial_noise_m"] = crossing_distance(rho2, sigma2);
  r.summary["crossing_coaxial_noise_plus_10db_m"] = crossing_distance(rho2, sigma2, 0.0, 10.0);
  r.summary["crossing_misaligned_noise_m"] = crossing_distance(rho2, sigma2, alignment_db);
  r.summary["crossing_misaligned_noise_plus_10db_m"] =
      crossing_distance(rho2, sigma2, alignment_db, 10.0);
  r.summary["slope_db_per_decade"] = (last.coaxial_dbm - first.coaxial_dbm) /
                                     (std::log10(last.distance) - std::log10(first.distance));
  return r;
}

ExperimentResult run_peb_sweep(const ExperimentConfig& config) {
  const double rho = effective_rho(config.params);
  const double sigma2 = effective_sigma2(config.params);
  const UnitVec3 vertical(Vec3(0, 0, 1));

  Table records({"side_length_m", "anchors", "trial", "x_m", "y_m", "z_m", "phi_rad",
                 "theta_rad", "peb_m", "known_vertical_peb_m", "status"});
  Table summary({"side_length_m", "anchors", "trials", "median_peb_m",
                 "median_known_vertical_peb_m", "emitted", "excluded", "emitted_known_vertical",
                 "excluded_known_vertical"});

  struct TrialOut {
    Pose pose;
    double peb = std::nan("");
    double known = std::nan("");
  };

  for (double side : config.sweep.side_lengths) {
    Room room = config.room;
    room.side_x = room.side_y = side;
    validate(room);
    for (std::size_t n : config.sweep.anchor_counts) {
      const AnchorTopology topo = generate_topology(n, room);
      std::vector<TrialOut> out(config.trials);
      parallel_for(config.trials, config.threads, [&](std::size_t i) {
        Rng rng(derive_seed(config.seed, i));
        TrialOut& o = out[i];
        o.pose = sample_deployment(rng, room);
        try {
          o.peb = bounds(o.pose, topo, rho, sigma2, config.condition_cap).peb;
        } catch (const Error&) {
        }
        try {
          o.known = known_orientation_peb(o.pose.position, vertical, topo, rho, sigma2,
                                          config.condition_cap);
        } catch (const Error&) {
        }
      });
      std::vector<double> pebs, knowns;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& o = out[i];
        const bool ok = std::isfinite(o.peb);
        if (ok) pebs.push_back(o.peb);
        if (std::isfinite(o.known)) knowns.push_back(o.known);
        records.add_row({side, cell(n), cell(i), o.pose.position.x(), o.pose.position.y(),
                         o.pose.position.z(), o.pose.orientation.phi, o.pose.orientation.theta,
                         o.peb, o.known, cell(ok ? "ok" : "unbounded")});
      }
      summary.add_row({side, cell(n), cell(config.trials), median(pebs), median(knowns),
                       cell(pebs.size()), cell(config.trials - pebs.size()), cell(knowns.size()),
                       cell(config.trials - knowns.size())});
    }
  }
  ExperimentResult r{"peb-sweep", {}, {}};
  r.tables.emplace_back("peb_sweep", std::move(summary));
  r.tables.emplace_back("peb_sweep_trials", std::move(records));
  r.summary["grid_points"] = config.sweep.side_lengths.size() * config.sweep.anchor_counts.size();
  r.summary["trials_per_point"] = config.trials;
  return r;
}

ExperimentResult run_crlb_cdf(const ExperimentConfig& config) {
  const double rho = effective_rho(config.params);
  const double sigma2 = effective_sigma2(config.params);
  const AnchorTopology topo = config.topology();
  const Room& room = config.room;

  struct TrialOut {
    Pose pose;
    std::optional<BoundReport> report;
    double rms_position = std::nan("");
    double rms_phi = std::nan("");
    double rms_theta = std::nan("");
    double rms_angle = std::nan("");
    std::size_t failures = 0;
  };
  std::vector<TrialOut> out(config.trials);
  parallel_for(config.trials, config.threads, [&](std::size_t i) {
    Rng rng(derive_seed(config.seed, i));
    TrialOut& o = out[i];
    o.pose = sample_deployment(rng, room);
    try {
      o.report = bounds(o.pose, topo, rho, sigma2, config.condition_cap);
    } catch (const Error&) {
      return;
    }
    double sp = 0.0, sphi = 0.0, stheta = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < config.noise_realizations; ++k) {
      const MeasurementVector y = simulate_measurement(rng, o.pose, topo, rho, sigma2);
      try {
        const PoseEstimate est = ml5d(y, topo, rho, sigma2, o.pose, config.solver);
        if (est.termination == Termination::NumericalFailure) {
          ++o.failures;
          continue;
        }
        sp += (est.pose.position - o.pose.position).squaredNorm();
        const double dphi = angle_difference(est.pose.orientation.phi, o.pose.orientation.phi);
        const double dtheta = est.pose.orientation.theta - o.pose.orientation.theta;
        sphi += dphi * dphi;
        stheta += dtheta * dtheta;
        ++used;
      } catch (const Error&) {
        ++o.failures;
      }
    }
    if (used) {
      const double u = static_cast<double>(used);
      o.rms_position = std::sqrt(sp / u);
      o.rms_phi = std::sqrt(sphi / u);
      o.rms_theta = std::sqrt(stheta / u);
      o.rms_angle = std::sqrt((sphi + stheta) / u);
    }
  });

  Table t({"trial", "x_m", "y_m", "z_m", "phi_rad", "theta_rad", "peb_m", "naive_peb_m",
           "angle_bound_phi_rad", "angle_bound_theta_rad", "angle_bound_rms_rad",
           "naive_angle_bound_rms_rad", "fim_condition", "ml_rms_position_m", "ml_rms_phi_rad",
           "ml_rms_theta_rad", "ml_rms_angle_rad", "ml_rms_to_peb", "ml_failures", "status"});
  std::vector<double> pebs, naive, peb_ratio, angle_ratio, ml_ratio;
  std::size_t below_10cm = 0, phi_below_1deg = 0, theta_below_1deg = 0, rms_below_1deg = 0;
  std::size_t emitted = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& o = out[i];
    const double nan = std::nan("");
    BoundReport b;
    if (o.report) {
      b = *o.report;
      ++emitted;
      pebs.push_back(b.peb);
      naive.push_back(b.naive_peb);
      peb_ratio.push_back(b.peb / b.naive_peb);
      angle_ratio.push_back(b.angle_bound_rms / b.naive_angle_bound_rms);
      if (std::isfinite(o.rms_position)) ml_ratio.push_back(o.rms_position / b.peb);
      below_10cm += b.peb < 0.1;
      phi_below_1deg += b.angle_bound_phi < kDeg;
      theta_below_1deg += b.angle_bound_theta < kDeg;
      rms_below_1deg += b.angle_bound_rms < kDeg;
    } else {
      b = BoundReport{nan, nan, nan, nan, nan, nan, nan};
    }
    t.add_row({cell(i), o.pose.position.x(), o.pose.position.y(), o.pose.position.z(),
               o.pose.orientation.phi, o.pose.orientation.theta, b.peb, b.naive_peb,
               b.angle_bound_phi, b.angle_bound_theta, b.angle_bound_rms,
               b.naive_angle_bound_rms, b.fim_condition, o.rms_position, o.rms_phi, o.rms_theta,
               o.rms_angle, o.report ? o.rms_position / b.peb : nan, cell(o.failures),
               cell(o.report ? "ok" : "unbounded")});
  }
  ExperimentResult r{"crlb-cdf", {}, {}};
  r.tables.emplace_back("crlb_cdf", std::move(t));
  auto& s = r.summary;
  s["deployments"] = config.trials;
  s["noise_realizations"] = config.noise_realizations;
  s["emitted"] = emitted;
  s["excluded"] = config.trials - emitted;
  s["median_peb_m"] = real_json(median(pebs));
  s["median_naive_peb_m"] = real_json(median(naive));
  s["median_peb_to_naive_ratio"] = real_json(median(peb_ratio));
  s["median_angle_bound_to_naive_ratio"] = real_json(median(angle_ratio));
  s["fraction_peb_below_10cm"] = real_json(fraction(below_10cm, emitted));
  s["fraction_phi_bound_below_1deg"] = real_json(fraction(phi_below_1deg, emitted));
  s["fraction_theta_bound_below_1deg"] = real_json(fraction(theta_below_1deg, emitted));
  s["fraction_rms_angle_bound_below_1deg"] = real_json(fraction(rms_below_1deg, emitted));
  s["median_ml_rms_to_peb"] = real_json(median(ml_ratio));
  return r;
}

ExperimentResult run_algo_compare(const ExperimentConfig& config) {
  const double rho = effective_rho(config.params);
  const double sigma2 = effective_sigma2(config.params);
  const AnchorTopology topo = config.topology();
  const Room& room = config.room;

  struct Run {
    std::string label;
    int inits;
    PoseEstimate est;
    double error = std::nan("");
    bool failed = false;
  };
  struct TrialOut {
    std::uint64_t seed = 0;
    std::vector<Run> runs;
  };

  std::vector<TrialOut> out(config.trials);
  parallel_for(config.trials, config.threads, [&](std::size_t i) {
    TrialOut& o = out[i];
    o.seed = derive_seed(config.seed, i);
    Rng rng(o.seed);
    const Pose truth = sample_deployment(rng, room);
    const MeasurementVector y = simulate_measurement(rng, truth, topo, rho, sigma2);
    const InitSampler sampler(room.bounds(), derive_seed(o.seed, 1));

    auto record = [&](std::string label, int inits, auto&& fn) {
      Run run{std::move(label), inits, {}};
      try {
        run.est = fn();
        run.error = (run.est.pose.position - truth.position).norm();
        run.failed = !std::isfinite(run.error);
      } catch (const Error&) {
        run.failed = true;
      }
      o.runs.push_back(std::move(run));
    };

    record("ML5D-TRUTH", 0, [&] { return ml5d(y, topo, rho, sigma2, truth, config.solver); });
    for (Algorithm a : config.algorithms) {
      record(to_string(a), a == Algorithm::Baseline ? 0 : 1,
             [&] { return estimate(a, y, topo, rho, sigma2, sampler.draw(0), config.solver); });
    }
    if (config.init_count > 1) {
      for (Algorithm a : config.multi_start_algorithms) {
        if (a == Algorithm::Baseline) continue;
        record(to_string(a), config.init_count, [&] {
          const MultiStartResult ms =
              multi_start(a, y, topo, rho, sigma2, config.init_count, sampler, config.solver);
          PoseEstimate est = ms.best;
          est.iterations = ms.total_iterations;
          return est;
        });
      }
    }
  });

  Table records({"trial", "seed", "algorithm", "inits", "error_m", "iterations",
                 "refine_iterations", "cost", "termination", "success"});
  struct Stats {
    std::vector<double> errors, iterations, refine, success_errors;
    std::size_t successes = 0, failures = 0, capped = 0, trials = 0;
    std::vector<std::size_t> success_trials;
  };
  std::map<std::pair<std::string, int>, Stats> stats;
  std::vector<std::pair<std::string, int>> order;
  std::vector<double> truth_error(config.trials, std::nan(""));

  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const Run& run : out[i].runs) {
      const bool success = !run.failed && run.error < config.success_threshold;
      records.add_row({cell(i), seed_cell(out[i].seed), cell(run.label), cell(run.inits),
                       run.error, cell(run.est.iterations), cell(run.est.refine_iterations),
                       run.est.residual_cost,
                       cell(run.failed ? "error" : to_string(run.est.termination)),
                       cell(success ? 1 : 0)});
      const auto key = std::pair{run.label, run.inits};
      if (!stats.count(key)) order.push_back(key);
      Stats& s = stats[key];
      ++s.trials;
      if (run.failed) {
        ++s.failures;
        continue;
      }
      if (run.label == "ML5D-TRUTH") truth_error[i] = run.error;
      s.errors.push_back(run.error);
      s.iterations.push_back(run.est.iterations);
      if (run.est.algorithm == Algorithm::Cascade) s.refine.push_back(run.est.refine_iterations);
      if (run.est.termination == Termination::MaxIterations) ++s.capped;
      if (success) {
        ++s.successes;
        s.success_errors.push_back(run.error);
        s.success_trials.push_back(i);
      }
    }
  }

  Table summary({"algorithm", "inits", "trials", "failures", "success_rate", "median_error_m",
                 "rms_error_successful_m", "rms_truth_error_same_trials_m", "median_iterations",
                 "p97_iterations", "max_iterations_fraction", "median_refine_iterations"});
  ordered_json js = ordered_json::array();
  for (const auto& key : order) {
    const Stats& s = stats[key];
    double se = 0.0, te = 0.0;
    std::size_t paired = 0;
    for (std::size_t k = 0; k < s.success_trials.size(); ++k) {
      const double t = truth_error[s.success_trials[k]];
      if (!std::isfinite(t)) continue;
      se += s.success_errors[k] * s.success_errors[k];
      te += t * t;
      ++paired;
    }
    const double rms_success = paired ? std::sqrt(se / static_cast<double>(paired)) : std::nan("");
    const double rms_truth = paired ? std::sqrt(te / static_cast<double>(paired)) : std::nan("");
    const double success_rate = fraction(s.successes, s.trials);
    const double med_iter = median(s.iterations);
    const double p97 = quantile(s.iterations, 0.97);
    const double capped = fraction(s.capped, s.trials);
    const double med_refine = median(s.refine);
    summary.add_row({cell(key.first), cell(key.second), cell(s.trials), cell(s.failures),
                     success_rate, median(s.errors), rms_success, rms_truth, med_iter, p97,
                     capped, med_refine});
    ordered_json row;
    row["algorithm"] = key.first;
    row["inits"] = key.second;
    row["trials"] = s.trials;
    row["failures"] = s.failures;
    row["success_rate"] = real_json(success_rate);
    row["median_error_m"] = real_json(median(s.errors));
    row["rms_error_successful_m"] = real_json(rms_success);
    row["rms_truth_error_same_trials_m"] = real_json(rms_truth);
    row["median_iterations"] = real_json(med_iter);
    row["p97_iterations"] = real_json(p97);
    row["max_iterations_fraction"] = real_json(capped);
    row["median_refine_iterations"] = real_json(med_refine);
    js.push_back(row);
  }
  ExperimentResult r{"algo-compare", {}, {}};
  r.tables.emplace_back("algo_compare", std::move(summary));
  r.tables.emplace_back("algo_compare_trials", std::move(records));
  r.summary["trials"] = config.trials;
  r.summary["success_threshold_m"] = config.success_threshold;
  r.summary["algorithms"] = js;
  return r;
}

ExperimentResult run_experiment(const std::string& kind, const ExperimentConfig& config) {
  if (kind == "topology") return run_topology(config);
  if (kind == "power-curve") return run_power_curve(config);
  if (kind == "peb-sweep") return run_peb_sweep(config);
  if (kind == "crlb-cdf") return run_crlb_cdf(config);
  if (kind == "algo-compare") return run_algo_compare(config);
  throw Error(ErrorCode::Config, "unknown experiment '" + kind + "'");
}

std::vector<std::filesystem::path> write_result(const ExperimentResult& result,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir,
                                                OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> files;
  for (const auto& [stem, table] : result.tables) files.push_back(table.save(out_dir, stem, format));

  auto dump = [&](const std::string& name, const ordered_json& doc) {
    const auto path = out_dir / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string());
    os << doc.dump(2) << '\n';
    files.push_back(path);
  };
  dump("summary.json", result.summary);

  ordered_json meta;
  meta["experiment"] = result.kind;
  meta["rng_algorithm"] = kRngAlgorithm;
  meta["seed"] = config.seed;
  meta["init_position_sampling"] = "uniform in room box";
  meta["init_orientation_sampling"] = "uniform on sphere (normalized isotropic Gaussian)";
  meta["deployment_margin_m"] = kDeploymentMargin;
  meta["rho"] = effective_rho(config.params);
  meta["sigma2_w"] = effective_sigma2(config.params);
  meta["config"] = config_to_json(config);
  dump("metadata.json", meta);
  return files;
}

}  // namespace nfloc
