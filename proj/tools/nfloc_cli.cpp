// nfloc command-line harness. Every subcommand goes through the C API.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nfloc/nfloc.h"

namespace {

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  unsigned threads = 0;
  std::string out_dir = "out";
  std::string format = "csv";
};

class CliFailure : public std::runtime_error {
 public:
  CliFailure(nfloc_status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  nfloc_status status() const { return status_; }

 private:
  nfloc_status status_;
};

void check(nfloc_status status, const char* context) {
  if (status == NFLOC_OK) return;
  std::string msg = std::string(context) + ": " + nfloc_status_string(status);
  const char* detail = nfloc_last_error_message();
  if (detail && *detail) msg += ": " + std::string(detail);
  throw CliFailure(status, msg);
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
};

using ConfigHandle = Handle<nfloc_config, nfloc_config_free>;
using TopologyHandle = Handle<nfloc_topology, nfloc_topology_free>;
using ParamsHandle = Handle<nfloc_params, nfloc_params_free>;

void add_common(CLI::App* sub, CommonOptions& opts, bool with_output) {
  sub->add_option("--config", opts.config_path, "JSON experiment config")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", opts.seed, "64-bit seed (overrides config)");
  sub->add_option("--trials", opts.trials, "number of trials (overrides config)");
  sub->add_option("--threads", opts.threads, "worker threads, 0 = all cores");
  if (with_output) {
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--format", opts.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  }
}

void load_config(ConfigHandle& cfg, const CommonOptions& opts, const CLI::App* sub) {
  check(nfloc_config_load(opts.config_path.empty() ? nullptr : opts.config_path.c_str(), &cfg.ptr),
        "loading config");
  if (sub->count("--seed")) check(nfloc_config_set_seed(cfg.ptr, opts.seed), "--seed");
  if (sub->count("--trials")) check(nfloc_config_set_trials(cfg.ptr, opts.trials), "--trials");
  if (sub->count("--threads")) check(nfloc_config_set_threads(cfg.ptr, opts.threads), "--threads");
}

int run_experiment(const std::string& kind, const CommonOptions& opts, const CLI::App* sub) {
  ConfigHandle cfg;
  load_config(cfg, opts, sub);
  char* summary = nullptr;
  const auto fmt = opts.format == "json" ? NFLOC_FORMAT_JSON : NFLOC_FORMAT_CSV;
  check(nfloc_experiment_run(cfg.ptr, kind.c_str(), opts.out_dir.c_str(), fmt, &summary),
        kind.c_str());
  std::cout << summary << '\n';
  nfloc_string_free(summary);
  return 0;
}

std::vector<double> read_measurements(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CliFailure(NFLOC_ERR_IO, "cannot open " + path);
  std::vector<double> y;
  std::string token;
  std::stringstream all;
  all << is.rdbuf();
  std::string text = all.str();
  for (char& ch : text) {
    if (ch == ',' || ch == ';') ch = ' ';
  }
  std::istringstream tokens(text);
  while (tokens >> token) {
    if (token[0] == '#') {
      std::getline(tokens, token);
      continue;
    }
    try {
      std::size_t used = 0;
      y.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw CliFailure(NFLOC_ERR_CONFIG, path + ": not a number: '" + token + "'");
    }
  }
  return y;
}

const char* termination_name(nfloc_termination t) {
  switch (t) {
    case NFLOC_TERM_STEP_TOLERANCE: return "step-tolerance";
    case NFLOC_TERM_GRADIENT_TOLERANCE: return "gradient-tolerance";
    case NFLOC_TERM_MAX_ITERATIONS: return "max-iterations";
    case NFLOC_TERM_NUMERICAL_FAILURE: return "numerical-failure";
    case NFLOC_TERM_DIRECT: return "direct";
  }
  return "unknown";
}

nfloc_algorithm algorithm_from(const std::string& name) {
  std::string lower;
  for (char ch : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "ml5d") return NFLOC_ALG_ML5D;
  if (lower == "ml3d") return NFLOC_ALG_ML3D;
  if (lower == "wls") return NFLOC_ALG_WLS;
  if (lower == "cascade") return NFLOC_ALG_CASCADE;
  if (lower == "baseline" || lower == "strongest-anchor") return NFLOC_ALG_BASELINE;
  throw CliFailure(NFLOC_ERR_CONFIG, "unknown algorithm '" + name + "'");
}

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run_estimate(const CommonOptions& opts, const CLI::App* sub, const std::string& path,
                 const std::string& algorithm, int inits, const std::vector<double>& truth) {
  ConfigHandle cfg;
  load_config(cfg, opts, sub);
  TopologyHandle topo;
  ParamsHandle params;
  check(nfloc_config_topology(cfg.ptr, &topo.ptr), "topology");
  check(nfloc_config_params(cfg.ptr, &params.ptr), "params");
  double rho = 0, sigma2 = 0;
  check(nfloc_params_rho(params.ptr, &rho), "rho");
  check(nfloc_params_sigma2(params.ptr, &sigma2), "sigma2");

  // Initial positions are drawn in the room box.
  const double lower[3] = {0, 0, 0};
  double upper[3];
  check(nfloc_config_room(cfg.ptr, upper), "room");

  std::uint64_t seed = opts.seed;
  if (!sub->count("--seed")) seed = 1;
  const std::vector<double> y = read_measurements(path);
  nfloc_estimate est{};
  check(nfloc_multi_start(algorithm_from(algorithm), y.data(), y.size(), topo.ptr, rho, sigma2,
                          inits, lower, upper, seed, nullptr, &est),
        "estimate");

  std::string error = "";
  if (truth.size() == 3) {
    const double dx = est.pose.position[0] - truth[0];
    const double dy = est.pose.position[1] - truth[1];
    const double dz = est.pose.position[2] - truth[2];
    error = real(std::sqrt(dx * dx + dy * dy + dz * dz));
  }
  std::cout << "algorithm,seed,inits,x_m,y_m,z_m,phi_rad,theta_rad,error_m,iterations,cost,"
               "termination\n";
  std::cout << algorithm << ',' << seed << ',' << inits << ',' << real(est.pose.position[0]) << ','
            << real(est.pose.position[1]) << ',' << real(est.pose.position[2]) << ','
            << (est.has_orientation ? real(est.pose.phi) : "") << ','
            << (est.has_orientation ? real(est.pose.theta) : "") << ',' << error << ','
            << est.iterations << ',' << real(est.residual_cost) << ','
            << termination_name(est.termination) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field magneto-inductive localization harness"};
  app.set_version_flag("--version", nfloc_version());
  app.require_subcommand(1);

  CommonOptions opts;
  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"topology", "write the anchor layout"},
      {"power-curve", "received power over distance with crossing distances"},
      {"peb-sweep", "median PEB over room side length and anchor count"},
      {"crlb-cdf", "bounds per deployment plus ML-at-truth RMS errors"},
      {"algo-compare", "estimator error, iteration and success statistics"},
  };
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& [name, help] : experiments) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, opts, true);
    subs.emplace_back(name, sub);
  }

  CLI::App* est = app.add_subcommand("estimate", "estimate one pose from a measurement file");
  add_common(est, opts, false);
  std::string measurements_path, algorithm = "cascade";
  int inits = 1;
  std::vector<double> truth;
  est->add_option("--measurements", measurements_path, "file with one y_n per anchor")
      ->required()
      ->check(CLI::ExistingFile);
  est->add_option("--algorithm", algorithm, "ml5d, ml3d, wls, cascade or baseline");
  est->add_option("--inits", inits, "number of random initializations")
      ->check(CLI::PositiveNumber);
  est->add_option("--truth", truth, "true position x y z, to report the error")->expected(3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) return run_experiment(name, opts, sub);
    }
    if (est->parsed()) return run_estimate(opts, est, measurements_path, algorithm, inits, truth);
  } catch (const CliFailure& e) {
    std::cerr << "nfloc: " << e.what() << '\n';
    return e.status() == NFLOC_ERR_CONFIG || e.status() == NFLOC_ERR_IO ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "nfloc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
