#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/experiment.hpp"
#include "helpers.hpp"

using namespace nfloc;
using namespace nfloc::test;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nfloc_unit_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.trials = 12;
  c.noise_realizations = 20;
  c.seed = 99;
  c.sweep.side_lengths = {6, 10};
  c.sweep.anchor_counts = {5, 12};
  c.power.points = 10;
  c.power.alignment_samples = 20000;
  return c;
}

}  // namespace

TEST_CASE("wall topology") {
  const Room room;
  const AnchorTopology t = generate_topology(12, room);
  REQUIRE(t.size() == 12);
  int per_wall[4] = {0, 0, 0, 0};
  for (const auto& a : t) {
    CHECK(std::abs(a.orientation.vec().norm() - 1.0) < 1e-12);
    const Vec3& p = a.position;
    int wall = -1;
    if (p.y() == 0.0) wall = 0;
    if (p.x() == room.side_x) wall = 1;
    if (p.y() == room.side_y) wall = 2;
    if (p.x() == 0.0) wall = 3;
    REQUIRE(wall >= 0);
    ++per_wall[wall];
    const Vec3 inward[4] = {Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, -1, 0), Vec3(1, 0, 0)};
    CHECK((a.orientation.vec() - inward[wall]).norm() < 1e-15);
    CHECK(p.z() > 0.0);
    CHECK(p.z() < room.height);
  }
  for (int w = 0; w < 4; ++w) CHECK(per_wall[w] == 3);

  const AnchorTopology five = generate_topology(5, room);
  CHECK(five[0].position.y() == 0.0);
  CHECK(five[4].position.y() == 0.0);

  for (std::size_t n : {3, 5, 8, 12, 20, 40}) {
    const AnchorTopology tn = generate_topology(n, room);
    double lo = 1e9, hi = -1e9;
    for (const auto& a : tn) {
      lo = std::min(lo, a.position.z());
      hi = std::max(hi, a.position.z());
    }
    CHECK(hi - lo >= 2.0 / 3.0 * room.height - 1e-12);
  }
  CHECK_THROWS_AS(generate_topology(0, room), Error);
}

TEST_CASE("deployment sampling statistics") {
  const Room room;
  Rng rng(17);
  const int n = 100000;
  Vec3 mean_p = Vec3::Zero(), mean_o = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    const Pose p = sample_deployment(rng, room);
    CHECK_FALSE(((p.position.array() < kDeploymentMargin).any()));
    mean_p += p.position;
    mean_o += orientation_from_spherical(p.orientation).vec();
  }
  mean_p /= n;
  mean_o /= n;
  CHECK(std::abs(mean_p.x() - 5.0) < 0.05);
  CHECK(std::abs(mean_p.y() - 5.0) < 0.05);
  CHECK(std::abs(mean_p.z() - 1.5) < 0.015);
  CHECK(mean_o.norm() < 0.02);

  Rng a(5), b(5);
  const Pose pa = sample_deployment(a, room), pb = sample_deployment(b, room);
  CHECK(pa.position == pb.position);
  CHECK(pa.orientation.phi == pb.orientation.phi);
}

TEST_CASE("measurement noise") {
  const Reference ref;
  const Pose pose{Vec3(3, 7, 1), {2.0, 0.8}};
  Rng rng(1);
  CHECK(simulate_measurement(rng, pose, ref.topo, ref.rho, 0.0) ==
        forward_model(pose, ref.topo, ref.rho));

  const MeasurementVector s = forward_model(pose, ref.topo, ref.rho);
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(12), sq = Eigen::VectorXd::Zero(12);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd w = simulate_measurement(rng, pose, ref.topo, ref.rho, ref.sigma2) - s;
    sum += w;
    sq += w.cwiseAbs2();
  }
  for (int k = 0; k < 12; ++k) {
    const double mean = sum[k] / n;
    const double var = (sq[k] - n * mean * mean) / (n - 1);
    CHECK(std::abs(var / ref.sigma2 - 1.0) < 0.03);
  }
  Rng a(9), b(9);
  CHECK(simulate_measurement(a, pose, ref.topo, ref.rho, ref.sigma2) ==
        simulate_measurement(b, pose, ref.topo, ref.rho, ref.sigma2));
}

TEST_CASE("seed derivation") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(1, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw Error(ErrorCode::NumericalFailure, "x");
                               }),
                  Error);
}

TEST_CASE("config parsing") {
  const ExperimentConfig def = config_from_json(nlohmann::json::object());
  CHECK(def.anchor_count == 12);
  CHECK(def.trials == 1000);
  CHECK(*def.params.rho_squared_dbm == -50.4);

  const ExperimentConfig c = small_config();
  const ExperimentConfig back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
  CHECK(config_to_json(back).dump() == config_to_json(c).dump());

  auto expect_config_error = [](const char* text) {
    try {
      config_from_json(nlohmann::json::parse(text));
      FAIL("accepted " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Config);
    }
  };
  expect_config_error(R"({"trials": 0})");
  expect_config_error(R"({"unknown": 1})");
  expect_config_error(R"({"room": {"side_x_m": -1}})");
  expect_config_error(R"({"algorithms": ["gauss"]})");
  expect_config_error(R"({"solver": {"min_step": 0}})");
  expect_config_error(R"({"trials": "many"})");
  expect_config_error(R"({"anchors": [{"position_m": [0, 0, 0], "orientation": [0, 0, 1]},
                                      {"position_m": [0, 0, 0], "orientation": [1, 0, 0]}]})");

  const ExperimentConfig custom = config_from_json(nlohmann::json::parse(
      R"({"anchors": [{"position_m": [0, 0, 1], "orientation": [0, 0, 2]},
                      {"position_m": [1, 0, 1], "orientation": [1, 0, 0]}]})"));
  CHECK(custom.topology().size() == 2);
  CHECK(custom.topology()[0].orientation.vec() == Vec3(0, 0, 1));
}

TEST_CASE("table formatting") {
  Table t({"a", "b", "c"});
  t.add_row({std::string("x"), 0.1, std::int64_t{3}});
  t.add_row({std::string("y"), std::nan(""), std::int64_t{-1}});
  std::ostringstream csv;
  t.write_csv(csv);
  CHECK(csv.str() == "a,b,c\nx,0.10000000000000001,3\ny,nan,-1\n");
  CHECK_THROWS_AS(t.add_row({1.0}), Error);
  std::ostringstream js;
  t.write_json(js);
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(doc[0]["b"] == 0.1);
  CHECK(doc[1]["b"] == "nan");
}

TEST_CASE("PEB sweep properties") {
  ExperimentConfig c = small_config();
  const ExperimentResult r = run_peb_sweep(c);
  const Table& summary = r.table("peb_sweep");
  CHECK(summary.rows().size() == 4);
  for (const auto& row : summary.rows()) {
    const double unknown = std::get<double>(row[3]);
    const double known = std::get<double>(row[4]);
    CHECK(known <= unknown);
    CHECK(std::get<std::int64_t>(row[5]) + std::get<std::int64_t>(row[6]) ==
          static_cast<std::int64_t>(c.trials));
  }

  // Doubling the trial count keeps the first half of the records. Compared as
  // CSV text since excluded trials carry NaN bounds.
  auto csv_lines = [](const Table& t) {
    std::ostringstream os;
    t.write_csv(os);
    std::set<std::string> lines;
    std::istringstream is(os.str());
    for (std::string line; std::getline(is, line);) lines.insert(line);
    return lines;
  };
  const auto first = csv_lines(r.table("peb_sweep_trials"));
  ExperimentConfig doubled = c;
  doubled.trials *= 2;
  const auto second = csv_lines(run_peb_sweep(doubled).table("peb_sweep_trials"));
  CHECK(first.size() == 4 * c.trials + 1);
  for (const auto& line : first) CHECK_MESSAGE(second.count(line) == 1, line);
}

TEST_CASE("experiment outputs are byte-identical across runs and thread counts") {
  for (const char* kind : {"topology", "power-curve", "peb-sweep", "crlb-cdf", "algo-compare"}) {
    ExperimentConfig c = small_config();
    c.threads = 1;
    const auto dir_a = scratch(std::string(kind) + "_a");
    const auto dir_b = scratch(std::string(kind) + "_b");
    const auto files = write_result(run_experiment(kind, c), c, dir_a, OutputFormat::Csv);
    c.threads = 4;
    write_result(run_experiment(kind, c), c, dir_b, OutputFormat::Csv);
    for (const auto& f : files) {
      CHECK_MESSAGE(slurp(f) == slurp(dir_b / f.filename()), kind << ": " << f.filename());
    }
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
  }
  CHECK_THROWS_AS(run_experiment("fig7", small_config()), Error);
}

TEST_CASE("crlb-cdf and algo-compare record accounting") {
  const ExperimentConfig c = small_config();
  const ExperimentResult crlb = run_crlb_cdf(c);
  CHECK(crlb.summary["emitted"].get<std::size_t>() + crlb.summary["excluded"].get<std::size_t>() ==
        c.trials);
  CHECK(crlb.table("crlb_cdf").rows().size() == c.trials);

  const ExperimentResult algo = run_algo_compare(c);
  // truth reference + 5 single-init algorithms + 2 multi-start variants
  CHECK(algo.table("algo_compare_trials").rows().size() == c.trials * 8);
  for (const auto& row : algo.table("algo_compare").rows()) {
    CHECK(std::get<std::int64_t>(row[2]) == static_cast<std::int64_t>(c.trials));
  }
}

TEST_CASE("cascade error CDF dominates the strongest-anchor baseline beyond 0.1 m") {
  ExperimentConfig c;
  c.trials = 200;
  c.seed = 2024;
  c.algorithms = {Algorithm::Cascade, Algorithm::Baseline};
  c.init_count = 1;
  const ExperimentResult r = run_algo_compare(c);
  const Table& t = r.table("algo_compare_trials");
  std::vector<double> cascade_err, baseline_err;
  for (const auto& row : t.rows()) {
    const auto& name = std::get<std::string>(row[2]);
    const double e = std::get<double>(row[4]);
    if (name == "CASCADE") cascade_err.push_back(e);
    if (name == "BASELINE") baseline_err.push_back(e);
  }
  REQUIRE(cascade_err.size() == c.trials);
  REQUIRE(baseline_err.size() == c.trials);
  std::sort(cascade_err.begin(), cascade_err.end());
  std::sort(baseline_err.begin(), baseline_err.end());
  auto cdf = [](const std::vector<double>& v, double x) {
    return static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin()) /
           static_cast<double>(v.size());
  };
  for (double e = 0.1; e < baseline_err.back(); e += 0.01) {
    CHECK_MESSAGE(cdf(cascade_err, e) > cdf(baseline_err, e), "error level " << e);
  }
}
