#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "relugf/config.hpp"
#include "relugf/csv.hpp"
#include "relugf/experiment.hpp"

using namespace relugf;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({"init": {"theta": [1.2, -0.05, 0.9, 0.05]}})");
}

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("relugf_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Config, Defaults) {
  const ExperimentConfig cfg = parse_config(minimal());
  EXPECT_EQ(cfg.shape.H, 1u);
  EXPECT_EQ(cfg.domain.a, 0.0);
  EXPECT_EQ(cfg.alpha, 1.0);
  EXPECT_EQ(cfg.flow.t_end, 100.0);
  EXPECT_EQ(cfg.checks, known_checks());
  EXPECT_EQ(cfg.initial_params(), ParamVector::single(1.2, -0.05, 0.9, 0.05));
}

TEST(Config, ErrorsNameTheField) {
  json j = minimal();
  j["flow"] = {{"rk_tol", 0.0}};
  EXPECT_NE(config_error(j).find("flow.rk_tol"), std::string::npos);

  j = minimal();
  j["flow"] = {{"rk_tolerance", 1e-9}};
  EXPECT_NE(config_error(j).find("flow.rk_tolerance"), std::string::npos);

  j = minimal();
  j["domain"] = {{"a", 1.0}, {"b", 0.0}};
  EXPECT_NE(config_error(j).find("domain.b"), std::string::npos);

  j = minimal();
  j["init"]["theta"] = {1, 2, 3};
  EXPECT_NE(config_error(j).find("init.theta"), std::string::npos);

  j = minimal();
  j["checks"] = {"energy", "telepathy"};
  EXPECT_NE(config_error(j).find("telepathy"), std::string::npos);

  j = minimal();
  j["output"] = {{"stride", 0}};
  EXPECT_NE(config_error(j).find("output.stride"), std::string::npos);

  j = minimal();
  j["shape"] = {{"d", 2}, {"H", 1}};
  j["init"]["theta"] = {1, 2, 3, 4, 5};
  EXPECT_NE(config_error(j).find("shape.d"), std::string::npos);

  EXPECT_NE(config_error(json::parse("{}")).find("init"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"init": {"random": {"distribution": "cauchy"}}})")).find("distribution"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"init": {"theta": [1,0,1,0]}, "extra": 1})")).find("extra"),
            std::string::npos);

  j = minimal();
  j["target"] = {{"pieces", {{{"lo", 0.0}, {"hi", 0.5}, {"slope", 1.0}, {"intercept", 0.0}},
                             {{"lo", 0.5}, {"hi", 1.0}, {"slope", 1.0}, {"intercept", 3.0}}}}};
  EXPECT_NE(config_error(j).find("target"), std::string::npos);
}

TEST(Config, RandomInitIsReproducible) {
  const json j = json::parse(R"({"shape": {"H": 4}, "init": {"random": {"seed": 5}}})");
  const ExperimentConfig a = parse_config(j);
  const ExperimentConfig b = parse_config(j);
  EXPECT_EQ(a.initial_params(), b.initial_params());
  EXPECT_DOUBLE_EQ(a.init_scale(), 0.5);
  json k = j;
  k["init"]["random"]["seed"] = 6;
  EXPECT_NE(parse_config(k).initial_params(), a.initial_params());
  k["init"]["random"] = {{"distribution", "uniform"}, {"scale", 0.1}, {"seed", 5}};
  const ParamVector u = parse_config(k).initial_params();
  for (double e : u.values()) EXPECT_LE(std::abs(e), 0.1);
}

TEST(Config, LoadsCommentedFiles) {
  const auto dir = scratch_dir("load");
  std::ofstream(dir / "c.json") << "// comment\n{\"init\": {\"theta\": [1, 0, 1, 0]}}\n";
  EXPECT_EQ(load_config((dir / "c.json").string()).initial_params(), ParamVector::single(1, 0, 1, 0));
  EXPECT_THROW(load_config((dir / "missing.json").string()), ConfigError);
  std::ofstream(dir / "bad.json") << "{\"init\": ";
  EXPECT_THROW(load_config((dir / "bad.json").string()), ConfigError);
}

TEST(Csv, DoubleFormattingRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 5e-324, 1.7976931348623157e308}) {
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
  EXPECT_THROW(parse_double("1.0x"), std::runtime_error);
}

TEST(Csv, HeaderLayout) {
  const auto h = trajectory_header(NetworkShape(1, 2));
  std::string joined;
  for (std::size_t k = 0; k < h.size(); ++k) joined += (k ? "," : "") + h[k];
  EXPECT_EQ(joined, "t,theta_1,theta_2,theta_3,theta_4,theta_5,theta_6,theta_7,risk,grad_norm,W_1,W_2,V");
}

TEST(Csv, TrajectoryRoundTripIsBitExact) {
  const ExperimentConfig cfg = parse_config(json::parse(R"({"shape": {"H": 3}, "init": {"random": {"seed": 2}},
                                                           "flow": {"t_end": 20}})"));
  const Trajectory tr = integrate(cfg.initial_params(), cfg.target(), cfg.domain, cfg.flow);
  std::stringstream ss;
  write_trajectory_csv(ss, tr, 1);
  const CsvTable t = read_csv(ss);
  ASSERT_EQ(t.rows.size(), tr.size());
  EXPECT_EQ(t.series("t"), tr.times);
  EXPECT_EQ(t.series("risk"), tr.risk);
  EXPECT_EQ(t.series("grad_norm"), tr.grad_norm);
  EXPECT_EQ(t.series("V"), tr.V);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    EXPECT_EQ(t.rows[k][t.column("W_2")], tr.W[k][1]);
    EXPECT_EQ(t.rows[k][t.column("theta_10")], tr.params[k].c());
  }
}

TEST(Csv, StrideKeepsFirstAndLastRows) {
  const ExperimentConfig cfg = parse_config(minimal());
  FlowConfig f = cfg.flow;
  f.t_end = 10;
  const Trajectory tr = integrate(cfg.initial_params(), cfg.target(), cfg.domain, f);
  std::stringstream ss;
  write_trajectory_csv(ss, tr, 7);
  const CsvTable t = read_csv(ss);
  EXPECT_EQ(t.rows.size(), (tr.size() - 1) / 7 + 1 + ((tr.size() - 1) % 7 != 0));
  EXPECT_EQ(t.rows.front()[0], 0.0);
  EXPECT_EQ(t.rows.back()[0], 10.0);
}

TEST(Experiment, SameConfigGivesIdenticalFiles) {
  const ExperimentConfig cfg =
      parse_config(json::parse(R"({"shape": {"H": 2}, "init": {"random": {"seed": 11}}, "flow": {"t_end": 30}})"));
  const auto dir = scratch_dir("repro");
  write_outputs(cfg, run_simulation(cfg), (dir / "a").string());
  write_outputs(cfg, run_simulation(cfg), (dir / "b").string());
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string a = slurp(dir / "a" / "trajectory.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b" / "trajectory.csv"));
  EXPECT_EQ(slurp(dir / "a" / "summary.txt"), slurp(dir / "b" / "summary.txt"));
}

TEST(Experiment, SummaryContents) {
  ExperimentConfig cfg = parse_config(minimal());
  cfg.flow.t_end = 1000;
  const SimulationResult res = run_simulation(cfg);
  EXPECT_TRUE(res.all_pass());
  EXPECT_EQ(res.rung, "ZERO");
  const std::string s = format_summary(cfg, res);
  EXPECT_NE(s.find("ladder_rung: ZERO"), std::string::npos);
  EXPECT_NE(s.find("terminal_risk: "), std::string::npos);
  EXPECT_NE(s.find("verdict: PASS"), std::string::npos);
  EXPECT_LT(res.trajectory.risk.back(), 1e-8);
}
