#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "lyapguard/trajectory_csv.hpp"
#include "lyapguard_cli/commands.hpp"
#include "lyapguard_cli/config.hpp"
#include "test_support.hpp"

namespace lyapguard::cli {
namespace {

using lyapguard::testing::TempDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "lyapguard");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

RunConfig nominal() { return load_config(lyapguard::testing::config_path("nominal.json")); }

std::string write_config(const TempDir& dir, const RunConfig& cfg, const std::string& name) {
  const auto path = dir / name;
  lyapguard::testing::write_file(path, serialize_config(cfg));
  return path.string();
}

RunConfig short_run(double duration = 1.0) {
  RunConfig cfg = nominal();
  cfg.scenario.duration = duration;
  cfg.scenario.disturbance.clear();
  return cfg;
}

DisturbanceSegment constant_torque(double start, double end, double value) {
  DisturbanceSegment seg;
  seg.kind = DisturbanceSegment::Kind::Constant;
  seg.start = start;
  seg.end = end;
  seg.value = Vec3(value, 0.0, 0.0);
  return seg;
}

const std::vector<std::string> kEmitArgs = {"--E", "1.6,3.1,2,9.3,6.8,4.8", "--branch", "15"};

std::vector<std::string> check_args(const std::string& config, const std::string& prover) {
  std::vector<std::string> a = {"check", "--config", config, "--prover", prover};
  a.insert(a.end(), kEmitArgs.begin(), kEmitArgs.end());
  return a;
}

TEST(Config, RoundTrip) {
  for (const char* name : {"nominal.json", "reference_conjecture.json"}) {
    const RunConfig cfg = load_config(lyapguard::testing::config_path(name));
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg) << name;
    EXPECT_EQ(serialize_config(parse_config(serialize_config(cfg))), serialize_config(cfg));
  }
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
  EXPECT_THROW(parse_config(R"({"plant": {"arm": 1.0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"gains": {"k_eta": [1, 2]}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"bounds": {"D": "small"}})"), ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
  EXPECT_THROW(parse_config(R"({"v_bound": {"rate_coeff": [1, 1, 1]}})"), ConfigError);
}

TEST(Config, ValidateChecksReferenceAcceleration) {
  RunConfig cfg = nominal();
  AxisReference fast;
  fast.kind = AxisReference::Kind::Sinusoid;
  fast.amplitude = 1.0;
  fast.frequency = 2.0;  // peak acceleration 4 > H
  cfg.scenario.reference = Reference({fast, AxisReference{}, AxisReference{}});
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, exit_code::kUsage);
  EXPECT_EQ(run({"fly"}).code, exit_code::kUsage);
  EXPECT_EQ(run({"simulate"}).code, exit_code::kUsage);
  const std::string cfg = lyapguard::testing::config_path("reference_conjecture.json").string();
  EXPECT_EQ(run({"emit-fof", "--config", cfg, "--E", "1,2,3"}).code, exit_code::kUsage);
  EXPECT_EQ(run({"emit-fof", "--config", cfg, "--E", "1,2,3,4,5,6", "--branch", "17"}).code,
            exit_code::kUsage);
  EXPECT_EQ(run({"--help"}).code, exit_code::kOk);
}

TEST(Cli, ConfigErrors) {
  TempDir dir;
  EXPECT_EQ(run({"simulate", "--config", (dir / "missing.json").string()}).code,
            exit_code::kConfig);
  RunConfig cfg = short_run();
  cfg.bounds.disturbance_total = cfg.bounds.disturbance;
  const Outcome o = run({"simulate", "--config", write_config(dir, cfg, "bad.json"), "--out",
                         (dir / "t.csv").string()});
  EXPECT_EQ(o.code, exit_code::kConfig);
  EXPECT_NE(o.err.find("D_bar"), std::string::npos);
  EXPECT_NE(o.err.find("||d|| + D < D_bar"), std::string::npos);
  lyapguard::testing::write_file(dir / "unknown.json", R"({"plant": {"mass": 1.0}})");
  EXPECT_EQ(run({"monitor", "--config", (dir / "unknown.json").string(), "--live"}).code,
            exit_code::kConfig);
}

TEST(Cli, SimulateWritesCsvAndSidecar) {
  TempDir dir;
  const std::string cfg = write_config(dir, short_run(), "cfg.json");
  const std::string csv = (dir / "t.csv").string();
  const Outcome o = run({"simulate", "--config", cfg, "--out", csv});
  ASSERT_EQ(o.code, exit_code::kOk) << o.err;
  std::ifstream in(csv);
  TrajectoryCsvReader reader(in);
  std::size_t rows = 0;
  while (reader.next()) ++rows;
  EXPECT_EQ(rows, 1001u);
  const std::string sidecar = lyapguard::testing::read_file(csv + ".cert.json");
  EXPECT_NE(sidecar.find("\"rows\": 1001"), std::string::npos);
  EXPECT_NE(sidecar.find("\"aborted\": false"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--config", cfg}).code, exit_code::kUsage);
  EXPECT_EQ(run({"simulate", "--config", cfg, "--out", (dir / "no/such/dir.csv").string()}).code,
            exit_code::kUsage);
}

TEST(Cli, SimulateIsByteDeterministic) {
  TempDir dir;
  RunConfig cfg = short_run();
  DisturbanceSegment r;
  r.kind = DisturbanceSegment::Kind::Random;
  r.start = 0.0;
  r.end = 1.0;
  r.hold = 0.05;
  r.value = Vec3::Constant(5e-4);
  cfg.scenario.disturbance = {r};
  const std::string path = write_config(dir, cfg, "cfg.json");
  ASSERT_EQ(run({"simulate", "--config", path, "--out", (dir / "a.csv").string()}).code, 0);
  ASSERT_EQ(run({"simulate", "--config", path, "--out", (dir / "b.csv").string()}).code, 0);
  EXPECT_EQ(lyapguard::testing::read_file(dir / "a.csv"),
            lyapguard::testing::read_file(dir / "b.csv"));
}

TEST(Cli, SimulateSingularityAbort) {
  TempDir dir;
  RunConfig cfg = short_run();
  cfg.scenario.open_loop = true;
  cfg.scenario.initial_eta_dot = Vec3(0.0, 5.0, 0.0);
  const std::string csv = (dir / "t.csv").string();
  const Outcome o = run({"simulate", "--config", write_config(dir, cfg, "c.json"), "--out", csv});
  EXPECT_EQ(o.code, exit_code::kSingularity);
  EXPECT_NE(o.err.find("aborted at t="), std::string::npos);
  EXPECT_NE(lyapguard::testing::read_file(csv + ".cert.json").find("\"aborted\": true"),
            std::string::npos);
}

TEST(Cli, MonitorStableRun) {
  TempDir dir;
  const std::string cfg = write_config(dir, short_run(2.0), "cfg.json");
  const std::string csv = (dir / "t.csv").string();
  ASSERT_EQ(run({"simulate", "--config", cfg, "--out", csv}).code, 0);
  const Outcome o = run({"monitor", "--config", cfg, "--in", csv});
  EXPECT_EQ(o.code, exit_code::kOk) << o.out;
  EXPECT_TRUE(o.out.empty());
  EXPECT_NE(o.err.find("final state Stable"), std::string::npos);
  EXPECT_EQ(run({"monitor", "--config", cfg, "--live"}).code, exit_code::kOk);
}

TEST(Cli, MonitorWarningThenRecovery) {
  TempDir dir;
  RunConfig cfg = short_run();
  cfg.scenario.disturbance = {constant_torque(0.5, 0.502, 0.012)};
  const std::string path = write_config(dir, cfg, "cfg.json");
  const Outcome o = run({"monitor", "--config", path, "--live"});
  EXPECT_EQ(o.code, exit_code::kWarning) << o.out;
  EXPECT_NE(o.out.find("\"to\":\"Warning\""), std::string::npos);
  EXPECT_NE(o.out.find("\"to\":\"Stable\""), std::string::npos);
}

TEST(Cli, MonitorViolation) {
  TempDir dir;
  RunConfig cfg = short_run();
  cfg.scenario.disturbance = {constant_torque(0.5, 1.0, 0.012)};
  const std::string path = write_config(dir, cfg, "cfg.json");
  const std::string log = (dir / "transitions.jsonl").string();
  const Outcome o = run({"monitor", "--config", path, "--live", "--out", log});
  EXPECT_EQ(o.code, exit_code::kViolation);
  const std::string text = lyapguard::testing::read_file(log);
  EXPECT_NE(text.find("\"to\":\"Violation\""), std::string::npos);
  EXPECT_NE(text.find("DisturbanceBound"), std::string::npos);
}

TEST(Cli, MonitorMalformedInput) {
  TempDir dir;
  const std::string cfg = write_config(dir, short_run(), "cfg.json");
  lyapguard::testing::write_file(dir / "bad.csv", "t,x\n0,1\n");
  EXPECT_EQ(run({"monitor", "--config", cfg, "--in", (dir / "bad.csv").string()}).code,
            exit_code::kBadCsv);

  std::ostringstream rows;
  write_csv_header(rows);
  LogSample late;
  late.t = 1.0;
  write_csv_row(rows, late);
  LogSample early;
  early.t = 0.5;
  write_csv_row(rows, early);
  lyapguard::testing::write_file(dir / "order.csv", rows.str());
  const Outcome o = run({"monitor", "--config", cfg, "--in", (dir / "order.csv").string()});
  EXPECT_EQ(o.code, exit_code::kBadCsv);
  EXPECT_NE(o.err.find("out of order"), std::string::npos);
  EXPECT_EQ(run({"monitor", "--config", cfg, "--in", (dir / "none.csv").string()}).code,
            exit_code::kUsage);
  EXPECT_EQ(run({"monitor", "--config", cfg}).code, exit_code::kUsage);
}

TEST(Cli, MonitorEmptyInputIsStable) {
  TempDir dir;
  const std::string cfg = write_config(dir, short_run(), "cfg.json");
  lyapguard::testing::write_file(dir / "empty.csv", "");
  EXPECT_EQ(run({"monitor", "--config", cfg, "--in", (dir / "empty.csv").string()}).code,
            exit_code::kOk);
  std::ostringstream header;
  write_csv_header(header);
  lyapguard::testing::write_file(dir / "header.csv", header.str());
  EXPECT_EQ(run({"monitor", "--config", cfg, "--in", (dir / "header.csv").string()}).code,
            exit_code::kOk);
}

TEST(Cli, EmitFofMatchesGolden) {
  TempDir dir;
  const std::string cfg = lyapguard::testing::config_path("reference_conjecture.json").string();
  const std::string out = (dir / "eq15.p").string();
  std::vector<std::string> args = {"emit-fof", "--config", cfg, "--out", out};
  args.insert(args.end(), kEmitArgs.begin(), kEmitArgs.end());
  ASSERT_EQ(run(args).code, exit_code::kOk);
  EXPECT_EQ(lyapguard::testing::read_file(out),
            lyapguard::testing::read_file(lyapguard::testing::golden_path("stability_eq15.p")));
  const Outcome o = run({"emit-fof", "--config", cfg, "--E", "2.9,1.2,1.8,6.9,10.5,5",
                         "--branch", "16", "--name", "Custom_Name"});
  EXPECT_EQ(o.code, exit_code::kOk);
  EXPECT_EQ(o.out.rfind("fof(Custom_Name,conjecture,", 0), 0u);
}

TEST(Cli, CheckExitCodesFollowSzsStatus) {
  TempDir dir;
  const std::string cfg = lyapguard::testing::config_path("reference_conjecture.json").string();
  struct Case {
    const char* body;
    int code;
  };
  const Case cases[] = {
      {"echo '% SZS status Theorem for Stability_Eq15'", exit_code::kOk},
      {"echo '% SZS status CounterSatisfiable for Stability_Eq15'",
       exit_code::kCounterSatisfiable},
      {"echo '% SZS status GaveUp for Stability_Eq15'", exit_code::kGaveUp},
      {"echo 'Segmentation fault'; exit 139", exit_code::kProverError},
  };
  int i = 0;
  for (const Case& c : cases) {
    const auto stub =
        lyapguard::testing::write_stub_prover(dir, "p" + std::to_string(i++), c.body);
    const Outcome o = run(check_args(cfg, stub.string()));
    EXPECT_EQ(o.code, c.code) << c.body << "\n" << o.err;
    if (c.code != exit_code::kProverError) {
      EXPECT_EQ(o.out.rfind("SZS status ", 0), 0u);
    } else {
      EXPECT_NE(o.err.find("Segmentation fault"), std::string::npos);
    }
  }
  const auto slow = lyapguard::testing::write_stub_prover(dir, "slow", "exec sleep 30");
  std::vector<std::string> args = check_args(cfg, slow.string());
  args.insert(args.end(), {"--timeout-s", "0.2"});
  const Outcome o = run(args);
  EXPECT_EQ(o.code, exit_code::kGaveUp);
  EXPECT_NE(o.out.find("SZS status Timeout"), std::string::npos);
}

TEST(Cli, CheckWithoutProver) {
  TempDir dir;
  const std::string cfg = lyapguard::testing::config_path("reference_conjecture.json").string();
  const Outcome o = run(check_args(cfg, (dir / "metit").string()));
  EXPECT_EQ(o.code, exit_code::kProverUnavailable);
  EXPECT_NE(o.err.find("LYAPGUARD_PROVER"), std::string::npos);
}

TEST(Cli, ExecutableReportsExitCodes) {
  TempDir dir;
  const std::string cfg = write_config(dir, short_run(), "cfg.json");
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  const std::string bin = LYAPGUARD_CLI_PATH;
  EXPECT_EQ(status(bin + " monitor --config " + cfg + " --live"), 0);
  EXPECT_EQ(status(bin + " monitor --config " + cfg + " --in - < /dev/null"), 0);
  EXPECT_EQ(status(bin + " bogus"), 1);
}

}  // namespace
}  // namespace lyapguard::cli
