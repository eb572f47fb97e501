#include "lyapguard_cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lyapguard/prover.hpp"
#include "lyapguard/trajectory_csv.hpp"

namespace lyapguard::cli {
namespace {

using nlohmann::json;

struct Loaded {
  std::optional<RunConfig> cfg;
  int code = exit_code::kOk;
};

Loaded load_validated(const std::string& path, std::ostream& err) {
  Loaded r;
  if (path.empty()) {
    err << "error: --config is required\n";
    r.code = exit_code::kUsage;
    return r;
  }
  try {
    RunConfig cfg = load_config(path);
    cfg.validate();
    r.cfg = std::move(cfg);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    r.code = exit_code::kConfig;
  }
  return r;
}

json vec6_json(const Vec6& v) {
  json a = json::array();
  for (int i = 0; i < 6; ++i) a.push_back(v(i));
  return a;
}

// Output stream: the named file, or `fallback` when the path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw std::ios_base::failure("cannot open " + path + " for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  bool good() const { return static_cast<bool>(*stream_); }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

// Pushes log rows through the monitor and writes transition records.
class MonitorConsumer {
 public:
  MonitorConsumer(const RunConfig& cfg, std::ostream& log)
      : monitor_(cfg.monitor_config()), reference_(cfg.scenario.reference), log_(log) {}

  void operator()(const LogSample& row) {
    for (const Transition& tr : monitor_.feed(to_monitor_sample(row, reference_))) {
      log_ << transition_json(tr) << "\n";
      ++transitions_;
    }
  }

  int exit_code() const { return monitor_.exit_code(); }
  std::size_t transitions() const { return transitions_; }
  VerdictState state() const { return monitor_.state().state; }

 private:
  Monitor monitor_;
  Reference reference_;
  std::ostream& log_;
  std::size_t transitions_ = 0;
};

Simulator make_simulator(const RunConfig& cfg) {
  return Simulator(cfg.plant, cfg.gains, cfg.bounds, cfg.v_bound_template(), cfg.scenario,
                   cfg.monitor.envelope);
}

}  // namespace

Branch branch_from_equation(int equation) {
  if (equation == 15) return Branch::Outside;
  if (equation == 16) return Branch::BoundaryLayer;
  throw InvalidArgument("--branch must be 15 or 16");
}

std::string transition_json(const Transition& tr) {
  json causes = json::array();
  for (Cause c : tr.causes.list()) causes.push_back(std::string(to_string(c)));
  json margins = json::object();
  for (const auto& [k, v] : tr.margins) margins[k] = v;
  json rec = {{"t", tr.t},
              {"from", std::string(to_string(tr.from))},
              {"to", std::string(to_string(tr.to))},
              {"causes", causes},
              {"margins", margins}};
  return rec.dump();
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  Loaded loaded = load_validated(args.config, err);
  if (!loaded.cfg) return loaded.code;
  const RunConfig& cfg = *loaded.cfg;
  const std::string path = args.out.empty() ? cfg.output.csv : args.out;
  if (path.empty()) {
    err << "error: no CSV output path (--out or output.csv)\n";
    return exit_code::kUsage;
  }

  std::ofstream csv(path, std::ios::binary | std::ios::trunc);
  if (!csv) {
    err << "error: cannot open " << path << " for writing\n";
    return exit_code::kUsage;
  }
  TrajectoryLog status;
  std::size_t rows = 0;
  try {
    const Simulator sim = make_simulator(cfg);
    write_csv_header(csv);
    status = sim.run([&](const LogSample& s) {
      write_csv_row(csv, s);
      ++rows;
    });

    const CertSummary summary = sim.controller().cert().summary();
    json sidecar = {{"q_eigenvalues", vec6_json(summary.q_eigenvalues)},
                    {"p_eigenvalues", vec6_json(summary.p_eigenvalues)},
                    {"residual", summary.residual},
                    {"a_spectral_abscissa", summary.a_spectral_abscissa},
                    {"rows", rows},
                    {"aborted", status.aborted},
                    {"abort_reason", status.abort_reason}};
    std::ofstream side(path + ".cert.json", std::ios::binary | std::ios::trunc);
    side << sidecar.dump(2) << "\n";
    if (!side) {
      err << "error: cannot write " << path << ".cert.json\n";
      return exit_code::kUsage;
    }
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_code::kConfig;
  }
  csv.flush();
  if (!csv) {
    err << "error: write to " << path << " failed\n";
    return exit_code::kUsage;
  }
  if (status.aborted) {
    err << "simulation " << status.abort_reason << "\n";
    return exit_code::kSingularity;
  }
  out << "wrote " << rows << " samples to " << path << "\n";
  return exit_code::kOk;
}

int cmd_monitor(const MonitorArgs& args, std::ostream& out, std::ostream& err) {
  Loaded loaded = load_validated(args.config, err);
  if (!loaded.cfg) return loaded.code;
  const RunConfig& cfg = *loaded.cfg;
  const std::string log_path = args.out.empty() ? cfg.output.transitions : args.out;

  try {
    Sink log(log_path, out);
    MonitorConsumer consumer(cfg, log.stream());

    if (args.live) {
      const TrajectoryLog status = make_simulator(cfg).run(std::ref(consumer));
      if (status.aborted) err << "simulation " << status.abort_reason << "\n";
    } else {
      std::ifstream file;
      std::istream* in = &std::cin;
      if (args.in.empty()) {
        err << "error: monitor needs --in <csv> or --live\n";
        return exit_code::kUsage;
      }
      if (args.in != "-") {
        file.open(args.in, std::ios::binary);
        if (!file) {
          err << "error: cannot read " << args.in << "\n";
          return exit_code::kUsage;
        }
        in = &file;
      }
      TrajectoryCsvReader reader(*in);
      while (auto row = reader.next()) consumer(*row);
    }
    log.stream().flush();
    err << "monitor: final state " << to_string(consumer.state()) << ", "
        << consumer.transitions() << " transition(s)\n";
    return consumer.exit_code();
  } catch (const CsvError& e) {
    err << "malformed trajectory: " << e.what() << "\n";
    return exit_code::kBadCsv;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const InvalidArgument& e) {
    // Out-of-order timestamps in the input stream.
    err << "malformed trajectory: " << e.what() << "\n";
    return exit_code::kBadCsv;
  }
}

FofConjecture build_conjecture(const RunConfig& cfg, const Vec6& E, Branch branch,
                               const std::string& name) {
  const LyapunovCert cert(cfg.gains);
  const VdotPolynomial vdot = vdot_polynomial(cert, cfg.plant);
  return emit_conjecture(cfg.bounds, cfg.v_bound_template(), E, vdot,
                         name.empty() ? default_conjecture_name(branch) : name, branch);
}

namespace {

struct Emitted {
  std::optional<FofConjecture> conj;
  std::optional<RunConfig> cfg;
  int code = exit_code::kOk;
};

Emitted emit(const EmitArgs& args, std::ostream& err) {
  Emitted r;
  Loaded loaded = load_validated(args.config, err);
  if (!loaded.cfg) {
    r.code = loaded.code;
    return r;
  }
  if (args.E.size() != 6) {
    err << "error: --E needs exactly six values, got " << args.E.size() << "\n";
    r.code = exit_code::kUsage;
    return r;
  }
  try {
    const Vec6 E = Eigen::Map<const Vec6>(args.E.data());
    r.conj = build_conjecture(*loaded.cfg, E, branch_from_equation(args.branch), args.name);
    r.cfg = std::move(loaded.cfg);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    r.code = exit_code::kConfig;
  }
  return r;
}

}  // namespace

int cmd_emit_fof(const EmitArgs& args, std::ostream& out, std::ostream& err) {
  Emitted e = emit(args, err);
  if (!e.conj) return e.code;
  const std::string path = args.out.empty() ? e.cfg->output.tptp : args.out;
  try {
    Sink sink(path, out);
    sink.stream() << render(*e.conj);
    sink.stream().flush();
    if (!sink.good()) throw std::ios_base::failure("write failed");
  } catch (const std::ios_base::failure& ex) {
    err << "error: " << ex.what() << "\n";
    return exit_code::kUsage;
  }
  return exit_code::kOk;
}

int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
  Emitted e = emit(args.emit, err);
  if (!e.conj) return e.code;

  std::string prover = args.prover;
  if (prover.empty()) {
    if (const char* env = std::getenv("LYAPGUARD_PROVER")) prover = env;
  }
  if (prover.empty()) {
    err << "error: no prover configured; pass --prover <path> or set LYAPGUARD_PROVER "
           "to a TPTP prover binary such as metit\n";
    return exit_code::kProverUnavailable;
  }

  SzsResult result;
  try {
    ProverOptions opts;
    opts.timeout_s = args.timeout_s;
    opts.extra_args = args.prover_args;
    result = run_prover(prover, *e.conj, opts);
  } catch (const ProverUnavailable& ex) {
    err << "error: " << ex.what()
        << "; pass --prover <path> or set LYAPGUARD_PROVER to a TPTP prover binary\n";
    return exit_code::kProverUnavailable;
  } catch (const InvalidArgument& ex) {
    err << "error: " << ex.what() << "\n";
    return exit_code::kUsage;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return exit_code::kProverUnavailable;
  }

  out << "SZS status " << to_string(result.status) << " for " << e.conj->name << " ("
      << result.wall_time << " s)\n";
  switch (result.status) {
    case SzsStatus::Theorem: return exit_code::kOk;
    case SzsStatus::CounterSatisfiable: return exit_code::kCounterSatisfiable;
    case SzsStatus::GaveUp:
    case SzsStatus::Timeout: return exit_code::kGaveUp;
    case SzsStatus::Error: break;
  }
  err << "prover output had no recognised SZS status:\n" << result.raw;
  return exit_code::kProverError;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust attitude control verification toolkit", "lyapguard"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a closed-loop scenario and log it as CSV");
  simulate->add_option("--config", sim.config, "Run configuration (JSON)")->required();
  simulate->add_option("--out", sim.out, "Trajectory CSV path");

  MonitorArgs mon;
  auto* monitor = app.add_subcommand("monitor", "Stream a trajectory through the stability monitor");
  monitor->add_option("--config", mon.config, "Run configuration (JSON)")->required();
  monitor->add_option("--in", mon.in, "Trajectory CSV (- for stdin)");
  monitor->add_flag("--live", mon.live, "Simulate the configured scenario and monitor it directly");
  monitor->add_option("--out", mon.out, "Transition log (JSON lines)");

  auto add_emit_options = [](CLI::App* cmd, EmitArgs& a) {
    cmd->add_option("--config", a.config, "Run configuration (JSON)")->required();
    cmd->add_option("--E", a.E, "Error state E_1..E_6")->delimiter(',')->required();
    cmd->add_option("--branch", a.branch, "Conclusion form: 15 outside the boundary layer, 16 inside")
        ->check(CLI::IsMember({15, 16}));
    cmd->add_option("--name", a.name, "Conjecture name");
  };

  EmitArgs em;
  auto* emit_cmd = app.add_subcommand("emit-fof", "Write the stability conjecture as TPTP fof");
  add_emit_options(emit_cmd, em);
  emit_cmd->add_option("--out", em.out, "TPTP output path");

  CheckArgs chk;
  auto* check = app.add_subcommand("check", "Emit the conjecture and run an external prover on it");
  add_emit_options(check, chk.emit);
  check->add_option("--prover", chk.prover, "Prover executable (default $LYAPGUARD_PROVER)");
  check->add_option("--timeout-s", chk.timeout_s, "Prover wall-clock budget in seconds")
      ->check(CLI::PositiveNumber);
  check->add_option("--prover-arg", chk.prover_args, "Extra prover argument (repeatable)")
      ->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return exit_code::kUsage;
  }

  if (simulate->parsed()) return cmd_simulate(sim, out, err);
  if (monitor->parsed()) return cmd_monitor(mon, out, err);
  if (emit_cmd->parsed()) return cmd_emit_fof(em, out, err);
  return cmd_check(chk, out, err);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  argv.push_back(nullptr);
  return run_cli(static_cast<int>(args.size()), argv.data(), out, err);
}

}  // namespace lyapguard::cli
