#include "kmc/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "kmc/dot.hpp"
#include "kmc/dsl.hpp"
#include "kmc/simulator.hpp"

namespace kmc::cli {

namespace {

nlohmann::ordered_json step_json(const System& system, const Step& step) {
  nlohmann::ordered_json j;
  j["role"] = system.role(step.role);
  j["peer"] = step.action.peer;
  j["dir"] = step.action.is_send() ? "!" : "?";
  j["label"] = step.action.label;
  j["sort"] = step.action.sort;
  return j;
}

nlohmann::ordered_json violation_json(const System& system, const Violation& v) {
  nlohmann::ordered_json j;
  if (const auto* p = std::get_if<ProgressViolation>(&v.kind)) {
    j["kind"] = "progress";
    j["role"] = system.role(p->role);
    j["channel"] = nullptr;
    j["label"] = nullptr;
    j["sort"] = nullptr;
  } else {
    const auto& r = std::get<ReceptionViolation>(v.kind);
    j["kind"] = "eventual_reception";
    j["role"] = nullptr;
    j["channel"] = {{"from", system.role(r.sender)}, {"to", system.role(r.receiver)}};
    j["label"] = r.head.label;
    j["sort"] = r.head.sort;
  }
  j["trace"] = nlohmann::ordered_json::array();
  for (const Step& s : v.trace) j["trace"].push_back(step_json(system, s));
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const System& system, const CheckReport& report) {
  const Verdict& v = report.verdict;
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["verdict"] = std::string(to_string(v.kind));
  if (v.kind == Verdict::Kind::Inconclusive)
    j["k"] = nullptr;
  else
    j["k"] = v.k;
  j["max_bound"] = v.max_bound;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& violation : v.violations) j["violations"].push_back(violation_json(system, violation));
  j["stats"] = {{"configurations", report.stats.configurations},
                {"edges", report.stats.edges},
                {"bounds_tried", report.stats.bounds_tried},
                {"elapsed_ms", report.stats.elapsed_ms}};
  return j;
}

std::string to_text(const System& system, const CheckReport& report) {
  const Verdict& v = report.verdict;
  std::ostringstream os;
  os << report.source << ": ";
  switch (v.kind) {
    case Verdict::Kind::Safe: os << "safe at k=" << v.k; break;
    case Verdict::Kind::Unsafe: os << "unsafe at k=" << v.k; break;
    case Verdict::Kind::Inconclusive: os << "inconclusive up to k=" << v.max_bound; break;
  }
  os << " (" << report.stats.configurations << " configurations, " << report.stats.edges << " transitions)\n";
  if (v.kind == Verdict::Kind::Inconclusive) {
    os << "  bound insufficient: " << v.note << '\n';
    if (!v.violations.empty()) os << "unverified violations at k=" << v.k << ":\n";
  }
  for (std::size_t i = 0; i < v.violations.size(); ++i) {
    const Violation& violation = v.violations[i];
    os << "violation " << (i + 1) << ": " << describe(system, violation) << '\n';
    if (violation.trace.empty()) os << "  (initial configuration)\n";
    for (std::size_t s = 0; s < violation.trace.size(); ++s)
      os << "  " << (s + 1) << ". " << to_string(system, violation.trace[s]) << '\n';
  }
  return os.str();
}

int exit_code(const Verdict& verdict) {
  switch (verdict.kind) {
    case Verdict::Kind::Safe: return kExitSafe;
    case Verdict::Kind::Unsafe: return kExitUnsafe;
    case Verdict::Kind::Inconclusive: return kExitInconclusive;
  }
  return kExitSoftware;
}

namespace {

struct Loaded {
  std::optional<System> system;
  int failure = 0;
};

Loaded load(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << path << ": error: cannot read file\n";
    return {std::nullopt, kExitIoError};
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto result = parse_system(buffer.str());
  if (!result) {
    for (const auto& e : result.errors)
      err << path << ':' << e.span.line << ':' << e.span.column << ": error: " << e.message << '\n';
    return {std::nullopt, kExitDataError};
  }
  return {std::move(result.parsed->system), 0};
}

std::size_t max_configs_from(const std::optional<std::size_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("KMC_MAX_CONFIGS")) {
    std::size_t used = 0;
    unsigned long long value = std::stoull(env, &used);
    if (used != std::string_view(env).size() || value == 0)
      throw std::invalid_argument("KMC_MAX_CONFIGS");
    return static_cast<std::size_t>(value);
  }
  return kDefaultMaxConfigs;
}

struct CheckFlags {
  std::string file;
  std::size_t max_bound = kDefaultMaxBound;
  std::optional<std::size_t> max_configs;
  bool json = false;
  bool report_bounded = false;
};

int run_check(const CheckFlags& flags, std::ostream& out, std::ostream& err) {
  std::size_t max_configs = 0;
  try {
    max_configs = max_configs_from(flags.max_configs);
  } catch (const std::exception&) {
    err << "error: KMC_MAX_CONFIGS must be a positive integer\n";
    return kExitUsage;
  }
  auto loaded = load(flags.file, err);
  if (!loaded.system) return loaded.failure;
  const System& system = *loaded.system;

  auto start = std::chrono::steady_clock::now();
  CheckReport report;
  report.source = flags.file;
  try {
    report.verdict = check_kmc(system, {flags.max_bound, max_configs, flags.report_bounded});
  } catch (const ResourceExhausted& e) {
    err << flags.file << ": error: " << e.what() << " (raise --max-configs)\n";
    return kExitSoftware;
  }
  auto elapsed = std::chrono::steady_clock::now() - start;
  report.stats = {report.verdict.stats.configurations, report.verdict.stats.edges, report.verdict.bounds_tried,
                  std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()};

  if (flags.json)
    out << to_json(system, report).dump(2) << '\n';
  else
    out << to_text(system, report);
  return exit_code(report.verdict);
}

struct SimulateFlags {
  std::string file;
  std::optional<std::size_t> bound;
  bool unbounded = false;
  std::uint64_t seed = 0;
  std::size_t steps = 10'000;
  std::optional<std::string> trace_out;
};

int run_simulate(const SimulateFlags& flags, std::ostream& out, std::ostream& err) {
  auto loaded = load(flags.file, err);
  if (!loaded.system) return loaded.failure;
  const System& system = *loaded.system;

  RunResult run = simulate(system, {flags.unbounded ? std::nullopt : flags.bound, flags.seed, flags.steps});
  if (flags.trace_out) {
    std::ofstream trace(*flags.trace_out, std::ios::binary);
    if (trace) write_trace(trace, system, run.trace);
    if (!trace) {
      err << *flags.trace_out << ": error: cannot write trace\n";
      return kExitIoError;
    }
  }

  out << flags.file << ": " << to_string(run.outcome) << " after " << run.steps_taken
      << (run.steps_taken == 1 ? " step\n" : " steps\n");
  if (run.outcome == Outcome::Deadlocked) {
    for (std::size_t r = 0; r < system.role_count(); ++r) {
      StateId s = run.final.locals[r];
      if (!system.machine(r).is_terminal(s))
        out << "  role " << system.role(r) << " waiting in state " << s << '\n';
    }
    for (std::size_t c = 0; c < system.channel_count(); ++c) {
      const auto& buffer = run.final.buffers[c];
      if (buffer.empty()) continue;
      auto [from, to] = system.channel_endpoints(c);
      out << "  channel " << system.role(from) << "->" << system.role(to) << ":";
      for (const auto& m : buffer) out << ' ' << m.label << '<' << m.sort << '>';
      out << '\n';
    }
  }
  switch (run.outcome) {
    case Outcome::Terminated: return kExitTerminated;
    case Outcome::Deadlocked: return kExitDeadlocked;
    case Outcome::BudgetExhausted: return kExitBudgetExhausted;
  }
  return kExitSoftware;
}

int run_export_dot(const std::string& file, const std::string& dir, std::ostream& out, std::ostream& err) {
  auto loaded = load(file, err);
  if (!loaded.system) return loaded.failure;
  const System& system = *loaded.system;

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  for (std::size_t r = 0; r < system.role_count(); ++r) {
    auto path = std::filesystem::path(dir) / (system.role(r) + ".dot");
    std::ofstream dot(path, std::ios::binary);
    if (dot) dot << export_dot(system, r);
    if (!dot) {
      err << path.string() << ": error: cannot write file\n";
      return kExitIoError;
    }
    out << "wrote " << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounded multiparty compatibility checker for communicating state machines", "kmc"};
  app.require_subcommand(1);

  CheckFlags check;
  auto* check_cmd = app.add_subcommand("check", "Search for the least k at which the system is k-MC");
  check_cmd->add_option("file", check.file, "Protocol file (.kmc)")->required();
  check_cmd->add_option("--max-bound", check.max_bound, "Largest bound to try")->check(CLI::PositiveNumber);
  check_cmd->add_option("--max-configs", check.max_configs, "Configuration cap per bound (env KMC_MAX_CONFIGS)")
      ->check(CLI::PositiveNumber);
  check_cmd->add_flag("--json", check.json, "Print a JSON report on stdout");
  check_cmd->add_flag("--report-bounded-violations", check.report_bounded,
                      "On an inconclusive result, also list safety failures seen at the last bound");

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run one seeded random interleaving");
  sim_cmd->add_option("file", sim.file, "Protocol file (.kmc)")->required();
  auto* bound_opt = sim_cmd->add_option("--bound", sim.bound, "Per-channel bound")->check(CLI::PositiveNumber);
  sim_cmd->add_flag("--unbounded", sim.unbounded, "Do not block sends (default)")->excludes(bound_opt);
  sim_cmd->add_option("--seed", sim.seed, "Scheduler seed");
  sim_cmd->add_option("--steps", sim.steps, "Step budget");
  sim_cmd->add_option("--trace", sim.trace_out, "Write the executed trace to this file");

  std::string file;
  std::string dir = ".";
  auto* dot_cmd = app.add_subcommand("export-dot", "Write one Graphviz file per role");
  dot_cmd->add_option("file", file, "Protocol file (.kmc)")->required();
  dot_cmd->add_option("-o,--output", dir, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  if (*check_cmd) return run_check(check, out, err);
  if (*sim_cmd) return run_simulate(sim, out, err);
  return run_export_dot(file, dir, out, err);
}

}  // namespace kmc::cli
