#include "kmc/simulator.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace kmc {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Terminated: return "terminated";
    case Outcome::Deadlocked: return "deadlocked";
    case Outcome::BudgetExhausted: return "budget exhausted";
  }
  return "?";
}

bool is_terminated(const System& system, const Configuration& config) {
  for (std::size_t r = 0; r < system.role_count(); ++r)
    if (!system.machine(r).is_terminal(config.locals[r])) return false;
  return std::all_of(config.buffers.begin(), config.buffers.end(), [](const auto& b) { return b.empty(); });
}

RunResult simulate(const System& system, const SimulationOptions& options) {
  const std::size_t bound = options.bound.value_or(std::max<std::size_t>(1, options.max_steps));
  std::mt19937_64 rng(options.seed);

  RunResult run;
  run.final = initial_configuration(system);
  for (;;) {
    auto steps = enabled_steps(system, run.final, bound);
    if (steps.empty()) {
      run.outcome = is_terminated(system, run.final) ? Outcome::Terminated : Outcome::Deadlocked;
      return run;
    }
    if (run.steps_taken == options.max_steps) {
      run.outcome = Outcome::BudgetExhausted;
      return run;
    }
    std::uniform_int_distribution<std::size_t> pick(0, steps.size() - 1);
    auto& [step, next] = steps[pick(rng)];
    run.trace.push_back(std::move(step));
    run.final = std::move(next);
    ++run.steps_taken;
  }
}

ReplayResult replay(const System& system, std::span<const Step> trace, std::optional<std::size_t> bound) {
  Configuration config = initial_configuration(system);
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (auto fault = apply_step(system, config, trace[i], bound)) return ReplayError{i, *fault};
  return config;
}

void write_trace(std::ostream& os, const System& system, std::span<const Step> trace) {
  for (const Step& s : trace) {
    os << system.role(s.role) << '\t' << s.action.peer << '\t' << (s.action.is_send() ? '!' : '?') << '\t'
       << s.action.label << '\t' << s.action.sort << '\n';
  }
}

std::variant<std::vector<Step>, ReplayError, TraceFormatError> read_trace(std::istream& is, const System& system) {
  std::vector<Step> steps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string field; std::getline(ss, field, '\t');) fields.push_back(field);
    if (fields.size() != 5) return TraceFormatError{line_no, "expected 5 tab-separated fields"};
    if (fields[2] != "!" && fields[2] != "?") return TraceFormatError{line_no, "direction must be '!' or '?'"};
    auto role = system.role_index(fields[0]);
    if (!role) return ReplayError{steps.size(), StepFault::UnknownRole};
    Direction dir = fields[2] == "!" ? Direction::Send : Direction::Receive;
    steps.push_back({*role, Action{fields[1], dir, fields[3], fields[4]}});
  }
  return steps;
}

}  // namespace kmc
