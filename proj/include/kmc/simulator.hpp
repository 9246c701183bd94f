#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kmc/model.hpp"
#include "kmc/semantics.hpp"

namespace kmc {

enum class Outcome { Terminated, Deadlocked, BudgetExhausted };

std::string_view to_string(Outcome outcome);

struct RunResult {
  Outcome outcome = Outcome::Terminated;
  Configuration final;
  std::vector<Step> trace;
  std::size_t steps_taken = 0;
};

struct SimulationOptions {
  /// Per-channel bound; nullopt runs unbounded, where channels are capped at
  /// max(1, max_steps) messages as an overflow guard.
  std::optional<std::size_t> bound;
  std::uint64_t seed = 0;
  std::size_t max_steps = 10'000;
};

/// Seeded random interleaving: at each point one enabled step is picked
/// uniformly (std::mt19937_64). Equal inputs give equal results.
RunResult simulate(const System& system, const SimulationOptions& options);

/// True iff every role is terminal and every channel is empty.
bool is_terminated(const System& system, const Configuration& config);

struct ReplayError {
  std::size_t index = 0;
  StepFault reason = StepFault::NotEnabled;
};

using ReplayResult = std::variant<Configuration, ReplayError>;

ReplayResult replay(const System& system, std::span<const Step> trace, std::optional<std::size_t> bound);

/// Trace files hold one step per line: ROLE, PEER, DIR, LABEL, SORT separated
/// by tabs, with DIR either `!` or `?`.
void write_trace(std::ostream& os, const System& system, std::span<const Step> trace);

struct TraceFormatError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

/// Resolves role names against `system`; an unknown role becomes a
/// ReplayError{UnknownRole} at that step's index.
std::variant<std::vector<Step>, ReplayError, TraceFormatError> read_trace(std::istream& is, const System& system);

}  // namespace kmc
