#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "kmc/model.hpp"
#include "kmc/semantics.hpp"

namespace kmc {

inline constexpr std::size_t kDefaultMaxBound = 10;

/// A send of `role` at `node` that no path of the other roles can unblock.
struct SendObligation {
  NodeId node = 0;
  std::size_t role = 0;
  Action action;
};

struct ExhaustivityResult {
  std::vector<SendObligation> unmet;

  bool passed() const { return unmet.empty(); }
};

/// Passes iff from every node, every send a role is offering can be fired
/// after some sequence of steps by the *other* roles only.
ExhaustivityResult check_exhaustive(const System& system, const BoundedGraph& graph);

/// `role` waits to receive at `state`, and no continuation moves it.
struct ProgressViolation {
  std::size_t role = 0;
  StateId state = 0;

  bool operator==(const ProgressViolation&) const = default;
};

/// The head of channel sender->receiver is never consumed on any continuation.
struct ReceptionViolation {
  std::size_t sender = 0;
  std::size_t receiver = 0;
  Message head;

  bool operator==(const ReceptionViolation&) const = default;
};

struct Violation {
  std::variant<ProgressViolation, ReceptionViolation> kind;
  NodeId witness = 0;
  std::vector<Step> trace;

  bool is_progress() const { return std::holds_alternative<ProgressViolation>(kind); }
  bool is_reception() const { return std::holds_alternative<ReceptionViolation>(kind); }
};

std::string describe(const System& system, const Violation& violation);

struct SafetyResult {
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
};

/// Progress and eventual reception over the whole graph. At most one
/// violation is reported per stuck (role, state) and per orphaned (channel,
/// head message, sender state), each witnessed by a shallowest node.
SafetyResult check_safety(const System& system, const BoundedGraph& graph);

/// Shortest trace from the initial node, following parent links.
std::vector<Step> extract_trace(const BoundedGraph& graph, NodeId witness);

struct GraphStats {
  std::size_t configurations = 0;
  std::size_t edges = 0;
};

struct Verdict {
  enum class Kind { Safe, Unsafe, Inconclusive };

  Kind kind = Kind::Inconclusive;
  /// Safe/Unsafe: the least exhaustive bound. Inconclusive: the last bound tried.
  std::size_t k = 0;
  std::size_t max_bound = 0;
  /// Unsafe: the violations. Inconclusive: safety failures at the last bound,
  /// only when requested; these are not definitive.
  std::vector<Violation> violations;
  std::vector<std::size_t> bounds_tried;
  GraphStats stats;  // graph at the last bound tried
  std::string note;
};

std::string_view to_string(Verdict::Kind kind);

struct CheckOptions {
  std::size_t max_bound = kDefaultMaxBound;
  std::size_t max_configs = kDefaultMaxConfigs;
  bool report_bounded_violations = false;
};

/// Tries k = 1..max_bound and stops at the first k-exhaustive bound.
/// Throws ValidationError for invalid systems and ResourceExhausted when a
/// graph outgrows `max_configs`.
Verdict check_kmc(const System& system, const CheckOptions& options = {});

/// Each local state of `role` met in the graph, with the actions the role
/// actually fires from nodes where it is in that state.
using Fingerprint = std::map<StateId, std::set<Action>>;

Fingerprint local_fingerprint(const BoundedGraph& graph, std::size_t role);

}  // namespace kmc
