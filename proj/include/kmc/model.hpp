#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "kmc/source_span.hpp"

namespace kmc {

using StateId = std::uint32_t;

enum class Direction : std::uint8_t { Send, Receive };

/// A message as it sits in a channel.
struct Message {
  std::string label;
  std::string sort = "unit";

  auto operator<=>(const Message&) const = default;
};

/// A directed communication action of some subject role, e.g. `m!task<int>`.
struct Action {
  std::string peer;
  Direction direction = Direction::Send;
  std::string label;
  std::string sort = "unit";

  static Action send(std::string peer, std::string label, std::string sort = "unit") {
    return {std::move(peer), Direction::Send, std::move(label), std::move(sort)};
  }
  static Action receive(std::string peer, std::string label, std::string sort = "unit") {
    return {std::move(peer), Direction::Receive, std::move(label), std::move(sort)};
  }

  bool is_send() const { return direction == Direction::Send; }
  bool is_receive() const { return direction == Direction::Receive; }
  Message message() const { return {label, sort}; }

  // Determinism key: the payload sort does not distinguish branches.
  bool same_key(const Action& other) const {
    return peer == other.peer && direction == other.direction && label == other.label;
  }

  auto operator<=>(const Action&) const = default;
};

std::string to_string(const Action& action);
std::ostream& operator<<(std::ostream& os, const Action& action);

bool is_identifier(std::string_view text);
bool is_reserved_word(std::string_view text);

// ---------------------------------------------------------------------------
// Local session types

struct LocalType;
using LocalTypePtr = std::shared_ptr<const LocalType>;

struct LocalType {
  struct End {};
  struct Rec {
    std::string var;
    LocalTypePtr body;
  };
  struct Var {
    std::string name;
  };
  struct Branch {
    Action action;
    LocalTypePtr continuation;
    SourceSpan span;
  };
  struct Choice {
    std::vector<Branch> branches;
  };

  std::variant<End, Rec, Var, Choice> node;
  SourceSpan span;
};

namespace lt {

LocalTypePtr end(SourceSpan span = {});
LocalTypePtr rec(std::string var, LocalTypePtr body, SourceSpan span = {});
LocalTypePtr var(std::string name, SourceSpan span = {});
LocalTypePtr choice(std::vector<LocalType::Branch> branches, SourceSpan span = {});
LocalTypePtr send(std::string peer, std::string label, std::string sort, LocalTypePtr cont);
LocalTypePtr receive(std::string peer, std::string label, std::string sort, LocalTypePtr cont);

/// `rec t. B` becomes `B[rec t. B / t]`; other types are returned unchanged.
LocalTypePtr unfold(const LocalTypePtr& type);

}  // namespace lt

// ---------------------------------------------------------------------------
// Machines

struct Transition {
  StateId from = 0;
  Action action;
  StateId to = 0;

  bool operator==(const Transition&) const = default;
};

/// A communicating finite state machine. States are `0 .. state_count()-1`.
/// Construction only checks that ids are in range; the behavioural
/// invariants are reported by validate_system().
class Machine {
 public:
  /// A single terminal state.
  Machine();
  Machine(std::size_t state_count, StateId initial, std::vector<Transition> transitions);

  std::size_t state_count() const { return state_count_; }
  StateId initial() const { return initial_; }
  std::span<const Transition> transitions() const { return transitions_; }
  const Transition& transition(std::size_t index) const { return transitions_[index]; }

  /// Indices into transitions() leaving `state`, in insertion order.
  std::span<const std::size_t> outgoing(StateId state) const { return outgoing_[state]; }

  bool is_terminal(StateId state) const { return outgoing_[state].empty(); }
  bool is_sending(StateId state) const;
  bool is_receiving(StateId state) const;

  bool operator==(const Machine& other) const {
    return state_count_ == other.state_count_ && initial_ == other.initial_ &&
           transitions_ == other.transitions_;
  }

 private:
  std::size_t state_count_;
  StateId initial_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<std::size_t>> outgoing_;
};

/// Merges states denoting the same (possibly infinite) behaviour tree, drops
/// unreachable states, and renumbers breadth-first from the initial state.
Machine minimize(const Machine& machine);

/// Drops unreachable states and renumbers breadth-first; no merging.
Machine canonicalize(const Machine& machine);

/// Isomorphism of the reachable parts: a bijection on reachable states that
/// maps initial to initial and preserves every transition.
bool isomorphic(const Machine& a, const Machine& b);

// ---------------------------------------------------------------------------
// Systems

class System {
 public:
  System() = default;

  void add_role(std::string name, Machine machine);

  std::size_t role_count() const { return roles_.size(); }
  const std::vector<std::string>& roles() const { return roles_; }
  const std::string& role(std::size_t index) const { return roles_[index]; }
  const Machine& machine(std::size_t index) const { return machines_[index]; }
  std::optional<std::size_t> role_index(std::string_view name) const;

  /// One FIFO channel per ordered pair of distinct roles, enumerated sender
  /// major in role order.
  std::size_t channel_count() const { return roles_.empty() ? 0 : roles_.size() * (roles_.size() - 1); }
  std::size_t channel_index(std::size_t from, std::size_t to) const;
  std::pair<std::size_t, std::size_t> channel_endpoints(std::size_t channel) const;

  bool operator==(const System&) const = default;

 private:
  std::vector<std::string> roles_;
  std::vector<Machine> machines_;
};

/// Same role names in the same order, pairwise isomorphic machines.
bool isomorphic(const System& a, const System& b);

System minimize(const System& system);

// ---------------------------------------------------------------------------
// Validation

enum class Severity { Error, Lint };

enum class DiagnosticCode {
  EmptySystem,
  InvalidIdentifier,
  ReservedWord,
  DuplicateRole,
  UnknownPeer,
  SelfCommunication,
  Nondeterminism,
  MixedState,
  UnreachableState,
  NonDirectedChoice,
};

std::string_view to_string(DiagnosticCode code);

struct Diagnostic {
  Severity severity = Severity::Error;
  DiagnosticCode code = DiagnosticCode::EmptySystem;
  std::optional<std::size_t> role;
  std::optional<StateId> state;
  std::optional<std::size_t> transition;  // index into the machine's transitions
  std::string message;
};

std::vector<Diagnostic> validate_system(const System& system);
bool has_errors(std::span<const Diagnostic> diagnostics);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// ---------------------------------------------------------------------------
// Local type translation

enum class LocalTypeFault { UnguardedRecursion, UnboundVariable, MixedChoice, DuplicateBranch };

std::string_view to_string(LocalTypeFault fault);

class LocalTypeError : public std::runtime_error {
 public:
  LocalTypeError(LocalTypeFault fault, SourceSpan span, const std::string& message);
  LocalTypeFault fault() const { return fault_; }
  const SourceSpan& span() const { return span_; }

 private:
  LocalTypeFault fault_;
  SourceSpan span_;
};

struct TranslatedMachine {
  Machine machine;
  /// Source span of one branch that produced each transition.
  std::vector<SourceSpan> transition_spans;
};

/// States are the classes of sub-terms that unfold to the same behaviour;
/// ids follow breadth-first discovery from the initial state.
TranslatedMachine translate_local_type(const LocalType& type, std::string_view subject);

Machine local_type_to_machine(const LocalType& type, std::string_view subject);

}  // namespace kmc
