#include <algorithm>
#include <deque>

#include "kmc/model.hpp"

namespace kmc {

std::string_view to_string(DiagnosticCode code) {
  switch (code) {
    case DiagnosticCode::EmptySystem: return "EmptySystem";
    case DiagnosticCode::InvalidIdentifier: return "InvalidIdentifier";
    case DiagnosticCode::ReservedWord: return "ReservedWord";
    case DiagnosticCode::DuplicateRole: return "DuplicateRole";
    case DiagnosticCode::UnknownPeer: return "UnknownPeer";
    case DiagnosticCode::SelfCommunication: return "SelfCommunication";
    case DiagnosticCode::Nondeterminism: return "Nondeterminism";
    case DiagnosticCode::MixedState: return "MixedState";
    case DiagnosticCode::UnreachableState: return "UnreachableState";
    case DiagnosticCode::NonDirectedChoice: return "NonDirectedChoice";
  }
  return "?";
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics)
    if (d.severity == Severity::Error) return "invalid system: " + d.message;
  return "invalid system";
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<Diagnostic> validate_system(const System& system) {
  std::vector<Diagnostic> out;
  auto error = [&](DiagnosticCode code, std::optional<std::size_t> role, std::optional<StateId> state,
                   std::optional<std::size_t> transition, std::string message) {
    out.push_back({Severity::Error, code, role, state, transition, std::move(message)});
  };

  if (system.role_count() == 0) {
    error(DiagnosticCode::EmptySystem, std::nullopt, std::nullopt, std::nullopt, "system declares no roles");
    return out;
  }

  for (std::size_t r = 0; r < system.role_count(); ++r) {
    const std::string& name = system.role(r);
    if (!is_identifier(name))
      error(DiagnosticCode::InvalidIdentifier, r, std::nullopt, std::nullopt, "invalid role name '" + name + "'");
    else if (is_reserved_word(name))
      error(DiagnosticCode::ReservedWord, r, std::nullopt, std::nullopt, "role name '" + name + "' is reserved");
    if (system.role_index(name) != r)
      error(DiagnosticCode::DuplicateRole, r, std::nullopt, std::nullopt, "role '" + name + "' declared twice");
  }

  for (std::size_t r = 0; r < system.role_count(); ++r) {
    const std::string& name = system.role(r);
    const Machine& m = system.machine(r);

    for (StateId s = 0; s < m.state_count(); ++s) {
      auto out_edges = m.outgoing(s);
      for (std::size_t i = 0; i < out_edges.size(); ++i) {
        const std::size_t index = out_edges[i];
        const Action& a = m.transition(index).action;
        const std::string where = "role " + name + ", state " + std::to_string(s) + ": ";
        if (!is_identifier(a.label) || !is_identifier(a.sort))
          error(DiagnosticCode::InvalidIdentifier, r, s, index, where + "invalid label or sort in " + to_string(a));
        if (a.peer == name)
          error(DiagnosticCode::SelfCommunication, r, s, index, where + "role communicates with itself in " + to_string(a));
        else if (!system.role_index(a.peer))
          error(DiagnosticCode::UnknownPeer, r, s, index, where + "unknown peer '" + a.peer + "' in " + to_string(a));
        for (std::size_t j = 0; j < i; ++j) {
          const Action& b = m.transition(out_edges[j]).action;
          if (a.same_key(b)) {
            error(DiagnosticCode::Nondeterminism, r, s, index, where + "two transitions on " + to_string(a));
            break;
          }
        }
        if (a.direction != m.transition(out_edges.front()).action.direction) {
          error(DiagnosticCode::MixedState, r, s, index, where + "state mixes sends and receives");
        }
      }
      if (!out_edges.empty()) {
        const std::string& peer = m.transition(out_edges.front()).action.peer;
        bool directed = std::all_of(out_edges.begin(), out_edges.end(),
                                    [&](std::size_t i) { return m.transition(i).action.peer == peer; });
        if (!directed)
          out.push_back({Severity::Lint, DiagnosticCode::NonDirectedChoice, r, s, out_edges.front(),
                         "role " + name + ", state " + std::to_string(s) + ": choice addresses several peers"});
      }
    }

    std::vector<bool> seen(m.state_count(), false);
    std::deque<StateId> queue{m.initial()};
    seen[m.initial()] = true;
    while (!queue.empty()) {
      StateId s = queue.front();
      queue.pop_front();
      for (std::size_t index : m.outgoing(s)) {
        StateId to = m.transition(index).to;
        if (!seen[to]) {
          seen[to] = true;
          queue.push_back(to);
        }
      }
    }
    for (StateId s = 0; s < m.state_count(); ++s)
      if (!seen[s])
        error(DiagnosticCode::UnreachableState, r, s, std::nullopt,
              "role " + name + ": state " + std::to_string(s) + " is unreachable");
  }
  return out;
}

}  // namespace kmc
