#include "kmc/checker.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <tuple>

namespace kmc {

namespace {

// Backward closure: marks every node that can reach a seed using only edges
// accepted by `use_edge`.
std::vector<bool> backward_closure(const BoundedGraph& graph, std::vector<bool> marked,
                                   const std::function<bool(const GraphEdge&)>& use_edge,
                                   const std::vector<std::vector<std::size_t>>& in_edges) {
  std::deque<NodeId> queue;
  for (NodeId n = 0; n < marked.size(); ++n)
    if (marked[n]) queue.push_back(n);
  while (!queue.empty()) {
    NodeId n = queue.front();
    queue.pop_front();
    for (std::size_t index : in_edges[n]) {
      const auto& e = graph.edge(index);
      if (marked[e.from] || !use_edge(e)) continue;
      marked[e.from] = true;
      queue.push_back(e.from);
    }
  }
  return marked;
}

std::vector<std::vector<std::size_t>> incoming(const BoundedGraph& graph) {
  std::vector<std::vector<std::size_t>> in(graph.node_count());
  for (std::size_t i = 0; i < graph.edges().size(); ++i) in[graph.edge(i).to].push_back(i);
  return in;
}

}  // namespace

ExhaustivityResult check_exhaustive(const System& system, const BoundedGraph& graph) {
  ExhaustivityResult result;
  const auto in = incoming(graph);
  const std::size_t n = graph.node_count();

  // (role, peer) -> nodes from which others can bring buffer(role, peer)
  // below the bound while `role` stays put. Computed on first use.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<bool>> can_unblock;
  auto unblockable = [&](std::size_t role, std::size_t peer) -> const std::vector<bool>& {
    auto key = std::make_pair(role, peer);
    auto it = can_unblock.find(key);
    if (it != can_unblock.end()) return it->second;
    const std::size_t channel = system.channel_index(role, peer);
    std::vector<bool> seeds(n);
    for (NodeId v = 0; v < n; ++v) seeds[v] = graph.configuration(v).buffers[channel].size() < graph.k();
    auto closure = backward_closure(
        graph, std::move(seeds), [role](const GraphEdge& e) { return e.step.role != role; }, in);
    return can_unblock.emplace(key, std::move(closure)).first->second;
  };

  for (NodeId v = 0; v < n; ++v) {
    const Configuration& c = graph.configuration(v);
    for (std::size_t r = 0; r < system.role_count(); ++r) {
      const Machine& m = system.machine(r);
      for (std::size_t index : m.outgoing(c.locals[r])) {
        const Action& a = m.transition(index).action;
        if (!a.is_send()) continue;
        auto peer = system.role_index(a.peer);
        if (!peer) continue;
        if (!unblockable(r, *peer)[v]) result.unmet.push_back({v, r, a});
      }
    }
  }
  return result;
}

std::vector<Step> extract_trace(const BoundedGraph& graph, NodeId witness) {
  std::vector<Step> trace;
  for (auto link = graph.parent(witness); link; link = graph.parent(link->node))
    trace.push_back(graph.edge(link->edge).step);
  std::reverse(trace.begin(), trace.end());
  return trace;
}

SafetyResult check_safety(const System& system, const BoundedGraph& graph) {
  SafetyResult result;
  const auto in = incoming(graph);
  const std::size_t n = graph.node_count();
  const std::size_t roles = system.role_count();
  auto any = [](const GraphEdge&) { return true; };

  // MOVE(p): some continuation contains a step by p.
  std::vector<std::vector<bool>> can_move(roles);
  for (std::size_t p = 0; p < roles; ++p) {
    std::vector<bool> seeds(n);
    for (NodeId v = 0; v < n; ++v)
      for (std::size_t e : graph.out_edges(v))
        if (graph.edge(e).step.role == p) seeds[v] = true;
    can_move[p] = backward_closure(graph, std::move(seeds), any, in);
  }

  // RECV(q, p): some continuation contains a receive by q from p.
  std::vector<std::vector<bool>> can_receive(system.channel_count());
  for (std::size_t channel = 0; channel < system.channel_count(); ++channel) {
    auto [p, q] = system.channel_endpoints(channel);
    std::vector<bool> seeds(n);
    for (NodeId v = 0; v < n; ++v)
      for (std::size_t e : graph.out_edges(v)) {
        const Step& s = graph.edge(e).step;
        if (s.role == q && s.action.is_receive() && s.action.peer == system.role(p)) seeds[v] = true;
      }
    can_receive[channel] = backward_closure(graph, std::move(seeds), any, in);
  }

  // Nodes are visited in BFS order, so the first witness per key is a
  // shallowest one.
  using Key = std::tuple<int, std::size_t, std::size_t, Message, StateId>;
  std::map<Key, bool> reported;
  for (NodeId v = 0; v < n; ++v) {
    const Configuration& c = graph.configuration(v);
    for (std::size_t p = 0; p < roles; ++p) {
      StateId s = c.locals[p];
      if (!system.machine(p).is_receiving(s) || can_move[p][v]) continue;
      if (reported.emplace(Key{0, p, 0, Message{}, s}, true).second)
        result.violations.push_back({ProgressViolation{p, s}, v, extract_trace(graph, v)});
    }
    for (std::size_t channel = 0; channel < system.channel_count(); ++channel) {
      if (c.buffers[channel].empty() || can_receive[channel][v]) continue;
      auto [p, q] = system.channel_endpoints(channel);
      const Message& head = c.buffers[channel].front();
      if (reported.emplace(Key{1, p, q, head, c.locals[p]}, true).second)
        result.violations.push_back({ReceptionViolation{p, q, head}, v, extract_trace(graph, v)});
    }
  }
  return result;
}

std::string describe(const System& system, const Violation& violation) {
  if (const auto* p = std::get_if<ProgressViolation>(&violation.kind))
    return "progress violation: role " + system.role(p->role) + " is stuck waiting to receive in state " +
           std::to_string(p->state);
  const auto& r = std::get<ReceptionViolation>(violation.kind);
  return "eventual reception violation: message " + r.head.label + "<" + r.head.sort + "> from " +
         system.role(r.sender) + " to " + system.role(r.receiver) + " is never received";
}

std::string_view to_string(Verdict::Kind kind) {
  switch (kind) {
    case Verdict::Kind::Safe: return "safe";
    case Verdict::Kind::Unsafe: return "unsafe";
    case Verdict::Kind::Inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict check_kmc(const System& system, const CheckOptions& options) {
  if (options.max_bound == 0) throw std::invalid_argument("maximum bound must be at least 1");
  auto diagnostics = validate_system(system);
  if (has_errors(diagnostics)) throw ValidationError(std::move(diagnostics));

  Verdict verdict;
  verdict.max_bound = options.max_bound;
  for (std::size_t k = 1; k <= options.max_bound; ++k) {
    BoundedGraph graph = build_bounded_graph(system, k, options.max_configs);
    verdict.k = k;
    verdict.bounds_tried.push_back(k);
    verdict.stats = {graph.node_count(), graph.edges().size()};

    auto exhaustive = check_exhaustive(system, graph);
    if (!exhaustive.passed()) {
      if (k < options.max_bound) continue;
      const auto& first = exhaustive.unmet.front();
      verdict.note = std::to_string(exhaustive.unmet.size()) + " send obligation(s) unmet at k=" +
                     std::to_string(k) + ", e.g. " + system.role(first.role) + ": " + to_string(first.action) +
                     " can stay blocked forever";
      if (options.report_bounded_violations) verdict.violations = check_safety(system, graph).violations;
      return verdict;
    }

    auto safety = check_safety(system, graph);
    if (safety.passed()) {
      verdict.kind = Verdict::Kind::Safe;
    } else {
      verdict.kind = Verdict::Kind::Unsafe;
      verdict.violations = std::move(safety.violations);
    }
    return verdict;
  }
  return verdict;
}

Fingerprint local_fingerprint(const BoundedGraph& graph, std::size_t role) {
  Fingerprint out;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    auto& actions = out[graph.configuration(v).locals[role]];
    for (std::size_t e : graph.out_edges(v)) {
      const Step& s = graph.edge(e).step;
      if (s.role == role) actions.insert(s.action);
    }
  }
  return out;
}

}  // namespace kmc
