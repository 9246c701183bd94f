#include "kmc/semantics.hpp"

#include <deque>

namespace kmc {

std::size_t ConfigurationHash::operator()(const Configuration& c) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::size_t v) { h = (h ^ v) * 0x100000001b3ULL; };
  std::hash<std::string> str;
  for (StateId s : c.locals) mix(s);
  for (const auto& buffer : c.buffers) {
    mix(buffer.size());
    for (const auto& m : buffer) {
      mix(str(m.label));
      mix(str(m.sort));
    }
  }
  return h;
}

std::string to_string(const System& system, const Step& step) {
  std::string role = step.role < system.role_count() ? system.role(step.role) : "#" + std::to_string(step.role);
  return role + ": " + to_string(step.action);
}

std::string_view to_string(StepFault fault) {
  switch (fault) {
    case StepFault::UnknownRole: return "UnknownRole";
    case StepFault::BadAction: return "BadAction";
    case StepFault::NotEnabled: return "NotEnabled";
  }
  return "?";
}

Configuration initial_configuration(const System& system) {
  Configuration c;
  c.locals.reserve(system.role_count());
  for (std::size_t r = 0; r < system.role_count(); ++r) c.locals.push_back(system.machine(r).initial());
  c.buffers.resize(system.channel_count());
  return c;
}

namespace {

// Successor of `config` by transition `t` of role `role`, or nullopt if the
// transition is blocked. `k` nullopt disables send blocking.
std::optional<Configuration> fire(const System& system, const Configuration& config, std::size_t role,
                                  const Transition& t, std::optional<std::size_t> k) {
  auto peer = system.role_index(t.action.peer);
  if (!peer || *peer == role) return std::nullopt;
  if (t.action.is_send()) {
    std::size_t channel = system.channel_index(role, *peer);
    if (k && config.buffers[channel].size() >= *k) return std::nullopt;
    Configuration next = config;
    next.buffers[channel].push_back(t.action.message());
    next.locals[role] = t.to;
    return next;
  }
  std::size_t channel = system.channel_index(*peer, role);
  const auto& buffer = config.buffers[channel];
  if (buffer.empty() || buffer.front() != t.action.message()) return std::nullopt;
  Configuration next = config;
  next.buffers[channel].erase(next.buffers[channel].begin());
  next.locals[role] = t.to;
  return next;
}

}  // namespace

std::vector<std::pair<Step, Configuration>> enabled_steps(const System& system, const Configuration& config,
                                                          std::size_t k) {
  std::vector<std::pair<Step, Configuration>> out;
  for (std::size_t r = 0; r < system.role_count(); ++r) {
    const Machine& m = system.machine(r);
    for (std::size_t index : m.outgoing(config.locals[r])) {
      const auto& t = m.transition(index);
      if (auto next = fire(system, config, r, t, k)) out.emplace_back(Step{r, t.action}, std::move(*next));
    }
  }
  return out;
}

std::optional<StepFault> apply_step(const System& system, Configuration& config, const Step& step,
                                    std::optional<std::size_t> k) {
  if (step.role >= system.role_count()) return StepFault::UnknownRole;
  const Machine& m = system.machine(step.role);
  for (std::size_t index : m.outgoing(config.locals[step.role])) {
    const auto& t = m.transition(index);
    if (t.action != step.action) continue;
    auto next = fire(system, config, step.role, t, k);
    if (!next) return StepFault::NotEnabled;
    config = std::move(*next);
    return std::nullopt;
  }
  return StepFault::BadAction;
}

std::optional<NodeId> BoundedGraph::find(const Configuration& config) const {
  auto it = index_.find(config);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ResourceExhausted::ResourceExhausted(std::size_t configs_seen)
    : std::runtime_error("state space exceeds " + std::to_string(configs_seen - 1) + " configurations"),
      configs_seen_(configs_seen) {}

BoundedGraph build_bounded_graph(const System& system, std::size_t k, std::size_t max_configs) {
  if (k == 0) throw std::invalid_argument("bound must be at least 1");
  if (max_configs == 0) throw std::invalid_argument("configuration cap must be at least 1");

  BoundedGraph g;
  g.k_ = k;
  auto add_node = [&](Configuration config, std::optional<ParentLink> parent, std::size_t depth) {
    if (g.nodes_.size() >= max_configs) throw ResourceExhausted(g.nodes_.size() + 1);
    NodeId id = g.nodes_.size();
    g.index_.emplace(config, id);
    g.nodes_.push_back(std::move(config));
    g.out_.emplace_back();
    g.parent_.push_back(parent);
    g.depth_.push_back(depth);
    return id;
  };

  add_node(initial_configuration(system), std::nullopt, 0);
  // Node ids double as the BFS queue: ids are assigned in discovery order.
  for (NodeId current = 0; current < g.nodes_.size(); ++current) {
    auto successors = enabled_steps(system, g.nodes_[current], k);
    for (auto& [step, next] : successors) {
      std::size_t edge = g.edges_.size();
      NodeId target;
      if (auto it = g.index_.find(next); it != g.index_.end()) {
        target = it->second;
      } else {
        target = add_node(std::move(next), ParentLink{current, edge}, g.depth_[current] + 1);
      }
      g.edges_.push_back({current, std::move(step), target});
      g.out_[current].push_back(edge);
    }
  }
  return g;
}

}  // namespace kmc
