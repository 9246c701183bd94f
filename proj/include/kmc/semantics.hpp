#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kmc/model.hpp"

namespace kmc {

inline constexpr std::size_t kDefaultMaxConfigs = 1'000'000;

/// Global snapshot: one local state per role and the contents of every
/// channel, indexed by System::channel_index().
struct Configuration {
  std::vector<StateId> locals;
  std::vector<std::vector<Message>> buffers;

  const std::vector<Message>& buffer(const System& system, std::size_t from, std::size_t to) const {
    return buffers[system.channel_index(from, to)];
  }

  bool operator==(const Configuration&) const = default;
};

struct ConfigurationHash {
  std::size_t operator()(const Configuration& c) const noexcept;
};

/// One move of one role. `role` indexes the system's roles.
struct Step {
  std::size_t role = 0;
  Action action;

  bool operator==(const Step&) const = default;
};

/// "u: m!compute<int>"
std::string to_string(const System& system, const Step& step);

Configuration initial_configuration(const System& system);

/// Every step enabled at `config` under per-channel bound `k`, in role order
/// and then transition order, paired with the resulting configuration.
std::vector<std::pair<Step, Configuration>> enabled_steps(const System& system, const Configuration& config,
                                                          std::size_t k);

enum class StepFault { UnknownRole, BadAction, NotEnabled };

std::string_view to_string(StepFault fault);

/// Applies one step if enabled. BadAction: the role's current state has no
/// transition with exactly that action; NotEnabled: it has one, but the
/// channel is full (send) or its head does not match (receive). Returns
/// nullopt and updates `config` on success; `k` nullopt means unbounded.
std::optional<StepFault> apply_step(const System& system, Configuration& config, const Step& step,
                                    std::optional<std::size_t> k);

using NodeId = std::size_t;

struct GraphEdge {
  NodeId from = 0;
  Step step;
  NodeId to = 0;
};

struct ParentLink {
  NodeId node = 0;
  std::size_t edge = 0;  // index into BoundedGraph::edges()
};

/// Deduplicated k-bounded reachability graph. Nodes are numbered in
/// breadth-first discovery order; node 0 is the initial configuration.
class BoundedGraph {
 public:
  std::size_t k() const { return k_; }
  NodeId initial() const { return 0; }
  std::size_t node_count() const { return nodes_.size(); }
  const Configuration& configuration(NodeId node) const { return nodes_[node]; }
  std::span<const GraphEdge> edges() const { return edges_; }
  const GraphEdge& edge(std::size_t index) const { return edges_[index]; }
  std::span<const std::size_t> out_edges(NodeId node) const { return out_[node]; }
  std::optional<ParentLink> parent(NodeId node) const { return parent_[node]; }
  std::size_t depth(NodeId node) const { return depth_[node]; }
  std::optional<NodeId> find(const Configuration& config) const;

 private:
  friend BoundedGraph build_bounded_graph(const System&, std::size_t, std::size_t);

  std::size_t k_ = 1;
  std::vector<Configuration> nodes_;
  std::unordered_map<Configuration, NodeId, ConfigurationHash> index_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::optional<ParentLink>> parent_;
  std::vector<std::size_t> depth_;
};

class ResourceExhausted : public std::runtime_error {
 public:
  explicit ResourceExhausted(std::size_t configs_seen);
  std::size_t configs_seen() const { return configs_seen_; }

 private:
  std::size_t configs_seen_;
};

/// Breadth-first closure of enabled_steps(). Throws ResourceExhausted when
/// the number of distinct configurations would exceed `max_configs`.
BoundedGraph build_bounded_graph(const System& system, std::size_t k, std::size_t max_configs = kDefaultMaxConfigs);

}  // namespace kmc
