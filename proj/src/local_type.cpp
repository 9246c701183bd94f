#include <algorithm>
#include <set>
#include <unordered_map>

#include "kmc/model.hpp"

namespace kmc {

namespace lt {

LocalTypePtr end(SourceSpan span) {
  return std::make_shared<const LocalType>(LocalType{LocalType::End{}, span});
}

LocalTypePtr rec(std::string var, LocalTypePtr body, SourceSpan span) {
  return std::make_shared<const LocalType>(LocalType{LocalType::Rec{std::move(var), std::move(body)}, span});
}

LocalTypePtr var(std::string name, SourceSpan span) {
  return std::make_shared<const LocalType>(LocalType{LocalType::Var{std::move(name)}, span});
}

LocalTypePtr choice(std::vector<LocalType::Branch> branches, SourceSpan span) {
  return std::make_shared<const LocalType>(LocalType{LocalType::Choice{std::move(branches)}, span});
}

LocalTypePtr send(std::string peer, std::string label, std::string sort, LocalTypePtr cont) {
  return choice({{Action::send(std::move(peer), std::move(label), std::move(sort)), std::move(cont), {}}});
}

LocalTypePtr receive(std::string peer, std::string label, std::string sort, LocalTypePtr cont) {
  return choice({{Action::receive(std::move(peer), std::move(label), std::move(sort)), std::move(cont), {}}});
}

namespace {

void free_variables(const LocalType& type, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, LocalType::Var>) {
          if (!bound.count(node.name)) out.insert(node.name);
        } else if constexpr (std::is_same_v<T, LocalType::Rec>) {
          bool fresh = bound.insert(node.var).second;
          free_variables(*node.body, bound, out);
          if (fresh) bound.erase(node.var);
        } else if constexpr (std::is_same_v<T, LocalType::Choice>) {
          for (const auto& b : node.branches) free_variables(*b.continuation, bound, out);
        }
      },
      type.node);
}

// Capture-avoiding substitution of `replacement` for free occurrences of `var`.
LocalTypePtr substitute(const LocalTypePtr& type, const std::string& var, const LocalTypePtr& replacement,
                        const std::set<std::string>& replacement_free) {
  return std::visit(
      [&](const auto& node) -> LocalTypePtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, LocalType::End>) {
          return type;
        } else if constexpr (std::is_same_v<T, LocalType::Var>) {
          return node.name == var ? replacement : type;
        } else if constexpr (std::is_same_v<T, LocalType::Rec>) {
          if (node.var == var) return type;
          if (!replacement_free.count(node.var))
            return rec(node.var, substitute(node.body, var, replacement, replacement_free), type->span);
          std::string fresh = node.var;
          std::set<std::string> bound, body_free;
          free_variables(*node.body, bound, body_free);
          while (replacement_free.count(fresh) || body_free.count(fresh)) fresh += '_';
          auto renamed = substitute(node.body, node.var, lt::var(fresh), {fresh});
          return rec(fresh, substitute(renamed, var, replacement, replacement_free), type->span);
        } else {
          std::vector<LocalType::Branch> branches;
          for (const auto& b : node.branches)
            branches.push_back({b.action, substitute(b.continuation, var, replacement, replacement_free), b.span});
          return choice(std::move(branches), type->span);
        }
      },
      type->node);
}

}  // namespace

LocalTypePtr unfold(const LocalTypePtr& type) {
  const auto* r = std::get_if<LocalType::Rec>(&type->node);
  if (!r) return type;
  std::set<std::string> bound, free;
  free_variables(*type, bound, free);
  return substitute(r->body, r->var, type, free);
}

}  // namespace lt

// ---------------------------------------------------------------------------

std::string_view to_string(LocalTypeFault fault) {
  switch (fault) {
    case LocalTypeFault::UnguardedRecursion: return "UnguardedRecursion";
    case LocalTypeFault::UnboundVariable: return "UnboundVariable";
    case LocalTypeFault::MixedChoice: return "MixedChoice";
    case LocalTypeFault::DuplicateBranch: return "DuplicateBranch";
  }
  return "?";
}

LocalTypeError::LocalTypeError(LocalTypeFault fault, SourceSpan span, const std::string& message)
    : std::runtime_error(message), fault_(fault), span_(span) {}

namespace {

// Builds the raw syntax graph: one node per Choice/End occurrence, plus
// alias nodes standing for `rec` binders until their body head is known.
class Translator {
 public:
  explicit Translator(std::string_view subject) : subject_(subject) {}

  TranslatedMachine run(const LocalType& type) {
    std::size_t root = head(type, {}, {});

    std::vector<StateId> state_of(nodes_.size());
    std::size_t states = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!nodes_[i].alias) state_of[i] = static_cast<StateId>(states++);

    std::vector<Transition> raw;
    std::vector<SourceSpan> raw_spans;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      for (const auto& edge : nodes_[i].edges) {
        raw.push_back({state_of[i], edge.action, state_of[resolve(edge.target)]});
        raw_spans.push_back(edge.span);
      }
    }
    Machine raw_machine(states, state_of[resolve(root)], raw);
    Machine minimal = minimize(raw_machine);

    // Carry each minimal transition's span over from some raw transition
    // with the same source behaviour and action. Raw sources map onto the
    // minimal machine by walking both in lockstep.
    std::vector<SourceSpan> spans(minimal.transitions().size());
    std::vector<std::optional<StateId>> image(states);
    std::vector<StateId> stack{raw_machine.initial()};
    image[raw_machine.initial()] = minimal.initial();
    while (!stack.empty()) {
      StateId s = stack.back();
      stack.pop_back();
      for (std::size_t ri : raw_machine.outgoing(s)) {
        const auto& rt = raw_machine.transition(ri);
        for (std::size_t mi : minimal.outgoing(*image[s])) {
          const auto& mt = minimal.transition(mi);
          if (mt.action != rt.action) continue;
          if (!spans[mi].valid()) spans[mi] = raw_spans[ri];
          if (!image[rt.to]) {
            image[rt.to] = mt.to;
            stack.push_back(rt.to);
          }
        }
      }
    }
    return {std::move(minimal), std::move(spans)};
  }

 private:
  struct Edge {
    Action action;
    std::size_t target;
    SourceSpan span;
  };
  struct Node {
    std::optional<std::size_t> alias;
    std::vector<Edge> edges;
  };
  struct Binding {
    std::string var;
    std::size_t node;
  };

  std::size_t resolve(std::size_t id) {
    while (nodes_[id].alias) id = *nodes_[id].alias;
    return id;
  }

  // `env` is the binder stack (innermost last); `unguarded` lists binders
  // not yet separated from the current position by a choice.
  std::size_t head(const LocalType& type, std::vector<Binding> env, std::vector<std::string> unguarded) {
    if (std::holds_alternative<LocalType::End>(type.node)) {
      nodes_.push_back({});
      return nodes_.size() - 1;
    }
    if (const auto* r = std::get_if<LocalType::Rec>(&type.node)) {
      std::size_t alias = nodes_.size();
      nodes_.push_back({});
      env.push_back({r->var, alias});
      unguarded.push_back(r->var);
      std::size_t body = head(*r->body, std::move(env), std::move(unguarded));
      nodes_[alias].alias = body;
      return alias;
    }
    if (const auto* v = std::get_if<LocalType::Var>(&type.node)) {
      auto binding = std::find_if(env.rbegin(), env.rend(), [&](const Binding& b) { return b.var == v->name; });
      if (binding == env.rend())
        throw LocalTypeError(LocalTypeFault::UnboundVariable, type.span,
                             "unbound recursion variable '" + v->name + "' in role " + std::string(subject_));
      if (std::find(unguarded.begin(), unguarded.end(), v->name) != unguarded.end())
        throw LocalTypeError(LocalTypeFault::UnguardedRecursion, type.span,
                             "recursion variable '" + v->name + "' is not guarded by an action in role " +
                                 std::string(subject_));
      return binding->node;
    }

    const auto& c = std::get<LocalType::Choice>(type.node);
    if (c.branches.empty())
      throw LocalTypeError(LocalTypeFault::DuplicateBranch, type.span, "empty choice in role " + std::string(subject_));
    for (std::size_t i = 0; i < c.branches.size(); ++i) {
      const auto& b = c.branches[i];
      if (b.action.direction != c.branches.front().action.direction)
        throw LocalTypeError(LocalTypeFault::MixedChoice, b.span,
                             "choice mixes sends and receives in role " + std::string(subject_));
      for (std::size_t j = 0; j < i; ++j)
        if (c.branches[j].action.same_key(b.action))
          throw LocalTypeError(LocalTypeFault::DuplicateBranch, b.span,
                               "duplicate branch " + to_string(b.action) + " in role " + std::string(subject_));
    }
    std::size_t id = nodes_.size();
    nodes_.push_back({});
    for (const auto& b : c.branches) {
      std::size_t target = head(*b.continuation, env, {});
      nodes_[id].edges.push_back({b.action, target, b.span});
    }
    return id;
  }

  std::string_view subject_;
  std::vector<Node> nodes_;
};

}  // namespace

TranslatedMachine translate_local_type(const LocalType& type, std::string_view subject) {
  return Translator(subject).run(type);
}

Machine local_type_to_machine(const LocalType& type, std::string_view subject) {
  return translate_local_type(type, subject).machine;
}

}  // namespace kmc
