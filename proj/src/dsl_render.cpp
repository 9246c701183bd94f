#include <map>

#include "kmc/dsl.hpp"

namespace kmc {

namespace {

class MachineRenderer {
 public:
  explicit MachineRenderer(const Machine& machine)
      : machine_(machine), on_stack_(machine.state_count(), false), referenced_(machine.state_count(), false) {}

  // Binders are first named after their state ("#3") and renamed by depth
  // afterwards, since whether a state needs a binder is only known once its
  // body has been rendered.
  LocalTypePtr render(StateId state) {
    if (on_stack_[state]) {
      referenced_[state] = true;
      return lt::var(placeholder(state));
    }
    if (machine_.is_terminal(state)) return lt::end();
    on_stack_[state] = true;
    std::vector<LocalType::Branch> branches;
    for (std::size_t index : machine_.outgoing(state)) {
      const auto& t = machine_.transition(index);
      branches.push_back({t.action, render(t.to), {}});
    }
    on_stack_[state] = false;
    auto body = lt::choice(std::move(branches));
    if (!referenced_[state]) return body;
    referenced_[state] = false;
    return lt::rec(placeholder(state), std::move(body));
  }

 private:
  static std::string placeholder(StateId state) { return "#" + std::to_string(state); }

  const Machine& machine_;
  std::vector<bool> on_stack_;
  std::vector<bool> referenced_;
};

std::string binder_name(std::size_t depth) { return depth == 0 ? "t" : "t" + std::to_string(depth); }

LocalTypePtr rename(const LocalTypePtr& type, std::map<std::string, std::string>& env, std::size_t depth) {
  if (const auto* r = std::get_if<LocalType::Rec>(&type->node)) {
    std::string name = binder_name(depth);
    auto saved = env.find(r->var) == env.end() ? std::nullopt : std::optional<std::string>(env[r->var]);
    env[r->var] = name;
    auto body = rename(r->body, env, depth + 1);
    if (saved)
      env[r->var] = *saved;
    else
      env.erase(r->var);
    return lt::rec(name, std::move(body));
  }
  if (const auto* v = std::get_if<LocalType::Var>(&type->node)) {
    auto it = env.find(v->name);
    return lt::var(it == env.end() ? v->name : it->second);
  }
  if (const auto* c = std::get_if<LocalType::Choice>(&type->node)) {
    std::vector<LocalType::Branch> branches;
    for (const auto& b : c->branches) branches.push_back({b.action, rename(b.continuation, env, depth), b.span});
    return lt::choice(std::move(branches));
  }
  return type;
}

void render_into(const LocalType& type, std::string& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, LocalType::End>) {
          out += "end";
        } else if constexpr (std::is_same_v<T, LocalType::Var>) {
          out += node.name;
        } else if constexpr (std::is_same_v<T, LocalType::Rec>) {
          out += "rec ";
          out += node.var;
          out += ". ";
          render_into(*node.body, out);
        } else {
          const bool braced = node.branches.size() > 1;
          for (std::size_t i = 0; i < node.branches.size(); ++i) {
            const auto& b = node.branches[i];
            if (i > 0) out += " or ";
            if (braced) out += '{';
            out += to_string(b.action);
            out += "; ";
            render_into(*b.continuation, out);
            if (braced) out += '}';
          }
        }
      },
      type.node);
}

}  // namespace

LocalTypePtr machine_to_local_type(const Machine& machine) {
  auto raw = MachineRenderer(machine).render(machine.initial());
  std::map<std::string, std::string> env;
  return rename(raw, env, 0);
}

std::string render_local_type(const LocalType& type) {
  std::string out;
  render_into(type, out);
  return out;
}

std::string render_system(const System& system) {
  std::string out;
  for (std::size_t r = 0; r < system.role_count(); ++r) {
    out += "role ";
    out += system.role(r);
    out += ": ";
    out += render_local_type(*machine_to_local_type(system.machine(r)));
    out += '\n';
  }
  return out;
}

}  // namespace kmc
