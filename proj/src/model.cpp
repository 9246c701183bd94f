#include "kmc/model.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace kmc {

std::string to_string(const Action& action) {
  std::string out = action.peer;
  out += action.is_send() ? '!' : '?';
  out += action.label;
  out += '<';
  out += action.sort;
  out += '>';
  return out;
}

std::ostream& operator<<(std::ostream& os, const Action& action) {
  return os << to_string(action);
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(),
                     [&](char c) { return alpha(c) || digit(c) || c == '_'; });
}

bool is_reserved_word(std::string_view text) {
  return text == "role" || text == "end" || text == "rec" || text == "or";
}

// ---------------------------------------------------------------------------

Machine::Machine() : Machine(1, 0, {}) {}

Machine::Machine(std::size_t state_count, StateId initial, std::vector<Transition> transitions)
    : state_count_(state_count), initial_(initial), transitions_(std::move(transitions)) {
  if (state_count_ == 0) throw std::invalid_argument("machine needs at least one state");
  if (initial_ >= state_count_) throw std::invalid_argument("initial state out of range");
  outgoing_.resize(state_count_);
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    if (t.from >= state_count_ || t.to >= state_count_)
      throw std::invalid_argument("transition endpoint out of range");
    outgoing_[t.from].push_back(i);
  }
}

bool Machine::is_sending(StateId state) const {
  const auto& out = outgoing_[state];
  return !out.empty() && std::all_of(out.begin(), out.end(),
                                     [&](std::size_t i) { return transitions_[i].action.is_send(); });
}

bool Machine::is_receiving(StateId state) const {
  const auto& out = outgoing_[state];
  return !out.empty() && std::all_of(out.begin(), out.end(), [&](std::size_t i) {
           return transitions_[i].action.is_receive();
         });
}

namespace {

// Renumbers the reachable states of `machine` breadth-first, where
// `representative[s]` names the class of raw state s. Transitions of a class
// are taken from the first raw state of that class met during the traversal.
Machine renumber(const Machine& machine, const std::vector<std::size_t>& representative) {
  std::map<std::size_t, StateId> id_of;
  std::vector<StateId> raw_of;  // new id -> raw state whose transitions we copy
  std::deque<StateId> queue;
  auto visit = [&](StateId raw) {
    auto [it, fresh] = id_of.emplace(representative[raw], static_cast<StateId>(raw_of.size()));
    if (fresh) {
      raw_of.push_back(raw);
      queue.push_back(raw);
    }
    return it->second;
  };
  visit(machine.initial());
  std::vector<Transition> transitions;
  while (!queue.empty()) {
    StateId raw = queue.front();
    queue.pop_front();
    StateId from = id_of.at(representative[raw]);
    for (std::size_t index : machine.outgoing(raw)) {
      const auto& t = machine.transition(index);
      StateId to = visit(t.to);
      transitions.push_back({from, t.action, to});
    }
  }
  // Transitions are grouped per source in discovery order already, since the
  // queue processes sources in increasing new id.
  return Machine(raw_of.size(), 0, std::move(transitions));
}

}  // namespace

Machine canonicalize(const Machine& machine) {
  std::vector<std::size_t> identity(machine.state_count());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
  return renumber(machine, identity);
}

Machine minimize(const Machine& machine) {
  const std::size_t n = machine.state_count();
  // Moore refinement: start from one block and split by outgoing signature.
  std::vector<std::size_t> block(n, 0);
  std::size_t block_count = 1;
  for (;;) {
    using Signature = std::pair<std::size_t, std::vector<std::pair<Action, std::size_t>>>;
    std::map<Signature, std::size_t> blocks;
    std::vector<std::size_t> next(n);
    for (StateId s = 0; s < n; ++s) {
      Signature sig{block[s], {}};
      for (std::size_t index : machine.outgoing(s)) {
        const auto& t = machine.transition(index);
        sig.second.emplace_back(t.action, block[t.to]);
      }
      std::sort(sig.second.begin(), sig.second.end());
      auto [it, fresh] = blocks.emplace(std::move(sig), blocks.size());
      next[s] = it->second;
    }
    block = std::move(next);
    if (blocks.size() == block_count) break;
    block_count = blocks.size();
  }
  return renumber(machine, block);
}

bool isomorphic(const Machine& a, const Machine& b) {
  std::vector<std::optional<StateId>> forward(a.state_count());
  std::vector<std::optional<StateId>> backward(b.state_count());
  std::deque<std::pair<StateId, StateId>> queue;
  auto pair_up = [&](StateId x, StateId y) {
    if (!forward[x] && !backward[y]) {
      forward[x] = y;
      backward[y] = x;
      queue.emplace_back(x, y);
      return true;
    }
    return forward[x] == y && backward[y] == x;
  };
  pair_up(a.initial(), b.initial());
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    auto out_a = a.outgoing(x);
    auto out_b = b.outgoing(y);
    if (out_a.size() != out_b.size()) return false;
    for (std::size_t i : out_a) {
      const auto& ta = a.transition(i);
      auto match = std::find_if(out_b.begin(), out_b.end(),
                                [&](std::size_t j) { return b.transition(j).action == ta.action; });
      if (match == out_b.end()) return false;
      if (!pair_up(ta.to, b.transition(*match).to)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

void System::add_role(std::string name, Machine machine) {
  roles_.push_back(std::move(name));
  machines_.push_back(std::move(machine));
}

std::optional<std::size_t> System::role_index(std::string_view name) const {
  auto it = std::find(roles_.begin(), roles_.end(), name);
  if (it == roles_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - roles_.begin());
}

std::size_t System::channel_index(std::size_t from, std::size_t to) const {
  const std::size_t n = roles_.size();
  return from * (n - 1) + (to < from ? to : to - 1);
}

std::pair<std::size_t, std::size_t> System::channel_endpoints(std::size_t channel) const {
  const std::size_t n = roles_.size();
  std::size_t from = channel / (n - 1);
  std::size_t to = channel % (n - 1);
  if (to >= from) ++to;
  return {from, to};
}

bool isomorphic(const System& a, const System& b) {
  if (a.roles() != b.roles()) return false;
  for (std::size_t i = 0; i < a.role_count(); ++i)
    if (!isomorphic(a.machine(i), b.machine(i))) return false;
  return true;
}

System minimize(const System& system) {
  System out;
  for (std::size_t i = 0; i < system.role_count(); ++i)
    out.add_role(system.role(i), minimize(system.machine(i)));
  return out;
}

}  // namespace kmc
