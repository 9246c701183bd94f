// Shared helpers for the unit and acceptance suites. Nothing here calls into
// the checker: the witness and schema checks are written against the raw
// semantics so they can judge the checker's output.
#pragma once

#include <algorithm>
#include <deque>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "kmc/checker.hpp"
#include "kmc/dsl.hpp"
#include "kmc/model.hpp"
#include "kmc/semantics.hpp"

namespace kmc::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string& name) { return std::string(KMC_FIXTURE_DIR) + "/" + name + ".kmc"; }

inline System load_fixture(const std::string& name) { return parse_system_or_throw(read_file(fixture_path(name))); }

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"handshake", "fib",      "fib_progress_bug", "fib_reception_bug",
                                                 "orphan",    "flood",    "pipeline",         "forked_choice",
                                                 "ping_pong", "solo"};
  return names;
}

inline const nlohmann::json& oracle() {
  static const nlohmann::json data = nlohmann::json::parse(read_file(std::string(KMC_DATA_DIR) + "/oracle.json"));
  return data;
}

/// System from the oracle's explicit transition-list encoding.
inline System system_from_json(const nlohmann::json& j) {
  System system;
  for (const auto& role : j.at("roles")) {
    const auto& m = j.at("machines").at(role.get<std::string>());
    std::vector<Transition> transitions;
    for (const auto& t : m.at("transitions")) {
      Direction dir = t[2].get<std::string>() == "!" ? Direction::Send : Direction::Receive;
      transitions.push_back({t[0].get<StateId>(), Action{t[1], dir, t[3], t[4]}, t[5].get<StateId>()});
    }
    system.add_role(role, Machine(m.at("states").get<std::size_t>(), m.at("initial").get<StateId>(),
                                  std::move(transitions)));
  }
  return system;
}

/// "u:m!compute<int>", the oracle's trace notation.
inline std::string oracle_step(const System& system, const Step& step) {
  return system.role(step.role) + ":" + to_string(step.action);
}

inline std::vector<std::string> oracle_trace(const System& system, const std::vector<Step>& trace) {
  std::vector<std::string> out;
  for (const auto& s : trace) out.push_back(oracle_step(system, s));
  return out;
}

/// The oracle's violation keys: "progress:ROLE" / "reception:FROM:TO:LABEL:SORT".
inline std::vector<std::string> violation_keys(const System& system, const std::vector<Violation>& violations) {
  std::set<std::string> keys;
  for (const auto& v : violations) {
    if (const auto* p = std::get_if<ProgressViolation>(&v.kind)) {
      keys.insert("progress:" + system.role(p->role));
    } else {
      const auto& r = std::get<ReceptionViolation>(v.kind);
      keys.insert("reception:" + system.role(r.sender) + ":" + system.role(r.receiver) + ":" + r.head.label + ":" +
                  r.head.sort);
    }
  }
  return {keys.begin(), keys.end()};
}

/// Applies `trace` from the initial configuration with apply_step alone.
inline std::optional<Configuration> replay_to(const System& system, const std::vector<Step>& trace, std::size_t k) {
  Configuration c = initial_configuration(system);
  for (const auto& step : trace)
    if (apply_step(system, c, step, k)) return std::nullopt;
  return c;
}

// ---------------------------------------------------------------------------
// Independent witness check: explores forward from the witness
// configuration with enabled_steps only.

inline std::vector<Configuration> forward_closure(const System& system, const Configuration& start, std::size_t k) {
  std::unordered_set<Configuration, ConfigurationHash> seen{start};
  std::vector<Configuration> order{start};
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto successors = enabled_steps(system, order[i], k);
    for (auto& [step, next] : successors)
      if (seen.insert(next).second) order.push_back(std::move(next));
  }
  return order;
}

/// Does `config` satisfy the stuck condition of `violation` at bound k?
inline bool witness_condition_holds(const System& system, const Configuration& config, const Violation& violation,
                                    std::size_t k) {
  auto future = forward_closure(system, config, k);
  if (const auto* p = std::get_if<ProgressViolation>(&violation.kind)) {
    if (config.locals[p->role] != p->state || !system.machine(p->role).is_receiving(p->state)) return false;
    for (const auto& c : future)
      for (const auto& [step, next] : enabled_steps(system, c, k))
        if (step.role == p->role) return false;
    return true;
  }
  const auto& r = std::get<ReceptionViolation>(violation.kind);
  const auto& buffer = config.buffer(system, r.sender, r.receiver);
  if (buffer.empty() || buffer.front() != r.head) return false;
  for (const auto& c : future)
    for (const auto& [step, next] : enabled_steps(system, c, k))
      if (step.role == r.receiver && step.action.is_receive() && step.action.peer == system.role(r.sender))
        return false;
  return true;
}

// ---------------------------------------------------------------------------
// Random valid systems: <= 3 roles, <= 4 states per machine, <= 2 labels.

inline Machine random_machine(std::mt19937& rng, const std::string& self, const std::vector<std::string>& roles) {
  std::vector<std::string> peers;
  for (const auto& r : roles)
    if (r != self) peers.push_back(r);
  static const std::vector<std::string> labels = {"x", "y"};
  static const std::vector<std::string> sorts = {"unit", "int"};
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  const std::size_t n = 1 + pick(4);
  std::vector<Transition> transitions;
  for (StateId s = 0; s < n; ++s) {
    if (s > 0 && pick(10) < 3) continue;
    Direction dir = pick(2) ? Direction::Send : Direction::Receive;
    std::vector<Action> used;
    std::size_t branches = 1 + pick(2);
    for (std::size_t b = 0; b < branches; ++b) {
      Action a{peers[pick(peers.size())], dir, labels[pick(2)], sorts[pick(2)]};
      if (std::any_of(used.begin(), used.end(), [&](const Action& u) { return u.same_key(a); })) continue;
      used.push_back(a);
      transitions.push_back({s, a, static_cast<StateId>(pick(n))});
    }
  }
  return canonicalize(Machine(n, 0, std::move(transitions)));
}

inline System random_system(std::mt19937& rng) {
  std::vector<std::string> roles = {"p", "q", "r"};
  roles.resize(2 + std::uniform_int_distribution<int>(0, 1)(rng));
  System system;
  for (const auto& r : roles) system.add_role(r, random_machine(rng, r, roles));
  return system;
}

// ---------------------------------------------------------------------------
// CLI JSON report schema (version 1). Returns a description of the first
// mismatch, or an empty string.

inline std::string schema_error(const nlohmann::json& j) {
  auto keys_are = [](const nlohmann::json& o, std::set<std::string> expected) {
    if (!o.is_object()) return false;
    std::set<std::string> got;
    for (auto it = o.begin(); it != o.end(); ++it) got.insert(it.key());
    return got == expected;
  };
  if (!keys_are(j, {"schema", "verdict", "k", "max_bound", "violations", "stats"})) return "top-level keys";
  if (j["schema"] != 1) return "schema";
  const auto& verdict = j["verdict"];
  if (!verdict.is_string() || (verdict != "safe" && verdict != "unsafe" && verdict != "inconclusive"))
    return "verdict";
  if (!(j["k"].is_null() || j["k"].is_number_integer())) return "k";
  if ((verdict == "inconclusive") != j["k"].is_null()) return "k vs verdict";
  if (!j["max_bound"].is_number_integer()) return "max_bound";
  if (!j["violations"].is_array()) return "violations";
  if (verdict == "unsafe" && j["violations"].empty()) return "unsafe without violations";
  if (verdict == "safe" && !j["violations"].empty()) return "safe with violations";
  for (const auto& v : j["violations"]) {
    if (!keys_are(v, {"kind", "role", "channel", "label", "sort", "trace"})) return "violation keys";
    if (v["kind"] != "progress" && v["kind"] != "eventual_reception") return "violation kind";
    if (!(v["role"].is_null() || v["role"].is_string())) return "violation role";
    if (!v["channel"].is_null()) {
      if (!keys_are(v["channel"], {"from", "to"}) || !v["channel"]["from"].is_string() ||
          !v["channel"]["to"].is_string())
        return "violation channel";
    }
    if (!(v["label"].is_null() || v["label"].is_string())) return "violation label";
    if (!(v["sort"].is_null() || v["sort"].is_string())) return "violation sort";
    if (!v["trace"].is_array()) return "trace";
    for (const auto& s : v["trace"]) {
      if (!keys_are(s, {"role", "peer", "dir", "label", "sort"})) return "step keys";
      if (s["dir"] != "!" && s["dir"] != "?") return "step dir";
      for (const char* key : {"role", "peer", "label", "sort"})
        if (!s[key].is_string()) return std::string("step ") + key;
    }
  }
  const auto& stats = j["stats"];
  if (!keys_are(stats, {"configurations", "edges", "bounds_tried", "elapsed_ms"})) return "stats keys";
  for (const char* key : {"configurations", "edges", "elapsed_ms"})
    if (!stats[key].is_number_integer()) return std::string("stats ") + key;
  if (!stats["bounds_tried"].is_array()) return "bounds_tried";
  for (const auto& b : stats["bounds_tried"])
    if (!b.is_number_integer()) return "bounds_tried entry";
  return {};
}

}  // namespace kmc::testing
