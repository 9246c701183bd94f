#include <doctest.h>

#include <random>

#include "kmc/checker.hpp"
#include "support/support.hpp"

using namespace kmc;
using kmc::testing::load_fixture;
using kmc::testing::oracle;
using kmc::testing::replay_to;

namespace {

std::string verdict_name(const Verdict& v) { return std::string(to_string(v.kind)); }

}  // namespace

TEST_CASE("exhaustivity on the examples") {
  CHECK(check_exhaustive(load_fixture("fib"), build_bounded_graph(load_fixture("fib"), 1)).passed());

  System pipeline = load_fixture("pipeline");
  auto at1 = check_exhaustive(pipeline, build_bounded_graph(pipeline, 1));
  REQUIRE_FALSE(at1.passed());
  CHECK(at1.unmet.front().role == 0);
  CHECK(at1.unmet.front().action == Action::send("b", "y"));
  CHECK(check_exhaustive(pipeline, build_bounded_graph(pipeline, 2)).passed());

  System flood = load_fixture("flood");
  for (std::size_t k = 1; k <= 4; ++k) CHECK_FALSE(check_exhaustive(flood, build_bounded_graph(flood, k)).passed());
}

TEST_CASE("safety on the examples") {
  System fib = load_fixture("fib");
  CHECK(check_safety(fib, build_bounded_graph(fib, 1)).passed());

  System progress = load_fixture("fib_progress_bug");
  auto r = check_safety(progress, build_bounded_graph(progress, 1));
  REQUIRE_FALSE(r.passed());
  CHECK(r.violations.front().is_progress());
  CHECK(kmc::testing::violation_keys(progress, r.violations) ==
        std::vector<std::string>{"progress:m", "progress:u", "progress:w"});

  System reception = load_fixture("fib_reception_bug");
  auto q = check_safety(reception, build_bounded_graph(reception, 1));
  REQUIRE_FALSE(q.passed());
  CHECK(q.violations.size() == 2);
  for (const auto& v : q.violations) {
    REQUIRE(v.is_reception());
    const auto& rv = std::get<ReceptionViolation>(v.kind);
    CHECK(reception.role(rv.sender) == "w");
    CHECK(reception.role(rv.receiver) == "m");
    CHECK(rv.head == Message{"result", "int"});
  }
  CHECK(describe(reception, q.violations.front()) ==
        "eventual reception violation: message result<int> from w to m is never received");

  System orphan = load_fixture("orphan");
  auto o = check_safety(orphan, build_bounded_graph(orphan, 1));
  REQUIRE(o.violations.size() == 1);
  CHECK(o.violations[0].trace == std::vector<Step>{{0, Action::send("b", "hello")}});
}

TEST_CASE("violation traces are the oracle's shortest traces") {
  for (const char* name : {"fib_progress_bug", "fib_reception_bug", "orphan"}) {
    CAPTURE(name);
    System s = load_fixture(name);
    auto r = check_safety(s, build_bounded_graph(s, 1));
    const auto& expected = oracle()["fixtures"][name]["first_traces"];
    std::set<std::string> seen;
    for (const auto& v : r.violations) {
      auto key = kmc::testing::violation_keys(s, {v}).front();
      if (!seen.insert(key).second) continue;  // the first report per key is the shallowest
      CAPTURE(key);
      CHECK(kmc::testing::oracle_trace(s, v.trace) == expected[key].get<std::vector<std::string>>());
    }
    CHECK(seen.size() == expected.size());
  }
}

TEST_CASE("extract_trace follows parent links") {
  System fib = load_fixture("fib");
  BoundedGraph g = build_bounded_graph(fib, 1);
  CHECK(extract_trace(g, g.initial()).empty());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto trace = extract_trace(g, v);
    CHECK(trace.size() == g.depth(v));
    auto end = replay_to(fib, trace, 1);
    REQUIRE(end);
    CHECK(*end == g.configuration(v));
  }
}

TEST_CASE("check_kmc verdicts on every fixture match the oracle") {
  for (const auto& name : kmc::testing::fixture_names()) {
    CAPTURE(name);
    const auto& expected = oracle()["fixtures"][name];
    Verdict v = check_kmc(load_fixture(name), {.max_bound = 4});
    CHECK(verdict_name(v) == expected["verdict"].get<std::string>());
    if (expected["verdict"] != "inconclusive") CHECK(v.k == expected["k"].get<std::size_t>());
    if (expected.contains("violation_keys"))
      CHECK(kmc::testing::violation_keys(load_fixture(name), v.violations) ==
            expected["violation_keys"].get<std::vector<std::string>>());
  }
}

TEST_CASE("check_kmc bookkeeping") {
  Verdict fib = check_kmc(load_fixture("fib"));
  CHECK(fib.kind == Verdict::Kind::Safe);
  CHECK(fib.k == 1);
  CHECK(fib.max_bound == kDefaultMaxBound);
  CHECK(fib.bounds_tried == std::vector<std::size_t>{1});
  CHECK(fib.stats.configurations == 26);
  CHECK(fib.stats.edges == 32);

  Verdict pipeline = check_kmc(load_fixture("pipeline"));
  CHECK(pipeline.bounds_tried == std::vector<std::size_t>{1, 2});

  for (std::size_t n = 1; n <= 4; ++n) {
    Verdict flood = check_kmc(load_fixture("flood"), {.max_bound = n});
    CHECK(flood.kind == Verdict::Kind::Inconclusive);
    CHECK(flood.k == n);
    CHECK(flood.max_bound == n);
    CHECK(flood.violations.empty());
    CHECK(flood.note.find("unmet") != std::string::npos);
  }

  CHECK_THROWS_AS(check_kmc(load_fixture("fib"), {.max_configs = 5}), ResourceExhausted);
  CHECK_THROWS_AS(check_kmc(load_fixture("fib"), {.max_bound = 0}), std::invalid_argument);
  System bad;
  bad.add_role("a", Machine(2, 0, {{0, Action::send("a", "x"), 1}}));
  CHECK_THROWS_AS(check_kmc(bad), ValidationError);
}

TEST_CASE("bounded violations are reported only on request") {
  // a floods b, which reads once and then waits on c forever.
  System s = parse_system_or_throw("role a: rec t. b!m; t\nrole b: a?m; c?n; end\nrole c: end");
  Verdict quiet = check_kmc(s, {.max_bound = 2});
  REQUIRE(quiet.kind == Verdict::Kind::Inconclusive);
  CHECK(quiet.violations.empty());
  Verdict loud = check_kmc(s, {.max_bound = 2, .report_bounded_violations = true});
  CHECK(loud.kind == Verdict::Kind::Inconclusive);
  CHECK_FALSE(loud.violations.empty());
}

TEST_CASE("reported violations replay to a configuration meeting the stuck condition") {
  std::vector<System> systems;
  for (const char* name : {"fib_progress_bug", "fib_reception_bug", "orphan"}) systems.push_back(load_fixture(name));
  for (const auto& entry : oracle()["random"]) systems.push_back(kmc::testing::system_from_json(entry["system"]));
  for (const System& s : systems) {
    Verdict v = check_kmc(s, {.max_bound = 3});
    if (v.kind != Verdict::Kind::Unsafe) continue;
    for (const auto& violation : v.violations) {
      auto end = replay_to(s, violation.trace, v.k);
      REQUIRE(end);
      CHECK(kmc::testing::witness_condition_holds(s, *end, violation, v.k));
    }
  }
}

TEST_CASE("once exhaustive, the next two bounds are exhaustive too") {
  std::vector<System> systems;
  for (const auto& name : kmc::testing::fixture_names()) systems.push_back(load_fixture(name));
  std::mt19937 rng(3);
  for (int i = 0; i < 150; ++i) systems.push_back(kmc::testing::random_system(rng));
  for (const System& s : systems) {
    Verdict v = check_kmc(s, {.max_bound = 3});
    if (v.kind == Verdict::Kind::Inconclusive) continue;
    for (std::size_t k = v.k; k <= v.k + 2; ++k)
      CHECK(check_exhaustive(s, build_bounded_graph(s, k, 500'000)).passed());
  }
}

TEST_CASE("systems without sends are exhaustive at every bound") {
  System solo = load_fixture("solo");
  System loop = parse_system_or_throw("role a: end\nrole b: rec t. a?x; t");
  for (std::size_t k = 1; k <= 3; ++k) {
    CHECK(check_exhaustive(solo, build_bounded_graph(solo, k)).passed());
    CHECK(check_exhaustive(loop, build_bounded_graph(loop, k)).passed());
  }
}

TEST_CASE("safe fixtures have the same local behaviour one bound higher") {
  for (const auto& name : kmc::testing::fixture_names()) {
    System s = load_fixture(name);
    Verdict v = check_kmc(s, {.max_bound = 4});
    if (v.kind != Verdict::Kind::Safe) continue;
    BoundedGraph at = build_bounded_graph(s, v.k);
    BoundedGraph above = build_bounded_graph(s, v.k + 1);
    for (std::size_t r = 0; r < s.role_count(); ++r) {
      CAPTURE(name);
      CAPTURE(r);
      CHECK(local_fingerprint(at, r) == local_fingerprint(above, r));
    }
  }
}

TEST_CASE("verdicts on generated systems match the oracle") {
  std::size_t mismatches = 0;
  for (const auto& entry : oracle()["random"]) {
    System s = kmc::testing::system_from_json(entry["system"]);
    Verdict v = check_kmc(s, {.max_bound = 3});
    bool same = verdict_name(v) == entry["verdict"].get<std::string>();
    if (same && entry["verdict"] != "inconclusive") same = v.k == entry["k"].get<std::size_t>();
    if (same && entry.contains("violation_keys"))
      same = kmc::testing::violation_keys(s, v.violations) == entry["violation_keys"].get<std::vector<std::string>>();
    if (!same) {
      ++mismatches;
      MESSAGE(render_system(s));
    }
  }
  CHECK(mismatches == 0);
}
