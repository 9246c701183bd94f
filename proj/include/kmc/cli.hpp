#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kmc/checker.hpp"
#include "kmc/model.hpp"

namespace kmc::cli {

// sysexits-style process exit codes.
inline constexpr int kExitSafe = 0;
inline constexpr int kExitUnsafe = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitTerminated = 0;
inline constexpr int kExitDeadlocked = 1;
inline constexpr int kExitBudgetExhausted = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitDataError = 65;
inline constexpr int kExitSoftware = 70;
inline constexpr int kExitIoError = 74;

struct CheckStats {
  std::size_t configurations = 0;
  std::size_t edges = 0;
  std::vector<std::size_t> bounds_tried;
  std::int64_t elapsed_ms = 0;
};

struct CheckReport {
  Verdict verdict;
  CheckStats stats;
  std::string source;
};

/// The versioned (`"schema": 1`) machine-readable form of a report.
nlohmann::ordered_json to_json(const System& system, const CheckReport& report);

/// Human-readable summary, one violation block per violation.
std::string to_text(const System& system, const CheckReport& report);

int exit_code(const Verdict& verdict);

/// Entry point shared by the `kmc` binary and the tests. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kmc::cli
