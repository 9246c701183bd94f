#pragma once

#include <cstdint>
#include <ostream>

namespace kmc {

/// Position of a token in DSL input. Lines and columns are 1-based; a
/// default-constructed span (line 0) means "no source location".
struct SourceSpan {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::uint32_t length = 0;
  std::uint32_t offset = 0;  // byte offset of the first character

  bool valid() const { return line != 0; }
  bool operator==(const SourceSpan&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const SourceSpan& span) {
  return os << span.line << ':' << span.column;
}

}  // namespace kmc
