#include "kmc/dot.hpp"

#include <sstream>

namespace kmc {

namespace {

void require_valid(const System& system) {
  auto diagnostics = validate_system(system);
  if (has_errors(diagnostics)) throw ValidationError(std::move(diagnostics));
}

std::string quoted(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

void write_role(std::ostream& os, const System& system, std::size_t role) {
  const Machine& m = system.machine(role);
  os << "digraph " << quoted(system.role(role)) << " {\n";
  os << "  __start [shape=point];\n";
  for (StateId s = 0; s < m.state_count(); ++s)
    os << "  s" << s << " [shape=" << (m.is_terminal(s) ? "doublecircle" : "circle") << "];\n";
  os << "  __start -> s" << m.initial() << ";\n";
  for (const auto& t : m.transitions())
    os << "  s" << t.from << " -> s" << t.to << " [label=" << quoted(to_string(t.action)) << "];\n";
  os << "}\n";
}

}  // namespace

std::string export_dot(const System& system, std::size_t role) {
  require_valid(system);
  std::ostringstream os;
  write_role(os, system, role);
  return os.str();
}

std::string export_dot(const System& system) {
  require_valid(system);
  std::ostringstream os;
  for (std::size_t r = 0; r < system.role_count(); ++r) {
    if (r > 0) os << '\n';
    write_role(os, system, r);
  }
  return os.str();
}

}  // namespace kmc
