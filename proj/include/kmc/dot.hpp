#pragma once

#include <string>

#include "kmc/model.hpp"

namespace kmc {

/// Graphviz digraph for one role's machine. States are `s<id>`; terminal
/// states are drawn as double circles and the initial state is entered from
/// a point-shaped node. Throws ValidationError if the system has errors.
std::string export_dot(const System& system, std::size_t role);

/// All roles' digraphs, in declaration order, separated by blank lines.
std::string export_dot(const System& system);

}  // namespace kmc
