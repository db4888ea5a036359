#pragma once

#include "dd/Operator.hpp"
#include "dd/State.hpp"

#include <string>

namespace dd {

/// Graphviz rendering of a decision diagram. Interior nodes are labeled with
/// their qubit level, the terminal is a box, zero stubs are point-shaped
/// sinks. Every edge is annotated with its weight as magnitude and phase (in
/// units of pi), drawn with pen width proportional to the magnitude and
/// colored by hue = phase / 2pi.
std::string toDot(const VectorEdge& root);
std::string toDot(const MatrixEdge& root);

inline std::string toDot(const StateDD& s) { return toDot(s.root); }
inline std::string toDot(const OperatorDD& m) { return toDot(m.root); }

} // namespace dd
