#pragma once

#include "dd/Circuit.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dd {

enum class Severity : std::uint8_t { Error, Warning };

/// 1-based position of the offending token.
struct Diagnostic {
  std::size_t line = 0;
  std::size_t column = 0;
  Severity severity = Severity::Error;
  std::string message;
};

struct ParseResult {
  std::optional<QuantumCircuit> circuit;
  std::vector<Diagnostic> diagnostics;

  [[nodiscard]] bool ok() const noexcept { return circuit.has_value(); }
};

/// OpenQASM 2 subset: one qreg, one optional creg, gates {id, x, y, z, h, s,
/// sdg, t, tdg, rx, ry, rz, u1, p, cx, cz, cp, swap, ccx}, barrier, and
/// `measure q[i] -> c[j]`. Angle expressions over pi, literals and + - * /.
/// Never throws on malformed input; errors land in the diagnostics.
ParseResult parseQasm(const std::string& source);

/// Emits the subset above; angles carry 17 significant digits so that
/// parse(serialize(c)) reproduces the op list exactly.
std::string serializeQasm(const QuantumCircuit& c);

/// Reversed op order with each gate inverted; barriers stay in (mirrored)
/// position. Throws on measurements.
QuantumCircuit invertCircuit(const QuantumCircuit& c);

} // namespace dd
