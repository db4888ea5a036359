#pragma once

#include "dd/Node.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace dd {

enum class GateKind : std::uint8_t {
  I,
  X,
  Y,
  Z,
  H,
  S,
  Sdg,
  T,
  Tdg,
  Rx,
  Ry,
  Rz,
  Phase,
  Swap,
  Barrier,
  Measure,
};

[[nodiscard]] constexpr bool isUnitaryGate(const GateKind kind) noexcept {
  return kind != GateKind::Barrier && kind != GateKind::Measure;
}

[[nodiscard]] constexpr bool hasAngle(const GateKind kind) noexcept {
  return kind == GateKind::Rx || kind == GateKind::Ry || kind == GateKind::Rz ||
         kind == GateKind::Phase;
}

[[nodiscard]] std::string_view gateName(GateKind kind) noexcept;

/// One circuit operation. Unitary gates have one target (two for Swap) and
/// any number of positive controls. A Barrier records the qubits it spans
/// (empty = all). A Measure reads targets[0] into classical bit `cbit`.
struct GateOp {
  GateKind kind = GateKind::I;
  fp angle = 0.;
  std::vector<Qubit> controls{};
  std::vector<Qubit> targets{};
  std::uint32_t cbit = 0;

  [[nodiscard]] std::vector<Qubit> touched() const {
    std::vector<Qubit> qs = controls;
    qs.insert(qs.end(), targets.begin(), targets.end());
    return qs;
  }
};

struct QuantumCircuit {
  std::size_t numQubits = 0;
  std::size_t numClassical = 0;
  std::vector<GateOp> ops{};

  [[nodiscard]] bool hasMeasurement() const {
    for (const auto& op : ops) {
      if (op.kind == GateKind::Measure) {
        return true;
      }
    }
    return false;
  }
  [[nodiscard]] std::size_t gateCount() const {
    std::size_t n = 0;
    for (const auto& op : ops) {
      if (isUnitaryGate(op.kind)) {
        ++n;
      }
    }
    return n;
  }
};

} // namespace dd
