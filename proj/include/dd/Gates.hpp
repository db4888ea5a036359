#pragma once

#include "dd/Circuit.hpp"

#include <array>
#include <complex>

namespace dd {

using GateMatrix = std::array<std::complex<fp>, 4>;
using TwoQubitGateMatrix = std::array<std::complex<fp>, 16>;

/// 2x2 matrix of a (possibly parameterized) single-qubit gate kind.
/// Throws for kinds without a 2x2 matrix (Swap, Barrier, Measure).
[[nodiscard]] GateMatrix gateMatrix(GateKind kind, fp angle = 0.);

[[nodiscard]] TwoQubitGateMatrix swapMatrix() noexcept;

} // namespace dd
