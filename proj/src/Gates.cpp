#include "dd/Gates.hpp"

#include <cmath>
#include <stdexcept>

namespace dd {

std::string_view gateName(const GateKind kind) noexcept {
  switch (kind) {
  case GateKind::I:
    return "id";
  case GateKind::X:
    return "x";
  case GateKind::Y:
    return "y";
  case GateKind::Z:
    return "z";
  case GateKind::H:
    return "h";
  case GateKind::S:
    return "s";
  case GateKind::Sdg:
    return "sdg";
  case GateKind::T:
    return "t";
  case GateKind::Tdg:
    return "tdg";
  case GateKind::Rx:
    return "rx";
  case GateKind::Ry:
    return "ry";
  case GateKind::Rz:
    return "rz";
  case GateKind::Phase:
    return "p";
  case GateKind::Swap:
    return "swap";
  case GateKind::Barrier:
    return "barrier";
  case GateKind::Measure:
    return "measure";
  }
  return "?";
}

GateMatrix gateMatrix(const GateKind kind, const fp angle) {
  using C = std::complex<fp>;
  constexpr fp sqrt12 = 0.70710678118654752440;
  switch (kind) {
  case GateKind::I:
    return {C{1., 0.}, C{0., 0.}, C{0., 0.}, C{1., 0.}};
  case GateKind::X:
    return {C{0., 0.}, C{1., 0.}, C{1., 0.}, C{0., 0.}};
  case GateKind::Y:
    return {C{0., 0.}, C{0., -1.}, C{0., 1.}, C{0., 0.}};
  case GateKind::Z:
    return {C{1., 0.}, C{0., 0.}, C{0., 0.}, C{-1., 0.}};
  case GateKind::H:
    return {C{sqrt12, 0.}, C{sqrt12, 0.}, C{sqrt12, 0.}, C{-sqrt12, 0.}};
  case GateKind::S:
    return {C{1., 0.}, C{0., 0.}, C{0., 0.}, C{0., 1.}};
  case GateKind::Sdg:
    return {C{1., 0.}, C{0., 0.}, C{0., 0.}, C{0., -1.}};
  case GateKind::T:
    return {C{1., 0.}, C{0., 0.}, C{0., 0.}, C{sqrt12, sqrt12}};
  case GateKind::Tdg:
    return {C{1., 0.}, C{0., 0.}, C{0., 0.}, C{sqrt12, -sqrt12}};
  case GateKind::Rx: {
    const fp c = std::cos(angle / 2.);
    const fp s = std::sin(angle / 2.);
    return {C{c, 0.}, C{0., -s}, C{0., -s}, C{c, 0.}};
  }
  case GateKind::Ry: {
    const fp c = std::cos(angle / 2.);
    const fp s = std::sin(angle / 2.);
    return {C{c, 0.}, C{-s, 0.}, C{s, 0.}, C{c, 0.}};
  }
  case GateKind::Rz: {
    const fp c = std::cos(angle / 2.);
    const fp s = std::sin(angle / 2.);
    return {C{c, -s}, C{0., 0.}, C{0., 0.}, C{c, s}};
  }
  case GateKind::Phase:
    return {C{1., 0.}, C{0., 0.}, C{0., 0.}, C{std::cos(angle), std::sin(angle)}};
  case GateKind::Swap:
  case GateKind::Barrier:
  case GateKind::Measure:
    break;
  }
  throw std::invalid_argument("gate kind has no 2x2 matrix");
}

TwoQubitGateMatrix swapMatrix() noexcept {
  TwoQubitGateMatrix m{};
  m[0 * 4 + 0] = {1., 0.};
  m[1 * 4 + 2] = {1., 0.};
  m[2 * 4 + 1] = {1., 0.};
  m[3 * 4 + 3] = {1., 0.};
  return m;
}

} // namespace dd
