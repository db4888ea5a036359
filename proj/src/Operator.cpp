#include "dd/Operator.hpp"

namespace dd {

OperatorDD gateOperator(Manager& mgr, const std::size_t numQubits, const GateOp& op) {
  switch (op.kind) {
  case GateKind::Barrier:
  case GateKind::Measure:
    throw std::invalid_argument("operation has no operator representation");
  case GateKind::Swap: {
    if (op.targets.size() != 2) {
      throw std::invalid_argument("swap needs two targets");
    }
    if (op.controls.empty()) {
      return {mgr.twoQubitGate(numQubits, op.targets[0], op.targets[1], swapMatrix()), numQubits};
    }
    // controlled swap via three controlled-X gates
    GateOp cx1{GateKind::X, 0., op.controls, {op.targets[1]}, 0};
    cx1.controls.push_back(op.targets[0]);
    GateOp cx2{GateKind::X, 0., op.controls, {op.targets[0]}, 0};
    cx2.controls.push_back(op.targets[1]);
    const auto a = gateOperator(mgr, numQubits, cx1);
    const auto b = gateOperator(mgr, numQubits, cx2);
    return multiply(mgr, a, multiply(mgr, b, a));
  }
  default:
    break;
  }
  if (op.targets.size() != 1) {
    throw std::invalid_argument("single-target gate needs exactly one target");
  }
  return {mgr.controlledGate(numQubits, op.controls, op.targets[0], gateMatrix(op.kind, op.angle)),
          numQubits};
}

} // namespace dd
