#pragma once

#include "dd/Circuit.hpp"
#include "dd/Gates.hpp"
#include "dd/Manager.hpp"
#include "dd/State.hpp"

#include <stdexcept>

namespace dd {

/// A linear operator as a matrix decision diagram rooted at `root`.
struct OperatorDD {
  MatrixEdge root{};
  std::size_t numQubits = 0;
};

inline OperatorDD identityOperator(Manager& mgr, const std::size_t numQubits) {
  return {mgr.identity(numQubits), numQubits};
}

/// Build the full-width operator DD of one circuit operation. Swap is built
/// as a native 4x4 two-qubit operator; controlled gates get their identity
/// and gate branches constructed directly, without dense intermediates.
OperatorDD gateOperator(Manager& mgr, std::size_t numQubits, const GateOp& op);

inline OperatorDD kronecker(Manager& mgr, const OperatorDD& a, const OperatorDD& b) {
  return {mgr.kronecker(a.root, b.root, b.numQubits), a.numQubits + b.numQubits};
}

inline StateDD apply(Manager& mgr, const OperatorDD& m, const StateDD& v) {
  if (m.numQubits != v.numQubits) {
    throw std::invalid_argument("qubit count mismatch");
  }
  return {mgr.multiply(m.root, v.root), v.numQubits};
}

inline OperatorDD multiply(Manager& mgr, const OperatorDD& a, const OperatorDD& b) {
  if (a.numQubits != b.numQubits) {
    throw std::invalid_argument("qubit count mismatch");
  }
  return {mgr.multiply(a.root, b.root), a.numQubits};
}

inline OperatorDD add(Manager& mgr, const OperatorDD& a, const OperatorDD& b) {
  if (a.numQubits != b.numQubits) {
    throw std::invalid_argument("qubit count mismatch");
  }
  return {mgr.add(a.root, b.root), a.numQubits};
}

inline OperatorDD conjugateTranspose(Manager& mgr, const OperatorDD& a) {
  return {mgr.conjugateTranspose(a.root), a.numQubits};
}

inline std::complex<fp> getEntry(Manager& mgr, const OperatorDD& a, const std::uint64_t row,
                                 const std::uint64_t col) {
  if (a.numQubits < 64 &&
      (row >= (1ULL << a.numQubits) || col >= (1ULL << a.numQubits))) {
    throw std::out_of_range("matrix entry out of range");
  }
  return mgr.getEntry(a.root, row, col);
}

inline CMat toMatrix(Manager& mgr, const OperatorDD& a) {
  return mgr.toMatrix(a.root, a.numQubits);
}

inline std::size_t nodeCount(Manager& mgr, const OperatorDD& a) { return mgr.nodeCount(a.root); }

} // namespace dd
