#pragma once

#include "dd/Manager.hpp"

#include <cstdint>
#include <stdexcept>

namespace dd {

/// A quantum state as a vector decision diagram rooted at `root`.
struct StateDD {
  VectorEdge root{};
  std::size_t numQubits = 0;
};

inline StateDD fromAmplitudes(Manager& mgr, const CVec& amplitudes) {
  const auto root = mgr.fromAmplitudes(amplitudes);
  std::size_t nq = 0;
  for (auto size = amplitudes.size(); size > 1; size >>= 1U) {
    ++nq;
  }
  return {root, nq};
}

inline StateDD basisState(Manager& mgr, const std::size_t numQubits, const std::uint64_t index) {
  return {mgr.basisState(numQubits, index), numQubits};
}

inline std::complex<fp> getAmplitude(Manager& mgr, const StateDD& s, const std::uint64_t index) {
  if (s.numQubits < 64 && index >= (1ULL << s.numQubits)) {
    throw std::out_of_range("amplitude index out of range");
  }
  return mgr.getAmplitude(s.root, index);
}

inline CVec toAmplitudes(Manager& mgr, const StateDD& s) {
  return mgr.toAmplitudes(s.root, s.numQubits);
}

inline StateDD add(Manager& mgr, const StateDD& a, const StateDD& b) {
  if (a.numQubits != b.numQubits) {
    throw std::invalid_argument("qubit count mismatch");
  }
  return {mgr.add(a.root, b.root), a.numQubits};
}

/// <a|b>; the first operand is conjugated.
inline std::complex<fp> innerProduct(Manager& mgr, const StateDD& a, const StateDD& b) {
  if (a.numQubits != b.numQubits) {
    throw std::invalid_argument("qubit count mismatch");
  }
  return mgr.innerProduct(a.root, b.root);
}

inline fp fidelity(Manager& mgr, const StateDD& a, const StateDD& b) {
  if (a.numQubits != b.numQubits) {
    throw std::invalid_argument("qubit count mismatch");
  }
  return mgr.fidelity(a.root, b.root);
}

inline std::size_t nodeCount(Manager& mgr, const StateDD& s) { return mgr.nodeCount(s.root); }

} // namespace dd
