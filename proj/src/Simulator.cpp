#include "dd/Simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace dd {

namespace {

/// Squared norm of the subvector below each node, with unit weight at the
/// node itself. Terminal counts as 1; zero stubs contribute nothing.
class DownstreamMass {
public:
  fp of(const VectorNode* node) {
    if (node == nullptr) {
      return 1.;
    }
    if (const auto it = memo_.find(node); it != memo_.end()) {
      return it->second;
    }
    fp mass = 0.;
    for (const auto& s : node->succ) {
      if (!s.w->exactlyZero()) {
        mass += s.w->mag2() * of(s.node);
      }
    }
    memo_.emplace(node, mass);
    return mass;
  }

private:
  std::unordered_map<const VectorNode*, fp> memo_;
};

std::pair<fp, fp> levelProbabilities(const StateDD& s, const Qubit q, DownstreamMass& mass) {
  // push squared-magnitude path mass down to level q, then split it over the
  // two successors of every node living there
  std::unordered_map<const VectorNode*, fp> cur{{s.root.node, s.root.w->mag2()}};
  for (Qubit level = static_cast<Qubit>(s.numQubits - 1); level > q; --level) {
    std::unordered_map<const VectorNode*, fp> next;
    for (const auto& [node, m] : cur) {
      for (const auto& succ : node->succ) {
        if (!succ.w->exactlyZero() && succ.node != nullptr) {
          next[succ.node] += m * succ.w->mag2();
        }
      }
    }
    cur = std::move(next);
  }
  fp p0 = 0.;
  fp p1 = 0.;
  for (const auto& [node, m] : cur) {
    const auto& s0 = node->succ[0];
    const auto& s1 = node->succ[1];
    if (!s0.w->exactlyZero()) {
      p0 += m * s0.w->mag2() * mass.of(s0.node);
    }
    if (!s1.w->exactlyZero()) {
      p1 += m * s1.w->mag2() * mass.of(s1.node);
    }
  }
  return {p0, p1};
}

constexpr std::array<std::complex<fp>, 4> projector(const bool outcome) {
  if (outcome) {
    return {std::complex<fp>{0., 0.}, {0., 0.}, {0., 0.}, {1., 0.}};
  }
  return {std::complex<fp>{1., 0.}, {0., 0.}, {0., 0.}, {0., 0.}};
}

Histogram sampleWithMeasurements(Manager& mgr, const QuantumCircuit& circuit,
                                 const std::size_t shots, const std::uint64_t seed) {
  Histogram hist;
  for (std::size_t shot = 0; shot < shots; ++shot) {
    std::mt19937_64 rng(splitmix64(seed, shot));
    StateDD state = basisState(mgr, circuit.numQubits, 0);
    std::uint64_t creg = 0;
    for (const auto& op : circuit.ops) {
      if (op.kind == GateKind::Barrier) {
        continue;
      }
      if (op.kind == GateKind::Measure) {
        const auto [outcome, collapsed] = measureQubit(mgr, state, op.targets[0], rng);
        state = collapsed;
        if (outcome) {
          creg |= 1ULL << op.cbit;
        } else {
          creg &= ~(1ULL << op.cbit);
        }
        continue;
      }
      state = apply(mgr, gateOperator(mgr, circuit.numQubits, op), state);
    }
    ++hist[bitstring(creg, circuit.numClassical)];
    if ((shot + 1) % 1024 == 0) {
      mgr.collectGarbage();
    }
  }
  return hist;
}

} // namespace

std::string bitstring(const std::uint64_t value, const std::size_t width) {
  std::string out(width, '0');
  for (std::size_t i = 0; i < width; ++i) {
    if ((value >> (width - 1 - i)) & 1ULL) {
      out[i] = '1';
    }
  }
  return out;
}

StateDD simulate(Manager& mgr, const QuantumCircuit& circuit) {
  return simulate(mgr, circuit, basisState(mgr, circuit.numQubits, 0));
}

StateDD simulate(Manager& mgr, const QuantumCircuit& circuit, const StateDD& initial) {
  if (initial.numQubits != circuit.numQubits) {
    throw std::invalid_argument("initial state qubit count mismatch");
  }
  StateDD state = initial;
  for (const auto& op : circuit.ops) {
    if (op.kind == GateKind::Barrier) {
      continue;
    }
    if (op.kind == GateKind::Measure) {
      throw std::invalid_argument("mid-circuit measurement is only supported by sample()");
    }
    state = apply(mgr, gateOperator(mgr, circuit.numQubits, op), state);
  }
  return state;
}

std::pair<fp, fp> qubitProbabilities(Manager& mgr, const StateDD& s, const Qubit q) {
  (void)mgr;
  if (q >= s.numQubits) {
    throw std::out_of_range("qubit index out of range");
  }
  if (s.root.isZeroStub() || s.root.node == nullptr) {
    throw std::domain_error("cannot measure a zero state");
  }
  DownstreamMass mass;
  const auto [p0, p1] = levelProbabilities(s, q, mass);
  const fp total = p0 + p1;
  if (total <= 0.) {
    throw std::domain_error("cannot measure a zero state");
  }
  return {p0 / total, p1 / total};
}

StateDD collapse(Manager& mgr, const StateDD& s, const Qubit q, const bool outcome) {
  const auto [p0, p1] = qubitProbabilities(mgr, s, q);
  const fp p = outcome ? p1 : p0;
  if (p <= 0.) {
    throw std::domain_error("collapse onto an outcome of probability zero");
  }
  const auto projected =
      mgr.multiply(mgr.singleQubitGate(s.numQubits, q, projector(outcome)), s.root);
  const VectorEdge renormalized{projected.node,
                                mgr.intern(projected.w->value() / std::sqrt(p))};
  return {renormalized, s.numQubits};
}

std::pair<bool, StateDD> measureQubit(Manager& mgr, const StateDD& s, const Qubit q,
                                      std::mt19937_64& rng) {
  const auto [p0, p1] = qubitProbabilities(mgr, s, q);
  std::uniform_real_distribution<fp> dist(0., 1.);
  const bool outcome = dist(rng) < p1;
  (void)p0;
  return {outcome, collapse(mgr, s, q, outcome)};
}

std::uint64_t measureAll(Manager& mgr, const StateDD& s, std::mt19937_64& rng) {
  (void)mgr;
  if (s.root.node == nullptr) {
    throw std::domain_error("cannot measure a zero state");
  }
  DownstreamMass mass;
  std::uniform_real_distribution<fp> dist(0., 1.);
  std::uint64_t result = 0;
  const VectorNode* node = s.root.node;
  while (node != nullptr) {
    const auto& s0 = node->succ[0];
    const auto& s1 = node->succ[1];
    const fp p0 = s0.w->exactlyZero() ? 0. : s0.w->mag2() * mass.of(s0.node);
    const fp p1 = s1.w->exactlyZero() ? 0. : s1.w->mag2() * mass.of(s1.node);
    const fp total = p0 + p1;
    if (total <= 0.) {
      throw std::domain_error("cannot measure a zero state");
    }
    const bool bit = dist(rng) < p1 / total;
    if (bit) {
      result |= 1ULL << node->level;
    }
    node = (bit ? s1 : s0).node;
  }
  return result;
}

Histogram sample(Manager& mgr, const QuantumCircuit& circuit, const std::size_t shots,
                 const std::uint64_t seed) {
  if (circuit.numQubits == 0) {
    throw std::invalid_argument("cannot sample a circuit without qubits");
  }
  if (circuit.hasMeasurement()) {
    return sampleWithMeasurements(mgr, circuit, shots, seed);
  }
  const StateDD state = simulate(mgr, circuit);
  Histogram hist;
  for (std::size_t shot = 0; shot < shots; ++shot) {
    std::mt19937_64 rng(splitmix64(seed, shot));
    ++hist[bitstring(measureAll(mgr, state, rng), circuit.numQubits)];
  }
  return hist;
}

} // namespace dd
