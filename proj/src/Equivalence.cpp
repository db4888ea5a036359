#include "dd/Equivalence.hpp"

#include "dd/Simulator.hpp"
#include "dd/State.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace dd {

std::string_view verdictName(const Verdict v) noexcept {
  switch (v) {
  case Verdict::Equivalent:
    return "equivalent";
  case Verdict::EquivalentUpToGlobalPhase:
    return "equivalent-up-to-global-phase";
  case Verdict::NonEquivalent:
    return "non-equivalent";
  case Verdict::ProbablyEquivalent:
    return "probably-equivalent";
  }
  return "?";
}

GateOp invertGate(const GateOp& op) {
  GateOp inv = op;
  switch (op.kind) {
  case GateKind::S:
    inv.kind = GateKind::Sdg;
    break;
  case GateKind::Sdg:
    inv.kind = GateKind::S;
    break;
  case GateKind::T:
    inv.kind = GateKind::Tdg;
    break;
  case GateKind::Tdg:
    inv.kind = GateKind::T;
    break;
  case GateKind::Rx:
  case GateKind::Ry:
  case GateKind::Rz:
  case GateKind::Phase:
    inv.angle = -op.angle;
    break;
  case GateKind::Measure:
    throw std::invalid_argument("cannot invert a measurement");
  default:
    break; // self-inverse (I, X, Y, Z, H, Swap) or Barrier
  }
  return inv;
}

OperatorDD systemMatrix(Manager& mgr, const QuantumCircuit& c) {
  auto u = identityOperator(mgr, c.numQubits);
  for (const auto& op : c.ops) {
    if (op.kind == GateKind::Barrier) {
      continue;
    }
    if (op.kind == GateKind::Measure) {
      throw std::invalid_argument("system matrix of a circuit with measurements");
    }
    u = multiply(mgr, gateOperator(mgr, c.numQubits, op), u);
  }
  return u;
}

std::pair<Verdict, fp> phaseEquivalent(Manager& mgr, const OperatorDD& u, const OperatorDD& v) {
  if (u.numQubits != v.numQubits) {
    throw std::invalid_argument("phase comparison of operators on different qubit counts");
  }
  if (u.root.node != v.root.node) {
    return {Verdict::NonEquivalent, 0.};
  }
  const auto tol = mgr.tolerance();
  const auto wu = u.root.w->value();
  const auto wv = v.root.w->value();
  if (approxEqual(wu, wv, tol)) {
    return {Verdict::Equivalent, 0.};
  }
  if (std::abs(std::abs(wu) - std::abs(wv)) <= tol && std::abs(wv) > 0.) {
    auto alpha = std::arg(wu / wv);
    if (alpha < 0.) {
      alpha += 2. * std::numbers::pi_v<fp>;
    }
    return {Verdict::EquivalentUpToGlobalPhase, alpha};
  }
  return {Verdict::NonEquivalent, 0.};
}

namespace {

std::vector<GateOp> unitaryOps(const QuantumCircuit& c) {
  std::vector<GateOp> ops;
  for (const auto& op : c.ops) {
    if (op.kind == GateKind::Measure) {
      throw std::invalid_argument("equivalence checking of a circuit with measurements");
    }
    if (op.kind != GateKind::Barrier) {
      ops.push_back(op);
    }
  }
  return ops;
}

void requireSameWidth(const QuantumCircuit& a, const QuantumCircuit& b) {
  if (a.numQubits != b.numQubits) {
    throw std::invalid_argument("circuits act on different qubit counts");
  }
  if (a.numQubits == 0) {
    throw std::invalid_argument("circuits have no qubits");
  }
}

EquivalenceResult fromPhaseCheck(const std::pair<Verdict, fp>& pc) {
  EquivalenceResult res;
  res.verdict = pc.first;
  if (pc.first == Verdict::EquivalentUpToGlobalPhase) {
    res.globalPhase = pc.second;
  }
  return res;
}

} // namespace

EquivalenceResult checkConstruct(Manager& mgr, const QuantumCircuit& a, const QuantumCircuit& b) {
  requireSameWidth(a, b);
  const auto ua = systemMatrix(mgr, a);
  const auto ub = systemMatrix(mgr, b);
  auto res = fromPhaseCheck(phaseEquivalent(mgr, ua, ub));
  res.stats.leftApplications = a.gateCount();
  res.stats.rightApplications = b.gateCount();
  res.stats.peakNodes = std::max(nodeCount(mgr, ua), nodeCount(mgr, ub));
  return res;
}

EquivalenceResult checkAlternating(Manager& mgr, const QuantumCircuit& a, const QuantumCircuit& b,
                                   const Strategy strategy) {
  requireSameWidth(a, b);
  const auto n = a.numQubits;
  const auto left = unitaryOps(a);

  // right applications, grouped into barrier-delimited batches
  std::vector<std::vector<GateOp>> batches(1);
  for (const auto& op : b.ops) {
    if (op.kind == GateKind::Measure) {
      throw std::invalid_argument("equivalence checking of a circuit with measurements");
    }
    if (op.kind == GateKind::Barrier) {
      batches.emplace_back();
    } else {
      batches.back().push_back(op);
    }
  }

  EquivalenceResult res;
  auto c = identityOperator(mgr, n);
  res.stats.peakNodes = nodeCount(mgr, c);
  std::size_t sinceCollect = 0;
  const auto note = [&] {
    res.stats.peakNodes = std::max(res.stats.peakNodes, nodeCount(mgr, c));
    if (++sinceCollect >= 64) {
      sinceCollect = 0;
      mgr.retain(c.root);
      mgr.collectGarbage();
      mgr.release(c.root);
    }
  };
  const auto applyLeft = [&](const GateOp& op) {
    c = multiply(mgr, gateOperator(mgr, n, op), c);
    ++res.stats.leftApplications;
    note();
  };
  const auto applyRight = [&](const GateOp& op) {
    c = multiply(mgr, c, gateOperator(mgr, n, invertGate(op)));
    ++res.stats.rightApplications;
    note();
  };

  std::size_t li = 0;          // next left gate
  std::size_t bi = 0;          // current batch
  std::size_t ri = 0;          // next gate within the current batch
  const auto rightExhausted = [&] {
    while (bi < batches.size() && ri >= batches[bi].size()) {
      ++bi;
      ri = 0;
    }
    return bi >= batches.size();
  };
  const auto nextRight = [&]() -> const GateOp& { return batches[bi][ri++]; };

  switch (strategy) {
  case Strategy::Naive:
    for (; li < left.size(); ++li) {
      applyLeft(left[li]);
    }
    while (!rightExhausted()) {
      applyRight(nextRight());
    }
    break;
  case Strategy::OneToOne:
    while (li < left.size() || !rightExhausted()) {
      if (li < left.size()) {
        applyLeft(left[li++]);
      }
      if (!rightExhausted()) {
        applyRight(nextRight());
      }
    }
    break;
  case Strategy::Proportional: {
    std::size_t m = left.size();
    std::size_t rightsTotal = 0;
    for (const auto& batch : batches) {
      rightsTotal += batch.size();
    }
    const std::size_t ratio = m == 0 ? 0 : (rightsTotal + m - 1) / m;
    while (li < left.size() || !rightExhausted()) {
      if (li < left.size()) {
        applyLeft(left[li++]);
      }
      for (std::size_t k = 0; k < std::max<std::size_t>(ratio, 1) && !rightExhausted(); ++k) {
        applyRight(nextRight());
      }
    }
    break;
  }
  case Strategy::BarrierGuided:
    while (li < left.size() || !rightExhausted()) {
      if (li < left.size()) {
        applyLeft(left[li++]);
      }
      // one whole batch per left gate; rightExhausted() skips empty batches
      if (bi < batches.size()) {
        const auto batch = bi;
        while (bi == batch && !rightExhausted()) {
          applyRight(nextRight());
        }
      }
    }
    break;
  }

  auto verdict = fromPhaseCheck(phaseEquivalent(mgr, c, identityOperator(mgr, n)));
  verdict.stats = res.stats;
  verdict.stats.finalNodes = nodeCount(mgr, c);
  return verdict;
}

EquivalenceResult checkSimulation(const QuantumCircuit& a, const QuantumCircuit& b,
                                  const std::size_t numStimuli, const std::uint64_t seed,
                                  const fp epsilon) {
  requireSameWidth(a, b);
  const auto n = a.numQubits;
  if (numStimuli == 0) {
    throw std::invalid_argument("at least one stimulus is required");
  }
  if (n < 64 && numStimuli > (1ULL << n)) {
    throw std::invalid_argument("more stimuli than basis states");
  }

  // distinct basis indices: shuffle when the space is small, rejection
  // sampling otherwise
  std::mt19937_64 rng(splitmix64(seed, 0));
  std::vector<std::uint64_t> stimuli;
  if (n <= 20) {
    stimuli.resize(1ULL << n);
    for (std::uint64_t i = 0; i < stimuli.size(); ++i) {
      stimuli[i] = i;
    }
    std::shuffle(stimuli.begin(), stimuli.end(), rng);
    stimuli.resize(numStimuli);
  } else {
    const auto mask = n >= 64 ? ~0ULL : (1ULL << n) - 1;
    std::unordered_set<std::uint64_t> seen;
    std::uniform_int_distribution<std::uint64_t> dist(0, mask);
    while (seen.size() < numStimuli) {
      seen.insert(dist(rng));
    }
    stimuli.assign(seen.begin(), seen.end());
    std::sort(stimuli.begin(), stimuli.end());
  }

  EquivalenceResult res;
  Manager mgr;
  for (const auto index : stimuli) {
    const auto init = basisState(mgr, n, index);
    const auto ua = simulate(mgr, a, init);
    const auto ub = simulate(mgr, b, init);
    const auto f = fidelity(mgr, ua, ub);
    ++res.stats.stimuliChecked;
    if (f < 1. - epsilon) {
      res.verdict = Verdict::NonEquivalent;
      res.counterexample = Counterexample{index, f};
      return res;
    }
    mgr.collectGarbage();
  }
  res.verdict = Verdict::ProbablyEquivalent;
  return res;
}

OperatorDD differenceMatrix(Manager& mgr, const QuantumCircuit& a, const QuantumCircuit& b) {
  requireSameWidth(a, b);
  const auto ua = systemMatrix(mgr, a);
  const auto ub = systemMatrix(mgr, b);
  return multiply(mgr, conjugateTranspose(mgr, ua), ub);
}

} // namespace dd
