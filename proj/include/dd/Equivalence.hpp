#pragma once

#include "dd/Operator.hpp"

#include <cstdint>
#include <optional>

namespace dd {

enum class Verdict : std::uint8_t {
  Equivalent,
  EquivalentUpToGlobalPhase,
  NonEquivalent,
  ProbablyEquivalent,
};

[[nodiscard]] std::string_view verdictName(Verdict v) noexcept;

/// How check_alternating interleaves left applications (gates of the first
/// circuit) with right applications (inverted gates of the second).
enum class Strategy : std::uint8_t {
  /// All of the first circuit, then all of the inverted second.
  Naive,
  /// Strict alternation; the surplus side drains at the end.
  OneToOne,
  /// ceil(m'/m) right applications per left application, ratio fixed up front.
  Proportional,
  /// Barriers in the second circuit delimit the batch applied per left gate.
  BarrierGuided,
};

struct EquivalenceStats {
  std::size_t peakNodes = 0;
  /// Node count of the final diagram of the alternating scheme.
  std::size_t finalNodes = 0;
  std::size_t leftApplications = 0;
  std::size_t rightApplications = 0;
  std::size_t stimuliChecked = 0;
};

struct Counterexample {
  std::uint64_t basisIndex = 0;
  fp fidelity = 0.;
};

struct EquivalenceResult {
  Verdict verdict = Verdict::NonEquivalent;
  /// Only set for equivalent-up-to-global-phase, in [0, 2pi).
  std::optional<fp> globalPhase;
  /// Only set when a simulation stimulus disproves equivalence.
  std::optional<Counterexample> counterexample;
  EquivalenceStats stats{};
};

/// The gate whose operator is the conjugate transpose of `op`'s. Barriers
/// pass through; measurements are rejected.
GateOp invertGate(const GateOp& op);

/// U = U_m ... U_2 U_1 as a matrix DD. Rejects measurements.
OperatorDD systemMatrix(Manager& mgr, const QuantumCircuit& c);

/// Equality test modulo global phase. Canonical normalization pushes any
/// scalar factor into the root weight, so structural identity plus root
/// weights of equal magnitude decides the question. Both operands must live
/// in `mgr`.
std::pair<Verdict, fp> phaseEquivalent(Manager& mgr, const OperatorDD& u, const OperatorDD& v);

/// Build both system matrices and compare them via phaseEquivalent.
EquivalenceResult checkConstruct(Manager& mgr, const QuantumCircuit& a, const QuantumCircuit& b);

/// G -> I <- G': left-multiply gates of `a`, right-multiply inverted gates of
/// `b` onto the identity per `strategy`; the result is compared to the
/// identity. Keeps intermediate diagrams near identity size when the circuits
/// match.
EquivalenceResult checkAlternating(Manager& mgr, const QuantumCircuit& a, const QuantumCircuit& b,
                                   Strategy strategy = Strategy::Proportional);

/// Simulate both circuits on distinct random basis states; any fidelity below
/// 1 - epsilon disproves equivalence with that stimulus as counterexample.
EquivalenceResult checkSimulation(const QuantumCircuit& a, const QuantumCircuit& b,
                                  std::size_t numStimuli, std::uint64_t seed, fp epsilon = 1e-10);

/// D = U^dag U'; equivalent circuits give D = I up to global phase.
OperatorDD differenceMatrix(Manager& mgr, const QuantumCircuit& a, const QuantumCircuit& b);

} // namespace dd
