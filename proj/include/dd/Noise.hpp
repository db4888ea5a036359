#pragma once

#include "dd/Simulator.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dd {

/// A completely positive map given by its Kraus operators (row-major 2x2 or
/// 4x4 matrices). Completeness (sum Ei^dag Ei = I) is validated before any
/// application.
struct KrausChannel {
  std::string name;
  std::size_t arity = 1;
  std::vector<std::vector<std::complex<fp>>> ops;
};

KrausChannel amplitudeDamping(fp p);
KrausChannel depolarizing(fp p);
KrausChannel phaseFlip(fp p);

struct ChannelValidation {
  bool ok = false;
  fp maxDeviation = 0.;
  std::string message;
};

ChannelValidation validateChannel(const KrausChannel& channel, fp tolerance = 1e-10);

struct ChannelError : std::runtime_error {
  explicit ChannelError(ChannelValidation v)
      : std::runtime_error(v.message), validation(std::move(v)) {}
  ChannelValidation validation;
};

/// A density matrix as a matrix decision diagram.
struct DensityDD {
  MatrixEdge root{};
  std::size_t numQubits = 0;
};

DensityDD densityFromState(Manager& mgr, const StateDD& s);
fp traceOf(Manager& mgr, const DensityDD& rho);

/// rho' = sum_i (I (x) Ei (x) I) rho (...)^dag on the given target qubits.
/// For a 4x4 channel, targets[0] carries the more significant bit of the
/// operator's row/column index.
DensityDD applyChannel(Manager& mgr, const DensityDD& rho, const KrausChannel& channel,
                       const std::vector<Qubit>& targets);

DensityDD applyGateDensity(Manager& mgr, const DensityDD& rho, std::size_t numQubits,
                           const GateOp& op);

/// One noise-model rule: after which gates it fires, on which qubits, with
/// which channel. `afterKinds` empty/nullopt means every gate; `atEnd` fires
/// once after the final gate instead. `qubits` nullopt means every qubit the
/// triggering gate touches (end-of-circuit: every qubit).
struct NoiseAttachment {
  std::optional<std::vector<std::string>> afterGates;
  bool atEnd = false;
  std::optional<std::vector<Qubit>> qubits;
  KrausChannel channel;
};

struct NoiseModel {
  std::vector<NoiseAttachment> attachments;
};

struct NoiseModelError : std::runtime_error {
  NoiseModelError(std::size_t line, const std::string& message)
      : std::runtime_error("noise model line " + std::to_string(line) + ": " + message),
        line(line) {}
  std::size_t line;
};

/// Line format: `channel=<name> [p=<float>] [on=<all|i,j,...>]
/// [after=<all|end|gate,gate,...>] [kraus=(re,im,...)(...)]`.
/// `#` starts a comment. Throws NoiseModelError on malformed input.
NoiseModel parseNoiseModel(const std::string& text);

/// Exact density-matrix evolution: unitaries conjugate rho, matching noise
/// attachments fire after each gate (and once at the end for atEnd rules).
DensityDD deterministicSimulate(Manager& mgr, const QuantumCircuit& circuit,
                                const NoiseModel& model);

/// Diagonal of rho, in basis order. Entries are clamped real.
std::vector<fp> diagonalProbabilities(Manager& mgr, const DensityDD& rho);

/// Monte-Carlo unraveling: per shot, Kraus branches are sampled with their
/// exact state-dependent probabilities |Ei phi|^2 and the state renormalized,
/// then every qubit is measured. Shots can be sharded over `workers`
/// independent managers without changing the result (per-shot seeding).
Histogram stochasticSimulate(const QuantumCircuit& circuit, const NoiseModel& model,
                             std::size_t shots, std::uint64_t seed, unsigned workers = 0);

/// The serialized mnemonic of an op ("x", "cx", "ccx", "cp", ...), the name
/// noise triggers match against.
std::string opMnemonic(const GateOp& op);

} // namespace dd
