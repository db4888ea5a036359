#pragma once

#include "dd/Operator.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>

namespace dd {

/// Derives the per-index random stream used wherever work is sharded
/// (sampling shots, stimuli); results are independent of worker count.
inline std::uint64_t splitmix64(const std::uint64_t seed, const std::uint64_t index) noexcept {
  auto z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31U);
}

/// Identifier of the RNG contract, reported in CLI metadata.
inline constexpr const char* rngAlgorithm = "mt19937_64+splitmix64";

using Histogram = std::map<std::string, std::uint64_t>;

/// MSB-first bitstring of `value`, `width` characters wide.
std::string bitstring(std::uint64_t value, std::size_t width);

/// Run all unitary gates of `circuit` on |0...0>. Barriers are skipped;
/// measurements are rejected (sampling owns mid-circuit measurement).
StateDD simulate(Manager& mgr, const QuantumCircuit& circuit);
StateDD simulate(Manager& mgr, const QuantumCircuit& circuit, const StateDD& initial);

/// Marginal probabilities (p0, p1) of measuring qubit `q`, computed from the
/// squared-magnitude mass flowing through level `q` (no swaps, no read-back).
std::pair<fp, fp> qubitProbabilities(Manager& mgr, const StateDD& s, Qubit q);

/// Project qubit `q` onto `outcome` and renormalize by 1/sqrt(p).
StateDD collapse(Manager& mgr, const StateDD& s, Qubit q, bool outcome);

/// Born-sample an outcome for qubit `q`, then collapse.
std::pair<bool, StateDD> measureQubit(Manager& mgr, const StateDD& s, Qubit q,
                                      std::mt19937_64& rng);

/// Sample a full basis outcome by sequential collapse from the most
/// significant qubit downward. Leaves `s` untouched.
std::uint64_t measureAll(Manager& mgr, const StateDD& s, std::mt19937_64& rng);

/// Repeated sampling. Without measurements the final state is built once and
/// reused across shots; with mid-circuit measurements each shot replays the
/// circuit, collapsing at each MeasureOp, and the histogram is keyed by the
/// classical register. Deterministic for a fixed seed.
Histogram sample(Manager& mgr, const QuantumCircuit& circuit, std::size_t shots,
                 std::uint64_t seed);

} // namespace dd
