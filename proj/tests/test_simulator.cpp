#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "Oracle.hpp"
#include "dd/Simulator.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

using dd::fp;
using dd::GateKind;
using dd::GateOp;
using dd::Manager;
using dd::QuantumCircuit;
using dd::Qubit;

namespace {

GateOp gate(const GateKind kind, const std::vector<Qubit>& targets,
            const std::vector<Qubit>& controls = {}, const fp angle = 0.) {
  GateOp op;
  op.kind = kind;
  op.angle = angle;
  op.targets = targets;
  op.controls = controls;
  return op;
}

GateOp measure(const Qubit q, const std::uint32_t cbit) {
  GateOp op;
  op.kind = GateKind::Measure;
  op.targets = {q};
  op.cbit = cbit;
  return op;
}

QuantumCircuit bellCircuit() {
  QuantumCircuit c;
  c.numQubits = 2;
  c.ops = {gate(GateKind::H, {1}), gate(GateKind::X, {0}, {1})};
  return c;
}

// prepares (|010> + |100> - sqrt(2)|110>) / 2
QuantumCircuit psiCircuit() {
  const fp theta = 0.61547970867038734;
  QuantumCircuit c;
  c.numQubits = 3;
  c.ops = {gate(GateKind::Ry, {2}, {}, 2.0943951023931953),
           gate(GateKind::X, {1}),
           gate(GateKind::Ry, {1}, {}, theta),
           gate(GateKind::X, {1}, {2}),
           gate(GateKind::Ry, {1}, {}, -theta),
           gate(GateKind::X, {1}, {2}),
           gate(GateKind::Z, {2})};
  return c;
}

} // namespace

TEST_CASE("bitstrings are rendered most significant bit first") {
  CHECK(dd::bitstring(5, 4) == "0101");
  CHECK(dd::bitstring(0, 3) == "000");
  CHECK(dd::bitstring(1, 1) == "1");
  CHECK(dd::bitstring(6, 2) == "10"); // truncates above the width
  CHECK(dd::bitstring(0, 0).empty());
}

TEST_CASE("simulating the bell circuit yields the bell state") {
  Manager mgr;
  const auto s = dd::simulate(mgr, bellCircuit());
  const fp r = std::numbers::sqrt2 / 2.;
  CHECK(std::abs(dd::getAmplitude(mgr, s, 0).real() - r) <= 1e-12);
  CHECK(std::abs(dd::getAmplitude(mgr, s, 3).real() - r) <= 1e-12);
  CHECK(std::abs(dd::getAmplitude(mgr, s, 1)) <= 1e-13);
  CHECK(std::abs(dd::getAmplitude(mgr, s, 2)) <= 1e-13);
}

TEST_CASE("the gate-built state interns to the same diagram as its amplitudes") {
  Manager mgr;
  const auto built = dd::simulate(mgr, psiCircuit());
  const fp h = 0.5;
  const fp s = -std::numbers::sqrt2 / 2.;
  const auto direct = dd::fromAmplitudes(mgr, {0., 0., h, 0., h, 0., s, 0.});
  CHECK(built.root.node == direct.root.node);
  CHECK(built.root.w == direct.root.w);
  CHECK(dd::nodeCount(mgr, built) == 4);
}

TEST_CASE("simulation matches the dense model and preserves the norm") {
  Manager mgr;
  std::mt19937_64 rng{31};
  std::uniform_real_distribution<fp> dist{-2., 2.};

  constexpr std::size_t n = 6;
  QuantumCircuit c;
  c.numQubits = n;
  for (int step = 0; step < 200; ++step) {
    const auto t = static_cast<Qubit>(rng() % n);
    auto ctl = static_cast<Qubit>(rng() % n);
    if (ctl == t) {
      ctl = (ctl + 1) % n;
    }
    switch (rng() % 6) {
    case 0:
      c.ops.push_back(gate(GateKind::H, {t}));
      break;
    case 1:
      c.ops.push_back(gate(GateKind::T, {t}));
      break;
    case 2:
      c.ops.push_back(gate(GateKind::Rx, {t}, {}, dist(rng)));
      break;
    case 3:
      c.ops.push_back(gate(GateKind::X, {t}, {ctl}));
      break;
    case 4:
      c.ops.push_back(gate(GateKind::Phase, {t}, {ctl}, dist(rng)));
      break;
    default:
      c.ops.push_back(gate(GateKind::Swap, {t, ctl}));
      break;
    }
  }

  const auto s = dd::simulate(mgr, c);
  const auto norm = dd::innerProduct(mgr, s, s);
  CHECK(std::abs(norm.real() - 1.) <= 1e-10);
  CHECK(std::abs(norm.imag()) <= 1e-12);

  const auto dense = oracle::simulate(c);
  for (std::uint64_t i = 0; i < dense.size(); ++i) {
    CHECK(std::abs(dd::getAmplitude(mgr, s, i) - std::complex<fp>{dense[i]}) <= 1e-9);
  }
}

TEST_CASE("simulate accepts an initial state and rejects mismatches") {
  Manager mgr;
  QuantumCircuit c;
  c.numQubits = 2;
  c.ops = {gate(GateKind::X, {1})};
  const auto from01 = dd::simulate(mgr, c, dd::basisState(mgr, 2, 1));
  CHECK(dd::getAmplitude(mgr, from01, 3).real() == doctest::Approx(1.));

  CHECK_THROWS_AS((void)dd::simulate(mgr, c, dd::basisState(mgr, 3, 0)),
                  std::invalid_argument);

  QuantumCircuit withMeasure = c;
  withMeasure.ops.push_back(measure(0, 0));
  CHECK_THROWS_AS((void)dd::simulate(mgr, withMeasure), std::invalid_argument);
}

TEST_CASE("marginal probabilities read off the diagram levels") {
  Manager mgr;
  const auto psi = dd::simulate(mgr, psiCircuit());

  const auto [p0q2, p1q2] = dd::qubitProbabilities(mgr, psi, 2);
  CHECK(p0q2 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p1q2 == doctest::Approx(0.75).epsilon(1e-12));

  const auto [p0q1, p1q1] = dd::qubitProbabilities(mgr, psi, 1);
  CHECK(p0q1 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p1q1 == doctest::Approx(0.75).epsilon(1e-12));

  const auto [p0q0, p1q0] = dd::qubitProbabilities(mgr, psi, 0);
  CHECK(p0q0 == doctest::Approx(1.).epsilon(1e-12));
  CHECK(p1q0 == 0.);

  const auto basis = dd::basisState(mgr, 3, 5);
  CHECK(dd::qubitProbabilities(mgr, basis, 0) == std::pair<fp, fp>{0., 1.});
  CHECK(dd::qubitProbabilities(mgr, basis, 1) == std::pair<fp, fp>{1., 0.});

  CHECK_THROWS_AS((void)dd::qubitProbabilities(mgr, basis, 3), std::out_of_range);
}

TEST_CASE("collapse projects, renormalizes, and respects impossibility") {
  dd::ManagerConfig cfg;
  cfg.vectorScheme = dd::VectorNormScheme::Leftmost;
  Manager mgr{cfg};
  const auto psi = dd::simulate(mgr, psiCircuit());

  const auto up = dd::collapse(mgr, psi, 2, true);
  // remaining support: |100> and |110> with weights 1/sqrt(3), -sqrt(2/3)
  const fp invSqrt3 = 1. / std::sqrt(3.);
  CHECK(up.root.w->value().real() == doctest::Approx(invSqrt3).epsilon(1e-12));
  CHECK(std::abs(dd::getAmplitude(mgr, up, 4).real() - invSqrt3) <= 1e-12);
  CHECK(std::abs(dd::getAmplitude(mgr, up, 6).real() + std::sqrt(2. / 3.)) <= 1e-12);
  CHECK(std::abs(dd::getAmplitude(mgr, up, 2)) == 0.);
  const auto norm = dd::innerProduct(mgr, up, up);
  CHECK(norm.real() == doctest::Approx(1.).epsilon(1e-12));

  // q0 is never one in psi
  CHECK_THROWS_AS((void)dd::collapse(mgr, psi, 0, true), std::domain_error);

  // collapsing is idempotent: the marginal afterwards is certain
  const auto [p0, p1] = dd::qubitProbabilities(mgr, up, 2);
  CHECK(p0 <= 1e-13);
  CHECK(p1 == doctest::Approx(1.).epsilon(1e-12));
}

TEST_CASE("measuring a qubit follows the born rule") {
  Manager mgr;
  const auto psi = dd::simulate(mgr, psiCircuit());
  std::mt19937_64 rng{41};
  int ones = 0;
  constexpr int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    const auto [outcome, collapsed] = dd::measureQubit(mgr, psi, 2, rng);
    if (outcome) {
      ++ones;
    }
    // the collapsed state is normalized and certain on the measured qubit
    const auto [p0, p1] = dd::qubitProbabilities(mgr, collapsed, 2);
    CHECK((outcome ? p1 : p0) == doctest::Approx(1.).epsilon(1e-12));
  }
  CHECK(std::abs(static_cast<fp>(ones) / trials - 0.75) < 0.05);
}

TEST_CASE("full measurement only ever lands on the state's support") {
  Manager mgr;
  const auto psi = dd::simulate(mgr, psiCircuit());
  std::mt19937_64 rng{43};
  std::map<std::uint64_t, int> counts;
  constexpr int trials = 4000;
  for (int i = 0; i < trials; ++i) {
    ++counts[dd::measureAll(mgr, psi, rng)];
  }
  // structural zeros stay at exactly zero: no key outside {2, 4, 6}
  REQUIRE(counts.size() <= 3);
  for (const auto& [idx, cnt] : counts) {
    CHECK((idx == 2 || idx == 4 || idx == 6));
  }
  CHECK(std::abs(static_cast<fp>(counts[2]) / trials - 0.25) < 0.04);
  CHECK(std::abs(static_cast<fp>(counts[4]) / trials - 0.25) < 0.04);
  CHECK(std::abs(static_cast<fp>(counts[6]) / trials - 0.50) < 0.04);

  CHECK_THROWS_AS((void)dd::measureAll(mgr, dd::StateDD{mgr.zeroVector(), 2}, rng),
                  std::domain_error);
}

TEST_CASE("sampling is deterministic per seed and independent of the manager") {
  const auto c = bellCircuit();
  Manager a;
  Manager b;
  const auto histA = dd::sample(a, c, 512, 99);
  const auto histB = dd::sample(b, c, 512, 99);
  CHECK(histA == histB);

  const auto histC = dd::sample(a, c, 512, 100);
  CHECK(histA != histC);

  std::uint64_t total = 0;
  for (const auto& [key, count] : histA) {
    CHECK((key == "00" || key == "11"));
    total += count;
  }
  CHECK(total == 512);
  CHECK(histA.at("00") > 200);
  CHECK(histA.at("11") > 200);
}

TEST_CASE("mid-circuit measurement feeds the classical register") {
  Manager mgr;
  QuantumCircuit c;
  c.numQubits = 1;
  c.numClassical = 2;
  c.ops = {gate(GateKind::H, {0}), measure(0, 0), gate(GateKind::X, {0}), measure(0, 1)};

  const auto hist = dd::sample(mgr, c, 600, 7);
  std::uint64_t total = 0;
  for (const auto& [key, count] : hist) {
    // the second measurement always negates the first
    CHECK((key == "01" || key == "10"));
    total += count;
  }
  CHECK(total == 600);
  CHECK(hist.at("01") > 200);
  CHECK(hist.at("10") > 200);

  CHECK_THROWS_AS((void)dd::sample(mgr, QuantumCircuit{}, 10, 1), std::invalid_argument);
}

TEST_CASE("per-index seeding decouples shots from their order") {
  // shot i draws from mt19937_64(splitmix64(seed, i)); the streams for
  // distinct indices disagree immediately
  std::mt19937_64 r0{dd::splitmix64(5, 0)};
  std::mt19937_64 r1{dd::splitmix64(5, 1)};
  CHECK(r0() != r1());
  std::mt19937_64 r0again{dd::splitmix64(5, 0)};
  CHECK(std::mt19937_64{dd::splitmix64(5, 0)}() == r0again());
}
