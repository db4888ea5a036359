#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dd/Gates.hpp"
#include "dd/Manager.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

using dd::fp;
using dd::Manager;
using dd::ManagerConfig;
using dd::VectorNormScheme;

namespace {

ManagerConfig leftmostConfig() {
  ManagerConfig cfg;
  cfg.vectorScheme = VectorNormScheme::Leftmost;
  return cfg;
}

} // namespace

TEST_CASE("zero and one are pre-interned and exact") {
  Manager mgr;
  CHECK(mgr.intern(0., 0.) == mgr.zeroWeight());
  CHECK(mgr.intern(1., 0.) == mgr.oneWeight());
  CHECK(mgr.zeroWeight()->exactlyZero());
  CHECK(mgr.oneWeight()->exactlyOne());
  // the constants live in the table from the start
  CHECK(mgr.complexTableSize() >= 2);
}

TEST_CASE("values within tolerance intern to the first-come canonical") {
  Manager mgr;
  const auto* a = mgr.intern(0.5, -0.25);
  const auto* b = mgr.intern(0.5 + 4e-14, -0.25 + 8e-14);
  CHECK(a == b);
  CHECK(a->re == 0.5); // first value won
  CHECK(a->im == -0.25);

  const auto* c = mgr.intern(0.5 + 1e-12, -0.25);
  CHECK(c != a);
}

TEST_CASE("near-zero and near-one snap to the exact constants") {
  Manager mgr;
  CHECK(mgr.intern(5e-14, -5e-14) == mgr.zeroWeight());
  CHECK(mgr.intern(1. - 6e-14, 3e-14) == mgr.oneWeight());
  CHECK(mgr.oneWeight()->re == 1.);
}

TEST_CASE("negative zero collapses to positive zero") {
  Manager mgr;
  CHECK(mgr.intern(-0., -0.) == mgr.zeroWeight());
  const auto* w = mgr.intern(0.25, -0.);
  CHECK(!std::signbit(w->im));
}

TEST_CASE("interning finds matches across grid-cell boundaries") {
  Manager mgr;
  // both values lie within 1e-14 of each other but in adjacent buckets
  const auto* a = mgr.intern(3.95e-13, 0.125);
  const auto* b = mgr.intern(4.05e-13, 0.125);
  CHECK(a == b);
}

TEST_CASE("non-finite values are rejected") {
  Manager mgr;
  CHECK_THROWS_AS((void)mgr.intern(std::numeric_limits<fp>::infinity(), 0.),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)mgr.intern(0., std::numeric_limits<fp>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("identical successor structures share one node") {
  Manager mgr;
  const auto e0 = mgr.terminalVector(1.);
  const auto e1 = mgr.terminalVector({0., 1.});
  const auto a = mgr.makeVectorNode(0, e0, e1);
  const auto b = mgr.makeVectorNode(0, e0, e1);
  CHECK(a.node == b.node);
  CHECK(a.w == b.w);

  const auto swapped = mgr.makeVectorNode(0, e1, e0);
  CHECK(swapped.node != a.node);
}

TEST_CASE("an all-zero node folds into the zero stub") {
  Manager mgr;
  const auto z = mgr.makeVectorNode(0, mgr.zeroVector(), mgr.zeroVector());
  CHECK(z.isZeroStub());
  CHECK(mgr.liveVectorNodes() == 0);

  const auto mz = mgr.makeMatrixNode(
      0, {mgr.zeroMatrix(), mgr.zeroMatrix(), mgr.zeroMatrix(), mgr.zeroMatrix()});
  CHECK(mz.isZeroStub());
}

TEST_CASE("L2 normalization: unit successor norm, real non-negative first weight") {
  Manager mgr; // L2 is the default scheme
  const auto e = mgr.makeVectorNode(0, mgr.terminalVector(3.), mgr.terminalVector(-4.));
  REQUIRE(!e.isTerminal());
  const auto w0 = e.node->succ[0].w->value();
  const auto w1 = e.node->succ[1].w->value();
  CHECK(std::norm(w0) + std::norm(w1) == doctest::Approx(1.).epsilon(1e-14));
  CHECK(w0.real() == doctest::Approx(0.6));
  CHECK(w0.imag() == 0.);
  CHECK(w1.real() == doctest::Approx(-0.8));
  CHECK(e.w->value().real() == doctest::Approx(5.));

  // amplitudes reproduce the inputs
  CHECK(mgr.getAmplitude(e, 0).real() == doctest::Approx(3.));
  CHECK(mgr.getAmplitude(e, 1).real() == doctest::Approx(-4.));
}

TEST_CASE("L2 normalization moves the phase of the first non-zero weight up") {
  Manager mgr;
  const std::complex<fp> i{0., 1.};
  const auto e = mgr.makeVectorNode(0, mgr.terminalVector(3. * i), mgr.terminalVector(4. * i));
  REQUIRE(!e.isTerminal());
  const auto w0 = e.node->succ[0].w->value();
  CHECK(w0.real() == doctest::Approx(0.6));
  CHECK(std::abs(w0.imag()) <= 1e-14);
  CHECK(e.w->value().imag() == doctest::Approx(5.));
  CHECK(mgr.getAmplitude(e, 1).imag() == doctest::Approx(4.));
}

TEST_CASE("L2 normalization with a zero first successor") {
  Manager mgr;
  const auto e = mgr.makeVectorNode(0, mgr.zeroVector(), mgr.terminalVector({0., -2.}));
  REQUIRE(!e.isTerminal());
  CHECK(e.node->succ[0].isZeroStub());
  const auto w1 = e.node->succ[1].w->value();
  CHECK(w1.real() == doctest::Approx(1.)); // phase folded into the root
  CHECK(std::abs(w1.imag()) <= 1e-14);
  CHECK(e.w->value().imag() == doctest::Approx(-2.));
}

TEST_CASE("leftmost normalization pins the first non-zero weight to exactly one") {
  Manager mgr{leftmostConfig()};
  const auto a = mgr.makeVectorNode(0, mgr.terminalVector(0.5), mgr.terminalVector(-0.5));
  REQUIRE(!a.isTerminal());
  CHECK(a.node->succ[0].w == mgr.oneWeight());
  CHECK(a.node->succ[1].w->value().real() == doctest::Approx(-1.));
  CHECK(a.w->value().real() == doctest::Approx(0.5));

  const auto b = mgr.makeVectorNode(0, mgr.zeroVector(), mgr.terminalVector(0.7));
  REQUIRE(!b.isTerminal());
  CHECK(b.node->succ[0].isZeroStub());
  CHECK(b.node->succ[1].w == mgr.oneWeight());
  CHECK(b.w->value().real() == doctest::Approx(0.7));
}

TEST_CASE("matrix pivot: first weight within tolerance of the maximum becomes one") {
  Manager mgr;
  const auto t = [&](const std::complex<fp> w) { return mgr.terminalMatrix(w); };

  SUBCASE("first entry is maximal") {
    const auto e = mgr.makeMatrixNode(0, {t(0.5), t(-0.5), t(0.5), t(0.5)});
    REQUIRE(!e.isTerminal());
    CHECK(e.node->succ[0].w == mgr.oneWeight());
    CHECK(e.node->succ[1].w->value().real() == doctest::Approx(-1.));
    CHECK(e.w->value().real() == doctest::Approx(0.5));
  }
  SUBCASE("pivot skips smaller leading entries") {
    const auto e = mgr.makeMatrixNode(0, {t(0.3), t(0.5), t(0.), t(0.1)});
    REQUIRE(!e.isTerminal());
    CHECK(e.node->succ[1].w == mgr.oneWeight());
    CHECK(e.node->succ[0].w->value().real() == doctest::Approx(0.6));
    CHECK(e.w->value().real() == doctest::Approx(0.5));
  }
  SUBCASE("ties go to the first within tolerance, keeping complex pivots canonical") {
    // |w2| == |w0| but w0 comes first; the pivot divides out its phase
    const std::complex<fp> i{0., 1.};
    const auto e = mgr.makeMatrixNode(0, {t(0.5 * i), t(0.), t(-0.5), t(0.)});
    REQUIRE(!e.isTerminal());
    CHECK(e.node->succ[0].w == mgr.oneWeight());
    CHECK(e.w->value().imag() == doctest::Approx(0.5));
  }
}

TEST_CASE("node levels must strictly decrease") {
  Manager mgr;
  const auto inner = mgr.makeVectorNode(1, mgr.terminalVector(1.), mgr.zeroVector());
  CHECK_THROWS_AS((void)mgr.makeVectorNode(1, inner, mgr.zeroVector()), std::invalid_argument);
  CHECK_THROWS_AS((void)mgr.makeVectorNode(0, inner, mgr.zeroVector()), std::invalid_argument);

  const auto minner =
      mgr.makeMatrixNode(2, {mgr.terminalMatrix(1.), mgr.zeroMatrix(), mgr.zeroMatrix(),
                             mgr.terminalMatrix(1.)});
  CHECK_THROWS_AS((void)mgr.makeMatrixNode(
                      2, {minner, mgr.zeroMatrix(), mgr.zeroMatrix(), mgr.zeroMatrix()}),
                  std::invalid_argument);
}

TEST_CASE("every live node keeps the zero-stub and completeness invariants") {
  Manager mgr;
  // build something non-trivial: a GHZ-like state and a few operators
  auto state = mgr.basisState(4, 0);
  const auto h = mgr.singleQubitGate(4, 3, dd::gateMatrix(dd::GateKind::H));
  state = mgr.multiply(h, state);
  for (dd::Qubit t = 0; t < 3; ++t) {
    const auto cx = mgr.controlledGate(4, {3}, t, dd::gateMatrix(dd::GateKind::X));
    state = mgr.multiply(cx, state);
  }
  mgr.retain(state);

  mgr.forEachVectorNode([&](const dd::VectorNode& node) {
    for (const auto& s : node.succ) {
      REQUIRE(s.w != nullptr);
      if (s.w->exactlyZero()) {
        CHECK(s.node == nullptr); // zero weight implies zero stub
      }
      if (s.node != nullptr) {
        CHECK(s.node->level + 1 == node.level); // complete: no level skips
      } else if (!s.w->exactlyZero()) {
        CHECK(node.level == 0); // non-stub terminal edges only at the bottom
      }
    }
  });
  mgr.forEachMatrixNode([&](const dd::MatrixNode& node) {
    for (const auto& s : node.succ) {
      REQUIRE(s.w != nullptr);
      if (s.w->exactlyZero()) {
        CHECK(s.node == nullptr);
      }
      if (s.node != nullptr) {
        CHECK(s.node->level + 1 == node.level);
      } else if (!s.w->exactlyZero()) {
        CHECK(node.level == 0);
      }
    }
  });
}

TEST_CASE("garbage collection frees exactly the unreachable nodes") {
  Manager mgr;
  const auto kept = mgr.basisState(3, 5);
  mgr.retain(kept);
  const auto doomed = mgr.fromAmplitudes({0.5, 0.5, 0.5, 0.5});
  (void)doomed;

  const auto before = mgr.liveVectorNodes();
  CHECK(before > 3); // both diagrams are alive pre-sweep
  const auto [vFreed, mFreed] = mgr.collectGarbage();
  CHECK(vFreed > 0);
  CHECK(mFreed == 0);
  CHECK(mgr.liveVectorNodes() == 3);
  CHECK(mgr.nodeCount(kept) == 3);
  CHECK(mgr.getAmplitude(kept, 5).real() == doctest::Approx(1.));

  // retained roots survive arbitrarily many sweeps
  (void)mgr.collectGarbage();
  CHECK(mgr.liveVectorNodes() == 3);
}

TEST_CASE("shared subdiagrams survive while any retained root references them") {
  Manager mgr;
  // two states sharing the |00> tail on the lower qubit
  const auto a = mgr.fromAmplitudes({1., 0., 0., 0.});
  const auto b = mgr.fromAmplitudes({0., 0., 1., 0.});
  REQUIRE(!a.isTerminal());
  REQUIRE(!b.isTerminal());
  CHECK(a.node != b.node);
  CHECK(a.node->succ[0].node == b.node->succ[1].node); // the shared |0> node

  mgr.retain(a);
  (void)mgr.collectGarbage();
  CHECK(mgr.liveVectorNodes() == 2); // a's root and the shared child
  CHECK(mgr.getAmplitude(a, 0).real() == doctest::Approx(1.));

  mgr.release(a);
  (void)mgr.collectGarbage();
  CHECK(mgr.liveVectorNodes() == 0);
}

TEST_CASE("retain counts nest and releasing an unretained edge throws") {
  Manager mgr;
  const auto s = mgr.basisState(2, 1);
  mgr.retain(s);
  mgr.retain(s);
  mgr.release(s);
  (void)mgr.collectGarbage();
  CHECK(mgr.liveVectorNodes() == 2); // still retained once
  mgr.release(s);
  CHECK_THROWS_AS(mgr.release(s), std::logic_error);

  // terminal edges carry no node and are silently ignored
  const auto t = mgr.terminalVector(1.);
  mgr.retain(t);
  mgr.release(t);
}

TEST_CASE("matrix roots participate in garbage collection") {
  Manager mgr;
  const auto h = mgr.singleQubitGate(2, 0, dd::gateMatrix(dd::GateKind::H));
  mgr.retain(h);
  (void)mgr.identity(4); // unreferenced scratch
  (void)mgr.collectGarbage();
  CHECK(mgr.liveMatrixNodes() == mgr.nodeCount(h));
  CHECK(mgr.getEntry(h, 0, 1).real() == doctest::Approx(std::numbers::sqrt2 / 2.));
  mgr.release(h);
  const auto [vFreed, mFreed] = mgr.collectGarbage();
  CHECK(vFreed == 0);
  CHECK(mFreed > 0);
  CHECK(mgr.liveMatrixNodes() == 0);
}

TEST_CASE("results are bit-identical with and without the compute cache") {
  ManagerConfig cached;
  ManagerConfig uncached;
  uncached.cacheEntries = 0;

  Manager a{cached};
  Manager b{uncached};

  std::mt19937_64 rng{7};
  std::uniform_real_distribution<fp> dist{-1., 1.};

  constexpr std::size_t n = 5;
  auto sa = a.basisState(n, 0);
  auto sb = b.basisState(n, 0);
  for (int step = 0; step < 60; ++step) {
    const auto target = static_cast<dd::Qubit>(rng() % n);
    const auto kind = rng() % 3;
    dd::GateMatrix g{};
    if (kind == 0) {
      g = dd::gateMatrix(dd::GateKind::H);
    } else if (kind == 1) {
      g = dd::gateMatrix(dd::GateKind::Rz, dist(rng));
    } else {
      g = dd::gateMatrix(dd::GateKind::Ry, dist(rng));
    }
    const auto control = static_cast<dd::Qubit>(rng() % n);
    if (kind == 2 && control != target) {
      sa = a.multiply(a.controlledGate(n, {control}, target, g), sa);
      sb = b.multiply(b.controlledGate(n, {control}, target, g), sb);
    } else {
      sa = a.multiply(a.singleQubitGate(n, target, g), sa);
      sb = b.multiply(b.singleQubitGate(n, target, g), sb);
    }
  }

  const auto ampsA = a.toAmplitudes(sa, n);
  const auto ampsB = b.toAmplitudes(sb, n);
  REQUIRE(ampsA.size() == ampsB.size());
  for (std::size_t i = 0; i < ampsA.size(); ++i) {
    CHECK(ampsA[i].real() == ampsB[i].real()); // exact, not approximate
    CHECK(ampsA[i].imag() == ampsB[i].imag());
  }
  CHECK(a.cacheLookups() > 0);
  CHECK(b.cacheLookups() == 0);
}

TEST_CASE("garbage collection clears caches without changing results") {
  Manager mgr;
  const auto x = mgr.fromAmplitudes({0.5, -0.5, 0.5, 0.5});
  const auto y = mgr.fromAmplitudes({0.1, 0.2, 0.3, 0.4});
  mgr.retain(x);
  mgr.retain(y);

  const auto sum1 = mgr.add(x, y);
  mgr.retain(sum1);
  (void)mgr.collectGarbage();
  const auto sum2 = mgr.add(x, y);
  CHECK(sum1.node == sum2.node);
  CHECK(sum1.w == sum2.w);
}

TEST_CASE("node counting includes shared nodes once and skips the terminal") {
  Manager mgr;
  CHECK(mgr.nodeCount(mgr.terminalVector(1.)) == 0);
  CHECK(mgr.nodeCount(mgr.zeroVector()) == 0);

  const auto plus = mgr.fromAmplitudes({0.5, 0.5, 0.5, 0.5});
  CHECK(mgr.nodeCount(plus) == 2); // maximal sharing: one node per level

  const auto id = mgr.identity(6);
  CHECK(mgr.nodeCount(id) == 6);
}
