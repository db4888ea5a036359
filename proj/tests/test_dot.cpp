#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "Fixtures.hpp"
#include "dd/Dot.hpp"
#include "dd/Manager.hpp"
#include "dd/Operator.hpp"
#include "dd/State.hpp"

#include <complex>
#include <string>
#include <vector>

using dd::Manager;

namespace {

std::size_t countOf(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

} // namespace

TEST_CASE("the rendering is a well-formed digraph") {
  Manager mgr;
  const auto s = dd::basisState(mgr, 2, 0b10);
  const auto dot = dd::toDot(s);

  CHECK(dot.starts_with("digraph dd {\n  rankdir=TB;\n  root [shape=point];\n"));
  CHECK(dot.ends_with("}\n"));
  CHECK(dot.find("root -> n0") != std::string::npos);
  CHECK(dot.find("t [shape=box, label=\"1\"];") != std::string::npos);
  // one interior node per level
  CHECK(dot.find("n0 [label=\"q1\"];") != std::string::npos);
  CHECK(dot.find("n1 [label=\"q0\"];") != std::string::npos);
}

TEST_CASE("weights are annotated as magnitude at phase, colored by hue") {
  Manager mgr;

  // |0> + i|1>: the second branch carries phase pi/2, hue 0.25
  const auto plusI = dd::fromAmplitudes(mgr, {{0.70710678118654752, 0.}, {0., 0.70710678118654752}});
  const auto dot = dd::toDot(plusI);
  CHECK(dot.find("0: 1.0000@0.0000pi") != std::string::npos); // root weight
  CHECK(dot.find("1: 0.7071@0.5000pi") != std::string::npos);
  CHECK(dot.find("color=\"0.2500 0.9 0.85\"") != std::string::npos);
  // penwidth scales with magnitude: 0.3 + 2.7 * 0.7071
  CHECK(dot.find("penwidth=2.209") != std::string::npos);
  CHECK(dot.find("penwidth=3.000") != std::string::npos);

  // a negative branch sits at phase pi, hue one half
  const auto minus = dd::fromAmplitudes(mgr, {{0.70710678118654752, 0.}, {-0.70710678118654752, 0.}});
  const auto dotMinus = dd::toDot(minus);
  CHECK(dotMinus.find("1: 0.7071@1.0000pi") != std::string::npos);
  CHECK(dotMinus.find("color=\"0.5000 0.9 0.85\"") != std::string::npos);
}

TEST_CASE("zero branches are drawn as small point sinks") {
  Manager mgr;
  const auto s = dd::basisState(mgr, 1, 1); // branch 0 is a zero stub
  const auto dot = dd::toDot(s);
  CHECK(dot.find("z0 [shape=point, width=0.05];") != std::string::npos);
  CHECK(dot.find("[label=\"0: 0\", penwidth=0.3, color=gray];") != std::string::npos);
  CHECK(dot.find("n0 -> z0") != std::string::npos);
  CHECK(dot.find("n0 -> t") != std::string::npos);
}

TEST_CASE("sharing shows up as one rendered node per unique diagram node") {
  Manager mgr;
  const auto s = std::complex<dd::fp>{0.70710678118654752, 0.};
  const auto ghz = dd::fromAmplitudes(mgr, {s, 0., 0., 0., 0., 0., 0., s});
  const auto dot = dd::toDot(ghz);
  CHECK(countOf(dot, " [label=\"q") == 5);
  CHECK(countOf(dot, "t [shape=box") == 1);

  const dd::CVec amps(16, std::complex<dd::fp>{0.25, 0.});
  const auto uniform = dd::fromAmplitudes(mgr, amps);
  const auto dotU = dd::toDot(uniform);
  CHECK(countOf(dotU, " [label=\"q") == 4); // one per level, all branches shared
  CHECK(countOf(dotU, "color=gray") == 0);  // no zero branch anywhere
}

TEST_CASE("matrix diagrams render all four successors") {
  Manager mgr;
  const auto id = dd::identityOperator(mgr, 2);
  const auto dot = dd::toDot(id);
  // each identity node keeps its two off-diagonal zero stubs
  CHECK(countOf(dot, " [label=\"q") == 2);
  CHECK(countOf(dot, "color=gray") == 4);
  CHECK(countOf(dot, "@0.0000pi") == 5); // root edge plus two diagonal edges per node
  CHECK(dot.find("1: 0") != std::string::npos);
  CHECK(dot.find("2: 0") != std::string::npos);

  // a hadamard exposes the negative branch on successor 3
  const auto h = dd::gateOperator(mgr, 1, []() {
    dd::GateOp op;
    op.kind = dd::GateKind::H;
    op.targets = {0};
    return op;
  }());
  const auto dotH = dd::toDot(h);
  CHECK(dotH.find("3: 1.0000@1.0000pi") != std::string::npos);
}

TEST_CASE("terminal-only diagrams still render") {
  Manager mgr;
  const auto one = mgr.terminalVector({1., 0.});
  const auto dot = dd::toDot(one);
  CHECK(dot.find("root -> t") != std::string::npos);
  CHECK(countOf(dot, " [label=\"q") == 0);

  const auto zero = mgr.terminalVector({0., 0.});
  const auto dotZero = dd::toDot(zero);
  CHECK(dotZero.find("root -> t [label=\"0: 0\", penwidth=0.3, color=gray];") !=
        std::string::npos);
}
