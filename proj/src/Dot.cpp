#include "dd/Dot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <unordered_map>
#include <vector>

namespace dd {

namespace {

std::string fmt(const char* format, const double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), format, v);
  return buf.data();
}

/// edge attribute list for weight w
std::string edgeStyle(const std::size_t idx, const std::complex<fp>& w) {
  const auto mag = std::abs(w);
  if (mag == 0.) {
    return "label=\"" + std::to_string(idx) + ": 0\", penwidth=0.3, color=gray";
  }
  auto phase = std::arg(w);
  if (phase < 0.) {
    phase += 2. * std::numbers::pi_v<fp>;
  }
  const auto hue = phase / (2. * std::numbers::pi_v<fp>);
  std::string label = std::to_string(idx) + ": " + fmt("%.4f", mag) + "@" +
                      fmt("%.4f", phase / std::numbers::pi_v<fp>) + "pi";
  std::string style = "label=\"" + label + "\"";
  style += ", penwidth=" + fmt("%.3f", 0.3 + 2.7 * std::min<fp>(mag, 1.));
  style += ", color=\"" + fmt("%.4f", hue) + " 0.9 0.85\"";
  return style;
}

template <class Node> std::string render(const Edge<Node>& root) {
  std::string out = "digraph dd {\n";
  out += "  rankdir=TB;\n";
  out += "  root [shape=point];\n";

  std::unordered_map<const Node*, std::size_t> ids;
  std::size_t nextZero = 0;
  bool needTerminal = false;

  const auto nodeId = [&](const Node* n) -> std::string {
    if (n == nullptr) {
      return "t";
    }
    return "n" + std::to_string(ids.at(n));
  };

  // depth-first discovery fixes node numbering
  std::vector<const Node*> order;
  const auto discover = [&](auto&& self, const Node* n) -> void {
    if (n == nullptr || ids.count(n) > 0) {
      return;
    }
    ids.emplace(n, ids.size());
    order.push_back(n);
    for (const auto& succ : n->succ) {
      if (succ.isZeroStub()) {
        continue;
      }
      if (succ.isTerminal()) {
        needTerminal = true;
      } else {
        self(self, succ.node);
      }
    }
  };
  if (root.node == nullptr) {
    needTerminal = true;
  } else {
    discover(discover, root.node);
  }

  for (const auto* n : order) {
    out += "  " + nodeId(n) + " [label=\"q" + std::to_string(n->level) + "\"];\n";
  }
  if (needTerminal) {
    out += "  t [shape=box, label=\"1\"];\n";
  }

  out += "  root -> " + nodeId(root.node) + " [" + edgeStyle(0, root.w->value()) + "];\n";
  for (const auto* n : order) {
    for (std::size_t k = 0; k < n->succ.size(); ++k) {
      const auto& succ = n->succ[k];
      if (succ.isZeroStub()) {
        const auto zid = "z" + std::to_string(nextZero++);
        out += "  " + zid + " [shape=point, width=0.05];\n";
        out += "  " + nodeId(n) + " -> " + zid + " [" + edgeStyle(k, 0.) + "];\n";
        continue;
      }
      out += "  " + nodeId(n) + " -> " + nodeId(succ.node) + " [" +
             edgeStyle(k, succ.w->value()) + "];\n";
    }
  }
  out += "}\n";
  return out;
}

} // namespace

std::string toDot(const VectorEdge& root) { return render(root); }
std::string toDot(const MatrixEdge& root) { return render(root); }

} // namespace dd
