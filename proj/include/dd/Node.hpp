#pragma once

#include "dd/Complex.hpp"

#include <array>
#include <complex>
#include <cstdint>

namespace dd {

using Qubit = std::uint32_t;

struct VectorNode;
struct MatrixNode;

/// Weighted edge into a decision diagram. The terminal is represented by a
/// null node pointer; an edge with canonical-zero weight always targets the
/// terminal (a "zero stub") and stands for an all-zero subvector/submatrix.
template <class Node> struct Edge {
  Node* node = nullptr;
  const Complex* w = nullptr;

  [[nodiscard]] bool isTerminal() const noexcept { return node == nullptr; }
  [[nodiscard]] bool isZeroStub() const noexcept { return node == nullptr && w->exactlyZero(); }

  /// Identity of interned representations: same node, same canonical weight.
  [[nodiscard]] bool operator==(const Edge& other) const noexcept {
    return node == other.node && w == other.w;
  }
};

/// Edge carrying an un-interned weight. Used for intermediate results inside
/// recursive operations and as compute-cache values, so transient arithmetic
/// does not populate the complex table.
template <class Node> struct CachedEdge {
  Node* node = nullptr;
  std::complex<fp> w{0., 0.};

  [[nodiscard]] bool isTerminal() const noexcept { return node == nullptr; }
  [[nodiscard]] bool isExactZero() const noexcept {
    return node == nullptr && w.real() == 0. && w.imag() == 0.;
  }

  static CachedEdge zero() noexcept { return {nullptr, {0., 0.}}; }
  static CachedEdge terminal(const std::complex<fp>& weight) noexcept { return {nullptr, weight}; }
};

/// Vector DD node: the successor for qubit value 0, then for value 1.
struct VectorNode {
  std::array<Edge<VectorNode>, 2> succ{};
  Qubit level = 0;
  bool marked = false;

  static constexpr std::size_t radix = 2;
};

/// Matrix DD node: successors in row-major block order 00, 01, 10, 11
/// (row bit = output basis, column bit = input basis).
struct MatrixNode {
  std::array<Edge<MatrixNode>, 4> succ{};
  Qubit level = 0;
  bool marked = false;

  static constexpr std::size_t radix = 4;
};

using VectorEdge = Edge<VectorNode>;
using MatrixEdge = Edge<MatrixNode>;
using VectorCachedEdge = CachedEdge<VectorNode>;
using MatrixCachedEdge = CachedEdge<MatrixNode>;

} // namespace dd
