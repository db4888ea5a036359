#pragma once

#include "dd/Complex.hpp"
#include "dd/ComputeCache.hpp"
#include "dd/Node.hpp"

#include <array>
#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

namespace dd {

using CVec = std::vector<std::complex<fp>>;
using CMat = std::vector<CVec>;

/// Normalization scheme for vector nodes. Matrix nodes always use the pivot
/// rule (first successor within tolerance of the maximum magnitude).
enum class VectorNormScheme {
  /// Divide both successor weights by the leftmost non-zero weight.
  Leftmost,
  /// Divide by the Euclidean norm of the weights, then by the phase of the
  /// first non-zero weight, which becomes real non-negative.
  L2,
};

struct ManagerConfig {
  VectorNormScheme vectorScheme = VectorNormScheme::L2;
  fp tolerance = 1e-13;
  /// Capacity per operation tag; 0 disables memoization.
  std::size_t cacheEntries = 1ULL << 16U;
  std::size_t denseVectorQubitLimit = 20;
  std::size_t denseMatrixQubitLimit = 10;
};

/// Owns every table a decision-diagram computation touches: the complex
/// interning table, per-level unique tables for vector and matrix nodes, the
/// per-operation compute caches, and the root set driving garbage collection.
///
/// A manager and every edge it handed out form one single-threaded unit.
/// Parallel workloads use one manager per worker; edges must never migrate
/// between managers.
class Manager {
public:
  explicit Manager(ManagerConfig config = {});

  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;

  [[nodiscard]] const ManagerConfig& config() const noexcept { return config_; }
  [[nodiscard]] fp tolerance() const noexcept { return config_.tolerance; }

  // ── complex interning ──────────────────────────────────────────────

  const Complex* intern(fp re, fp im) { return complexTable_.lookup(re, im); }
  const Complex* intern(const std::complex<fp>& v) { return complexTable_.lookup(v); }
  [[nodiscard]] const Complex* zeroWeight() const noexcept { return complexTable_.zero(); }
  [[nodiscard]] const Complex* oneWeight() const noexcept { return complexTable_.one(); }
  [[nodiscard]] std::size_t complexTableSize() const noexcept { return complexTable_.size(); }

  // ── edge construction ──────────────────────────────────────────────

  [[nodiscard]] VectorEdge zeroVector() const noexcept { return {nullptr, zeroWeight()}; }
  [[nodiscard]] MatrixEdge zeroMatrix() const noexcept { return {nullptr, zeroWeight()}; }
  [[nodiscard]] VectorEdge terminalVector(const std::complex<fp>& w) { return {nullptr, intern(w)}; }
  [[nodiscard]] MatrixEdge terminalMatrix(const std::complex<fp>& w) { return {nullptr, intern(w)}; }

  /// Create (or find) the canonical node for the given successors. Validates
  /// that successor levels lie strictly below `level`.
  VectorEdge makeVectorNode(Qubit level, const VectorEdge& e0, const VectorEdge& e1);
  MatrixEdge makeMatrixNode(Qubit level, const std::array<MatrixEdge, 4>& e);

  // ── reference management ───────────────────────────────────────────

  void retain(const VectorEdge& e);
  void retain(const MatrixEdge& e);
  void release(const VectorEdge& e);
  void release(const MatrixEdge& e);

  /// Mark-and-sweep from the root set. Frees unreferenced nodes and clears
  /// every compute cache. Returns the number of freed (vector, matrix) nodes.
  std::pair<std::size_t, std::size_t> collectGarbage();

  [[nodiscard]] std::size_t liveVectorNodes() const noexcept;
  [[nodiscard]] std::size_t liveMatrixNodes() const noexcept;

  template <class Fn> void forEachVectorNode(Fn&& fn) const {
    for (const auto& levelMap : vectors_.levels) {
      for (const auto& [key, node] : levelMap) {
        fn(*node);
      }
    }
  }
  template <class Fn> void forEachMatrixNode(Fn&& fn) const {
    for (const auto& levelMap : matrices_.levels) {
      for (const auto& [key, node] : levelMap) {
        fn(*node);
      }
    }
  }

  // ── structure ──────────────────────────────────────────────────────

  [[nodiscard]] std::size_t nodeCount(const VectorEdge& e) const;
  [[nodiscard]] std::size_t nodeCount(const MatrixEdge& e) const;

  // ── vector operations ──────────────────────────────────────────────

  VectorEdge fromAmplitudes(const CVec& amplitudes);
  VectorEdge basisState(std::size_t numQubits, std::uint64_t index);
  std::complex<fp> getAmplitude(const VectorEdge& e, std::uint64_t index) const;
  CVec toAmplitudes(const VectorEdge& e, std::size_t numQubits) const;
  VectorEdge add(const VectorEdge& a, const VectorEdge& b);
  /// Inner product with the first operand conjugated.
  std::complex<fp> innerProduct(const VectorEdge& a, const VectorEdge& b);
  fp fidelity(const VectorEdge& a, const VectorEdge& b);

  // ── matrix operations ──────────────────────────────────────────────

  MatrixEdge identity(std::size_t numQubits);
  MatrixEdge singleQubitGate(std::size_t numQubits, Qubit target,
                             const std::array<std::complex<fp>, 4>& g);
  MatrixEdge controlledGate(std::size_t numQubits, const std::vector<Qubit>& controls,
                            Qubit target, const std::array<std::complex<fp>, 4>& g);
  /// 4x4 operator on (hi, lo); `hi` holds the more significant bit of the
  /// row/column index of `g` (row-major).
  MatrixEdge twoQubitGate(std::size_t numQubits, Qubit hi, Qubit lo,
                          const std::array<std::complex<fp>, 16>& g);
  /// Kronecker product; `a` takes the more significant qubits. Linear in the
  /// node count of `a`: `b` is substituted for `a`'s terminal.
  MatrixEdge kronecker(const MatrixEdge& a, const MatrixEdge& b, std::size_t bQubits);
  VectorEdge multiply(const MatrixEdge& m, const VectorEdge& v);
  MatrixEdge multiply(const MatrixEdge& a, const MatrixEdge& b);
  MatrixEdge add(const MatrixEdge& a, const MatrixEdge& b);
  MatrixEdge conjugateTranspose(const MatrixEdge& a);
  /// |ket><bra|
  MatrixEdge outerProduct(const VectorEdge& ket, const VectorEdge& bra);
  std::complex<fp> getEntry(const MatrixEdge& e, std::uint64_t row, std::uint64_t col) const;
  CMat toMatrix(const MatrixEdge& e, std::size_t numQubits) const;

  // ── cache statistics ───────────────────────────────────────────────

  [[nodiscard]] std::size_t cacheHits() const noexcept;
  [[nodiscard]] std::size_t cacheLookups() const noexcept;

private:
  template <class Node> struct SuccKey {
    std::array<Edge<Node>, Node::radix> succ{};
    bool operator==(const SuccKey&) const = default;
  };
  template <class Node> struct SuccKeyHash {
    std::size_t operator()(const SuccKey<Node>& k) const noexcept {
      std::uint64_t h = 0;
      for (const auto& e : k.succ) {
        h = hashCombine(h, reinterpret_cast<std::uintptr_t>(e.node));
        h = hashCombine(h, reinterpret_cast<std::uintptr_t>(e.w));
      }
      return static_cast<std::size_t>(h);
    }
  };

  template <class Node> struct UniqueTable {
    std::vector<std::unordered_map<SuccKey<Node>, Node*, SuccKeyHash<Node>>> levels;
    std::deque<Node> pool;
    std::vector<Node*> freelist;
    std::unordered_map<Node*, std::size_t> roots;

    Node* allocate() {
      if (!freelist.empty()) {
        Node* n = freelist.back();
        freelist.pop_back();
        return n;
      }
      pool.emplace_back();
      return &pool.back();
    }
    [[nodiscard]] std::size_t liveCount() const noexcept {
      std::size_t total = 0;
      for (const auto& m : levels) {
        total += m.size();
      }
      return total;
    }
  };

  struct NodePairKey {
    const void* a = nullptr;
    const void* b = nullptr;
    bool operator==(const NodePairKey&) const = default;
    [[nodiscard]] std::uint64_t hash() const noexcept {
      return hashCombine(mix64(reinterpret_cast<std::uintptr_t>(a)),
                         reinterpret_cast<std::uintptr_t>(b));
    }
  };
  struct KronKey {
    const void* a = nullptr;
    const void* b = nullptr;
    Qubit shift = 0;
    bool operator==(const KronKey&) const = default;
    [[nodiscard]] std::uint64_t hash() const noexcept {
      auto h = hashCombine(mix64(reinterpret_cast<std::uintptr_t>(a)),
                           reinterpret_cast<std::uintptr_t>(b));
      return hashCombine(h, shift);
    }
  };
  struct UnaryKey {
    const void* p = nullptr;
    bool operator==(const UnaryKey&) const = default;
    [[nodiscard]] std::uint64_t hash() const noexcept {
      return mix64(reinterpret_cast<std::uintptr_t>(p));
    }
  };
  template <class Node> struct AddKey {
    Node* p = nullptr;
    std::complex<fp> wp{};
    Node* q = nullptr;
    std::complex<fp> wq{};
    bool operator==(const AddKey&) const = default;
    [[nodiscard]] std::uint64_t hash() const noexcept {
      auto h = hashCombine(mix64(reinterpret_cast<std::uintptr_t>(p)),
                           reinterpret_cast<std::uintptr_t>(q));
      h = hashCombine(h, std::bit_cast<std::uint64_t>(wp.real()));
      h = hashCombine(h, std::bit_cast<std::uint64_t>(wp.imag()));
      h = hashCombine(h, std::bit_cast<std::uint64_t>(wq.real()));
      h = hashCombine(h, std::bit_cast<std::uint64_t>(wq.imag()));
      return h;
    }
  };

  // normalization + hash-consing on un-interned successor weights
  VectorCachedEdge makeVectorNodeCached(Qubit level, std::array<VectorCachedEdge, 2> e);
  MatrixCachedEdge makeMatrixNodeCached(Qubit level, std::array<MatrixCachedEdge, 4> e);

  // intern the weight of a finished result; a weight that cancels to zero
  // (exactly or within tolerance) folds the edge into the zero stub
  VectorEdge seal(const VectorCachedEdge& e);
  MatrixEdge seal(const MatrixCachedEdge& e);

  template <class Node>
  Node* hashCons(UniqueTable<Node>& table, Qubit level,
                 const std::array<Edge<Node>, Node::radix>& succ);

  // recursion workhorses; weights of the toplevel operands are factored out
  VectorCachedEdge add2(const VectorCachedEdge& x, const VectorCachedEdge& y);
  MatrixCachedEdge add2(const MatrixCachedEdge& x, const MatrixCachedEdge& y);
  VectorCachedEdge multiply2(MatrixNode* p, VectorNode* q);
  MatrixCachedEdge multiply2(MatrixNode* p, MatrixNode* q);
  MatrixCachedEdge kronecker2(MatrixNode* p, MatrixNode* bNode, Qubit shift);
  MatrixCachedEdge conjugateTranspose2(MatrixNode* p);
  std::complex<fp> innerProduct2(VectorNode* p, VectorNode* q);
  MatrixCachedEdge outerProduct2(VectorNode* p, VectorNode* q);

  MatrixCachedEdge identityChain(Qubit belowLevel);

  template <class Node> void retainImpl(UniqueTable<Node>& table, const Edge<Node>& e);
  template <class Node> void releaseImpl(UniqueTable<Node>& table, const Edge<Node>& e);
  template <class Node> static void mark(Node* node);
  template <class Node> std::size_t sweep(UniqueTable<Node>& table);

  ManagerConfig config_;
  ComplexTable complexTable_;
  UniqueTable<VectorNode> vectors_;
  UniqueTable<MatrixNode> matrices_;

  ComputeCache<AddKey<VectorNode>, VectorCachedEdge> vecAddCache_;
  ComputeCache<AddKey<MatrixNode>, MatrixCachedEdge> matAddCache_;
  ComputeCache<NodePairKey, VectorCachedEdge> matVecCache_;
  ComputeCache<NodePairKey, MatrixCachedEdge> matMatCache_;
  ComputeCache<KronKey, MatrixCachedEdge> kronCache_;
  ComputeCache<UnaryKey, MatrixCachedEdge> conjTransCache_;
  ComputeCache<NodePairKey, std::complex<fp>> innerProductCache_;
  ComputeCache<NodePairKey, MatrixCachedEdge> outerCache_;
};

} // namespace dd
