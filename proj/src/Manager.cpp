#include "dd/Manager.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <unordered_set>

namespace dd {

namespace {

bool isZeroW(const std::complex<fp>& w) noexcept { return w.real() == 0. && w.imag() == 0.; }

template <class Node> std::size_t countNodes(const Node* root) {
  if (root == nullptr) {
    return 0;
  }
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{root};
  seen.insert(root);
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    for (const auto& s : n->succ) {
      if (s.node != nullptr && seen.insert(s.node).second) {
        stack.push_back(s.node);
      }
    }
  }
  return seen.size();
}

} // namespace

Manager::Manager(ManagerConfig config)
    : config_(config), complexTable_(config.tolerance), vecAddCache_(config.cacheEntries),
      matAddCache_(config.cacheEntries), matVecCache_(config.cacheEntries),
      matMatCache_(config.cacheEntries), kronCache_(config.cacheEntries),
      conjTransCache_(config.cacheEntries), innerProductCache_(config.cacheEntries),
      outerCache_(config.cacheEntries) {}

// ── node construction ───────────────────────────────────────────────────

template <class Node>
Node* Manager::hashCons(UniqueTable<Node>& table, const Qubit level,
                        const std::array<Edge<Node>, Node::radix>& succ) {
  if (table.levels.size() <= level) {
    table.levels.resize(level + 1);
  }
  auto& map = table.levels[level];
  const SuccKey<Node> key{succ};
  if (const auto it = map.find(key); it != map.end()) {
    return it->second;
  }
  Node* n = table.allocate();
  n->succ = succ;
  n->level = level;
  n->marked = false;
  map.emplace(key, n);
  return n;
}

VectorCachedEdge Manager::makeVectorNodeCached(const Qubit level, std::array<VectorCachedEdge, 2> e) {
  const fp tol = config_.tolerance;
  for (auto& c : e) {
    if (approxZero(c.w, tol)) {
      c = VectorCachedEdge::zero();
    }
  }
  if (isZeroW(e[0].w) && isZeroW(e[1].w)) {
    return VectorCachedEdge::zero();
  }

  const std::size_t pivot = isZeroW(e[0].w) ? 1 : 0;
  const std::size_t other = 1 - pivot;
  std::complex<fp> top;
  if (config_.vectorScheme == VectorNormScheme::Leftmost) {
    top = e[pivot].w;
    if (!isZeroW(e[other].w)) {
      e[other].w /= top;
    }
    e[pivot].w = {1., 0.};
  } else {
    const fp norm = std::sqrt(std::norm(e[0].w) + std::norm(e[1].w));
    const fp mag = std::abs(e[pivot].w);
    top = e[pivot].w * (norm / mag); // norm * e^{i arg(pivot)}
    if (!isZeroW(e[other].w)) {
      e[other].w /= top;
    }
    e[pivot].w = {mag / norm, 0.};
  }

  std::array<VectorEdge, 2> succ{};
  for (std::size_t k = 0; k < 2; ++k) {
    if (isZeroW(e[k].w)) {
      succ[k] = zeroVector();
      continue;
    }
    const Complex* w = intern(e[k].w);
    succ[k] = w->exactlyZero() ? zeroVector() : VectorEdge{e[k].node, w};
  }
  return {hashCons(vectors_, level, succ), top};
}

MatrixCachedEdge Manager::makeMatrixNodeCached(const Qubit level, std::array<MatrixCachedEdge, 4> e) {
  const fp tol = config_.tolerance;
  fp maxMag = 0.;
  for (auto& c : e) {
    if (approxZero(c.w, tol)) {
      c = MatrixCachedEdge::zero();
    } else {
      maxMag = std::max(maxMag, std::abs(c.w));
    }
  }
  if (maxMag == 0.) {
    return MatrixCachedEdge::zero();
  }

  std::size_t pivot = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!isZeroW(e[i].w) && std::abs(e[i].w) >= maxMag - tol) {
      pivot = i;
      break;
    }
  }
  const std::complex<fp> top = e[pivot].w;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i != pivot && !isZeroW(e[i].w)) {
      e[i].w /= top;
    }
  }
  e[pivot].w = {1., 0.};

  std::array<MatrixEdge, 4> succ{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (isZeroW(e[i].w)) {
      succ[i] = zeroMatrix();
      continue;
    }
    const Complex* w = intern(e[i].w);
    succ[i] = w->exactlyZero() ? zeroMatrix() : MatrixEdge{e[i].node, w};
  }
  return {hashCons(matrices_, level, succ), top};
}

VectorEdge Manager::makeVectorNode(const Qubit level, const VectorEdge& e0, const VectorEdge& e1) {
  for (const auto* e : {&e0, &e1}) {
    if (e->node != nullptr && e->node->level >= level) {
      throw std::invalid_argument("successor level must lie below the node level");
    }
  }
  return seal(makeVectorNodeCached(level, {VectorCachedEdge{e0.node, e0.w->value()},
                                           VectorCachedEdge{e1.node, e1.w->value()}}));
}

MatrixEdge Manager::makeMatrixNode(const Qubit level, const std::array<MatrixEdge, 4>& e) {
  std::array<MatrixCachedEdge, 4> cached{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (e[i].node != nullptr && e[i].node->level >= level) {
      throw std::invalid_argument("successor level must lie below the node level");
    }
    cached[i] = MatrixCachedEdge{e[i].node, e[i].w->value()};
  }
  return seal(makeMatrixNodeCached(level, cached));
}

VectorEdge Manager::seal(const VectorCachedEdge& e) {
  const Complex* w = intern(e.w);
  if (w->exactlyZero()) {
    return zeroVector();
  }
  return {e.node, w};
}

MatrixEdge Manager::seal(const MatrixCachedEdge& e) {
  const Complex* w = intern(e.w);
  if (w->exactlyZero()) {
    return zeroMatrix();
  }
  return {e.node, w};
}

// ── reference management ────────────────────────────────────────────────

template <class Node> void Manager::retainImpl(UniqueTable<Node>& table, const Edge<Node>& e) {
  if (e.node == nullptr) {
    return;
  }
  ++table.roots[e.node];
}

template <class Node> void Manager::releaseImpl(UniqueTable<Node>& table, const Edge<Node>& e) {
  if (e.node == nullptr) {
    return;
  }
  const auto it = table.roots.find(e.node);
  if (it == table.roots.end()) {
    throw std::logic_error("release of an edge that is not retained");
  }
  if (--it->second == 0) {
    table.roots.erase(it);
  }
}

void Manager::retain(const VectorEdge& e) { retainImpl(vectors_, e); }
void Manager::retain(const MatrixEdge& e) { retainImpl(matrices_, e); }
void Manager::release(const VectorEdge& e) { releaseImpl(vectors_, e); }
void Manager::release(const MatrixEdge& e) { releaseImpl(matrices_, e); }

template <class Node> void Manager::mark(Node* node) {
  if (node == nullptr || node->marked) {
    return;
  }
  node->marked = true;
  for (const auto& s : node->succ) {
    mark(s.node);
  }
}

template <class Node> std::size_t Manager::sweep(UniqueTable<Node>& table) {
  std::size_t freed = 0;
  for (auto& map : table.levels) {
    for (auto it = map.begin(); it != map.end();) {
      Node* n = it->second;
      if (!n->marked) {
        table.freelist.push_back(n);
        it = map.erase(it);
        ++freed;
      } else {
        n->marked = false;
        ++it;
      }
    }
  }
  return freed;
}

std::pair<std::size_t, std::size_t> Manager::collectGarbage() {
  for (const auto& [node, count] : vectors_.roots) {
    mark(node);
  }
  for (const auto& [node, count] : matrices_.roots) {
    mark(node);
  }
  const auto freedVectors = sweep(vectors_);
  const auto freedMatrices = sweep(matrices_);

  // freed nodes may be re-allocated at the same address, so every memoized
  // result keyed on node identity has to go
  vecAddCache_.clear();
  matAddCache_.clear();
  matVecCache_.clear();
  matMatCache_.clear();
  kronCache_.clear();
  conjTransCache_.clear();
  innerProductCache_.clear();
  outerCache_.clear();

  return {freedVectors, freedMatrices};
}

std::size_t Manager::liveVectorNodes() const noexcept { return vectors_.liveCount(); }
std::size_t Manager::liveMatrixNodes() const noexcept { return matrices_.liveCount(); }

std::size_t Manager::nodeCount(const VectorEdge& e) const { return countNodes(e.node); }
std::size_t Manager::nodeCount(const MatrixEdge& e) const { return countNodes(e.node); }

// ── vector operations ───────────────────────────────────────────────────

VectorEdge Manager::fromAmplitudes(const CVec& amplitudes) {
  const auto size = amplitudes.size();
  if (size < 2 || (size & (size - 1)) != 0) {
    throw std::invalid_argument("amplitude vector length must be a power of two, at least 2");
  }
  auto build = [&](auto&& self, const std::size_t begin, const std::size_t len) -> VectorCachedEdge {
    if (len == 1) {
      return VectorCachedEdge::terminal(amplitudes[begin]);
    }
    const auto half = len / 2;
    auto e0 = self(self, begin, half);
    auto e1 = self(self, begin + half, half);
    const auto level = static_cast<Qubit>(std::countr_zero(len) - 1);
    return makeVectorNodeCached(level, {e0, e1});
  };
  return seal(build(build, 0, size));
}

VectorEdge Manager::basisState(const std::size_t numQubits, const std::uint64_t index) {
  if (numQubits == 0) {
    throw std::invalid_argument("basis state needs at least one qubit");
  }
  if (numQubits < 64 && index >= (1ULL << numQubits)) {
    throw std::out_of_range("basis index out of range");
  }
  VectorCachedEdge e = VectorCachedEdge::terminal({1., 0.});
  for (Qubit l = 0; l < numQubits; ++l) {
    const bool bit = ((index >> l) & 1ULL) != 0;
    std::array<VectorCachedEdge, 2> succ{VectorCachedEdge::zero(), VectorCachedEdge::zero()};
    succ[bit ? 1 : 0] = e;
    e = makeVectorNodeCached(l, succ);
  }
  return seal(e);
}

std::complex<fp> Manager::getAmplitude(const VectorEdge& e, const std::uint64_t index) const {
  std::complex<fp> acc = e.w->value();
  const VectorNode* node = e.node;
  while (node != nullptr && !isZeroW(acc)) {
    const auto& s = node->succ[(index >> node->level) & 1ULL];
    acc *= s.w->value();
    node = s.node;
  }
  return acc;
}

namespace {
void fillAmplitudes(const VectorNode* node, const std::complex<fp>& acc, const std::size_t levelsBelow,
                    const std::uint64_t base, CVec& out) {
  if (isZeroW(acc)) {
    return;
  }
  if (levelsBelow == 0) {
    out[base] = acc;
    return;
  }
  if (node == nullptr) {
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(base), 1ULL << levelsBelow, acc);
    return;
  }
  const auto half = 1ULL << (levelsBelow - 1);
  fillAmplitudes(node->succ[0].node, acc * node->succ[0].w->value(), levelsBelow - 1, base, out);
  fillAmplitudes(node->succ[1].node, acc * node->succ[1].w->value(), levelsBelow - 1, base + half, out);
}
} // namespace

CVec Manager::toAmplitudes(const VectorEdge& e, const std::size_t numQubits) const {
  if (numQubits > config_.denseVectorQubitLimit) {
    throw std::length_error("dense amplitude read-back limited to " +
                            std::to_string(config_.denseVectorQubitLimit) + " qubits");
  }
  CVec out(1ULL << numQubits, std::complex<fp>{0., 0.});
  fillAmplitudes(e.node, e.w->value(), numQubits, 0, out);
  return out;
}

VectorEdge Manager::add(const VectorEdge& a, const VectorEdge& b) {
  return seal(add2(VectorCachedEdge{a.node, a.w->value()}, VectorCachedEdge{b.node, b.w->value()}));
}

VectorCachedEdge Manager::add2(const VectorCachedEdge& x, const VectorCachedEdge& y) {
  if (isZeroW(x.w)) {
    return y;
  }
  if (isZeroW(y.w)) {
    return x;
  }
  if (x.node == y.node) {
    const auto sum = x.w + y.w;
    return isZeroW(sum) ? VectorCachedEdge::zero() : VectorCachedEdge{x.node, sum};
  }
  if (x.node == nullptr || y.node == nullptr || x.node->level != y.node->level) {
    throw std::logic_error("addition of diagrams with mismatched levels");
  }
  const AddKey<VectorNode> key{x.node, x.w, y.node, y.w};
  if (const auto* hit = vecAddCache_.lookup(key)) {
    return *hit;
  }
  std::array<VectorCachedEdge, 2> children{};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& sx = x.node->succ[k];
    const auto& sy = y.node->succ[k];
    children[k] = add2(VectorCachedEdge{sx.node, sx.w->value() * x.w},
                       VectorCachedEdge{sy.node, sy.w->value() * y.w});
  }
  const auto result = makeVectorNodeCached(x.node->level, children);
  vecAddCache_.insert(key, result);
  return result;
}

MatrixEdge Manager::add(const MatrixEdge& a, const MatrixEdge& b) {
  return seal(add2(MatrixCachedEdge{a.node, a.w->value()}, MatrixCachedEdge{b.node, b.w->value()}));
}

MatrixCachedEdge Manager::add2(const MatrixCachedEdge& x, const MatrixCachedEdge& y) {
  if (isZeroW(x.w)) {
    return y;
  }
  if (isZeroW(y.w)) {
    return x;
  }
  if (x.node == y.node) {
    const auto sum = x.w + y.w;
    return isZeroW(sum) ? MatrixCachedEdge::zero() : MatrixCachedEdge{x.node, sum};
  }
  if (x.node == nullptr || y.node == nullptr || x.node->level != y.node->level) {
    throw std::logic_error("addition of diagrams with mismatched levels");
  }
  const AddKey<MatrixNode> key{x.node, x.w, y.node, y.w};
  if (const auto* hit = matAddCache_.lookup(key)) {
    return *hit;
  }
  std::array<MatrixCachedEdge, 4> children{};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& sx = x.node->succ[k];
    const auto& sy = y.node->succ[k];
    children[k] = add2(MatrixCachedEdge{sx.node, sx.w->value() * x.w},
                       MatrixCachedEdge{sy.node, sy.w->value() * y.w});
  }
  const auto result = makeMatrixNodeCached(x.node->level, children);
  matAddCache_.insert(key, result);
  return result;
}

std::complex<fp> Manager::innerProduct(const VectorEdge& a, const VectorEdge& b) {
  if (a.w->exactlyZero() || b.w->exactlyZero()) {
    return {0., 0.};
  }
  return std::conj(a.w->value()) * b.w->value() * innerProduct2(a.node, b.node);
}

std::complex<fp> Manager::innerProduct2(VectorNode* p, VectorNode* q) {
  if (p == nullptr && q == nullptr) {
    return {1., 0.};
  }
  if (p == nullptr || q == nullptr || p->level != q->level) {
    throw std::logic_error("inner product of diagrams with mismatched levels");
  }
  const NodePairKey key{p, q};
  if (const auto* hit = innerProductCache_.lookup(key)) {
    return *hit;
  }
  std::complex<fp> sum{0., 0.};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& sp = p->succ[k];
    const auto& sq = q->succ[k];
    if (sp.w->exactlyZero() || sq.w->exactlyZero()) {
      continue;
    }
    sum += std::conj(sp.w->value()) * sq.w->value() * innerProduct2(sp.node, sq.node);
  }
  innerProductCache_.insert(key, sum);
  return sum;
}

fp Manager::fidelity(const VectorEdge& a, const VectorEdge& b) { return std::norm(innerProduct(a, b)); }

// ── matrix operations ───────────────────────────────────────────────────

MatrixCachedEdge Manager::identityChain(const Qubit belowLevel) {
  MatrixCachedEdge e = MatrixCachedEdge::terminal({1., 0.});
  for (Qubit l = 0; l < belowLevel; ++l) {
    e = makeMatrixNodeCached(l, {e, MatrixCachedEdge::zero(), MatrixCachedEdge::zero(), e});
  }
  return e;
}

MatrixEdge Manager::identity(const std::size_t numQubits) {
  return seal(identityChain(static_cast<Qubit>(numQubits)));
}

MatrixEdge Manager::singleQubitGate(const std::size_t numQubits, const Qubit target,
                                    const std::array<std::complex<fp>, 4>& g) {
  return controlledGate(numQubits, {}, target, g);
}

MatrixEdge Manager::controlledGate(const std::size_t numQubits, const std::vector<Qubit>& controls,
                                   const Qubit target, const std::array<std::complex<fp>, 4>& g) {
  if (numQubits == 0 || target >= numQubits) {
    throw std::invalid_argument("gate target out of range");
  }
  auto sorted = controls;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("duplicate control qubit");
  }
  for (const auto c : sorted) {
    if (c >= numQubits || c == target) {
      throw std::invalid_argument("control qubit out of range or equal to target");
    }
  }

  const auto zero = MatrixCachedEdge::zero();
  std::array<MatrixCachedEdge, 4> em{};
  for (std::size_t i = 0; i < 4; ++i) {
    em[i] = MatrixCachedEdge::terminal(g[i]);
  }

  MatrixCachedEdge below = MatrixCachedEdge::terminal({1., 0.});
  auto ctrl = sorted.begin();
  for (Qubit z = 0; z < target; ++z) {
    const bool isControl = ctrl != sorted.end() && *ctrl == z;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto row = i >> 1U;
      const auto col = i & 1U;
      if (isControl) {
        // control = 0 keeps the identity on the diagonal, control = 1 carries
        // the gate entry
        em[i] = makeMatrixNodeCached(z, {row == col ? below : zero, zero, zero, em[i]});
      } else {
        em[i] = makeMatrixNodeCached(z, {em[i], zero, zero, em[i]});
      }
    }
    below = makeMatrixNodeCached(z, {below, zero, zero, below});
    if (isControl) {
      ++ctrl;
    }
  }

  auto e = makeMatrixNodeCached(target, em);
  below = makeMatrixNodeCached(target, {below, zero, zero, below});
  for (Qubit z = target + 1; z < numQubits; ++z) {
    const bool isControl = ctrl != sorted.end() && *ctrl == z;
    if (isControl) {
      e = makeMatrixNodeCached(z, {below, zero, zero, e});
      ++ctrl;
    } else {
      e = makeMatrixNodeCached(z, {e, zero, zero, e});
    }
    below = makeMatrixNodeCached(z, {below, zero, zero, below});
  }
  return seal(e);
}

MatrixEdge Manager::twoQubitGate(const std::size_t numQubits, const Qubit hi, const Qubit lo,
                                 const std::array<std::complex<fp>, 16>& g) {
  if (hi == lo || hi >= numQubits || lo >= numQubits) {
    throw std::invalid_argument("two-qubit gate targets out of range or equal");
  }
  Qubit effHi = hi;
  Qubit effLo = lo;
  std::array<std::complex<fp>, 16> m = g;
  if (hi < lo) {
    std::swap(effHi, effLo);
    const auto swapBits = [](const std::size_t v) { return ((v & 1U) << 1U) | (v >> 1U); };
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) {
        m[swapBits(r) * 4 + swapBits(c)] = g[r * 4 + c];
      }
    }
  }

  const auto zero = MatrixCachedEdge::zero();
  // sub[2*rHi + cHi][2*rLo + cLo] = matrix entry (2*rHi + rLo, 2*cHi + cLo)
  std::array<std::array<MatrixCachedEdge, 4>, 4> sub{};
  for (std::size_t rHi = 0; rHi < 2; ++rHi) {
    for (std::size_t cHi = 0; cHi < 2; ++cHi) {
      for (std::size_t rLo = 0; rLo < 2; ++rLo) {
        for (std::size_t cLo = 0; cLo < 2; ++cLo) {
          sub[2 * rHi + cHi][2 * rLo + cLo] =
              MatrixCachedEdge::terminal(m[(2 * rHi + rLo) * 4 + (2 * cHi + cLo)]);
        }
      }
    }
  }

  for (Qubit z = 0; z < effLo; ++z) {
    for (auto& block : sub) {
      for (auto& entry : block) {
        entry = makeMatrixNodeCached(z, {entry, zero, zero, entry});
      }
    }
  }
  std::array<MatrixCachedEdge, 4> blocks{};
  for (std::size_t i = 0; i < 4; ++i) {
    blocks[i] = makeMatrixNodeCached(effLo, sub[i]);
  }
  for (Qubit z = effLo + 1; z < effHi; ++z) {
    for (auto& block : blocks) {
      block = makeMatrixNodeCached(z, {block, zero, zero, block});
    }
  }
  auto e = makeMatrixNodeCached(effHi, blocks);
  for (Qubit z = effHi + 1; z < numQubits; ++z) {
    e = makeMatrixNodeCached(z, {e, zero, zero, e});
  }
  return seal(e);
}

MatrixEdge Manager::kronecker(const MatrixEdge& a, const MatrixEdge& b, const std::size_t bQubits) {
  if (a.w->exactlyZero() || b.w->exactlyZero()) {
    return zeroMatrix();
  }
  if (b.node == nullptr ? bQubits != 0 : b.node->level + 1 != bQubits) {
    throw std::invalid_argument("kronecker: second operand qubit count mismatch");
  }
  const auto r = kronecker2(a.node, b.node, static_cast<Qubit>(bQubits));
  return seal({r.node, r.w * a.w->value() * b.w->value()});
}

MatrixCachedEdge Manager::kronecker2(MatrixNode* p, MatrixNode* bNode, const Qubit shift) {
  if (p == nullptr) {
    return {bNode, {1., 0.}};
  }
  if (shift == 0) {
    return {p, {1., 0.}};
  }
  const KronKey key{p, bNode, shift};
  if (const auto* hit = kronCache_.lookup(key)) {
    return *hit;
  }
  std::array<MatrixCachedEdge, 4> children{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& s = p->succ[i];
    if (s.w->exactlyZero()) {
      children[i] = MatrixCachedEdge::zero();
      continue;
    }
    auto sub = kronecker2(s.node, bNode, shift);
    sub.w *= s.w->value();
    children[i] = sub;
  }
  const auto result = makeMatrixNodeCached(p->level + shift, children);
  kronCache_.insert(key, result);
  return result;
}

VectorEdge Manager::multiply(const MatrixEdge& m, const VectorEdge& v) {
  if (m.w->exactlyZero() || v.w->exactlyZero()) {
    return zeroVector();
  }
  const auto r = multiply2(m.node, v.node);
  return seal({r.node, r.w * m.w->value() * v.w->value()});
}

VectorCachedEdge Manager::multiply2(MatrixNode* p, VectorNode* q) {
  if (p == nullptr && q == nullptr) {
    return VectorCachedEdge::terminal({1., 0.});
  }
  if (p == nullptr || q == nullptr || p->level != q->level) {
    throw std::logic_error("matrix-vector product with mismatched levels");
  }
  const NodePairKey key{p, q};
  if (const auto* hit = matVecCache_.lookup(key)) {
    return *hit;
  }
  std::array<VectorCachedEdge, 2> children{};
  for (std::size_t r = 0; r < 2; ++r) {
    VectorCachedEdge acc = VectorCachedEdge::zero();
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& me = p->succ[2 * r + k];
      const auto& ve = q->succ[k];
      if (me.w->exactlyZero() || ve.w->exactlyZero()) {
        continue;
      }
      auto sub = multiply2(me.node, ve.node);
      sub.w *= me.w->value() * ve.w->value();
      acc = add2(acc, sub);
    }
    children[r] = acc;
  }
  const auto result = makeVectorNodeCached(p->level, children);
  matVecCache_.insert(key, result);
  return result;
}

MatrixEdge Manager::multiply(const MatrixEdge& a, const MatrixEdge& b) {
  if (a.w->exactlyZero() || b.w->exactlyZero()) {
    return zeroMatrix();
  }
  const auto r = multiply2(a.node, b.node);
  return seal({r.node, r.w * a.w->value() * b.w->value()});
}

MatrixCachedEdge Manager::multiply2(MatrixNode* p, MatrixNode* q) {
  if (p == nullptr && q == nullptr) {
    return MatrixCachedEdge::terminal({1., 0.});
  }
  if (p == nullptr || q == nullptr || p->level != q->level) {
    throw std::logic_error("matrix-matrix product with mismatched levels");
  }
  const NodePairKey key{p, q};
  if (const auto* hit = matMatCache_.lookup(key)) {
    return *hit;
  }
  std::array<MatrixCachedEdge, 4> children{};
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      MatrixCachedEdge acc = MatrixCachedEdge::zero();
      for (std::size_t k = 0; k < 2; ++k) {
        const auto& ae = p->succ[2 * r + k];
        const auto& be = q->succ[2 * k + c];
        if (ae.w->exactlyZero() || be.w->exactlyZero()) {
          continue;
        }
        auto sub = multiply2(ae.node, be.node);
        sub.w *= ae.w->value() * be.w->value();
        acc = add2(acc, sub);
      }
      children[2 * r + c] = acc;
    }
  }
  const auto result = makeMatrixNodeCached(p->level, children);
  matMatCache_.insert(key, result);
  return result;
}

MatrixEdge Manager::conjugateTranspose(const MatrixEdge& a) {
  if (a.w->exactlyZero()) {
    return zeroMatrix();
  }
  const auto r = conjugateTranspose2(a.node);
  return seal({r.node, r.w * std::conj(a.w->value())});
}

MatrixCachedEdge Manager::conjugateTranspose2(MatrixNode* p) {
  if (p == nullptr) {
    return MatrixCachedEdge::terminal({1., 0.});
  }
  const UnaryKey key{p};
  if (const auto* hit = conjTransCache_.lookup(key)) {
    return *hit;
  }
  std::array<MatrixCachedEdge, 4> children{};
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      const auto& s = p->succ[2 * c + r];
      if (s.w->exactlyZero()) {
        children[2 * r + c] = MatrixCachedEdge::zero();
        continue;
      }
      auto sub = conjugateTranspose2(s.node);
      sub.w *= std::conj(s.w->value());
      children[2 * r + c] = sub;
    }
  }
  const auto result = makeMatrixNodeCached(p->level, children);
  conjTransCache_.insert(key, result);
  return result;
}

MatrixEdge Manager::outerProduct(const VectorEdge& ket, const VectorEdge& bra) {
  if (ket.w->exactlyZero() || bra.w->exactlyZero()) {
    return zeroMatrix();
  }
  const auto r = outerProduct2(ket.node, bra.node);
  return seal({r.node, r.w * ket.w->value() * std::conj(bra.w->value())});
}

MatrixCachedEdge Manager::outerProduct2(VectorNode* p, VectorNode* q) {
  if (p == nullptr && q == nullptr) {
    return MatrixCachedEdge::terminal({1., 0.});
  }
  if (p == nullptr || q == nullptr || p->level != q->level) {
    throw std::logic_error("outer product of diagrams with mismatched levels");
  }
  const NodePairKey key{p, q};
  if (const auto* hit = outerCache_.lookup(key)) {
    return *hit;
  }
  std::array<MatrixCachedEdge, 4> children{};
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      const auto& sp = p->succ[r];
      const auto& sq = q->succ[c];
      if (sp.w->exactlyZero() || sq.w->exactlyZero()) {
        children[2 * r + c] = MatrixCachedEdge::zero();
        continue;
      }
      auto sub = outerProduct2(sp.node, sq.node);
      sub.w *= sp.w->value() * std::conj(sq.w->value());
      children[2 * r + c] = sub;
    }
  }
  const auto result = makeMatrixNodeCached(p->level, children);
  outerCache_.insert(key, result);
  return result;
}

std::complex<fp> Manager::getEntry(const MatrixEdge& e, const std::uint64_t row,
                                   const std::uint64_t col) const {
  std::complex<fp> acc = e.w->value();
  const MatrixNode* node = e.node;
  while (node != nullptr && !isZeroW(acc)) {
    const auto rbit = (row >> node->level) & 1ULL;
    const auto cbit = (col >> node->level) & 1ULL;
    const auto& s = node->succ[2 * rbit + cbit];
    acc *= s.w->value();
    node = s.node;
  }
  return acc;
}

namespace {
void fillMatrix(const MatrixNode* node, const std::complex<fp>& acc, const std::size_t levelsBelow,
                const std::uint64_t rbase, const std::uint64_t cbase, CMat& out) {
  if (isZeroW(acc)) {
    return;
  }
  if (levelsBelow == 0) {
    out[rbase][cbase] = acc;
    return;
  }
  if (node == nullptr) {
    const auto dim = 1ULL << levelsBelow;
    for (std::uint64_t r = 0; r < dim; ++r) {
      for (std::uint64_t c = 0; c < dim; ++c) {
        out[rbase + r][cbase + c] = acc;
      }
    }
    return;
  }
  const auto half = 1ULL << (levelsBelow - 1);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& s = node->succ[i];
    fillMatrix(s.node, acc * s.w->value(), levelsBelow - 1, rbase + ((i >> 1U) != 0 ? half : 0),
               cbase + ((i & 1U) != 0 ? half : 0), out);
  }
}
} // namespace

CMat Manager::toMatrix(const MatrixEdge& e, const std::size_t numQubits) const {
  if (numQubits > config_.denseMatrixQubitLimit) {
    throw std::length_error("dense matrix read-back limited to " +
                            std::to_string(config_.denseMatrixQubitLimit) + " qubits");
  }
  const auto dim = 1ULL << numQubits;
  CMat out(dim, CVec(dim, std::complex<fp>{0., 0.}));
  fillMatrix(e.node, e.w->value(), numQubits, 0, 0, out);
  return out;
}

std::size_t Manager::cacheHits() const noexcept {
  return vecAddCache_.hits() + matAddCache_.hits() + matVecCache_.hits() + matMatCache_.hits() +
         kronCache_.hits() + conjTransCache_.hits() + innerProductCache_.hits() + outerCache_.hits();
}

std::size_t Manager::cacheLookups() const noexcept {
  return vecAddCache_.lookups() + matAddCache_.lookups() + matVecCache_.lookups() +
         matMatCache_.lookups() + kronCache_.lookups() + conjTransCache_.lookups() +
         innerProductCache_.lookups() + outerCache_.lookups();
}

} // namespace dd
