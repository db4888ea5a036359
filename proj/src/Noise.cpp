#include "dd/Noise.hpp"

#include "dd/Gates.hpp"
#include "dd/Operator.hpp"
#include "dd/State.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace dd {

namespace {

void requireProbability(const fp p, const char* channel) {
  if (!(p >= 0. && p <= 1.)) {
    throw std::invalid_argument(std::string(channel) + ": probability must lie in [0, 1]");
  }
}

} // namespace

KrausChannel amplitudeDamping(const fp p) {
  requireProbability(p, "amplitude_damping");
  KrausChannel c{"amplitude_damping", 1, {}};
  c.ops.push_back({1., 0., 0., std::sqrt(1. - p)});
  c.ops.push_back({0., std::sqrt(p), 0., 0.});
  return c;
}

KrausChannel depolarizing(const fp p) {
  requireProbability(p, "depolarizing");
  KrausChannel c{"depolarizing", 1, {}};
  const fp s0 = std::sqrt(1. - 3. * p / 4.);
  const fp s = std::sqrt(p / 4.);
  using C = std::complex<fp>;
  c.ops.push_back({s0, 0., 0., s0});             // I
  c.ops.push_back({0., s, s, 0.});               // X
  c.ops.push_back({0., C{0., -s}, C{0., s}, 0.}); // Y
  c.ops.push_back({s, 0., 0., -s});              // Z
  return c;
}

KrausChannel phaseFlip(const fp p) {
  requireProbability(p, "phase_flip");
  KrausChannel c{"phase_flip", 1, {}};
  const fp s0 = std::sqrt(1. - p);
  const fp s1 = std::sqrt(p);
  c.ops.push_back({s0, 0., 0., s0});
  c.ops.push_back({s1, 0., 0., -s1});
  return c;
}

ChannelValidation validateChannel(const KrausChannel& channel, const fp tolerance) {
  ChannelValidation v;
  if (channel.arity != 1 && channel.arity != 2) {
    v.message = "channel '" + channel.name + "': arity must be 1 or 2";
    return v;
  }
  const std::size_t dim = channel.arity == 1 ? 2 : 4;
  if (channel.ops.empty()) {
    v.message = "channel '" + channel.name + "': no Kraus operators";
    return v;
  }
  for (const auto& op : channel.ops) {
    if (op.size() != dim * dim) {
      v.message = "channel '" + channel.name + "': operator has " + std::to_string(op.size()) +
                  " entries, expected " + std::to_string(dim * dim);
      return v;
    }
  }

  // sum_i Ei^dag Ei == I
  std::vector<std::complex<fp>> sum(dim * dim, 0.);
  for (const auto& op : channel.ops) {
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) {
        std::complex<fp> acc = 0.;
        for (std::size_t k = 0; k < dim; ++k) {
          acc += std::conj(op[k * dim + r]) * op[k * dim + c];
        }
        sum[r * dim + c] += acc;
      }
    }
  }
  fp maxDev = 0.;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const std::complex<fp> expected = r == c ? 1. : 0.;
      maxDev = std::max(maxDev, std::abs(sum[r * dim + c] - expected));
    }
  }
  v.maxDeviation = maxDev;
  v.ok = maxDev <= tolerance;
  if (!v.ok) {
    std::ostringstream msg;
    msg << "channel '" << channel.name << "' violates completeness: max |sum Ei^dag Ei - I| = "
        << maxDev << " exceeds " << tolerance;
    v.message = msg.str();
  }
  return v;
}

DensityDD densityFromState(Manager& mgr, const StateDD& s) {
  return {mgr.outerProduct(s.root, s.root), s.numQubits};
}

fp traceOf(Manager& mgr, const DensityDD& rho) {
  (void)mgr;
  std::unordered_map<const MatrixNode*, std::complex<fp>> memo;
  auto trace = [&](auto&& self, const MatrixEdge& e) -> std::complex<fp> {
    if (e.w->exactlyZero()) {
      return 0.;
    }
    if (e.isTerminal()) {
      return e.w->value();
    }
    const auto it = memo.find(e.node);
    if (it != memo.end()) {
      return e.w->value() * it->second;
    }
    const auto t = self(self, e.node->succ[0]) + self(self, e.node->succ[3]);
    memo.emplace(e.node, t);
    return e.w->value() * t;
  };
  return trace(trace, rho.root).real();
}

namespace {

MatrixEdge liftKraus(Manager& mgr, const std::size_t numQubits,
                     const std::vector<std::complex<fp>>& op, const std::vector<Qubit>& targets) {
  if (op.size() == 4) {
    return mgr.singleQubitGate(numQubits, targets[0], {op[0], op[1], op[2], op[3]});
  }
  std::array<std::complex<fp>, 16> g{};
  std::copy(op.begin(), op.end(), g.begin());
  return mgr.twoQubitGate(numQubits, targets[0], targets[1], g);
}

void checkChannelTargets(const KrausChannel& channel, const std::vector<Qubit>& targets,
                         const std::size_t numQubits) {
  if (targets.size() != channel.arity) {
    throw std::invalid_argument("channel '" + channel.name + "' acts on " +
                                std::to_string(channel.arity) + " qubit(s), got " +
                                std::to_string(targets.size()));
  }
  for (const auto q : targets) {
    if (q >= numQubits) {
      throw std::invalid_argument("channel target qubit out of range");
    }
  }
  if (channel.arity == 2 && targets[0] == targets[1]) {
    throw std::invalid_argument("channel targets must be distinct");
  }
}

} // namespace

DensityDD applyChannel(Manager& mgr, const DensityDD& rho, const KrausChannel& channel,
                       const std::vector<Qubit>& targets) {
  checkChannelTargets(channel, targets, rho.numQubits);
  MatrixEdge acc = mgr.zeroMatrix();
  for (const auto& op : channel.ops) {
    const auto lifted = liftKraus(mgr, rho.numQubits, op, targets);
    const auto term = mgr.multiply(mgr.multiply(lifted, rho.root), mgr.conjugateTranspose(lifted));
    acc = mgr.add(acc, term);
  }
  return {acc, rho.numQubits};
}

DensityDD applyGateDensity(Manager& mgr, const DensityDD& rho, const std::size_t numQubits,
                           const GateOp& op) {
  const auto u = gateOperator(mgr, numQubits, op);
  return {mgr.multiply(mgr.multiply(u.root, rho.root), mgr.conjugateTranspose(u.root)),
          rho.numQubits};
}

std::string opMnemonic(const GateOp& op) {
  std::string name(op.controls.size(), 'c');
  name += gateName(op.kind);
  return name;
}

namespace {

bool triggers(const NoiseAttachment& att, const GateOp& op) {
  if (att.atEnd) {
    return false;
  }
  if (!att.afterGates.has_value() || att.afterGates->empty()) {
    return true;
  }
  const auto name = opMnemonic(op);
  return std::find(att.afterGates->begin(), att.afterGates->end(), name) != att.afterGates->end();
}

/// The qubits a firing attachment acts on. With an explicit `on=` list that
/// list is used as-is; otherwise every qubit the gate touched, ascending (or
/// all qubits for end-of-circuit noise).
std::vector<Qubit> resolveScope(const NoiseAttachment& att, const GateOp* op,
                                const std::size_t numQubits) {
  if (att.qubits.has_value()) {
    return *att.qubits;
  }
  std::vector<Qubit> qs;
  if (op == nullptr) {
    qs.resize(numQubits);
    for (std::size_t q = 0; q < numQubits; ++q) {
      qs[q] = static_cast<Qubit>(q);
    }
  } else {
    qs = op->touched();
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  }
  return qs;
}

void validateModel(const NoiseModel& model) {
  for (const auto& att : model.attachments) {
    const auto v = validateChannel(att.channel);
    if (!v.ok) {
      throw ChannelError(v);
    }
  }
}

template <class ApplyOne>
void fireAttachment(const NoiseAttachment& att, const GateOp* op, const std::size_t numQubits,
                    ApplyOne&& applyOne) {
  const auto scope = resolveScope(att, op, numQubits);
  if (att.channel.arity == 1) {
    for (const auto q : scope) {
      applyOne(std::vector<Qubit>{q});
    }
    return;
  }
  if (scope.size() != 2) {
    throw std::invalid_argument("two-qubit channel '" + att.channel.name +
                                "' needs a two-qubit scope, got " +
                                std::to_string(scope.size()) + " qubit(s)");
  }
  applyOne(scope);
}

} // namespace

DensityDD deterministicSimulate(Manager& mgr, const QuantumCircuit& circuit,
                                const NoiseModel& model) {
  validateModel(model);
  if (circuit.numQubits == 0) {
    throw std::invalid_argument("circuit has no qubits");
  }
  const auto n = circuit.numQubits;
  const auto zero = basisState(mgr, n, 0);
  DensityDD rho = densityFromState(mgr, zero);

  std::size_t sinceCollect = 0;
  const auto maybeCollect = [&] {
    if (++sinceCollect < 64) {
      return;
    }
    sinceCollect = 0;
    mgr.retain(rho.root);
    mgr.collectGarbage();
    mgr.release(rho.root);
  };

  for (const auto& op : circuit.ops) {
    if (op.kind == GateKind::Barrier) {
      continue;
    }
    if (op.kind == GateKind::Measure) {
      throw std::invalid_argument("deterministic noise simulation does not support measurement");
    }
    rho = applyGateDensity(mgr, rho, n, op);
    for (const auto& att : model.attachments) {
      if (!triggers(att, op)) {
        continue;
      }
      fireAttachment(att, &op, n,
                     [&](const std::vector<Qubit>& qs) { rho = applyChannel(mgr, rho, att.channel, qs); });
    }
    maybeCollect();
  }
  for (const auto& att : model.attachments) {
    if (!att.atEnd) {
      continue;
    }
    fireAttachment(att, nullptr, n,
                   [&](const std::vector<Qubit>& qs) { rho = applyChannel(mgr, rho, att.channel, qs); });
  }
  return rho;
}

std::vector<fp> diagonalProbabilities(Manager& mgr, const DensityDD& rho) {
  if (rho.numQubits > mgr.config().denseVectorQubitLimit) {
    throw std::length_error("diagonal extraction beyond the configured dense limit");
  }
  std::vector<fp> diag;
  diag.resize(1ULL << rho.numQubits, 0.);
  auto fill = [&](auto&& self, const MatrixEdge& e, const std::size_t base,
                  const std::size_t width, const std::complex<fp>& w) -> void {
    if (e.w->exactlyZero()) {
      return;
    }
    const auto prod = w * e.w->value();
    if (e.isTerminal()) {
      diag[base] = std::max<fp>(0., prod.real());
      return;
    }
    const auto half = width / 2;
    self(self, e.node->succ[0], base, half, prod);
    self(self, e.node->succ[3], base + half, half, prod);
  };
  fill(fill, rho.root, 0, diag.size(), 1.);
  return diag;
}

namespace {

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

fp parseReal(const std::string& s, const std::size_t lineNo) {
  try {
    std::size_t pos = 0;
    const auto v = std::stod(s, &pos);
    if (pos != s.size()) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception&) {
    throw NoiseModelError(lineNo, "bad number '" + s + "'");
  }
}

/// `1`, `-0.5`, `i`, `-i`, `0.5i`, `1+2i`, `1e-3-2i`, ...
std::complex<fp> parseComplexLiteral(const std::string& raw, const std::size_t lineNo) {
  auto s = trimmed(raw);
  if (s.empty()) {
    throw NoiseModelError(lineNo, "empty complex literal");
  }
  if (s.back() != 'i' && s.back() != 'I') {
    return {parseReal(s, lineNo), 0.};
  }
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string realPart = "0";
  std::string imagPart = s;
  if (split != std::string::npos) {
    realPart = s.substr(0, split);
    imagPart = s.substr(split);
  }
  if (imagPart.empty() || imagPart == "+") {
    imagPart = "1";
  } else if (imagPart == "-") {
    imagPart = "-1";
  }
  return {parseReal(realPart, lineNo), parseReal(imagPart, lineNo)};
}

KrausChannel parseKrausList(const std::string& text, const std::size_t lineNo) {
  KrausChannel c{"custom", 1, {}};
  std::size_t i = 0;
  const auto skipSpace = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) != 0)) {
      ++i;
    }
  };
  skipSpace();
  while (i < text.size()) {
    if (text[i] != '(') {
      throw NoiseModelError(lineNo, "expected '(' in kraus=");
    }
    const auto close = text.find(')', i);
    if (close == std::string::npos) {
      throw NoiseModelError(lineNo, "missing ')' in kraus=");
    }
    const auto body = text.substr(i + 1, close - i - 1);
    std::vector<std::complex<fp>> op;
    std::istringstream items(body);
    std::string item;
    while (std::getline(items, item, ',')) {
      op.push_back(parseComplexLiteral(item, lineNo));
    }
    if (op.size() != 4 && op.size() != 16) {
      throw NoiseModelError(lineNo, "Kraus operator needs 4 or 16 entries, got " +
                                        std::to_string(op.size()));
    }
    c.ops.push_back(std::move(op));
    i = close + 1;
    skipSpace();
  }
  if (c.ops.empty()) {
    throw NoiseModelError(lineNo, "kraus= lists no operators");
  }
  const auto entries = c.ops.front().size();
  for (const auto& op : c.ops) {
    if (op.size() != entries) {
      throw NoiseModelError(lineNo, "Kraus operators of mixed size");
    }
  }
  c.arity = entries == 4 ? 1 : 2;
  return c;
}

} // namespace

NoiseModel parseNoiseModel(const std::string& text) {
  NoiseModel model;
  std::istringstream in(text);
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }

    std::string krausText;
    if (const auto kpos = line.find("kraus="); kpos != std::string::npos) {
      krausText = line.substr(kpos + 6);
      line.erase(kpos);
    }

    std::istringstream fields(line);
    std::string field;
    std::string name;
    std::optional<fp> p;
    std::optional<std::vector<Qubit>> on;
    std::optional<std::vector<std::string>> after;
    bool atEnd = false;
    while (fields >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) {
        throw NoiseModelError(lineNo, "expected key=value, got '" + field + "'");
      }
      const auto key = field.substr(0, eq);
      const auto value = field.substr(eq + 1);
      if (value.empty()) {
        throw NoiseModelError(lineNo, "empty value for '" + key + "'");
      }
      if (key == "channel") {
        name = value;
      } else if (key == "p") {
        p = parseReal(value, lineNo);
      } else if (key == "on") {
        if (value == "all") {
          on.reset();
        } else {
          std::vector<Qubit> qs;
          std::istringstream items(value);
          std::string item;
          while (std::getline(items, item, ',')) {
            try {
              std::size_t pos = 0;
              const auto q = std::stoul(item, &pos);
              if (pos != item.size()) {
                throw std::invalid_argument(item);
              }
              qs.push_back(static_cast<Qubit>(q));
            } catch (const std::exception&) {
              throw NoiseModelError(lineNo, "bad qubit index '" + item + "'");
            }
          }
          if (qs.empty()) {
            throw NoiseModelError(lineNo, "empty qubit list");
          }
          on = std::move(qs);
        }
      } else if (key == "after") {
        if (value == "all") {
          after.reset();
        } else if (value == "end") {
          atEnd = true;
        } else {
          std::vector<std::string> gates;
          std::istringstream items(value);
          std::string item;
          while (std::getline(items, item, ',')) {
            if (!item.empty()) {
              gates.push_back(item);
            }
          }
          if (gates.empty()) {
            throw NoiseModelError(lineNo, "empty gate list");
          }
          after = std::move(gates);
        }
      } else {
        throw NoiseModelError(lineNo, "unknown key '" + key + "'");
      }
    }

    if (name.empty() && !krausText.empty()) {
      throw NoiseModelError(lineNo, "kraus= requires channel=custom");
    }
    if (name.empty()) {
      continue; // blank or comment-only line
    }

    NoiseAttachment att;
    att.atEnd = atEnd;
    att.qubits = on;
    att.afterGates = after;

    if (name == "amplitude_damping" || name == "depolarizing" || name == "phase_flip") {
      if (!krausText.empty()) {
        throw NoiseModelError(lineNo, "kraus= requires channel=custom");
      }
      if (!p.has_value()) {
        throw NoiseModelError(lineNo, "channel '" + name + "' needs p=");
      }
      try {
        if (name == "amplitude_damping") {
          att.channel = amplitudeDamping(*p);
        } else if (name == "depolarizing") {
          att.channel = depolarizing(*p);
        } else {
          att.channel = phaseFlip(*p);
        }
      } catch (const std::invalid_argument& e) {
        throw NoiseModelError(lineNo, e.what());
      }
    } else if (name == "custom") {
      if (krausText.empty()) {
        throw NoiseModelError(lineNo, "channel=custom needs kraus=(...)(...)");
      }
      att.channel = parseKrausList(krausText, lineNo);
    } else {
      throw NoiseModelError(lineNo, "unknown channel '" + name + "'");
    }
    model.attachments.push_back(std::move(att));
  }
  return model;
}

Histogram stochasticSimulate(const QuantumCircuit& circuit, const NoiseModel& model,
                             const std::size_t shots, const std::uint64_t seed, unsigned workers) {
  validateModel(model);
  if (circuit.numQubits == 0) {
    throw std::invalid_argument("circuit has no qubits");
  }
  if (circuit.hasMeasurement()) {
    throw std::invalid_argument("stochastic noise simulation does not support mid-circuit measurement");
  }
  if (workers == 0) {
    workers = std::max(1U, std::thread::hardware_concurrency());
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(shots, 1)));

  const auto n = circuit.numQubits;

  // Each worker runs its shot range on its own manager; per-shot seeds make
  // the merged histogram independent of the worker count.
  const auto runShots = [&](const std::size_t first, const std::size_t last, Histogram& hist) {
    Manager mgr;
    for (std::size_t shot = first; shot < last; ++shot) {
      std::mt19937_64 rng(splitmix64(seed, shot));
      std::uniform_real_distribution<fp> uniform(0., 1.);

      StateDD state = basisState(mgr, n, 0);
      const auto fire = [&](const NoiseAttachment& att, const GateOp* op) {
        fireAttachment(att, op, n, [&](const std::vector<Qubit>& qs) {
          // pick a Kraus branch with its exact probability |Ei phi|^2
          const auto u = uniform(rng);
          std::vector<StateDD> branches;
          std::vector<fp> probs;
          fp total = 0.;
          branches.reserve(att.channel.ops.size());
          for (const auto& kop : att.channel.ops) {
            const auto lifted = liftKraus(mgr, n, kop, qs);
            StateDD cand{mgr.multiply(lifted, state.root), n};
            const auto prob = mgr.innerProduct(cand.root, cand.root).real();
            branches.push_back(cand);
            probs.push_back(prob);
            total += prob;
          }
          std::size_t pick = 0;
          fp cum = 0.;
          for (std::size_t i = 0; i < probs.size(); ++i) {
            cum += probs[i];
            if (u * total < cum) {
              pick = i;
              break;
            }
            pick = i;
          }
          if (probs[pick] <= 0.) {
            pick = static_cast<std::size_t>(
                std::max_element(probs.begin(), probs.end()) - probs.begin());
          }
          const auto scale = 1. / std::sqrt(probs[pick]);
          state = {{branches[pick].root.node,
                    mgr.intern(branches[pick].root.w->value() * scale)},
                   n};
        });
      };

      for (const auto& op : circuit.ops) {
        if (op.kind == GateKind::Barrier) {
          continue;
        }
        const auto u = gateOperator(mgr, n, op);
        state = {mgr.multiply(u.root, state.root), n};
        for (const auto& att : model.attachments) {
          if (triggers(att, op)) {
            fire(att, &op);
          }
        }
      }
      for (const auto& att : model.attachments) {
        if (att.atEnd) {
          fire(att, nullptr);
        }
      }

      const auto outcome = measureAll(mgr, state, rng);
      ++hist[bitstring(outcome, n)];

      if ((shot + 1) % 1024 == 0) {
        mgr.collectGarbage();
      }
    }
  };

  if (workers == 1) {
    Histogram hist;
    runShots(0, shots, hist);
    return hist;
  }

  std::vector<Histogram> parts(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const auto chunk = (shots + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const auto first = std::min<std::size_t>(shots, static_cast<std::size_t>(w) * chunk);
    const auto last = std::min<std::size_t>(shots, first + chunk);
    threads.emplace_back([&, first, last, w] { runShots(first, last, parts[w]); });
  }
  for (auto& t : threads) {
    t.join();
  }
  Histogram merged;
  for (const auto& part : parts) {
    for (const auto& [key, count] : part) {
      merged[key] += count;
    }
  }
  return merged;
}

} // namespace dd
