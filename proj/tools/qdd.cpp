// qdd: simulate, noise-simulate, verify, and render quantum circuits with
// decision diagrams. JSON reports on stdout, diagnostics on stderr.

#include "CLI11.hpp"
#include "json.hpp"

#include "dd/Dot.hpp"
#include "dd/Equivalence.hpp"
#include "dd/Noise.hpp"
#include "dd/Qasm.hpp"
#include "dd/Simulator.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

constexpr int exitOk = 0;
constexpr int exitNonEquivalent = 1;
constexpr int exitParse = 2;
constexpr int exitLimit = 3;
constexpr int exitChannel = 4;
constexpr int exitUsage = 64;
constexpr int exitInternal = 70;

constexpr std::size_t amplitudeLimit = 20; // qubits
constexpr std::size_t dotLimit = 12;       // qubits

struct Limit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf.data();
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Limit("cannot read '" + path + "'"); // caught and mapped below
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct LoadedCircuit {
  dd::QuantumCircuit circuit;
  Json input;
};

/// parse or die with diagnostics on stderr (exit 2)
LoadedCircuit loadCircuit(const std::string& path) {
  std::string text;
  try {
    text = readFile(path);
  } catch (const Limit& e) {
    std::cerr << e.what() << "\n";
    std::exit(exitParse);
  }
  auto parsed = dd::parseQasm(text);
  if (!parsed.ok()) {
    for (const auto& d : parsed.diagnostics) {
      std::cerr << path << ":" << d.line << ":" << d.column << ": "
                << (d.severity == dd::Severity::Error ? "error" : "warning") << ": " << d.message
                << "\n";
    }
    std::exit(exitParse);
  }
  return {std::move(*parsed.circuit), Json{{"path", path}, {"digest", fnv1a(text)}}};
}

Json engineInfo(const dd::Manager& mgr) {
  return Json{
      {"normalization",
       mgr.config().vectorScheme == dd::VectorNormScheme::L2 ? "l2" : "leftmost"},
      {"tolerance", mgr.tolerance()},
      {"rng", dd::rngAlgorithm},
      {"live_vector_nodes", mgr.liveVectorNodes()},
      {"live_matrix_nodes", mgr.liveMatrixNodes()},
      {"complex_table", mgr.complexTableSize()},
  };
}

Json histogramJson(const dd::Histogram& hist, const std::size_t shots) {
  Json counts = Json::object();
  for (const auto& [key, count] : hist) {
    counts[key] = count;
  }
  return Json{{"type", "histogram"}, {"shots", shots}, {"counts", std::move(counts)}};
}

class Stopwatch {
public:
  [[nodiscard]] double ms() const {
    const auto dt = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(dt).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void printReport(const std::string& command, const Json& inputs, const std::uint64_t seed,
                 const double wallMs, const Json& engine, const Json& result) {
  const Json report{
      {"schema", 1},        {"command", command}, {"inputs", inputs}, {"seed", seed},
      {"wall_time_ms", wallMs}, {"engine", engine},   {"result", result},
  };
  std::cout << report.dump(2) << "\n";
}

/// msb-first bitstring -> basis index; X gates prepended realize it
std::uint64_t parseInitial(const std::string& bits, const std::size_t numQubits) {
  if (bits.size() != numQubits) {
    std::cerr << "initial state has " << bits.size() << " bits but the circuit has " << numQubits
              << " qubits\n";
    std::exit(exitParse);
  }
  std::uint64_t index = 0;
  for (const auto c : bits) {
    if (c != '0' && c != '1') {
      std::cerr << "initial state must be a bitstring of 0s and 1s\n";
      std::exit(exitUsage);
    }
    index = (index << 1U) | static_cast<std::uint64_t>(c == '1');
  }
  return index;
}

int cmdSim(const std::string& circuitPath, const std::size_t shots, const std::uint64_t seed,
           const std::string& initial, const bool amplitudes, const std::string& scheme) {
  auto [circuit, input] = loadCircuit(circuitPath);

  dd::ManagerConfig config;
  config.vectorScheme =
      scheme == "leftmost" ? dd::VectorNormScheme::Leftmost : dd::VectorNormScheme::L2;
  dd::Manager mgr(config);

  std::uint64_t initialIndex = 0;
  if (!initial.empty()) {
    initialIndex = parseInitial(initial, circuit.numQubits);
  }

  const Stopwatch watch;
  Json result;
  if (amplitudes) {
    if (circuit.numQubits > amplitudeLimit) {
      throw Limit("amplitude dump is limited to " + std::to_string(amplitudeLimit) + " qubits");
    }
    const auto state =
        dd::simulate(mgr, circuit, dd::basisState(mgr, circuit.numQubits, initialIndex));
    const auto amps = dd::toAmplitudes(mgr, state);
    Json list = Json::array();
    for (const auto& a : amps) {
      list.push_back(Json::array({a.real(), a.imag()}));
    }
    result = Json{{"type", "amplitudes"},
                  {"num_qubits", circuit.numQubits},
                  {"nodes", dd::nodeCount(mgr, state)},
                  {"amplitudes", std::move(list)}};
  } else {
    auto prepared = circuit;
    if (initialIndex != 0) {
      std::vector<dd::GateOp> prefix;
      for (std::size_t q = 0; q < circuit.numQubits; ++q) {
        if ((initialIndex >> q & 1ULL) != 0) {
          dd::GateOp x;
          x.kind = dd::GateKind::X;
          x.targets.push_back(static_cast<dd::Qubit>(q));
          prefix.push_back(std::move(x));
        }
      }
      prepared.ops.insert(prepared.ops.begin(), prefix.begin(), prefix.end());
    }
    const auto hist = dd::sample(mgr, prepared, shots, seed);
    result = histogramJson(hist, shots);
  }
  printReport("sim", Json::array({input}), seed, watch.ms(), engineInfo(mgr), result);
  return exitOk;
}

int cmdNoise(const std::string& circuitPath, const std::string& modelPath,
             const std::string& mode, const std::size_t shots, const std::uint64_t seed,
             const unsigned workers) {
  auto [circuit, input] = loadCircuit(circuitPath);

  std::string modelText;
  try {
    modelText = readFile(modelPath);
  } catch (const Limit& e) {
    std::cerr << e.what() << "\n";
    return exitParse;
  }
  dd::NoiseModel model;
  try {
    model = dd::parseNoiseModel(modelText);
  } catch (const dd::NoiseModelError& e) {
    std::cerr << modelPath << ": " << e.what() << "\n";
    return exitParse;
  }
  const Json inputs =
      Json::array({input, Json{{"path", modelPath}, {"digest", fnv1a(modelText)}}});

  const Stopwatch watch;
  if (mode == "deterministic") {
    dd::Manager mgr;
    const auto rho = dd::deterministicSimulate(mgr, circuit, model);
    const auto probs = dd::diagonalProbabilities(mgr, rho);
    const Json result{{"type", "probabilities"},
                      {"trace", dd::traceOf(mgr, rho)},
                      {"probabilities", probs}};
    printReport("noise", inputs, seed, watch.ms(), engineInfo(mgr), result);
    return exitOk;
  }
  const auto hist = dd::stochasticSimulate(circuit, model, shots, seed, workers);
  dd::Manager meta; // the workers' managers are gone; report defaults
  printReport("noise", inputs, seed, watch.ms(), engineInfo(meta), histogramJson(hist, shots));
  return exitOk;
}

int cmdVerify(const std::string& pathA, const std::string& pathB, const std::string& method,
              const std::string& strategyName, const std::size_t stimuli, const double epsilon,
              const std::uint64_t seed) {
  auto [circuitA, inputA] = loadCircuit(pathA);
  auto [circuitB, inputB] = loadCircuit(pathB);
  if (circuitA.numQubits != circuitB.numQubits) {
    std::cerr << "circuits act on different qubit counts (" << circuitA.numQubits << " vs "
              << circuitB.numQubits << ")\n";
    return exitParse;
  }

  dd::Strategy strategy = dd::Strategy::Proportional;
  if (strategyName == "naive") {
    strategy = dd::Strategy::Naive;
  } else if (strategyName == "one2one") {
    strategy = dd::Strategy::OneToOne;
  } else if (strategyName == "barrier") {
    strategy = dd::Strategy::BarrierGuided;
  }

  const Stopwatch watch;
  dd::Manager mgr;
  dd::EquivalenceResult res;
  if (method == "construct") {
    res = dd::checkConstruct(mgr, circuitA, circuitB);
  } else if (method == "simulate") {
    res = dd::checkSimulation(circuitA, circuitB, stimuli, seed, epsilon);
  } else {
    res = dd::checkAlternating(mgr, circuitA, circuitB, strategy);
  }

  Json result{{"type", "verdict"}, {"verdict", std::string(dd::verdictName(res.verdict))}};
  if (res.globalPhase.has_value()) {
    result["global_phase"] = *res.globalPhase;
  }
  if (res.counterexample.has_value()) {
    result["counterexample"] =
        Json{{"basis_index", res.counterexample->basisIndex},
             {"fidelity", res.counterexample->fidelity}};
  }
  result["stats"] = Json{{"peak_nodes", res.stats.peakNodes},
                         {"left_applications", res.stats.leftApplications},
                         {"right_applications", res.stats.rightApplications},
                         {"stimuli_checked", res.stats.stimuliChecked}};
  printReport("verify", Json::array({inputA, inputB}), seed, watch.ms(), engineInfo(mgr), result);
  return res.verdict == dd::Verdict::NonEquivalent ? exitNonEquivalent : exitOk;
}

int cmdDot(const std::string& circuitPath, const bool matrix, const std::string& outPath) {
  auto [circuit, input] = loadCircuit(circuitPath);
  if (circuit.numQubits > dotLimit) {
    throw Limit("dot rendering is limited to " + std::to_string(dotLimit) + " qubits");
  }

  const Stopwatch watch;
  dd::Manager mgr;
  std::string dot;
  std::size_t nodes = 0;
  if (matrix) {
    const auto u = dd::systemMatrix(mgr, circuit);
    dot = dd::toDot(u);
    nodes = dd::nodeCount(mgr, u);
  } else {
    const auto s = dd::simulate(mgr, circuit);
    dot = dd::toDot(s);
    nodes = dd::nodeCount(mgr, s);
  }

  std::ofstream out(outPath, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write '" << outPath << "'\n";
    return exitInternal;
  }
  out << dot;
  out.close();

  const Json result{{"type", "dot"}, {"path", outPath}, {"nodes", nodes}};
  printReport("dot", Json::array({input}), 0, watch.ms(), engineInfo(mgr), result);
  return exitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"decision-diagram engine for quantum circuits"};
  app.require_subcommand(1);

  std::string circuitPath;
  std::string circuitPathB;
  std::string modelPath;
  std::string outPath;
  std::string initial;
  std::string scheme = "l2";
  std::string mode = "stochastic";
  std::string method = "alternate";
  std::string strategy = "proportional";
  std::size_t shots = 1024;
  std::size_t stimuli = 16;
  std::uint64_t seed = 0;
  double epsilon = 1e-10;
  unsigned workers = 1;
  bool amplitudes = false;
  bool matrix = false;
  bool state = false;

  auto* sim = app.add_subcommand("sim", "simulate a circuit");
  sim->add_option("circuit", circuitPath, "OpenQASM file")->required();
  sim->add_option("--shots", shots, "number of samples");
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--initial", initial, "initial basis state, msb-first bitstring");
  sim->add_flag("--amplitudes", amplitudes, "dump the final amplitudes instead of sampling");
  sim->add_option("--scheme", scheme, "vector normalization scheme")
      ->check(CLI::IsMember({"l2", "leftmost"}));

  auto* noise = app.add_subcommand("noise", "simulate a circuit under a noise model");
  noise->add_option("circuit", circuitPath, "OpenQASM file")->required();
  noise->add_option("--model", modelPath, "noise model file")->required();
  noise->add_option("--mode", mode, "simulation mode")
      ->check(CLI::IsMember({"stochastic", "deterministic"}));
  noise->add_option("--shots", shots, "number of samples (stochastic)");
  noise->add_option("--seed", seed, "RNG seed");
  noise->add_option("--workers", workers, "worker threads (stochastic); 0 = all cores");

  auto* verify = app.add_subcommand("verify", "check two circuits for equivalence");
  verify->add_option("circuit_a", circuitPath, "first OpenQASM file")->required();
  verify->add_option("circuit_b", circuitPathB, "second OpenQASM file")->required();
  verify->add_option("--method", method, "checking method")
      ->check(CLI::IsMember({"construct", "alternate", "simulate"}));
  verify->add_option("--strategy", strategy, "alternation strategy")
      ->check(CLI::IsMember({"naive", "one2one", "proportional", "barrier"}));
  verify->add_option("--stimuli", stimuli, "random basis stimuli (simulate)");
  verify->add_option("--epsilon", epsilon, "fidelity tolerance (simulate)");
  verify->add_option("--seed", seed, "RNG seed");

  auto* dot = app.add_subcommand("dot", "render a decision diagram as DOT");
  dot->add_option("circuit", circuitPath, "OpenQASM file")->required();
  auto* stateFlag = dot->add_flag("--state", state, "render the final state DD (default)");
  dot->add_flag("--matrix", matrix, "render the system matrix DD")->excludes(stateFlag);
  dot->add_option("-o,--output", outPath, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exitUsage;
  }

  try {
    if (sim->parsed()) {
      return cmdSim(circuitPath, shots, seed, initial, amplitudes, scheme);
    }
    if (noise->parsed()) {
      return cmdNoise(circuitPath, modelPath, mode, shots, seed, workers);
    }
    if (verify->parsed()) {
      return cmdVerify(circuitPath, circuitPathB, method, strategy, stimuli, epsilon, seed);
    }
    if (dot->parsed()) {
      return cmdDot(circuitPath, matrix, outPath);
    }
  } catch (const Limit& e) {
    std::cerr << e.what() << "\n";
    return exitLimit;
  } catch (const std::length_error& e) {
    std::cerr << e.what() << "\n";
    return exitLimit;
  } catch (const dd::ChannelError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "max deviation: " << e.validation.maxDeviation << "\n";
    return exitChannel;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return exitParse;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return exitInternal;
  }
  return exitUsage;
}
