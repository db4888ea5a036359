#include "dd/Qasm.hpp"

#include "dd/Equivalence.hpp"
#include "dd/Gates.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>

namespace dd {

namespace {

constexpr std::size_t maxQubits = 4096;
constexpr std::size_t maxClassical = 64;
constexpr std::size_t maxDiagnostics = 100;
constexpr int maxExprDepth = 128;

enum class Tok : std::uint8_t {
  Ident,
  Number,
  String,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Comma,
  Semicolon,
  Arrow,
  Plus,
  Minus,
  Star,
  Slash,
  Unknown,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> scan(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t col = 1;
  const auto advance = [&](const std::size_t k) {
    for (std::size_t j = 0; j < k && i < src.size(); ++j, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const auto c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c) != 0) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') {
        advance(1);
      }
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(c) != 0 || c == '_') {
      const auto start = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) != 0 || src[i] == '_')) {
        advance(1);
      }
      t.kind = Tok::Ident;
      t.text = src.substr(start, i - start);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(c) != 0 || (c == '.' && i + 1 < src.size() &&
                                 std::isdigit(static_cast<unsigned char>(src[i + 1])) != 0)) {
      const auto start = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])) != 0) {
        advance(1);
      }
      if (i < src.size() && src[i] == '.') {
        advance(1);
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])) != 0) {
          advance(1);
        }
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        auto j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) {
          ++j;
        }
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])) != 0) {
          advance(j - i);
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])) != 0) {
            advance(1);
          }
        }
      }
      t.kind = Tok::Number;
      t.text = src.substr(start, i - start);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      advance(1);
      const auto start = i;
      while (i < src.size() && src[i] != '"' && src[i] != '\n') {
        advance(1);
      }
      t.kind = Tok::String;
      t.text = src.substr(start, i - start);
      if (i < src.size() && src[i] == '"') {
        advance(1);
      }
      out.push_back(std::move(t));
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      t.kind = Tok::Arrow;
      t.text = "->";
      advance(2);
      out.push_back(std::move(t));
      continue;
    }
    switch (c) {
    case '[':
      t.kind = Tok::LBracket;
      break;
    case ']':
      t.kind = Tok::RBracket;
      break;
    case '(':
      t.kind = Tok::LParen;
      break;
    case ')':
      t.kind = Tok::RParen;
      break;
    case ',':
      t.kind = Tok::Comma;
      break;
    case ';':
      t.kind = Tok::Semicolon;
      break;
    case '+':
      t.kind = Tok::Plus;
      break;
    case '-':
      t.kind = Tok::Minus;
      break;
    case '*':
      t.kind = Tok::Star;
      break;
    case '/':
      t.kind = Tok::Slash;
      break;
    default:
      t.kind = Tok::Unknown;
      break;
    }
    t.text = src.substr(i, 1);
    advance(1);
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(std::move(end));
  return out;
}

struct GateSig {
  GateKind kind = GateKind::I;
  std::size_t params = 0;
  std::size_t args = 1;
  std::size_t controls = 0;
};

const std::map<std::string, GateSig, std::less<>>& gateTable() {
  static const std::map<std::string, GateSig, std::less<>> table = {
      {"id", {GateKind::I, 0, 1, 0}},      {"x", {GateKind::X, 0, 1, 0}},
      {"y", {GateKind::Y, 0, 1, 0}},       {"z", {GateKind::Z, 0, 1, 0}},
      {"h", {GateKind::H, 0, 1, 0}},       {"s", {GateKind::S, 0, 1, 0}},
      {"sdg", {GateKind::Sdg, 0, 1, 0}},   {"t", {GateKind::T, 0, 1, 0}},
      {"tdg", {GateKind::Tdg, 0, 1, 0}},   {"rx", {GateKind::Rx, 1, 1, 0}},
      {"ry", {GateKind::Ry, 1, 1, 0}},     {"rz", {GateKind::Rz, 1, 1, 0}},
      {"u1", {GateKind::Phase, 1, 1, 0}},  {"p", {GateKind::Phase, 1, 1, 0}},
      {"cx", {GateKind::X, 0, 2, 1}},      {"cz", {GateKind::Z, 0, 2, 1}},
      {"cp", {GateKind::Phase, 1, 2, 1}},  {"swap", {GateKind::Swap, 0, 2, 0}},
      {"ccx", {GateKind::X, 0, 3, 2}},
  };
  return table;
}

class Parser {
public:
  explicit Parser(const std::string& source) : tokens_(scan(source)) {}

  ParseResult run() {
    while (!atEnd() && !tooManyErrors()) {
      statement();
    }
    ParseResult result;
    result.diagnostics = std::move(diags_);
    const auto hasError =
        std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                    [](const Diagnostic& d) { return d.severity == Severity::Error; });
    if (!hasError) {
      circuit_.numQubits = qregSize_;
      circuit_.numClassical = cregSize_;
      result.circuit = std::move(circuit_);
    }
    return result;
  }

private:
  [[nodiscard]] const Token& peek() const { return tokens_[pos_]; }
  [[nodiscard]] bool atEnd() const { return peek().kind == Tok::End; }
  const Token& next() {
    const auto& t = tokens_[pos_];
    if (!atEnd()) {
      ++pos_;
    }
    return t;
  }
  [[nodiscard]] bool tooManyErrors() const { return diags_.size() >= maxDiagnostics; }

  void error(const Token& at, std::string message) {
    if (diags_.size() < maxDiagnostics) {
      diags_.push_back({at.line, at.column, Severity::Error, std::move(message)});
    }
  }

  /// after an error: resynchronize past the next ';'
  void recover() {
    while (!atEnd() && peek().kind != Tok::Semicolon) {
      ++pos_;
    }
    if (!atEnd()) {
      ++pos_;
    }
  }

  bool expect(const Tok kind, const char* what) {
    if (peek().kind == kind) {
      ++pos_;
      return true;
    }
    error(peek(), std::string("expected ") + what);
    return false;
  }

  void statement() {
    const auto& t = peek();
    if (t.kind == Tok::Semicolon) { // empty statement
      ++pos_;
      return;
    }
    if (t.kind != Tok::Ident) {
      error(t, "expected a statement");
      recover();
      return;
    }
    if (t.text == "OPENQASM") {
      ++pos_;
      if (peek().kind == Tok::Number) {
        ++pos_;
      }
      if (!expect(Tok::Semicolon, "';'")) {
        recover();
      }
      return;
    }
    if (t.text == "include") {
      ++pos_;
      if (peek().kind == Tok::String) {
        ++pos_;
      } else {
        error(peek(), "expected a file name");
      }
      if (!expect(Tok::Semicolon, "';'")) {
        recover();
      }
      return;
    }
    if (t.text == "qreg") {
      registerDecl(true);
      return;
    }
    if (t.text == "creg") {
      registerDecl(false);
      return;
    }
    if (t.text == "barrier") {
      barrierStmt();
      return;
    }
    if (t.text == "measure") {
      measureStmt();
      return;
    }
    if (gateTable().count(t.text) > 0) {
      gateStmt();
      return;
    }
    error(t, "unknown statement '" + t.text + "'");
    recover();
  }

  void registerDecl(const bool quantum) {
    ++pos_; // qreg/creg
    const auto& nameTok = peek();
    if (nameTok.kind != Tok::Ident) {
      error(nameTok, "expected a register name");
      recover();
      return;
    }
    ++pos_;
    std::size_t size = 0;
    if (!expect(Tok::LBracket, "'['")) {
      recover();
      return;
    }
    const auto& sizeTok = peek();
    if (sizeTok.kind != Tok::Number || sizeTok.text.find_first_of(".eE") != std::string::npos) {
      error(sizeTok, "expected a register size");
      recover();
      return;
    }
    ++pos_;
    try {
      size = std::stoull(sizeTok.text);
    } catch (const std::exception&) {
      error(sizeTok, "register size out of range");
      recover();
      return;
    }
    if (!expect(Tok::RBracket, "']'") || !expect(Tok::Semicolon, "';'")) {
      recover();
      return;
    }
    if (size == 0) {
      error(sizeTok, "register must hold at least one bit");
      return;
    }
    if (quantum) {
      if (!qregName_.empty()) {
        error(nameTok, "only a single quantum register is supported");
        return;
      }
      if (size > maxQubits) {
        error(sizeTok, "quantum register larger than " + std::to_string(maxQubits) + " qubits");
        return;
      }
      qregName_ = nameTok.text;
      qregSize_ = size;
    } else {
      if (!cregName_.empty()) {
        error(nameTok, "only a single classical register is supported");
        return;
      }
      if (size > maxClassical) {
        error(sizeTok, "classical register larger than " + std::to_string(maxClassical) + " bits");
        return;
      }
      cregName_ = nameTok.text;
      cregSize_ = size;
    }
  }

  /// `name[index]` resolved against the declared register
  std::optional<Qubit> indexedArg(const std::string& regName, const std::size_t regSize,
                                  const char* regWhat) {
    const auto& nameTok = peek();
    if (nameTok.kind != Tok::Ident) {
      error(nameTok, std::string("expected a ") + regWhat + " argument");
      return std::nullopt;
    }
    ++pos_;
    if (nameTok.text != regName) {
      error(nameTok, "unknown register '" + nameTok.text + "'");
      return std::nullopt;
    }
    if (!expect(Tok::LBracket, "'['")) {
      return std::nullopt;
    }
    const auto& idxTok = peek();
    if (idxTok.kind != Tok::Number || idxTok.text.find_first_of(".eE") != std::string::npos) {
      error(idxTok, "expected an index");
      return std::nullopt;
    }
    ++pos_;
    std::uint64_t idx = 0;
    try {
      idx = std::stoull(idxTok.text);
    } catch (const std::exception&) {
      error(idxTok, "index out of range");
      return std::nullopt;
    }
    if (!expect(Tok::RBracket, "']'")) {
      return std::nullopt;
    }
    if (idx >= regSize) {
      error(idxTok, std::string(regWhat) + " index out of range");
      return std::nullopt;
    }
    return static_cast<Qubit>(idx);
  }

  bool requireQreg(const Token& at) {
    if (qregName_.empty()) {
      error(at, "no quantum register declared");
      recover();
      return false;
    }
    return true;
  }

  void barrierStmt() {
    const auto& kw = peek();
    ++pos_;
    if (!requireQreg(kw)) {
      return;
    }
    GateOp op;
    op.kind = GateKind::Barrier;
    if (peek().kind == Tok::Ident && peek().text == qregName_ &&
        tokens_[pos_ + 1].kind != Tok::LBracket) {
      ++pos_; // bare register: barrier spans everything
    } else {
      while (true) {
        const auto q = indexedArg(qregName_, qregSize_, "qubit");
        if (!q.has_value()) {
          recover();
          return;
        }
        op.targets.push_back(*q);
        if (peek().kind != Tok::Comma) {
          break;
        }
        ++pos_;
      }
    }
    if (!expect(Tok::Semicolon, "';'")) {
      recover();
      return;
    }
    circuit_.ops.push_back(std::move(op));
  }

  void measureStmt() {
    const auto& kw = peek();
    ++pos_;
    if (!requireQreg(kw)) {
      return;
    }
    if (cregName_.empty()) {
      error(kw, "no classical register declared");
      recover();
      return;
    }
    const auto q = indexedArg(qregName_, qregSize_, "qubit");
    if (!q.has_value()) {
      recover();
      return;
    }
    if (!expect(Tok::Arrow, "'->'")) {
      recover();
      return;
    }
    const auto c = indexedArg(cregName_, cregSize_, "classical bit");
    if (!c.has_value()) {
      recover();
      return;
    }
    if (!expect(Tok::Semicolon, "';'")) {
      recover();
      return;
    }
    GateOp op;
    op.kind = GateKind::Measure;
    op.targets.push_back(*q);
    op.cbit = *c;
    circuit_.ops.push_back(std::move(op));
  }

  void gateStmt() {
    const auto nameTok = peek();
    ++pos_;
    const auto& sig = gateTable().find(nameTok.text)->second;
    if (!requireQreg(nameTok)) {
      return;
    }

    GateOp op;
    op.kind = sig.kind;
    if (peek().kind == Tok::LParen) {
      if (sig.params == 0) {
        error(peek(), "'" + nameTok.text + "' takes no parameters");
        recover();
        return;
      }
      ++pos_;
      const auto angle = expression(0);
      if (!angle.has_value()) {
        recover();
        return;
      }
      op.angle = *angle;
      if (!expect(Tok::RParen, "')'")) {
        recover();
        return;
      }
    } else if (sig.params > 0) {
      error(peek(), "'" + nameTok.text + "' needs an angle parameter");
      recover();
      return;
    }

    std::vector<Qubit> args;
    while (true) {
      const auto q = indexedArg(qregName_, qregSize_, "qubit");
      if (!q.has_value()) {
        recover();
        return;
      }
      args.push_back(*q);
      if (peek().kind != Tok::Comma) {
        break;
      }
      ++pos_;
    }
    if (!expect(Tok::Semicolon, "';'")) {
      recover();
      return;
    }
    if (args.size() != sig.args) {
      error(nameTok, "'" + nameTok.text + "' expects " + std::to_string(sig.args) +
                         " qubit argument(s), got " + std::to_string(args.size()));
      return;
    }
    for (std::size_t a = 0; a < args.size(); ++a) {
      for (std::size_t b = a + 1; b < args.size(); ++b) {
        if (args[a] == args[b]) {
          error(nameTok, "duplicate qubit argument");
          return;
        }
      }
    }
    op.controls.assign(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sig.controls));
    op.targets.assign(args.begin() + static_cast<std::ptrdiff_t>(sig.controls), args.end());
    circuit_.ops.push_back(std::move(op));
  }

  // expr := term (('+'|'-') term)*
  std::optional<fp> expression(const int depth) {
    if (depth > maxExprDepth) {
      error(peek(), "angle expression too deeply nested");
      return std::nullopt;
    }
    auto lhs = term(depth + 1);
    if (!lhs.has_value()) {
      return std::nullopt;
    }
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const auto op = next().kind;
      const auto rhs = term(depth + 1);
      if (!rhs.has_value()) {
        return std::nullopt;
      }
      lhs = op == Tok::Plus ? *lhs + *rhs : *lhs - *rhs;
    }
    return lhs;
  }

  // term := unary (('*'|'/') unary)*
  std::optional<fp> term(const int depth) {
    if (depth > maxExprDepth) {
      error(peek(), "angle expression too deeply nested");
      return std::nullopt;
    }
    auto lhs = unary(depth + 1);
    if (!lhs.has_value()) {
      return std::nullopt;
    }
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const auto op = next();
      const auto rhs = unary(depth + 1);
      if (!rhs.has_value()) {
        return std::nullopt;
      }
      if (op.kind == Tok::Slash) {
        if (*rhs == 0.) {
          error(op, "division by zero in angle expression");
          return std::nullopt;
        }
        lhs = *lhs / *rhs;
      } else {
        lhs = *lhs * *rhs;
      }
    }
    return lhs;
  }

  std::optional<fp> unary(const int depth) {
    if (depth > maxExprDepth) {
      error(peek(), "angle expression too deeply nested");
      return std::nullopt;
    }
    if (peek().kind == Tok::Minus) {
      ++pos_;
      const auto v = unary(depth + 1);
      return v.has_value() ? std::optional<fp>(-*v) : std::nullopt;
    }
    if (peek().kind == Tok::Plus) {
      ++pos_;
      return unary(depth + 1);
    }
    const auto& t = peek();
    if (t.kind == Tok::Number) {
      ++pos_;
      try {
        return std::stod(t.text);
      } catch (const std::exception&) {
        error(t, "number out of range");
        return std::nullopt;
      }
    }
    if (t.kind == Tok::Ident && t.text == "pi") {
      ++pos_;
      return std::numbers::pi_v<fp>;
    }
    if (t.kind == Tok::LParen) {
      ++pos_;
      const auto v = expression(depth + 1);
      if (!v.has_value()) {
        return std::nullopt;
      }
      if (!expect(Tok::RParen, "')'")) {
        return std::nullopt;
      }
      return v;
    }
    error(t, "expected a number, 'pi', or '('");
    return std::nullopt;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
  QuantumCircuit circuit_;
  std::string qregName_;
  std::size_t qregSize_ = 0;
  std::string cregName_;
  std::size_t cregSize_ = 0;
};

std::string formatAngle(const fp angle) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", angle);
  return buf.data();
}

} // namespace

ParseResult parseQasm(const std::string& source) { return Parser(source).run(); }

std::string serializeQasm(const QuantumCircuit& c) {
  std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out += "qreg q[" + std::to_string(c.numQubits) + "];\n";
  if (c.numClassical > 0) {
    out += "creg c[" + std::to_string(c.numClassical) + "];\n";
  }
  for (const auto& op : c.ops) {
    if (op.kind == GateKind::Barrier) {
      if (op.targets.empty()) {
        out += "barrier q;\n";
        continue;
      }
      out += "barrier ";
      for (std::size_t i = 0; i < op.targets.size(); ++i) {
        out += (i > 0 ? "," : "");
        out += "q[" + std::to_string(op.targets[i]) + "]";
      }
      out += ";\n";
      continue;
    }
    if (op.kind == GateKind::Measure) {
      out += "measure q[" + std::to_string(op.targets[0]) + "] -> c[" +
             std::to_string(op.cbit) + "];\n";
      continue;
    }
    out += std::string(op.controls.size(), 'c');
    out += gateName(op.kind);
    if (hasAngle(op.kind)) {
      out += "(" + formatAngle(op.angle) + ")";
    }
    out += " ";
    bool first = true;
    for (const auto q : op.controls) {
      out += (first ? "" : ",");
      out += "q[" + std::to_string(q) + "]";
      first = false;
    }
    for (const auto q : op.targets) {
      out += (first ? "" : ",");
      out += "q[" + std::to_string(q) + "]";
      first = false;
    }
    out += ";\n";
  }
  return out;
}

QuantumCircuit invertCircuit(const QuantumCircuit& c) {
  QuantumCircuit inv;
  inv.numQubits = c.numQubits;
  inv.numClassical = c.numClassical;
  inv.ops.reserve(c.ops.size());
  for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) {
    if (it->kind == GateKind::Measure) {
      throw std::invalid_argument("cannot invert a circuit with measurements");
    }
    inv.ops.push_back(it->kind == GateKind::Barrier ? *it : invertGate(*it));
  }
  return inv;
}

} // namespace dd
