#include "crnlab/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

namespace crnlab {

ParseError::ParseError(std::string source_name, std::size_t line, std::size_t column, std::string message,
                       std::string token)
    : std::runtime_error(source_name + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                         message + (token.empty() ? std::string() : " near '" + token + "'")),
      source_name_(std::move(source_name)),
      line_(line),
      column_(column),
      message_(std::move(message)),
      token_(std::move(token)) {}

namespace {

enum class Tok { Ident, Integer, Number, Arrow, BiArrow, Plus, At, Comma, Directive, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t column = 0;  // 1-based
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class LineParser {
 public:
  LineParser(const std::string& source_name, std::size_t line_no, std::string_view line)
      : name_(source_name), line_no_(line_no) {
    tokenize(line);
  }

  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }
  bool empty() const { return tokens_.size() == 1; }

  [[noreturn]] void fail(const Token& t, const std::string& message) const {
    throw ParseError(name_, line_no_, t.column, message, t.text);
  }

  Token expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(peek(), "expected " + what);
    return next();
  }

 private:
  void tokenize(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      const std::size_t col = i + 1;
      if (c == '#') break;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (ident_start(c)) {
        std::size_t j = i;
        while (j < line.size() && ident_char(line[j])) ++j;
        tokens_.push_back({Tok::Ident, std::string(line.substr(i, j - i)), col});
        i = j;
        continue;
      }
      if (c == '%') {
        std::size_t j = i + 1;
        while (j < line.size() && ident_char(line[j])) ++j;
        tokens_.push_back({Tok::Directive, std::string(line.substr(i, j - i)), col});
        i = j;
        continue;
      }
      if (digit(c) || (c == '.' && i + 1 < line.size() && digit(line[i + 1]))) {
        std::size_t j = i;
        bool decimal = false;
        while (j < line.size() && digit(line[j])) ++j;
        if (j < line.size() && line[j] == '.') {
          decimal = true;
          ++j;
          while (j < line.size() && digit(line[j])) ++j;
        }
        if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
          if (k < line.size() && digit(line[k])) {
            decimal = true;
            j = k;
            while (j < line.size() && digit(line[j])) ++j;
          }
        }
        tokens_.push_back({decimal ? Tok::Number : Tok::Integer, std::string(line.substr(i, j - i)), col});
        i = j;
        continue;
      }
      if (line.substr(i, 3) == "<->") {
        tokens_.push_back({Tok::BiArrow, "<->", col});
        i += 3;
        continue;
      }
      if (line.substr(i, 2) == "->") {
        tokens_.push_back({Tok::Arrow, "->", col});
        i += 2;
        continue;
      }
      if (c == '+' || c == '@' || c == ',') {
        tokens_.push_back({c == '+' ? Tok::Plus : c == '@' ? Tok::At : Tok::Comma, std::string(1, c), col});
        ++i;
        continue;
      }
      // Unknown token: report the run of non-space characters.
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      throw ParseError(name_, line_no_, col, "unknown token", std::string(line.substr(i, j - i)));
    }
    tokens_.push_back({Tok::End, "", line.size() + 1});
  }

  const std::string& name_;
  std::size_t line_no_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

using SparseComplex = std::map<std::size_t, Count>;  // species index -> count

struct PendingReaction {
  SparseComplex source;
  SparseComplex target;
  double rate;
  std::size_t line;
  std::size_t column;
  std::string token;
};

class ModelParser {
 public:
  explicit ModelParser(const ModelSource& src) : src_(src) {}

  ReactionNetwork run() {
    std::istringstream in(src_.text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      LineParser lp(src_.name, line_no, line);
      if (lp.empty()) continue;
      if (lp.peek().kind == Tok::Directive) {
        directive(lp);
      } else {
        reaction(lp, line_no);
      }
    }
    return finish();
  }

 private:
  std::size_t species_index(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    names_.push_back(name);
    index_.emplace(name, names_.size() - 1);
    return names_.size() - 1;
  }

  void directive(LineParser& lp) {
    const Token d = lp.next();
    if (d.text != "%species") lp.fail(d, "unknown directive");
    if (!pending_.empty()) lp.fail(d, "%species must precede all reactions");
    while (lp.peek().kind != Tok::End) {
      const Token t = lp.expect(Tok::Ident, "species name");
      if (index_.count(t.text)) lp.fail(t, "species declared twice");
      species_index(t.text);
      if (lp.peek().kind == Tok::Comma) lp.next();
    }
  }

  SparseComplex side(LineParser& lp) {
    SparseComplex out;
    const Token& first = lp.peek();
    if (first.kind == Tok::Integer && first.text == "0") {
      Token zero = lp.next();
      if (lp.peek().kind == Tok::Ident) lp.fail(zero, "coefficient must be positive");
      return out;
    }
    while (true) {
      Count coefficient = 1;
      if (lp.peek().kind == Tok::Integer) {
        const Token c = lp.next();
        auto [ptr, ec] = std::from_chars(c.text.data(), c.text.data() + c.text.size(), coefficient);
        if (ec != std::errc() || ptr != c.text.data() + c.text.size()) lp.fail(c, "coefficient out of range");
        if (coefficient == 0) lp.fail(c, "coefficient must be positive");
      }
      const Token s = lp.expect(Tok::Ident, "species name");
      out[species_index(s.text)] += coefficient;
      if (lp.peek().kind != Tok::Plus) break;
      lp.next();
    }
    return out;
  }

  double rate(LineParser& lp) {
    const Token& t = lp.peek();
    if (t.kind != Tok::Number && t.kind != Tok::Integer) lp.fail(t, t.kind == Tok::End ? "missing rate" : "expected rate");
    const Token r = lp.next();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(r.text.data(), r.text.data() + r.text.size(), value);
    if (ec != std::errc() || ptr != r.text.data() + r.text.size()) lp.fail(r, "malformed rate");
    if (!(value > 0.0) || !std::isfinite(value)) lp.fail(r, "rate must be positive");
    return value;
  }

  void reaction(LineParser& lp, std::size_t line_no) {
    SparseComplex lhs = side(lp);
    const Token arrow = lp.peek();
    if (arrow.kind != Tok::Arrow && arrow.kind != Tok::BiArrow) lp.fail(arrow, "expected '->' or '<->'");
    lp.next();
    SparseComplex rhs = side(lp);
    if (lp.peek().kind != Tok::At) lp.fail(lp.peek(), lp.peek().kind == Tok::End ? "missing rate" : "expected '@'");
    lp.next();
    const double forward = rate(lp);
    std::optional<double> backward;
    if (arrow.kind == Tok::BiArrow) {
      if (lp.peek().kind != Tok::Comma) lp.fail(lp.peek(), "missing backward rate for '<->'");
      lp.next();
      backward = rate(lp);
    }
    if (lp.peek().kind != Tok::End) lp.fail(lp.peek(), "unexpected token");
    if (lhs == rhs) lp.fail(arrow, "self-loop: source equals target");

    add(lp, {lhs, rhs, forward, line_no, arrow.column, arrow.text});
    if (backward) add(lp, {rhs, lhs, *backward, line_no, arrow.column, arrow.text});
  }

  void add(LineParser& lp, PendingReaction r) {
    for (const auto& p : pending_) {
      if (p.source == r.source && p.target == r.target) {
        lp.fail({Tok::Arrow, r.token, r.column},
                "duplicate reaction (first declared on line " + std::to_string(p.line) + ")");
      }
    }
    pending_.push_back(std::move(r));
  }

  ReactionNetwork finish() {
    const std::size_t n = names_.size();
    auto dense = [n](const SparseComplex& s) {
      Complex c(n);
      for (auto [i, k] : s) c[i] = k;
      return c;
    };
    std::vector<Reaction> reactions;
    reactions.reserve(pending_.size());
    for (const auto& p : pending_) reactions.emplace_back(dense(p.source), dense(p.target), p.rate);
    return ReactionNetwork(names_, std::move(reactions));
  }

  const ModelSource& src_;
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::vector<PendingReaction> pending_;
};

std::string render_side(const ReactionNetwork& net, const Complex& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    if (!out.empty()) out += " + ";
    if (c[i] != 1) out += std::to_string(c[i]) + " ";
    out += net.species_names()[i];
  }
  return out.empty() ? "0" : out;
}

std::string render_rate(double r) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r);
  std::string s(buf, ptr);
  // Keep the literal a decimal so it reads back as a rate, e.g. "2" -> "2.0".
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

ReactionNetwork parse_network(const ModelSource& src) { return ModelParser(src).run(); }

std::string render_network(const ReactionNetwork& net) {
  // Would first appearance in the rendered text reproduce 0..n-1?
  std::vector<std::size_t> order;
  std::vector<bool> seen(net.n_species(), false);
  for (const auto& r : net.reactions()) {
    for (const Complex* c : {&r.source(), &r.target()}) {
      for (std::size_t i = 0; i < c->size(); ++i) {
        if ((*c)[i] > 0 && !seen[i]) {
          seen[i] = true;
          order.push_back(i);
        }
      }
    }
  }
  bool canonical = order.size() == net.n_species();
  for (std::size_t i = 0; canonical && i < order.size(); ++i) canonical = order[i] == i;

  std::string out;
  if (!canonical) {
    out += "%species";
    for (const auto& name : net.species_names()) out += " " + name;
    out += "\n";
  }
  for (const auto& r : net.reactions()) {
    out += render_side(net, r.source()) + " -> " + render_side(net, r.target()) + " @ " +
           render_rate(r.rate_constant()) + "\n";
  }
  return out;
}

ModelSource read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return {buf.str(), path.string()};
}

}  // namespace crnlab
