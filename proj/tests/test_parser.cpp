#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "crnlab/parser.hpp"
#include "helpers.hpp"

using namespace crnlab;
using namespace crnlab::test;

namespace {

ParseError parse_error(const std::string& text) {
  try {
    parse_network({text, "m.crn"});
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no parse error for: " << text);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("bidirectional reactions") {
  const auto n = net("0 <-> S1 @ 1.0, 2.0");
  REQUIRE(n.reactions().size() == 2);
  CHECK(n.reaction(0).source() == Complex{0});
  CHECK(n.reaction(0).target() == Complex{1});
  CHECK(n.reaction(0).rate_constant() == 1.0);
  CHECK(n.reaction(1).source() == Complex{1});
  CHECK(n.reaction(1).rate_constant() == 2.0);
}

TEST_CASE("coefficients and species order") {
  const auto n = net("2 S1 + S2 -> 2 S1 + 2 S2 @ 0.5");
  REQUIRE(n.reactions().size() == 1);
  CHECK(n.reaction(0).source() == Complex{2, 1});
  CHECK(n.reaction(0).target() == Complex{2, 2});
  CHECK(n.reaction(0).rate_constant() == 0.5);
  CHECK(n.species_names() == std::vector<std::string>{"S1", "S2"});

  const auto m = net("S1 + S1 + 2 S1 -> 0 @ 1e-3  # comment\n\n# only a comment\n");
  CHECK(m.reaction(0).source() == Complex{4});
  CHECK(m.reaction(0).rate_constant() == doctest::Approx(1e-3));

  const auto d = net("%species B A\nA -> B @ 1\n");
  CHECK(d.species_names() == std::vector<std::string>{"B", "A"});
  CHECK(d.reaction(0).source() == Complex{0, 1});
}

TEST_CASE("parse errors carry the offending token") {
  auto e = parse_error("S1 -> S1 @ 1.0");
  CHECK(e.line() == 1);
  CHECK(e.message().find("self-loop") != std::string::npos);

  e = parse_error("S1 -> S2\n");
  CHECK(e.message().find("missing rate") != std::string::npos);

  e = parse_error("S1 -> S2 @ 0\n");
  CHECK(e.message().find("positive") != std::string::npos);
  CHECK(e.column() == 12);
  CHECK(e.token() == "0");

  e = parse_error("S1 -> S2 @ -1\n");
  CHECK(e.line() == 1);

  e = parse_error("S1 -> S2 @ 1\nS1 -> S2 @ 2\n");
  CHECK(e.line() == 2);
  CHECK(e.message().find("duplicate") != std::string::npos);

  e = parse_error("S1 <-> S2 @ 1\n");
  CHECK(e.message().find("backward") != std::string::npos);

  e = parse_error("S1 -> S2 @ 1\nS1 $ S2 @ 1\n");
  CHECK(e.line() == 2);
  CHECK(e.column() == 4);
  CHECK(e.token() == "$");
  CHECK(std::string(e.what()).find("m.crn:2:4") == 0);

  e = parse_error("0 S1 -> S2 @ 1\n");
  CHECK(e.column() == 1);

  e = parse_error("S1 -> S2 @ 1\n%species S1\n");
  CHECK(e.line() == 2);
}

TEST_CASE("every error location lies on its token") {
  const std::vector<std::string> bad = {"S1 -> S1 @ 1", "S1 -> @ 1", "A -> B @ 0", "A -> B @ 1 extra",
                                        "A ~> B @ 1", "A -> B @ 1, 2", "A + -> B @ 1", "A -> B @ 1\nA -> B @ 3"};
  for (const auto& text : bad) {
    const auto e = parse_error(text);
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text + "\n") {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    REQUIRE(e.line() >= 1);
    REQUIRE(e.line() <= lines.size());
    const auto& line = lines[e.line() - 1];
    if (e.token().empty()) {
      CHECK(e.column() == line.size() + 1);
    } else {
      CHECK(line.substr(e.column() - 1, e.token().size()) == e.token());
    }
  }
}

TEST_CASE("rendering") {
  const auto t = t1();
  const auto text = render_network(t);
  CHECK(text.find("S1 + S2 -> S1") != std::string::npos);
  CHECK(text.find("1 S1") == std::string::npos);
  CHECK(render_network(mm_inf()).find("0 -> S1") != std::string::npos);
  CHECK(parse_network({text, "r"}).same_structure(t));
}

TEST_CASE("line order does not change the reaction set") {
  const auto a = net("%species S1 S2\nS2 -> S1 + S2 @ 1\nS1 + S2 -> S1 @ 2\nS1 -> S2 @ 3\n");
  const auto b = net("%species S1 S2\nS1 -> S2 @ 3\nS2 -> S1 + S2 @ 1\nS1 + S2 -> S1 @ 2\n");
  REQUIRE(a.reactions().size() == b.reactions().size());
  for (const auto& r : a.reactions()) {
    bool found = false;
    for (const auto& s : b.reactions()) found = found || r == s;
    CHECK(found);
  }
}

TEST_CASE("parse after render is the identity on random networks") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> species_count(1, 4), reaction_count(1, 6), coef(0, 3);
  std::uniform_real_distribution<double> rate(-6.0, 6.0);
  int checked = 0;
  while (checked < 1000) {
    const auto n = static_cast<std::size_t>(species_count(rng));
    std::vector<Reaction> reactions;
    std::set<std::pair<Complex, Complex>> seen;
    const int m = reaction_count(rng);
    for (int r = 0; r < m; ++r) {
      Complex s(n), t(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<Count>(coef(rng));
        t[i] = static_cast<Count>(coef(rng));
      }
      if (s == t || !seen.insert({s, t}).second) continue;
      reactions.emplace_back(s, t, std::exp(rate(rng)));
    }
    if (reactions.empty()) continue;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("X" + std::to_string((i * 7 + 3) % 11));
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    if (names.size() != n) continue;
    std::shuffle(names.begin(), names.end(), rng);
    const ReactionNetwork original(names, reactions);
    const auto back = parse_network({render_network(original), "roundtrip"});
    CHECK(back.same_structure(original));
    CHECK(back.species_names() == original.species_names());
    ++checked;
  }
}
