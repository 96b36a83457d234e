#include "crnlab/rational.hpp"

#include <utility>

namespace crnlab {

std::vector<std::size_t> row_reduce(RationalMatrix& m, std::size_t n_cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n_cols && row < m.size(); ++col) {
    std::size_t sel = row;
    while (sel < m.size() && m[sel][col] == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[row], m[sel]);
    const Rational lead = m[row][col];
    for (auto& e : m[row]) e /= lead;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rational factor = m[r][col];
      for (std::size_t c = col; c < n_cols; ++c) m[r][c] -= factor * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::size_t rank(RationalMatrix rows, std::size_t n_cols) {
  return row_reduce(rows, n_cols).size();
}

std::vector<RationalVector> null_space(RationalMatrix rows, std::size_t n_cols) {
  const auto pivots = row_reduce(rows, n_cols);
  std::vector<bool> is_pivot(n_cols, false);
  for (auto p : pivots) is_pivot[p] = true;

  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < n_cols; ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(n_cols, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -rows[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

Integer gcd_of(const std::vector<Integer>& v) {
  Integer g = 0;
  for (const auto& e : v) g = boost::multiprecision::gcd(g, abs(e));
  return g;
}

std::vector<Integer> clear_denominators(const RationalVector& v) {
  Integer l = 1;
  for (const auto& e : v) l = boost::multiprecision::lcm(l, denominator(e));
  std::vector<Integer> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(numerator(e) * (l / denominator(e)));
  const Integer g = gcd_of(out);
  if (g > 1) {
    for (auto& e : out) e /= g;
  }
  return out;
}

}  // namespace crnlab
