#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

// Exact linear algebra over the rationals. Used wherever an integer invariant
// (rank, deficiency, conservation law) must not depend on floating point.
namespace crnlab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;  // row-major

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row.
std::vector<std::size_t> row_reduce(RationalMatrix& m, std::size_t n_cols);

/// Rank of the row vectors (all of length n_cols).
std::size_t rank(RationalMatrix rows, std::size_t n_cols);

/// Basis of {v : <row, v> = 0 for every row}.
std::vector<RationalVector> null_space(RationalMatrix rows, std::size_t n_cols);

/// Scale to the primitive integer vector with the same direction.
std::vector<Integer> clear_denominators(const RationalVector& v);

Integer gcd_of(const std::vector<Integer>& v);

}  // namespace crnlab
