#pragma once

#include <Eigen/Core>
#include <gmpxx.h>

#include <string>

// Exact integer scalar and dense matrix types used by the whole library.
// Elements of Z^n are row vectors; a subgroup (lattice) of Z^n is stored
// as a matrix whose rows are basis vectors.

namespace Eigen {
template <> struct NumTraits<mpz_class> : GenericNumTraits<mpz_class> {
  using Real = mpz_class;
  using NonInteger = mpz_class;
  using Nested = mpz_class;
  enum {
    IsComplex = 0,
    IsInteger = 1,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 30,
    MulCost = 50
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};
} // namespace Eigen

namespace foxcalc {

using Int = mpz_class;
using Mat = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using RowVec = Eigen::Matrix<Int, 1, Eigen::Dynamic>;

inline Mat zeros(Eigen::Index r, Eigen::Index c) { return Mat::Constant(r, c, Int(0)); }
inline Mat identity(Eigen::Index n) {
  Mat m = zeros(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}
inline RowVec zero_row(Eigen::Index n) { return RowVec::Constant(n, Int(0)); }
inline RowVec unit_row(Eigen::Index n, Eigen::Index i) {
  RowVec v = zero_row(n);
  v(i) = 1;
  return v;
}

inline bool is_zero(const RowVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0) return false;
  return true;
}

// k*(k-1)/2, valid for negative k as well
inline Int binom2(const Int& k) { return k * (k - 1) / 2; }

inline Int lcm_int(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  Int g = gcd(a, b);
  return abs(a / g * b);
}

inline std::string to_string(const Int& x) { return x.get_str(); }

// shape-safe equality (Eigen's operator== requires equal shapes)
inline bool mat_equal(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.size() == 0) return true;
  return a == b;
}

// stack rows of two matrices with equal column count; tolerates 0-row inputs
inline Mat vstack(const Mat& a, const Mat& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  Mat r(a.rows() + b.rows(), a.cols());
  r.topRows(a.rows()) = a;
  r.bottomRows(b.rows()) = b;
  return r;
}

} // namespace foxcalc
