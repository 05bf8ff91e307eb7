#include "foxcalc/normal_form.hpp"

#include <stdexcept>

namespace foxcalc::la {

namespace {

void xgcd(const Int& a, const Int& b, Int& g, Int& s, Int& t) {
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}

Int fdiv(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// unimodular row combination making m(r,c) = gcd(m(r,c), m(i,c)) and m(i,c) = 0
void row_gcd_step(Mat& m, Mat& u, bool track, Eigen::Index r, Eigen::Index i, Eigen::Index c) {
  const Int a = m(r, c), b = m(i, c);
  if (b == 0) return;
  if (a != 0 && b % a == 0) {
    Int q = b / a;
    m.row(i) -= q * m.row(r);
    if (track) u.row(i) -= q * u.row(r);
    return;
  }
  Int g, s, t;
  xgcd(a, b, g, s, t);
  const Int ag = a / g, bg = b / g, nbg = -bg;
  RowVec mr = s * m.row(r) + t * m.row(i);
  RowVec mi = nbg * m.row(r) + ag * m.row(i);
  m.row(r) = mr;
  m.row(i) = mi;
  if (track) {
    RowVec ur = s * u.row(r) + t * u.row(i);
    RowVec ui = nbg * u.row(r) + ag * u.row(i);
    u.row(r) = ur;
    u.row(i) = ui;
  }
}

HnfResult hnf_impl(const Mat& input, bool track) {
  const Eigen::Index rows = input.rows(), cols = input.cols();
  HnfResult res;
  res.h = input;
  res.u = track ? identity(rows) : Mat();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = r; i < rows; ++i)
      if (res.h(i, c) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r) {
      res.h.row(piv).swap(res.h.row(r));
      if (track) res.u.row(piv).swap(res.u.row(r));
    }
    for (Eigen::Index i = r + 1; i < rows; ++i)
      row_gcd_step(res.h, res.u, track, r, i, c);
    if (res.h(r, c) < 0) {
      res.h.row(r) = -res.h.row(r);
      if (track) res.u.row(r) = -res.u.row(r);
    }
    const Int& p = res.h(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      if (res.h(i, c) == 0) continue;
      Int q = fdiv(res.h(i, c), p);
      if (q != 0) {
        res.h.row(i) -= q * res.h.row(r);
        if (track) res.u.row(i) -= q * res.u.row(r);
      }
    }
    ++r;
  }
  res.rank = static_cast<int>(r);
  return res;
}

} // namespace

Mat hnf(const Mat& m) {
  HnfResult r = hnf_impl(m, false);
  return r.h.topRows(r.rank);
}

HnfResult hnf_transform(const Mat& m) { return hnf_impl(m, true); }

Mat left_kernel(const Mat& m) {
  HnfResult r = hnf_impl(m, true);
  Mat ker = r.u.bottomRows(m.rows() - r.rank);
  return hnf(ker);
}

std::optional<RowVec> solve_hnf(const Mat& b, const RowVec& v) {
  RowVec rem = v;
  RowVec x = zero_row(b.rows());
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    Eigen::Index p = -1;
    for (Eigen::Index c = 0; c < b.cols(); ++c)
      if (b(i, c) != 0) { p = c; break; }
    if (p < 0) continue;
    if (rem(p) % b(i, p) != 0) return std::nullopt;
    Int q = rem(p) / b(i, p);
    if (q != 0) rem -= q * b.row(i);
    x(i) = q;
  }
  if (!is_zero(rem)) return std::nullopt;
  return x;
}

RowVec reduce_hnf(const Mat& b, const RowVec& v) {
  RowVec rem = v;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    Eigen::Index p = -1;
    for (Eigen::Index c = 0; c < b.cols(); ++c)
      if (b(i, c) != 0) { p = c; break; }
    if (p < 0) continue;
    Int q = fdiv(rem(p), b(i, p));
    if (q != 0) rem -= q * b.row(i);
  }
  return rem;
}

Mat preimage_lattice(const Mat& gens, const Mat& sub) {
  Mat stacked = vstack(gens, sub);
  if (stacked.rows() == 0) return Mat(0, gens.rows());
  Mat ker = left_kernel(stacked);
  Mat proj = ker.leftCols(gens.rows());
  return hnf(proj);
}

std::optional<RowVec> solve_mod(const Mat& gens, const Mat& sub, const RowVec& v) {
  Mat stacked = vstack(gens, sub);
  HnfResult r = hnf_impl(stacked, true);
  auto y = solve_hnf(r.h, v);
  if (!y) return std::nullopt;
  RowVec x = *y * r.u;
  return RowVec(x.head(gens.rows()));
}

namespace {

struct SnfOps {
  Mat& d;
  Mat& u;
  Mat& v;
  Mat& vinv;

  void col_sub(Eigen::Index j, const Int& q, Eigen::Index i) { // col_j -= q*col_i
    d.col(j) -= q * d.col(i);
    v.col(j) -= q * v.col(i);
    vinv.row(i) += q * vinv.row(j);
  }
  void col_swap(Eigen::Index i, Eigen::Index j) {
    d.col(i).swap(d.col(j));
    v.col(i).swap(v.col(j));
    vinv.row(i).swap(vinv.row(j));
  }
  // unimodular column combination on (i, j) clearing d(r, j)
  void col_gcd_step(Eigen::Index r, Eigen::Index i, Eigen::Index j) {
    const Int a = d(r, i), b = d(r, j);
    if (b == 0) return;
    if (a != 0 && b % a == 0) {
      col_sub(j, b / a, i);
      return;
    }
    Int g, s, t;
    xgcd(a, b, g, s, t);
    const Int ag = a / g, bg = b / g, nbg = -bg, nt = -t;
    Mat ci = s * d.col(i) + t * d.col(j);
    Mat cj = nbg * d.col(i) + ag * d.col(j);
    d.col(i) = ci;
    d.col(j) = cj;
    Mat vi = s * v.col(i) + t * v.col(j);
    Mat vj = nbg * v.col(i) + ag * v.col(j);
    v.col(i) = vi;
    v.col(j) = vj;
    // inverse of [[s, -bg], [t, ag]] acting on rows i, j of vinv
    Mat wi = ag * vinv.row(i) + bg * vinv.row(j);
    Mat wj = nt * vinv.row(i) + s * vinv.row(j);
    vinv.row(i) = wi;
    vinv.row(j) = wj;
  }
};

} // namespace

SnfResult snf(const Mat& m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  SnfResult res;
  res.d = m;
  res.u = identity(rows);
  res.v = identity(cols);
  res.vinv = identity(cols);
  SnfOps ops{res.d, res.u, res.v, res.vinv};
  const Eigen::Index steps = std::min(rows, cols);

  for (Eigen::Index t = 0; t < steps; ++t) {
    // find nonzero entry of smallest absolute value in the remaining block
    Eigen::Index pi = -1, pj = -1;
    for (Eigen::Index i = t; i < rows; ++i)
      for (Eigen::Index j = t; j < cols; ++j) {
        if (res.d(i, j) == 0) continue;
        if (pi < 0 || abs(res.d(i, j)) < abs(res.d(pi, pj))) { pi = i; pj = j; }
      }
    if (pi < 0) break;
    if (pi != t) { res.d.row(pi).swap(res.d.row(t)); res.u.row(pi).swap(res.u.row(t)); }
    if (pj != t) ops.col_swap(pj, t);

    for (;;) {
      for (Eigen::Index i = t + 1; i < rows; ++i)
        if (res.d(i, t) != 0) row_gcd_step(res.d, res.u, true, t, i, t);
      for (Eigen::Index j = t + 1; j < cols; ++j)
        if (res.d(t, j) != 0) ops.col_gcd_step(t, t, j);
      bool clear = true;
      for (Eigen::Index i = t + 1; i < rows && clear; ++i) clear = res.d(i, t) == 0;
      for (Eigen::Index j = t + 1; j < cols && clear; ++j) clear = res.d(t, j) == 0;
      if (clear) break;
    }
    if (res.d(t, t) < 0) { res.d.row(t) = -res.d.row(t); res.u.row(t) = -res.u.row(t); }
  }

  // enforce the divisor chain
  Eigen::Index rank = 0;
  for (Eigen::Index t = 0; t < steps; ++t)
    if (res.d(t, t) != 0) ++rank;
  // move zeros to the end
  for (Eigen::Index t = 0, w = 0; t < steps; ++t) {
    if (res.d(t, t) == 0) continue;
    if (t != w) {
      res.d.row(t).swap(res.d.row(w));
      res.u.row(t).swap(res.u.row(w));
      ops.col_swap(t, w);
    }
    ++w;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (Eigen::Index i = 0; i + 1 < rank; ++i) {
      for (Eigen::Index j = i + 1; j < rank; ++j) {
        if (res.d(j, j) % res.d(i, i) == 0) continue;
        changed = true;
        // col_i += col_j brings d(j,j) into column i
        ops.col_sub(i, Int(-1), j);
        row_gcd_step(res.d, res.u, true, i, j, i);
        if (res.d(i, j) != 0) ops.col_sub(j, res.d(i, j) / res.d(i, i), i);
        if (res.d(i, i) < 0) { res.d.row(i) = -res.d.row(i); res.u.row(i) = -res.u.row(i); }
        if (res.d(j, j) < 0) { res.d.row(j) = -res.d.row(j); res.u.row(j) = -res.u.row(j); }
      }
    }
  }

  res.rank = static_cast<int>(rank);
  res.diag.resize(steps);
  for (Eigen::Index t = 0; t < steps; ++t) res.diag[static_cast<size_t>(t)] = res.d(t, t);
  return res;
}

} // namespace foxcalc::la
