#pragma once

#include "foxcalc/intmat.hpp"

#include <optional>
#include <vector>

// Row-style Hermite and Smith normal forms over Z with transform tracking.
//
// HNF convention: row echelon, pivots positive, entries above a pivot
// reduced into [0, pivot). Rows ordered by pivot column. This makes the
// HNF of a row span canonical: two generating sets span the same subgroup
// of Z^n iff their HNFs (with zero rows dropped) are equal.

namespace foxcalc::la {

struct HnfResult {
  Mat h; // same row count as input, zero rows at the bottom
  Mat u; // unimodular, u * input == h
  int rank = 0;
};

// canonical basis of the row span (zero rows dropped)
Mat hnf(const Mat& m);

HnfResult hnf_transform(const Mat& m);

// basis of { x : x * m == 0 }, canonical
Mat left_kernel(const Mat& m);

struct SnfResult {
  Mat d;                  // u * input * v == d, diagonal
  Mat u, v, vinv;         // unimodular transforms
  std::vector<Int> diag;  // nonnegative, d[i] | d[i+1], zeros trailing
  int rank = 0;           // number of nonzero diagonal entries
};

SnfResult snf(const Mat& m);

// solve x * b = v for b in HNF form (rows independent); nullopt if unsolvable
std::optional<RowVec> solve_hnf(const Mat& b, const RowVec& v);

// canonical representative of v modulo the row span of b (b in HNF form):
// pivot-column coordinates land in [0, pivot)
RowVec reduce_hnf(const Mat& b, const RowVec& v);

// basis of { c in Z^k : c * gens lies in the row span of sub }
// (gens is k x n, sub is s x n)
Mat preimage_lattice(const Mat& gens, const Mat& sub);

// one solution c with c * gens == v modulo row span of sub, if any
std::optional<RowVec> solve_mod(const Mat& gens, const Mat& sub, const RowVec& v);

} // namespace foxcalc::la
