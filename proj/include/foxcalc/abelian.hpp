#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "foxcalc/lattice.hpp"

namespace foxcalc {

// Finitely generated abelian group Z^ngens / relation-lattice.
// The Smith decomposition of the relation basis is computed on construction:
// with w = v * V the group splits into coordinates of order diag[i]
// (1 = dead coordinate, 0 = free coordinate).
class FgAbGroup {
public:
  FgAbGroup() : FgAbGroup(0, Mat(0, 0)) {}
  FgAbGroup(Eigen::Index ngens, const Mat& relations);
  explicit FgAbGroup(const Lattice& relations) : FgAbGroup(relations.ambient(), relations.basis()) {}
  static FgAbGroup free_group(Eigen::Index n) { return FgAbGroup(n, Mat(0, n)); }
  static FgAbGroup from_invariants(const std::vector<Int>& divisors, Eigen::Index free_rank = 0);

  Eigen::Index ngens() const { return ngens_; }
  const Lattice& rels() const { return rels_; }

  const std::vector<Int>& torsion() const { return torsion_; } // divisor chain, entries > 1
  Eigen::Index free_rank() const { return ngens_ - rank_; }
  bool is_trivial() const { return torsion_.empty() && free_rank() == 0; }
  Int order() const; // 0 when infinite
  std::string describe() const;

  bool equal(const RowVec& a, const RowVec& b) const { return rels_.contains(RowVec(a - b)); }
  bool is_zero_elem(const RowVec& v) const { return rels_.contains(v); }
  RowVec normal_form(const RowVec& v) const { return rels_.reduce(v); }
  Int element_order(const RowVec& v) const; // 0 when infinite

  const Mat& V() const { return v_; }
  const Mat& Vinv() const { return vinv_; }
  const std::vector<Int>& diag() const { return diag_; }          // length ngens
  Eigen::Index rels_rank() const { return rank_; }                 // coords >= rank_ are free
  const std::vector<Eigen::Index>& torsion_coords() const { return torsion_coords_; }
  RowVec inv_coords(const RowVec& v) const { return v * v_; }
  RowVec inv_lift(Eigen::Index k) const { return vinv_.row(k); }

private:
  Eigen::Index ngens_;
  Lattice rels_;
  Mat v_, vinv_;
  std::vector<Int> diag_;
  std::vector<Int> torsion_;
  std::vector<Eigen::Index> torsion_coords_;
  Eigen::Index rank_;
};

bool same_invariants(const FgAbGroup& a, const FgAbGroup& b);

// Homomorphism between presented groups; v maps to v * matrix.
// Construction verifies that every domain relation lands in the codomain
// relation lattice, so an AbMap is always a well-defined homomorphism.
class AbMap {
public:
  AbMap(FgAbGroup dom, FgAbGroup cod, Mat m);
  static std::optional<AbMap> try_make(FgAbGroup dom, FgAbGroup cod, Mat m);
  static AbMap zero(FgAbGroup dom, FgAbGroup cod);
  static AbMap identity_map(FgAbGroup g);

  const FgAbGroup& dom() const { return dom_; }
  const FgAbGroup& cod() const { return cod_; }
  const Mat& matrix() const { return m_; }
  RowVec apply(const RowVec& v) const { return v * m_; }

  Lattice kernel_lattice() const;  // {v in Z^dom : f(v) = 0 in cod}; contains dom rels
  Lattice image_lattice() const;   // rowspan(matrix) + cod rels
  FgAbGroup cokernel() const;
  bool is_injective() const { return kernel_lattice() == dom_.rels(); }
  bool is_surjective() const { return image_lattice() == Lattice::full(cod_.ngens()); }
  bool is_iso() const { return is_injective() && is_surjective(); }
  bool is_zero_map() const;

private:
  AbMap(FgAbGroup dom, FgAbGroup cod, Mat m, int /*unchecked*/)
      : dom_(std::move(dom)), cod_(std::move(cod)), m_(std::move(m)) {}
  FgAbGroup dom_, cod_;
  Mat m_;
};

AbMap then(const AbMap& f, const AbMap& g); // v -> g(f(v))

FgAbGroup direct_sum(const FgAbGroup& a, const FgAbGroup& b);

// A (x) B with generator a_i (x) b_j at index i * b.ngens() + j
inline Eigen::Index tensor_index(Eigen::Index nb, Eigen::Index i, Eigen::Index j) { return i * nb + j; }
FgAbGroup tensor(const FgAbGroup& a, const FgAbGroup& b);

// wedge a_i /\ a_j for i < j, lexicographic
Eigen::Index wedge_index(Eigen::Index n, Eigen::Index i, Eigen::Index j);
Eigen::Index wedge_gens(Eigen::Index n);
// coordinates of e_i /\ e_j for arbitrary i, j (antisymmetric; zero when i = j)
RowVec wedge_elem(Eigen::Index n, Eigen::Index i, Eigen::Index j);
FgAbGroup exterior_square(const FgAbGroup& a);

// Tor_1(A, B) = (+)_{i,j} Z/gcd(d_i, e_j) over torsion coordinates;
// the (i, j) generator is <(d_i/g) x_i, g, (e_j/g) y_j>.
struct TorPair {
  Eigen::Index ci, cj; // torsion coordinate index in A resp. B (diag-basis index)
  Int g;               // order of the generator = gcd(d_i, e_j)
  Int mult_a, mult_b;  // d_i/g and e_j/g
};
struct TorGroup {
  FgAbGroup grp;
  std::vector<TorPair> pairs;
};
TorGroup tor_pairs(const FgAbGroup& a, const FgAbGroup& b);

// big/small presented on one generator per surviving invariant coordinate,
// with an ambient lift for each generator and ambient -> coordinate maps.
struct LatticeQuotient {
  FgAbGroup grp;
  Lattice big, small;
  Mat lifts;  // grp.ngens() x ambient
  RowVec coords(const RowVec& ambient_vec) const; // requires ambient_vec in big
  Mat coords_rows(const Mat& rows) const;
  Mat to_red;  // big.rank() x grp.ngens(): big-basis coords -> group coords
};
LatticeQuotient quotient_group(const Lattice& big, const Lattice& small);

// P = (B (+) C) / <(f(a), -g(a))>; B embeds as gens [0, nb), C as [nb, nb+nc)
struct PushoutData {
  FgAbGroup grp;
  Eigen::Index nb, nc;
};
PushoutData pushout(const AbMap& f, const AbMap& g);

} // namespace foxcalc
