#pragma once

#include "foxcalc/group_ring.hpp"

namespace foxcalc {

// Lattice subquotient big/small of a group ring carrying multiplication by a
// fixed list of group elements (images of some subgroup's chosen generators).
// Both lattices must be stable under every actor; the induced matrices are
// verified to define a group action of the subgroup the actors generate.
struct HModule {
  const GroupRing* ring = nullptr;
  std::vector<int> actors;
  bool left = true; // actors act by x -> t x; otherwise x -> x t
  LatticeQuotient q;
  std::vector<AbMap> act; // induced map per actor, aligned with actors
};

HModule make_hmodule(const GroupRing& r, std::vector<int> actors, const Lattice& big,
                     const Lattice& small, bool left);

// (A (x) B) / <a t (x) b - a (x) t b> for a right module A and a left module
// B whose actor lists are aligned by index; the two ambient rings may differ.
// Generator (i, j) of grp sits at tensor_index(nb, i, j).
struct TensorH {
  FgAbGroup grp;
  Eigen::Index na = 0, nb = 0;
  RowVec pure(const RowVec& ca, const RowVec& cb) const; // bilinear expansion
};
TensorH tensor_over_h(const HModule& a, const HModule& b);

// largest quotient of a left module with trivial action: J / <t x - x>
FgAbGroup coinvariants(const HModule& j);

// A --top--> B, A --left--> C, B --right--> D, C --bottom--> D
struct DiagramSquare {
  AbMap top, left, right, bottom;
};
struct SquareReport {
  bool commutes = false;
  bool is_pushout = false;
  std::string detail;
};
// builds (B (+) C) / <(top(a), -left(a))> and tests the induced map onto D
SquareReport pushout_check(const DiagramSquare& sq);

// Im(seq[i]) == Ker(seq[i+1]) at every inner node of a composable chain
std::vector<bool> exactness_check(const std::vector<AbMap>& seq);

FgAbGroup direct_sum_group(const std::vector<const FgAbGroup*>& parts);
// invariant factors of lhs match those of the direct sum of the parts
bool decomposition_check(const FgAbGroup& lhs, const std::vector<const FgAbGroup*>& parts);

bool maps_equal(const AbMap& f, const AbMap& g);

// generator g_i of dom -> coset of g_i - 1: compares group sections against
// filtration subquotients
AbMap minus_one_map(const GroupRing& r, const FgAbGroup& dom, const std::vector<int>& gens,
                    const LatticeQuotient& q);

// generator (i, j) of dom -> coset of lifts1.row(i) * lifts2.row(j); dom must
// be presented on the corresponding tensor index grid
AbMap mult_map(const FgAbGroup& dom, const GroupRing& r, const Mat& lifts1, const Mat& lifts2,
               const LatticeQuotient& q);

// (x + F^n) (x) hH' -> coset of x(h - 1) in F^{n-1}I(H)/F^nI(H); surjective
AbMap zeta_map(Filtration& f, const Subgroup& h, int n);

// linear transport of ring elements along quotient and subgroup maps
RowVec push_ring(const QuotientGroup& qg, const RowVec& v);
Mat push_ring_rows(const QuotientGroup& qg, const Mat& rows);
RowVec pull_ring(const QuotientGroup& qg, const RowVec& v); // section via reps
Mat pull_ring_rows(const QuotientGroup& qg, const Mat& rows);
RowVec embed_ring(const SubgroupGroup& sg, const RowVec& v);
Mat embed_ring_rows(const SubgroupGroup& sg, const Mat& rows);
// rewrite a parent-ring lattice supported on the subgroup into subgroup ids
Lattice restrict_ring_lattice(const SubgroupGroup& sg, const Lattice& l);

// the two unit coset sets G cap (1 + Z(G)J) and H cap (1 + Z(H)J) for a
// left ideal J of the subgroup ring, both in parent ids
std::pair<std::vector<int>, std::vector<int>> unit_coset_pair(const GroupRing& rg,
                                                              const SubgroupGroup& sgh,
                                                              const Lattice& j_sub);

// I(H)J cap (I(K)J + F^2 J) and its predicted decomposition
// I(H cap KG_(2))J + I^2(H)J + U; returns the two lattices
std::pair<Lattice, Lattice> intersection_pair(Filtration& f, const Subgroup& h, const Subgroup& k,
                                              const Lattice& j);

// relative quotient of degree n against the norm-element construction on the
// cyclic subgroup side; returns the two groups
std::pair<FgAbGroup, FgAbGroup> cyclic_relative_pair(Filtration& f, const Subgroup& h,
                                                     const Subgroup& nrm, int n);

} // namespace foxcalc
