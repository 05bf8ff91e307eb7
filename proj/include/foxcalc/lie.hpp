#pragma once

#include <array>
#include <utility>
#include <vector>

#include "foxcalc/group.hpp"
#include "foxcalc/group_ring.hpp"
#include "foxcalc/hmodule.hpp"

namespace foxcalc {

// Abelian section rewritten on its invariant-factor basis: generator k is a
// group element of order orders[k], and coords() returns the vector of its
// cyclic coordinates, normalized into [0, orders[k]).
struct DiagSection {
  GroupAb raw;
  FgAbGroup grp;
  std::vector<int> gens;
  std::vector<Int> orders;
  RowVec coords(int g) const;
};
DiagSection diag_section(const FiniteGroup& g, const Subgroup& s, const Subgroup& n);

// pushforward along "same element, other section"
AbMap section_map(const DiagSection& from, const DiagSection& to);

AbMap tensor_map(const AbMap& f, const AbMap& g);
AbMap wedge_functor(const AbMap& f);
// a /\ b -> a (x) b - b (x) a
AbMap l2_wedge(const FgAbGroup& a);
// a /\ b -> class of the commutator [a, b] in a deeper section
AbMap comm_wedge_map(const DiagSection& d, const DiagSection& c);

// First three graded pieces of a series with their commutator brackets.
// Construction verifies bilinearity on all element pairs for small groups.
struct GradedLie {
  Series s;
  DiagSection l1, l2, l3;
  AbMap b11; // L1 (x) L1 -> L2
  AbMap b12; // L1 (x) L2 -> L3
};
GradedLie graded_lie(const FiniteGroup& g, const Series& s);

// Sections shared by everything below, for a group with series and subgroup.
struct PairContext {
  const FiniteGroup* G = nullptr;
  Series s;
  Subgroup h, h2, h3, h4; // subgroup and its lower central terms
  DiagSection gab;        // G / S_2
  DiagSection l2g;        // S_2 / S_3
  DiagSection hab;        // H / H_2
  DiagSection hl2;        // H_2 / H_3
  DiagSection hl3;        // H_3 / H_4
};
PairContext pair_context(const FiniteGroup& g, const Series& s, const Subgroup& h);

// a /\ b -> i(a) (x) b - i(b) (x) a into (G/S_2) (x) (H/H_2), where i
// pushes a class of H/H_2 forward to G/S_2
AbMap l2_mixed(const PairContext& ctx);

// Degree-3 piece of the enveloping presentation on two generator blocks:
//   block A: (S_2/S_3) (x) (H/H_2)        indices [0, na)
//   block B: (G/S_2) (x) (G/S_2) (x) (H/H_2)  indices [na, na+nb)
// modulo multilinearity and the three mixed-bracket relation families.
struct U3Pres {
  PairContext ctx;
  Eigen::Index ng = 0, nh = 0, nl = 0; // generator counts of gab, hab, l2g
  Eigen::Index na = 0, nb = 0;
  FgAbGroup grp;

  Eigen::Index idx_a(Eigen::Index i, Eigen::Index k) const { return i * nh + k; }
  Eigen::Index idx_b(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return na + (i * ng + j) * nh + k;
  }
  // bilinear block-A element from section coordinates
  RowVec blk_a(const RowVec& cl2, const RowVec& ch) const;
  // trilinear block-B element; first two argument vectors live in gab coords
  RowVec blk_b(const RowVec& c1, const RowVec& c2, const RowVec& ch) const;

  // cg (x) class of w in H_2/H_3, rewritten into block B by expanding w
  // as a product of generator commutators
  RowVec nu12(const RowVec& cg, int w) const;
  // 1 (x) class of w in H_3/H_4, rewritten into block B through the
  // weight-three bracket expansion
  RowVec nu03(int w) const;

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs2; // p < q
  std::vector<std::array<Eigen::Index, 3>> triples3;         // (i, j, k), j < k
  Mat bracket2; // hl2 coords of [t_p, t_q] per pairs2 entry
  Mat bracket3; // hl3 coords of [t_i, [t_j, t_k]] per triples3 entry
};
U3Pres u3_build(const PairContext& ctx);

// degree-2 piece: (G/S_2) (x) (H/H_2) modulo the mixed image of Ker(c2)
FgAbGroup u2_build(const PairContext& ctx);

// comparison maps into the filtration subquotients I^{n-1}I(H)/I^n I(H)
AbMap theta1(const PairContext& ctx, Filtration& f);
AbMap theta2(const PairContext& ctx, Filtration& f);
AbMap theta3(const U3Pres& u, Filtration& f);

// torsion pairing rows landing in U3; together with delta2 these span Ker(theta3)
struct Delta1 {
  TorGroup tor;
  Mat rows;
};
Delta1 delta1_rows(const U3Pres& u);

// image of one wedge-coordinate vector, which must lie in the kernel lattice
// of both l2_mixed and the wedge commutator map; descending_solve flips the
// search order of the power decompositions, which must only move the result
// by Im(delta1) + relations
RowVec delta2_eval(const U3Pres& u, const RowVec& x, bool descending_solve = false);

// delta2_eval over a basis of Ker(l2_mixed) cap Ker(c2)
struct Delta2 {
  Lattice dom;
  Mat rows;
};
Delta2 delta2_rows(const U3Pres& u, bool descending_solve = false);

// A tuple of subgroup elements together with two weight vectors: k[j] bounds
// how deep elements[j] sits in the lower central series of the subgroup, l[j]
// how deep it sits in the ambient series.  The tuple has height n when every
// position satisfies sum(l) - l[j] + k[j] == n.
struct HeightTuple {
  std::vector<int> elements;
  std::vector<int> k;
  std::vector<int> l;
  int n = 0;
};

// Checks membership of each element in the claimed lower-central and series
// terms (central depth up to four) plus the height identity above.
bool height_valid(const PairContext& ctx, const HeightTuple& t);

// relation rows of the degree-3 quotient presentation coming from pairs of
// subgroup elements lying in S_2, parametrized by products with trivial
// commutator class; each pair is recorded as a height-3 tuple
struct R3Data {
  std::vector<std::pair<int, int>> pairs;
  std::vector<HeightTuple> tuples;
  Lattice dom;
  Mat rows;
};
R3Data r3_relations(const U3Pres& u);

FgAbGroup u3bar(const U3Pres& u, const R3Data& r);

// generating lattices (relation rows included) used by the self-pair
// presentation of the degree-3 quotient; requires ctx.h to be all of G
struct SelfPairSets {
  Lattice u1, u2;
};
SelfPairSets cor65_sets(const U3Pres& u);

} // namespace foxcalc
