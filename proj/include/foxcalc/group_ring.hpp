#pragma once

#include "foxcalc/group.hpp"
#include "foxcalc/lattice.hpp"

namespace foxcalc {

// Integral group ring Z(G); elements are integer row vectors indexed by
// group element ids, additive subgroups are lattices in Z^{|G|}.
class GroupRing {
public:
  explicit GroupRing(const FiniteGroup& g) : G_(&g) {}
  const FiniteGroup& group() const { return *G_; }
  Eigen::Index dim() const { return G_->order(); }

  RowVec unit(int g) const { return unit_row(dim(), g); }
  RowVec one() const { return unit(0); }
  RowVec elem_minus_one(int g) const { return unit(g) - one(); }
  RowVec mul(const RowVec& x, const RowVec& y) const;
  Int augment(const RowVec& x) const { return x.sum(); }

  Lattice full() const { return Lattice::full(dim()); }
  // additive span of {k - 1 : k in the subgroup}
  Lattice aug_ideal(const Subgroup& k) const;
  // span of all pairwise products of basis vectors
  Lattice mul_lattice(const Lattice& a, const Lattice& b) const;
  Lattice left_ideal(const Lattice& gens) const { return mul_lattice(full(), gens); }
  Lattice right_ideal(const Lattice& gens) const { return mul_lattice(gens, full()); }
  // {g : g - 1 lies in m}, ascending
  std::vector<int> unit_coset_set(const Lattice& m) const;

private:
  const FiniteGroup* G_;
};

// Filtration F^0 = Z(G) >= F^1 >= F^2 >= ... attached to a descending chain:
// F^n = sum over k of (span of (a-1), a in term k) * F^{n-k}.
class Filtration {
public:
  Filtration(const GroupRing& r, Series s) : R_(&r), s_(std::move(s)) {}
  const GroupRing& ring() const { return *R_; }
  const Series& series() const { return s_; }
  const Lattice& level(int n);

private:
  const GroupRing* R_;
  Series s_;
  std::vector<Lattice> levels_;
};

// F^{n-1} I(H) / F^n I(H), n >= 1
LatticeQuotient fox_quotient(Filtration& f, const Subgroup& h, int n);
// F^n / F^{n+1}, n >= 0
LatticeQuotient aug_quotient(Filtration& f, int n);
// F^1 / F^{n+1}
LatticeQuotient poly_quotient(Filtration& f, int n);
// I(G) I(H) / (Z(G) I(N) I(H) + F^n I(H))
LatticeQuotient rel_poly_quotient(Filtration& f, const Subgroup& h, const Subgroup& nrm, int n);

} // namespace foxcalc
