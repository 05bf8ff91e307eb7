#include "foxcalc/group_ring.hpp"

#include <stdexcept>

namespace foxcalc {

RowVec GroupRing::mul(const RowVec& x, const RowVec& y) const {
  RowVec out = zero_row(dim());
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    if (x(a) == 0) continue;
    for (Eigen::Index b = 0; b < y.size(); ++b) {
      if (y(b) == 0) continue;
      out(G_->op(static_cast<int>(a), static_cast<int>(b))) += x(a) * y(b);
    }
  }
  return out;
}

Lattice GroupRing::aug_ideal(const Subgroup& k) const {
  Mat gens(static_cast<Eigen::Index>(k.size()), dim());
  for (size_t i = 0; i < k.size(); ++i) gens.row(static_cast<Eigen::Index>(i)) = elem_minus_one(k[i]);
  return Lattice::span(gens);
}

Lattice GroupRing::mul_lattice(const Lattice& a, const Lattice& b) const {
  Mat prods(a.rank() * b.rank(), dim());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < a.rank(); ++i)
    for (Eigen::Index j = 0; j < b.rank(); ++j)
      prods.row(r++) = mul(a.basis().row(i), b.basis().row(j));
  return Lattice::span(prods.topRows(r));
}

std::vector<int> GroupRing::unit_coset_set(const Lattice& m) const {
  std::vector<int> out;
  for (int g = 0; g < G_->order(); ++g)
    if (m.contains(elem_minus_one(g))) out.push_back(g);
  return out;
}

const Lattice& Filtration::level(int n) {
  if (n < 0) throw std::invalid_argument("filtration level must be nonnegative");
  while (static_cast<int>(levels_.size()) <= n) {
    int m = static_cast<int>(levels_.size());
    if (m == 0) {
      levels_.push_back(R_->full());
      continue;
    }
    Lattice acc(R_->dim());
    for (int k = 1; k <= m; ++k)
      acc = acc + R_->mul_lattice(R_->aug_ideal(s_.term(k)), levels_[static_cast<size_t>(m - k)]);
    levels_.push_back(std::move(acc));
  }
  return levels_[static_cast<size_t>(n)];
}

LatticeQuotient fox_quotient(Filtration& f, const Subgroup& h, int n) {
  if (n < 1) throw std::invalid_argument("fox_quotient: degree must be at least 1");
  const GroupRing& r = f.ring();
  Lattice ih = r.aug_ideal(h);
  return quotient_group(r.mul_lattice(f.level(n - 1), ih), r.mul_lattice(f.level(n), ih));
}

LatticeQuotient aug_quotient(Filtration& f, int n) {
  return quotient_group(f.level(n), f.level(n + 1));
}

LatticeQuotient poly_quotient(Filtration& f, int n) {
  return quotient_group(f.level(1), f.level(n + 1));
}

LatticeQuotient rel_poly_quotient(Filtration& f, const Subgroup& h, const Subgroup& nrm, int n) {
  const GroupRing& r = f.ring();
  Lattice ih = r.aug_ideal(h);
  Lattice big = r.mul_lattice(r.aug_ideal(full_subgroup(r.group())), ih);
  Lattice small = r.left_ideal(r.mul_lattice(r.aug_ideal(nrm), ih)) + r.mul_lattice(f.level(n), ih);
  return quotient_group(big, small);
}

} // namespace foxcalc
