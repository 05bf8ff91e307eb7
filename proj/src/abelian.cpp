#include "foxcalc/abelian.hpp"

#include <sstream>

namespace foxcalc {

FgAbGroup::FgAbGroup(Eigen::Index ngens, const Mat& relations) : ngens_(ngens) {
  Mat r = relations;
  if (r.rows() == 0) r = Mat(0, ngens);
  if (r.cols() != ngens) throw std::invalid_argument("relation width != ngens");
  rels_ = Lattice::span(r);
  la::SnfResult s = la::snf(rels_.basis());
  v_ = s.v;
  vinv_ = s.vinv;
  rank_ = rels_.rank();
  diag_.assign(static_cast<size_t>(ngens_), Int(0));
  for (Eigen::Index i = 0; i < rank_; ++i) diag_[static_cast<size_t>(i)] = s.diag[static_cast<size_t>(i)];
  for (Eigen::Index i = 0; i < rank_; ++i) {
    if (diag_[static_cast<size_t>(i)] > 1) {
      torsion_.push_back(diag_[static_cast<size_t>(i)]);
      torsion_coords_.push_back(i);
    }
  }
}

FgAbGroup FgAbGroup::from_invariants(const std::vector<Int>& divisors, Eigen::Index free_rank) {
  const Eigen::Index n = static_cast<Eigen::Index>(divisors.size()) + free_rank;
  Mat rel = Mat(static_cast<Eigen::Index>(divisors.size()), n);
  rel.setConstant(0);
  for (Eigen::Index i = 0; i < rel.rows(); ++i) rel(i, i) = divisors[static_cast<size_t>(i)];
  return FgAbGroup(n, rel);
}

Int FgAbGroup::order() const {
  if (free_rank() > 0) return 0;
  Int n = 1;
  for (const Int& d : torsion_) n *= d;
  return n;
}

std::string FgAbGroup::describe() const {
  if (is_trivial()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const Int& d : torsion_) {
    if (!first) os << " + ";
    os << "Z/" << d;
    first = false;
  }
  if (free_rank() > 0) {
    if (!first) os << " + ";
    os << "Z";
    if (free_rank() > 1) os << "^" << free_rank();
  }
  return os.str();
}

Int FgAbGroup::element_order(const RowVec& v) const {
  RowVec w = inv_coords(v);
  for (Eigen::Index i = rank_; i < ngens_; ++i)
    if (w(i) != 0) return 0;
  Int ord = 1;
  for (Eigen::Index i = 0; i < rank_; ++i) {
    const Int& d = diag_[static_cast<size_t>(i)];
    ord = lcm_int(ord, d / gcd(d, w(i)));
  }
  return ord;
}

bool same_invariants(const FgAbGroup& a, const FgAbGroup& b) {
  return a.torsion() == b.torsion() && a.free_rank() == b.free_rank();
}

AbMap::AbMap(FgAbGroup dom, FgAbGroup cod, Mat m)
    : dom_(std::move(dom)), cod_(std::move(cod)), m_(std::move(m)) {
  if (m_.rows() == 0) m_ = Mat(0, cod_.ngens());
  if (m_.rows() != dom_.ngens() || m_.cols() != cod_.ngens())
    throw std::invalid_argument("map matrix shape mismatch");
  const Mat& rb = dom_.rels().basis();
  for (Eigen::Index i = 0; i < rb.rows(); ++i)
    if (!cod_.rels().contains(RowVec(rb.row(i) * m_)))
      throw std::invalid_argument("map does not respect relations");
}

std::optional<AbMap> AbMap::try_make(FgAbGroup dom, FgAbGroup cod, Mat m) {
  if (m.rows() == 0) m = Mat(0, cod.ngens());
  if (m.rows() != dom.ngens() || m.cols() != cod.ngens()) return std::nullopt;
  const Mat& rb = dom.rels().basis();
  for (Eigen::Index i = 0; i < rb.rows(); ++i)
    if (!cod.rels().contains(RowVec(rb.row(i) * m))) return std::nullopt;
  return AbMap(std::move(dom), std::move(cod), std::move(m), 0);
}

AbMap AbMap::zero(FgAbGroup dom, FgAbGroup cod) {
  Mat m = zeros(dom.ngens(), cod.ngens());
  return AbMap(std::move(dom), std::move(cod), std::move(m), 0);
}

AbMap AbMap::identity_map(FgAbGroup g) {
  Mat m = identity(g.ngens());
  FgAbGroup cod = g;
  return AbMap(std::move(g), std::move(cod), std::move(m), 0);
}

Lattice AbMap::kernel_lattice() const {
  return Lattice::span(la::preimage_lattice(m_, cod_.rels().basis()));
}

Lattice AbMap::image_lattice() const {
  return Lattice::span(vstack(m_, cod_.rels().basis()));
}

FgAbGroup AbMap::cokernel() const {
  return FgAbGroup(cod_.ngens(), vstack(m_, cod_.rels().basis()));
}

bool AbMap::is_zero_map() const {
  for (Eigen::Index i = 0; i < m_.rows(); ++i)
    if (!cod_.rels().contains(RowVec(m_.row(i)))) return false;
  return true;
}

AbMap then(const AbMap& f, const AbMap& g) {
  return AbMap(f.dom(), g.cod(), f.matrix() * g.matrix());
}

FgAbGroup direct_sum(const FgAbGroup& a, const FgAbGroup& b) {
  const Eigen::Index na = a.ngens(), nb = b.ngens();
  const Mat& ra = a.rels().basis();
  const Mat& rb = b.rels().basis();
  Mat rel = zeros(ra.rows() + rb.rows(), na + nb);
  rel.block(0, 0, ra.rows(), na) = ra;
  rel.block(ra.rows(), na, rb.rows(), nb) = rb;
  return FgAbGroup(na + nb, rel);
}

FgAbGroup tensor(const FgAbGroup& a, const FgAbGroup& b) {
  const Eigen::Index na = a.ngens(), nb = b.ngens();
  const Mat& ra = a.rels().basis();
  const Mat& rb = b.rels().basis();
  Mat rel = zeros(ra.rows() * nb + rb.rows() * na, na * nb);
  Eigen::Index w = 0;
  for (Eigen::Index r = 0; r < ra.rows(); ++r)
    for (Eigen::Index j = 0; j < nb; ++j, ++w)
      for (Eigen::Index i = 0; i < na; ++i) rel(w, tensor_index(nb, i, j)) = ra(r, i);
  for (Eigen::Index r = 0; r < rb.rows(); ++r)
    for (Eigen::Index i = 0; i < na; ++i, ++w)
      for (Eigen::Index j = 0; j < nb; ++j) rel(w, tensor_index(nb, i, j)) = rb(r, j);
  return FgAbGroup(na * nb, rel);
}

Eigen::Index wedge_gens(Eigen::Index n) { return n * (n - 1) / 2; }

Eigen::Index wedge_index(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  // i < j; row-major over the strict upper triangle
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

RowVec wedge_elem(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  RowVec v = zero_row(wedge_gens(n));
  if (i < j)
    v(wedge_index(n, i, j)) = 1;
  else if (j < i)
    v(wedge_index(n, j, i)) = -1;
  return v;
}

FgAbGroup exterior_square(const FgAbGroup& a) {
  const Eigen::Index n = a.ngens();
  const Mat& ra = a.rels().basis();
  Mat rel = zeros(ra.rows() * n, wedge_gens(n));
  Eigen::Index w = 0;
  for (Eigen::Index r = 0; r < ra.rows(); ++r)
    for (Eigen::Index k = 0; k < n; ++k, ++w)
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i == k || ra(r, i) == 0) continue;
        if (i < k)
          rel(w, wedge_index(n, i, k)) += ra(r, i);
        else
          rel(w, wedge_index(n, k, i)) -= ra(r, i);
      }
  return FgAbGroup(wedge_gens(n), rel);
}

TorGroup tor_pairs(const FgAbGroup& a, const FgAbGroup& b) {
  TorGroup out;
  std::vector<Int> divisors;
  for (size_t i = 0; i < a.torsion().size(); ++i)
    for (size_t j = 0; j < b.torsion().size(); ++j) {
      Int g = gcd(a.torsion()[i], b.torsion()[j]);
      if (g == 1) continue;
      TorPair p;
      p.ci = a.torsion_coords()[i];
      p.cj = b.torsion_coords()[j];
      p.g = g;
      p.mult_a = a.torsion()[i] / g;
      p.mult_b = b.torsion()[j] / g;
      out.pairs.push_back(p);
      divisors.push_back(g);
    }
  out.grp = FgAbGroup::from_invariants(divisors);
  return out;
}

RowVec LatticeQuotient::coords(const RowVec& ambient_vec) const {
  auto c = big.coords(ambient_vec);
  if (!c) throw std::invalid_argument("vector not in the numerator lattice");
  return *c * to_red;
}

Mat LatticeQuotient::coords_rows(const Mat& rows) const {
  Mat out = zeros(rows.rows(), grp.ngens());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.row(i) = coords(RowVec(rows.row(i)));
  return out;
}

LatticeQuotient quotient_group(const Lattice& big, const Lattice& small) {
  if (!big.contains(small)) throw std::invalid_argument("quotient: denominator not inside numerator");
  const Eigen::Index nb = big.rank();
  Mat rel = zeros(small.rank(), nb);
  for (Eigen::Index i = 0; i < small.rank(); ++i) {
    auto c = big.coords(RowVec(small.basis().row(i)));
    rel.row(i) = *c;
  }
  FgAbGroup a0(nb, rel);

  std::vector<Eigen::Index> kept;
  std::vector<Int> divisors;
  for (size_t t = 0; t < a0.torsion().size(); ++t) {
    kept.push_back(a0.torsion_coords()[t]);
    divisors.push_back(a0.torsion()[t]);
  }
  for (Eigen::Index i = a0.rels_rank(); i < nb; ++i) kept.push_back(i);

  LatticeQuotient q;
  q.grp = FgAbGroup::from_invariants(divisors, nb - a0.rels_rank());
  q.big = big;
  q.small = small;
  const Eigen::Index ng = static_cast<Eigen::Index>(kept.size());
  q.lifts = zeros(ng, big.ambient());
  q.to_red = zeros(nb, ng);
  for (Eigen::Index p = 0; p < ng; ++p) {
    q.lifts.row(p) = a0.inv_lift(kept[static_cast<size_t>(p)]) * big.basis();
    q.to_red.col(p) = a0.V().col(kept[static_cast<size_t>(p)]);
  }
  return q;
}

PushoutData pushout(const AbMap& f, const AbMap& g) {
  const Eigen::Index na = f.dom().ngens();
  if (g.dom().ngens() != na) throw std::invalid_argument("pushout: domain mismatch");
  const Eigen::Index nb = f.cod().ngens(), nc = g.cod().ngens();
  const Mat& rb = f.cod().rels().basis();
  const Mat& rc = g.cod().rels().basis();
  Mat rel = zeros(rb.rows() + rc.rows() + na, nb + nc);
  rel.block(0, 0, rb.rows(), nb) = rb;
  rel.block(rb.rows(), nb, rc.rows(), nc) = rc;
  for (Eigen::Index i = 0; i < na; ++i) {
    rel.block(rb.rows() + rc.rows() + i, 0, 1, nb) = f.matrix().row(i);
    rel.block(rb.rows() + rc.rows() + i, nb, 1, nc) = -g.matrix().row(i);
  }
  PushoutData p;
  p.grp = FgAbGroup(nb + nc, rel);
  p.nb = nb;
  p.nc = nc;
  return p;
}

} // namespace foxcalc
