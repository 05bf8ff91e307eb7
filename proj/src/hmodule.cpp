#include "foxcalc/hmodule.hpp"

#include <map>
#include <set>
#include <stdexcept>

namespace foxcalc {

namespace {

RowVec moved_by(const GroupRing& r, int t, const RowVec& v, bool left) {
  return left ? r.mul(r.unit(t), v) : r.mul(v, r.unit(t));
}

Mat action_rows(const GroupRing& r, const LatticeQuotient& q, int t, bool left) {
  Mat rows(q.grp.ngens(), q.grp.ngens());
  for (Eigen::Index i = 0; i < q.lifts.rows(); ++i)
    rows.row(i) = q.coords(moved_by(r, t, q.lifts.row(i), left));
  return rows;
}

} // namespace

HModule make_hmodule(const GroupRing& r, std::vector<int> actors, const Lattice& big,
                     const Lattice& small, bool left) {
  if (big.ambient() != r.dim() || small.ambient() != r.dim())
    throw std::invalid_argument("make_hmodule: lattices do not live in the given ring");
  if (!big.contains(small)) throw std::invalid_argument("make_hmodule: small not inside big");
  auto stable = [&](const Lattice& l) {
    for (int t : actors)
      for (Eigen::Index i = 0; i < l.basis().rows(); ++i)
        if (!l.contains(moved_by(r, t, l.basis().row(i), left))) return false;
    return true;
  };
  if (!stable(big) || !stable(small))
    throw std::invalid_argument("make_hmodule: lattices are not stable under the actors");

  HModule m;
  m.ring = &r;
  m.actors = std::move(actors);
  m.left = left;
  m.q = quotient_group(big, small);
  for (int t : m.actors) m.act.push_back(AbMap(m.q.grp, m.q.grp, action_rows(r, m.q, t, left)));

  // matrices act on row vectors, so composition order flips for left modules
  Subgroup gen = closure(r.group(), m.actors);
  if (gen.size() <= 64) {
    std::map<int, Mat> mats;
    for (int t : gen) mats[t] = action_rows(r, m.q, t, left);
    for (int t1 : gen)
      for (int t2 : gen) {
        Mat lhs = mats[r.group().op(t1, t2)];
        Mat rhs = left ? Mat(mats[t2] * mats[t1]) : Mat(mats[t1] * mats[t2]);
        for (Eigen::Index i = 0; i < lhs.rows(); ++i)
          if (!m.q.grp.equal(lhs.row(i), rhs.row(i)))
            throw std::logic_error("make_hmodule: induced matrices are not an action");
      }
  }
  return m;
}

RowVec TensorH::pure(const RowVec& ca, const RowVec& cb) const {
  RowVec out = zero_row(na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    if (ca[i] == 0) continue;
    for (Eigen::Index j = 0; j < nb; ++j) {
      Int prod = ca[i] * cb[j];
      out[tensor_index(nb, i, j)] = prod;
    }
  }
  return out;
}

TensorH tensor_over_h(const HModule& a, const HModule& b) {
  if (a.left || !b.left)
    throw std::invalid_argument("tensor_over_h: need a right and a left module");
  if (a.actors.size() != b.actors.size())
    throw std::invalid_argument("tensor_over_h: actor lists are not aligned");
  TensorH t;
  t.na = a.q.grp.ngens();
  t.nb = b.q.grp.ngens();
  FgAbGroup plain = tensor(a.q.grp, b.q.grp);
  Mat extra(static_cast<Eigen::Index>(a.actors.size()) * t.na * t.nb, t.na * t.nb);
  Eigen::Index at = 0;
  for (size_t s = 0; s < a.actors.size(); ++s) {
    const Mat& ma = a.act[s].matrix();
    const Mat& mb = b.act[s].matrix();
    for (Eigen::Index i = 0; i < t.na; ++i)
      for (Eigen::Index j = 0; j < t.nb; ++j) {
        RowVec row = zero_row(t.na * t.nb);
        for (Eigen::Index k = 0; k < t.na; ++k) row[tensor_index(t.nb, k, j)] += ma(i, k);
        for (Eigen::Index l = 0; l < t.nb; ++l) row[tensor_index(t.nb, i, l)] -= mb(j, l);
        extra.row(at++) = row;
      }
  }
  t.grp = FgAbGroup(t.na * t.nb, vstack(plain.rels().basis(), extra));
  return t;
}

FgAbGroup coinvariants(const HModule& j) {
  if (!j.left) throw std::invalid_argument("coinvariants: expects a left module");
  const GroupRing& r = *j.ring;
  Mat rows(static_cast<Eigen::Index>(j.actors.size()) * j.q.big.rank(), r.dim());
  Eigen::Index at = 0;
  for (int t : j.actors)
    for (Eigen::Index i = 0; i < j.q.big.rank(); ++i) {
      RowVec v = j.q.big.basis().row(i);
      rows.row(at++) = r.mul(r.unit(t), v) - v;
    }
  return quotient_group(j.q.big, j.q.small + Lattice::span(rows)).grp;
}

SquareReport pushout_check(const DiagramSquare& sq) {
  SquareReport rep;
  const FgAbGroup& d = sq.right.cod();
  AbMap p1 = then(sq.top, sq.right);
  AbMap p2 = then(sq.left, sq.bottom);
  for (Eigen::Index i = 0; i < p1.matrix().rows(); ++i)
    if (!d.equal(p1.matrix().row(i), p2.matrix().row(i))) {
      rep.detail = "square does not commute at generator " + std::to_string(i);
      return rep;
    }
  rep.commutes = true;
  PushoutData p = pushout(sq.top, sq.left);
  auto induced = AbMap::try_make(p.grp, d, vstack(sq.right.matrix(), sq.bottom.matrix()));
  if (!induced) {
    rep.detail = "induced map out of the universal object is ill-defined";
    return rep;
  }
  rep.is_pushout = induced->is_iso();
  rep.detail = "universal " + p.grp.describe() + " vs " + d.describe();
  return rep;
}

std::vector<bool> exactness_check(const std::vector<AbMap>& seq) {
  std::vector<bool> out;
  for (size_t i = 0; i + 1 < seq.size(); ++i) {
    if (seq[i].cod().ngens() != seq[i + 1].dom().ngens() ||
        !(seq[i].cod().rels() == seq[i + 1].dom().rels()))
      throw std::invalid_argument("exactness_check: consecutive maps do not compose");
    out.push_back(seq[i].image_lattice() == seq[i + 1].kernel_lattice());
  }
  return out;
}

FgAbGroup direct_sum_group(const std::vector<const FgAbGroup*>& parts) {
  FgAbGroup acc(0, Mat(0, 0));
  for (const FgAbGroup* p : parts) acc = direct_sum(acc, *p);
  return acc;
}

bool decomposition_check(const FgAbGroup& lhs, const std::vector<const FgAbGroup*>& parts) {
  return same_invariants(lhs, direct_sum_group(parts));
}

bool maps_equal(const AbMap& f, const AbMap& g) {
  if (f.dom().ngens() != g.dom().ngens() || f.cod().ngens() != g.cod().ngens()) return false;
  if (!(f.dom().rels() == g.dom().rels()) || !(f.cod().rels() == g.cod().rels())) return false;
  for (Eigen::Index i = 0; i < f.matrix().rows(); ++i)
    if (!f.cod().equal(f.matrix().row(i), g.matrix().row(i))) return false;
  return true;
}

AbMap minus_one_map(const GroupRing& r, const FgAbGroup& dom, const std::vector<int>& gens,
                    const LatticeQuotient& q) {
  if (dom.ngens() != static_cast<Eigen::Index>(gens.size()))
    throw std::invalid_argument("minus_one_map: generator count mismatch");
  Mat rows(dom.ngens(), q.grp.ngens());
  for (size_t i = 0; i < gens.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = q.coords(r.elem_minus_one(gens[i]));
  return AbMap(dom, q.grp, rows);
}

AbMap mult_map(const FgAbGroup& dom, const GroupRing& r, const Mat& lifts1, const Mat& lifts2,
               const LatticeQuotient& q) {
  if (dom.ngens() != lifts1.rows() * lifts2.rows())
    throw std::invalid_argument("mult_map: generator grid mismatch");
  if (lifts1.cols() != r.dim() || lifts2.cols() != r.dim())
    throw std::invalid_argument("mult_map: lifts do not live in the given ring");
  Mat rows(dom.ngens(), q.grp.ngens());
  for (Eigen::Index i = 0; i < lifts1.rows(); ++i)
    for (Eigen::Index j = 0; j < lifts2.rows(); ++j)
      rows.row(tensor_index(lifts2.rows(), i, j)) = q.coords(r.mul(lifts1.row(i), lifts2.row(j)));
  return AbMap(dom, q.grp, rows);
}

AbMap zeta_map(Filtration& f, const Subgroup& h, int n) {
  const GroupRing& r = f.ring();
  LatticeQuotient qn = fox_quotient(f, h, n);
  LatticeQuotient qprev = aug_quotient(f, n - 1);
  GroupAb hab = abelian_section(r.group(), h, commutator_subgroup(r.group(), h, h));
  FgAbGroup dom = tensor(qprev.grp, hab.grp);
  Mat hl(static_cast<Eigen::Index>(hab.gens.size()), r.dim());
  for (size_t j = 0; j < hab.gens.size(); ++j)
    hl.row(static_cast<Eigen::Index>(j)) = r.elem_minus_one(hab.gens[j]);
  return mult_map(dom, r, qprev.lifts, hl, qn);
}

RowVec push_ring(const QuotientGroup& qg, const RowVec& v) {
  RowVec out = zero_row(static_cast<Eigen::Index>(qg.reps.size()));
  for (Eigen::Index g = 0; g < v.size(); ++g) out[qg.proj[static_cast<size_t>(g)]] += v[g];
  return out;
}

Mat push_ring_rows(const QuotientGroup& qg, const Mat& rows) {
  Mat out(rows.rows(), static_cast<Eigen::Index>(qg.reps.size()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.row(i) = push_ring(qg, rows.row(i));
  return out;
}

RowVec pull_ring(const QuotientGroup& qg, const RowVec& v) {
  RowVec out = zero_row(static_cast<Eigen::Index>(qg.proj.size()));
  for (Eigen::Index q = 0; q < v.size(); ++q) out[qg.reps[static_cast<size_t>(q)]] = v[q];
  return out;
}

Mat pull_ring_rows(const QuotientGroup& qg, const Mat& rows) {
  Mat out(rows.rows(), static_cast<Eigen::Index>(qg.proj.size()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.row(i) = pull_ring(qg, rows.row(i));
  return out;
}

RowVec embed_ring(const SubgroupGroup& sg, const RowVec& v) {
  RowVec out = zero_row(static_cast<Eigen::Index>(sg.from_parent.size()));
  for (Eigen::Index s = 0; s < v.size(); ++s) out[sg.to_parent[static_cast<size_t>(s)]] = v[s];
  return out;
}

Mat embed_ring_rows(const SubgroupGroup& sg, const Mat& rows) {
  Mat out(rows.rows(), static_cast<Eigen::Index>(sg.from_parent.size()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.row(i) = embed_ring(sg, rows.row(i));
  return out;
}

Lattice restrict_ring_lattice(const SubgroupGroup& sg, const Lattice& l) {
  Mat out(l.rank(), static_cast<Eigen::Index>(sg.to_parent.size()));
  out.setZero();
  for (Eigen::Index i = 0; i < l.rank(); ++i)
    for (Eigen::Index p = 0; p < l.basis().cols(); ++p) {
      if (l.basis()(i, p) == 0) continue;
      int s = sg.from_parent[static_cast<size_t>(p)];
      if (s < 0)
        throw std::invalid_argument("restrict_ring_lattice: lattice not supported on subgroup");
      out(i, s) = l.basis()(i, p);
    }
  return Lattice::span(out);
}

std::pair<std::vector<int>, std::vector<int>> unit_coset_pair(const GroupRing& rg,
                                                              const SubgroupGroup& sgh,
                                                              const Lattice& j_sub) {
  GroupRing rh(sgh.grp);
  if (j_sub.ambient() != rh.dim())
    throw std::invalid_argument("unit_coset_pair: ideal does not live in the subgroup ring");
  Lattice j_par = Lattice::span(embed_ring_rows(sgh, j_sub.basis()));
  Lattice ig = rg.aug_ideal(full_subgroup(rg.group()));
  Lattice ih = rh.aug_ideal(full_subgroup(sgh.grp));
  std::vector<int> gs = rg.unit_coset_set(rg.mul_lattice(ig, j_par));
  std::vector<int> hs;
  for (int s : rh.unit_coset_set(rh.mul_lattice(ih, j_sub))) hs.push_back(sgh.to_parent[s]);
  std::sort(hs.begin(), hs.end());
  return {gs, hs};
}

std::pair<Lattice, Lattice> intersection_pair(Filtration& f, const Subgroup& h, const Subgroup& k,
                                              const Lattice& j) {
  const GroupRing& r = f.ring();
  const FiniteGroup& g = r.group();
  Lattice ih = r.aug_ideal(h);
  Lattice ihj = r.mul_lattice(ih, j);
  Lattice lhs = intersect(ihj, r.mul_lattice(r.aug_ideal(k), j) + r.mul_lattice(f.level(2), j));

  Subgroup kg2 = product_subgroup(g, k, f.series().term(2));
  Lattice rhs = r.mul_lattice(r.aug_ideal(intersect_subgroups(h, kg2)), j) + r.mul_lattice(ih, ihj);

  // the spanning set of products (h-1)x depends on its parameter m only
  // through gcd(m, e): both membership conditions are e-periodic
  std::vector<Int> tors = quotient_group(j, intersect(j, ihj)).grp.torsion();
  Int e = lcm_int(g.exponent(), tors.empty() ? Int(1) : tors.back());
  std::vector<RowVec> extra;
  for (Int m = 1; m <= e; ++m) {
    if (e % m != 0) continue;
    Mat scaled = identity(r.dim());
    scaled *= m;
    Mat db = intersect(ihj, Lattice::span(scaled)).basis();
    for (Eigen::Index a = 0; a < db.rows(); ++a)
      for (Eigen::Index b = 0; b < db.cols(); ++b) db(a, b) /= m;
    Lattice xm = intersect(j, Lattice::span(db));
    if (xm.rank() == 0) continue;
    std::set<int> pm;
    for (int el = 0; el < g.order(); ++el) pm.insert(g.pow(el, m));
    std::set<int> reach;
    for (int q : kg2)
      for (int p : pm) reach.insert(g.op(q, p));
    for (int hel : h) {
      if (hel == 0 || !reach.count(hel)) continue;
      RowVec hm1 = r.elem_minus_one(hel);
      for (Eigen::Index a = 0; a < xm.rank(); ++a) extra.push_back(r.mul(hm1, xm.basis().row(a)));
    }
  }
  Mat um(static_cast<Eigen::Index>(extra.size()), r.dim());
  for (size_t a = 0; a < extra.size(); ++a) um.row(static_cast<Eigen::Index>(a)) = extra[a];
  return {lhs, rhs + Lattice::span(um)};
}

std::pair<FgAbGroup, FgAbGroup> cyclic_relative_pair(Filtration& f, const Subgroup& h,
                                                     const Subgroup& nrm, int n) {
  const GroupRing& r = f.ring();
  const FiniteGroup& g = r.group();
  FgAbGroup lhs = rel_poly_quotient(f, h, nrm, n).grp;

  int t = -1;
  for (int el : h)
    if (g.element_order(el) == static_cast<int>(h.size())) {
      t = el;
      break;
    }
  if (t < 0) throw std::invalid_argument("cyclic_relative_pair: subgroup is not cyclic");

  QuotientGroup qg = quotient_by(g, nrm);
  GroupRing rq(qg.grp);
  Filtration fq(rq, project_series(qg, f.series()));
  Lattice big = rq.aug_ideal(full_subgroup(qg.grp));
  RowVec nt = zero_row(rq.dim());
  for (int kk = 0, cur = 0; kk < static_cast<int>(h.size()); ++kk, cur = g.op(cur, t))
    nt[qg.proj[static_cast<size_t>(cur)]] += 1;
  Mat prod(big.rank(), rq.dim());
  for (Eigen::Index i = 0; i < big.rank(); ++i) prod.row(i) = rq.mul(big.basis().row(i), nt);
  FgAbGroup rhs = quotient_group(big, fq.level(n) + Lattice::span(prod)).grp;
  return {lhs, rhs};
}

} // namespace foxcalc
