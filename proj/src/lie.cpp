#include "foxcalc/lie.hpp"

#include <stdexcept>

namespace foxcalc {

namespace {

Int fdiv_r(const Int& a, const Int& b) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Mat rows_to_mat(const std::vector<RowVec>& rows, Eigen::Index cols) {
  Mat m(static_cast<Eigen::Index>(rows.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = rows[static_cast<size_t>(i)];
  return m;
}

// bilinear expansion of cu /\ cv in the wedge basis
RowVec wedge_expand(Eigen::Index n, const RowVec& cu, const RowVec& cv) {
  RowVec out = zero_row(wedge_gens(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cu[i] == 0) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      Int c = cu[i] * cv[j];
      if (c == 0) continue;
      RowVec w = wedge_elem(n, i, j);
      out += w * c;
    }
  }
  return out;
}

} // namespace

RowVec DiagSection::coords(int g) const {
  RowVec dc = raw.grp.inv_coords(raw.coords(g));
  const auto& tc = raw.grp.torsion_coords();
  RowVec out = zero_row(static_cast<Eigen::Index>(tc.size()));
  for (size_t k = 0; k < tc.size(); ++k)
    out[static_cast<Eigen::Index>(k)] = fdiv_r(dc[tc[k]], orders[k]);
  return out;
}

DiagSection diag_section(const FiniteGroup& g, const Subgroup& s, const Subgroup& n) {
  DiagSection d;
  d.raw = abelian_section(g, s, n);
  if (d.raw.grp.free_rank() != 0) throw std::logic_error("diag_section: section has a free part");
  d.orders = d.raw.grp.torsion();
  for (Eigen::Index k : d.raw.grp.torsion_coords()) d.gens.push_back(d.raw.lift_invariant(k));
  d.grp = FgAbGroup::from_invariants(d.orders);
  for (size_t k = 0; k < d.gens.size(); ++k)
    if (d.coords(d.gens[k]) != unit_row(d.grp.ngens(), static_cast<Eigen::Index>(k)))
      throw std::logic_error("diag_section: generator coordinates are not canonical");
  return d;
}

AbMap section_map(const DiagSection& from, const DiagSection& to) {
  Mat rows(from.grp.ngens(), to.grp.ngens());
  for (size_t i = 0; i < from.gens.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = to.coords(from.gens[i]);
  return AbMap(from.grp, to.grp, rows);
}

AbMap tensor_map(const AbMap& f, const AbMap& g) {
  const Eigen::Index nb = g.dom().ngens(), nd = g.cod().ngens();
  FgAbGroup dom = tensor(f.dom(), g.dom());
  FgAbGroup cod = tensor(f.cod(), g.cod());
  Mat rows = zeros(dom.ngens(), cod.ngens());
  for (Eigen::Index i = 0; i < f.dom().ngens(); ++i)
    for (Eigen::Index j = 0; j < nb; ++j)
      for (Eigen::Index k = 0; k < f.cod().ngens(); ++k)
        for (Eigen::Index l = 0; l < nd; ++l) {
          Int c = f.matrix()(i, k) * g.matrix()(j, l);
          if (c != 0) rows(tensor_index(nb, i, j), tensor_index(nd, k, l)) += c;
        }
  return AbMap(std::move(dom), std::move(cod), std::move(rows));
}

AbMap wedge_functor(const AbMap& f) {
  const Eigen::Index n = f.dom().ngens(), m = f.cod().ngens();
  Mat rows = zeros(wedge_gens(n), wedge_gens(m));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      rows.row(wedge_index(n, i, j)) =
          wedge_expand(m, RowVec(f.matrix().row(i)), RowVec(f.matrix().row(j)));
  return AbMap(exterior_square(f.dom()), exterior_square(f.cod()), std::move(rows));
}

AbMap l2_wedge(const FgAbGroup& a) {
  const Eigen::Index n = a.ngens();
  Mat rows = zeros(wedge_gens(n), n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      rows(wedge_index(n, i, j), tensor_index(n, i, j)) = 1;
      rows(wedge_index(n, i, j), tensor_index(n, j, i)) = -1;
    }
  return AbMap(exterior_square(a), tensor(a, a), std::move(rows));
}

AbMap comm_wedge_map(const DiagSection& d, const DiagSection& c) {
  const FiniteGroup& g = *d.raw.G;
  const Eigen::Index n = d.grp.ngens();
  Mat rows(wedge_gens(n), c.grp.ngens());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      rows.row(wedge_index(n, i, j)) =
          c.coords(g.commutator(d.gens[static_cast<size_t>(i)], d.gens[static_cast<size_t>(j)]));
  return AbMap(exterior_square(d.grp), c.grp, std::move(rows));
}

namespace {

// bracket tables must reproduce the commutator class of every element pair
void check_bracket_table(const FiniteGroup& g, const Subgroup& sa, const Subgroup& sb,
                         const DiagSection& a, const DiagSection& b, const DiagSection& cod,
                         const Mat& table) {
  if (g.order() > 64) return;
  const Eigen::Index nb = b.grp.ngens();
  for (int x : sa)
    for (int y : sb) {
      RowVec ca = a.coords(x), cb = b.coords(y);
      RowVec got = zero_row(cod.grp.ngens());
      for (Eigen::Index i = 0; i < ca.size(); ++i) {
        if (ca[i] == 0) continue;
        for (Eigen::Index j = 0; j < cb.size(); ++j) {
          Int m = ca[i] * cb[j];
          if (m != 0) got += table.row(tensor_index(nb, i, j)) * m;
        }
      }
      if (!cod.grp.equal(got, cod.coords(g.commutator(x, y))))
        throw std::logic_error("graded_lie: bracket table is not bilinear on classes");
    }
}

} // namespace

GradedLie graded_lie(const FiniteGroup& g, const Series& s) {
  std::string diag = validate_nseries(g, s);
  if (!diag.empty()) throw std::invalid_argument("graded_lie: " + diag);
  DiagSection l1 = diag_section(g, s.term(1), s.term(2));
  DiagSection l2 = diag_section(g, s.term(2), s.term(3));
  DiagSection l3 = diag_section(g, s.term(3), s.term(4));
  const Eigen::Index n1 = l1.grp.ngens(), n2 = l2.grp.ngens();
  Mat r11(n1 * n1, l2.grp.ngens());
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n1; ++j)
      r11.row(tensor_index(n1, i, j)) = l2.coords(
          g.commutator(l1.gens[static_cast<size_t>(i)], l1.gens[static_cast<size_t>(j)]));
  Mat r12(n1 * n2, l3.grp.ngens());
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      r12.row(tensor_index(n2, i, j)) = l3.coords(
          g.commutator(l1.gens[static_cast<size_t>(i)], l2.gens[static_cast<size_t>(j)]));
  check_bracket_table(g, s.term(1), s.term(1), l1, l1, l2, r11);
  check_bracket_table(g, s.term(1), s.term(2), l1, l2, l3, r12);
  AbMap b11(tensor(l1.grp, l1.grp), l2.grp, std::move(r11));
  AbMap b12(tensor(l1.grp, l2.grp), l3.grp, std::move(r12));
  return GradedLie{s, std::move(l1), std::move(l2), std::move(l3), std::move(b11), std::move(b12)};
}

PairContext pair_context(const FiniteGroup& g, const Series& s, const Subgroup& h) {
  std::string diag = validate_nseries(g, s);
  if (!diag.empty()) throw std::invalid_argument("pair_context: " + diag);
  if (!is_subgroup(g, h)) throw std::invalid_argument("pair_context: not a subgroup");
  PairContext c;
  c.G = &g;
  c.s = s;
  c.h = h;
  c.h2 = commutator_subgroup(g, h, h);
  c.h3 = commutator_subgroup(g, h, c.h2);
  c.h4 = commutator_subgroup(g, h, c.h3);
  c.gab = diag_section(g, full_subgroup(g), s.term(2));
  c.l2g = diag_section(g, s.term(2), s.term(3));
  c.hab = diag_section(g, h, c.h2);
  c.hl2 = diag_section(g, c.h2, c.h3);
  c.hl3 = diag_section(g, c.h3, c.h4);
  return c;
}

AbMap l2_mixed(const PairContext& ctx) {
  const Eigen::Index nh = ctx.hab.grp.ngens();
  FgAbGroup cod = tensor(ctx.gab.grp, ctx.hab.grp);
  Mat rows = zeros(wedge_gens(nh), cod.ngens());
  for (Eigen::Index p = 0; p < nh; ++p)
    for (Eigen::Index q = p + 1; q < nh; ++q) {
      RowVec ip = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(p)]);
      RowVec iq = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(q)]);
      for (Eigen::Index k = 0; k < ip.size(); ++k) {
        if (ip[k] != 0) rows(wedge_index(nh, p, q), tensor_index(nh, k, q)) += ip[k];
        if (iq[k] != 0) rows(wedge_index(nh, p, q), tensor_index(nh, k, p)) -= iq[k];
      }
    }
  return AbMap(exterior_square(ctx.hab.grp), std::move(cod), std::move(rows));
}

RowVec U3Pres::blk_a(const RowVec& cl2, const RowVec& ch) const {
  RowVec out = zero_row(na + nb);
  for (Eigen::Index i = 0; i < nl; ++i) {
    if (cl2[i] == 0) continue;
    for (Eigen::Index k = 0; k < nh; ++k) {
      Int c = cl2[i] * ch[k];
      if (c != 0) out[idx_a(i, k)] += c;
    }
  }
  return out;
}

RowVec U3Pres::blk_b(const RowVec& c1, const RowVec& c2, const RowVec& ch) const {
  RowVec out = zero_row(na + nb);
  for (Eigen::Index i = 0; i < ng; ++i) {
    if (c1[i] == 0) continue;
    for (Eigen::Index j = 0; j < ng; ++j) {
      if (c2[j] == 0) continue;
      Int cij = c1[i] * c2[j];
      for (Eigen::Index k = 0; k < nh; ++k) {
        Int c = cij * ch[k];
        if (c != 0) out[idx_b(i, j, k)] += c;
      }
    }
  }
  return out;
}

RowVec U3Pres::nu12(const RowVec& cg, int w) const {
  if (!sub_contains(ctx.h2, w))
    throw std::invalid_argument("nu12: element is outside the second subgroup term");
  RowVec out = zero_row(na + nb);
  if (ctx.hl2.grp.ngens() == 0) return out;
  RowVec wc = ctx.hl2.coords(w);
  if (bracket2.rows() == 0) {
    if (!ctx.hl2.grp.is_zero_elem(wc))
      throw std::logic_error("nu12: no generator brackets to expand into");
    return out;
  }
  auto sol = la::solve_mod(bracket2, ctx.hl2.grp.rels().basis(), wc);
  if (!sol) throw std::logic_error("nu12: class is not spanned by generator brackets");
  for (size_t t = 0; t < pairs2.size(); ++t) {
    Int x = (*sol)[static_cast<Eigen::Index>(t)];
    if (x == 0) continue;
    auto [p, q] = pairs2[t];
    RowVec ip = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(p)]);
    RowVec iq = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(q)]);
    RowVec term = blk_b(cg, ip, unit_row(nh, q)) - blk_b(cg, iq, unit_row(nh, p));
    out += term * x;
  }
  return out;
}

RowVec U3Pres::nu03(int w) const {
  if (!sub_contains(ctx.h3, w))
    throw std::invalid_argument("nu03: element is outside the third subgroup term");
  RowVec out = zero_row(na + nb);
  if (ctx.hl3.grp.ngens() == 0) return out;
  RowVec wc = ctx.hl3.coords(w);
  if (bracket3.rows() == 0) {
    if (!ctx.hl3.grp.is_zero_elem(wc))
      throw std::logic_error("nu03: no basic brackets to expand into");
    return out;
  }
  auto sol = la::solve_mod(bracket3, ctx.hl3.grp.rels().basis(), wc);
  if (!sol) throw std::logic_error("nu03: class is not spanned by basic brackets");
  for (size_t t = 0; t < triples3.size(); ++t) {
    Int x = (*sol)[static_cast<Eigen::Index>(t)];
    if (x == 0) continue;
    auto [i, j, k] = triples3[t];
    RowVec ci = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(i)]);
    RowVec cj = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(j)]);
    RowVec ck = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(k)]);
    RowVec ei = unit_row(nh, i), ej = unit_row(nh, j), ek = unit_row(nh, k);
    RowVec term = blk_b(ci, cj, ek) - blk_b(ci, ck, ej) - blk_b(cj, ck, ei) + blk_b(ck, cj, ei);
    out += term * x;
  }
  return out;
}

U3Pres u3_build(const PairContext& ctx) {
  const FiniteGroup& g = *ctx.G;
  U3Pres u;
  u.ctx = ctx;
  u.ng = ctx.gab.grp.ngens();
  u.nh = ctx.hab.grp.ngens();
  u.nl = ctx.l2g.grp.ngens();
  u.na = u.nl * u.nh;
  u.nb = u.ng * u.ng * u.nh;
  const Eigen::Index total = u.na + u.nb;
  const Eigen::Index nh = u.nh;

  for (Eigen::Index p = 0; p < nh; ++p)
    for (Eigen::Index q = p + 1; q < nh; ++q) u.pairs2.push_back({p, q});
  u.bracket2 = Mat(static_cast<Eigen::Index>(u.pairs2.size()), ctx.hl2.grp.ngens());
  for (size_t t = 0; t < u.pairs2.size(); ++t) {
    auto [p, q] = u.pairs2[t];
    u.bracket2.row(static_cast<Eigen::Index>(t)) = ctx.hl2.coords(
        g.commutator(ctx.hab.gens[static_cast<size_t>(p)], ctx.hab.gens[static_cast<size_t>(q)]));
  }
  for (Eigen::Index i = 0; i < nh; ++i)
    for (Eigen::Index j = 0; j < nh; ++j)
      for (Eigen::Index k = j + 1; k < nh; ++k) u.triples3.push_back({i, j, k});
  u.bracket3 = Mat(static_cast<Eigen::Index>(u.triples3.size()), ctx.hl3.grp.ngens());
  for (size_t t = 0; t < u.triples3.size(); ++t) {
    auto [i, j, k] = u.triples3[t];
    int inner = g.commutator(ctx.hab.gens[static_cast<size_t>(j)], ctx.hab.gens[static_cast<size_t>(k)]);
    u.bracket3.row(static_cast<Eigen::Index>(t)) =
        ctx.hl3.coords(g.commutator(ctx.hab.gens[static_cast<size_t>(i)], inner));
  }

  std::vector<RowVec> iota(static_cast<size_t>(nh));
  for (Eigen::Index p = 0; p < nh; ++p)
    iota[static_cast<size_t>(p)] = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(p)]);

  std::vector<RowVec> rels;
  {
    FgAbGroup ta = tensor(ctx.l2g.grp, ctx.hab.grp);
    const Mat& b = ta.rels().basis();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      RowVec v = zero_row(total);
      v.segment(0, u.na) = b.row(r);
      rels.push_back(v);
    }
  }
  {
    FgAbGroup tb = tensor(tensor(ctx.gab.grp, ctx.gab.grp), ctx.hab.grp);
    const Mat& b = tb.rels().basis();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      RowVec v = zero_row(total);
      v.segment(u.na, u.nb) = b.row(r);
      rels.push_back(v);
    }
  }

  // a block-A bracket equals its antisymmetrized block-B product
  for (Eigen::Index i = 0; i < u.ng; ++i)
    for (Eigen::Index j = i + 1; j < u.ng; ++j) {
      RowVec cl = ctx.l2g.coords(g.commutator(ctx.gab.gens[static_cast<size_t>(i)],
                                              ctx.gab.gens[static_cast<size_t>(j)]));
      for (Eigen::Index k = 0; k < nh; ++k) {
        RowVec ek = unit_row(nh, k);
        rels.push_back(RowVec(u.blk_a(cl, ek) - u.blk_b(unit_row(u.ng, i), unit_row(u.ng, j), ek) +
                              u.blk_b(unit_row(u.ng, j), unit_row(u.ng, i), ek)));
      }
    }

  // antisymmetrized pairs from Ker(c2) land in block B through the middle slot
  {
    AbMap c2h = comm_wedge_map(ctx.hab, ctx.hl2);
    AbMap l2h = l2_wedge(ctx.hab.grp);
    Mat img = c2h.kernel_lattice().basis() * l2h.matrix();
    for (Eigen::Index r = 0; r < img.rows(); ++r)
      for (Eigen::Index i = 0; i < u.ng; ++i) {
        RowVec row = zero_row(total);
        RowVec ei = unit_row(u.ng, i);
        for (Eigen::Index p = 0; p < nh; ++p)
          for (Eigen::Index q = 0; q < nh; ++q) {
            const Int& c = img(r, tensor_index(nh, p, q));
            if (c == 0) continue;
            RowVec term = u.blk_b(ei, iota[static_cast<size_t>(p)], unit_row(nh, q));
            row += term * c;
          }
        rels.push_back(row);
      }
  }

  // weight-three kernel relations, expanded and pushed through both slots
  {
    const Eigen::Index nc = nh * nh * nh;
    Mat c33(nc, ctx.hl3.grp.ngens());
    for (Eigen::Index i = 0; i < nh; ++i)
      for (Eigen::Index j = 0; j < nh; ++j)
        for (Eigen::Index k = 0; k < nh; ++k) {
          int inner = g.commutator(ctx.hab.gens[static_cast<size_t>(j)],
                                   ctx.hab.gens[static_cast<size_t>(k)]);
          c33.row((i * nh + j) * nh + k) =
              ctx.hl3.coords(g.commutator(ctx.hab.gens[static_cast<size_t>(i)], inner));
        }
    Mat kb = la::preimage_lattice(c33, ctx.hl3.grp.rels().basis());
    for (Eigen::Index r = 0; r < kb.rows(); ++r) {
      RowVec cube = zero_row(nc);
      for (Eigen::Index i = 0; i < nh; ++i)
        for (Eigen::Index j = 0; j < nh; ++j)
          for (Eigen::Index k = 0; k < nh; ++k) {
            const Int& c = kb(r, (i * nh + j) * nh + k);
            if (c == 0) continue;
            cube[(i * nh + j) * nh + k] += c;
            cube[(i * nh + k) * nh + j] -= c;
            cube[(j * nh + k) * nh + i] -= c;
            cube[(k * nh + j) * nh + i] += c;
          }
      RowVec row = zero_row(total);
      for (Eigen::Index p = 0; p < nh; ++p)
        for (Eigen::Index q = 0; q < nh; ++q)
          for (Eigen::Index s = 0; s < nh; ++s) {
            const Int& c = cube[(p * nh + q) * nh + s];
            if (c == 0) continue;
            RowVec term =
                u.blk_b(iota[static_cast<size_t>(p)], iota[static_cast<size_t>(q)], unit_row(nh, s));
            row += term * c;
          }
      rels.push_back(row);
    }
  }

  u.grp = FgAbGroup(total, rows_to_mat(rels, total));
  return u;
}

FgAbGroup u2_build(const PairContext& ctx) {
  FgAbGroup t = tensor(ctx.gab.grp, ctx.hab.grp);
  AbMap c2h = comm_wedge_map(ctx.hab, ctx.hl2);
  AbMap l2m = l2_mixed(ctx);
  Mat extra = c2h.kernel_lattice().basis() * l2m.matrix();
  return FgAbGroup(t.ngens(), vstack(t.rels().basis(), extra));
}

namespace {

void check_filtration(const PairContext& ctx, Filtration& f) {
  if (&f.ring().group() != ctx.G)
    throw std::invalid_argument("filtration ring is over a different group");
  if (f.series().terms != ctx.s.terms)
    throw std::invalid_argument("filtration series differs from the context series");
}

} // namespace

AbMap theta1(const PairContext& ctx, Filtration& f) {
  check_filtration(ctx, f);
  return minus_one_map(f.ring(), ctx.hab.grp, ctx.hab.gens, fox_quotient(f, ctx.h, 1));
}

AbMap theta2(const PairContext& ctx, Filtration& f) {
  check_filtration(ctx, f);
  const GroupRing& r = f.ring();
  FgAbGroup dom = u2_build(ctx);
  Mat l1(ctx.gab.grp.ngens(), r.dim());
  for (size_t i = 0; i < ctx.gab.gens.size(); ++i)
    l1.row(static_cast<Eigen::Index>(i)) = r.elem_minus_one(ctx.gab.gens[i]);
  Mat l2(ctx.hab.grp.ngens(), r.dim());
  for (size_t j = 0; j < ctx.hab.gens.size(); ++j)
    l2.row(static_cast<Eigen::Index>(j)) = r.elem_minus_one(ctx.hab.gens[j]);
  return mult_map(dom, r, l1, l2, fox_quotient(f, ctx.h, 2));
}

AbMap theta3(const U3Pres& u, Filtration& f) {
  check_filtration(u.ctx, f);
  const GroupRing& r = f.ring();
  LatticeQuotient q3 = fox_quotient(f, u.ctx.h, 3);
  Mat rows(u.na + u.nb, q3.grp.ngens());
  for (Eigen::Index i = 0; i < u.nl; ++i) {
    RowVec li = r.elem_minus_one(u.ctx.l2g.gens[static_cast<size_t>(i)]);
    for (Eigen::Index k = 0; k < u.nh; ++k)
      rows.row(u.idx_a(i, k)) =
          q3.coords(r.mul(li, r.elem_minus_one(u.ctx.hab.gens[static_cast<size_t>(k)])));
  }
  for (Eigen::Index i = 0; i < u.ng; ++i) {
    RowVec gi = r.elem_minus_one(u.ctx.gab.gens[static_cast<size_t>(i)]);
    for (Eigen::Index j = 0; j < u.ng; ++j) {
      RowVec gij = r.mul(gi, r.elem_minus_one(u.ctx.gab.gens[static_cast<size_t>(j)]));
      for (Eigen::Index k = 0; k < u.nh; ++k)
        rows.row(u.idx_b(i, j, k)) =
            q3.coords(r.mul(gij, r.elem_minus_one(u.ctx.hab.gens[static_cast<size_t>(k)])));
    }
  }
  return AbMap(u.grp, q3.grp, std::move(rows));
}

Delta1 delta1_rows(const U3Pres& u) {
  const FiniteGroup& g = *u.ctx.G;
  Delta1 d{tor_pairs(u.ctx.gab.grp, u.ctx.hab.grp), Mat()};
  d.rows = Mat(static_cast<Eigen::Index>(d.tor.pairs.size()), u.na + u.nb);
  auto pos_in = [](const std::vector<Eigen::Index>& tc, Eigen::Index ci) -> size_t {
    for (size_t i = 0; i < tc.size(); ++i)
      if (tc[i] == ci) return i;
    throw std::logic_error("delta1: coordinate is not a torsion coordinate");
  };
  for (size_t t = 0; t < d.tor.pairs.size(); ++t) {
    const TorPair& p = d.tor.pairs[t];
    size_t ia = pos_in(u.ctx.gab.grp.torsion_coords(), p.ci);
    size_t jb = pos_in(u.ctx.hab.grp.torsion_coords(), p.cj);
    int a = g.pow(u.ctx.gab.gens[ia], p.mult_a);
    int hh = g.pow(u.ctx.hab.gens[jb], p.mult_b);
    const Int& k = p.g;
    RowVec ca = u.ctx.gab.coords(a);
    RowVec ch = u.ctx.hab.coords(hh);
    RowVec row = u.nu12(ca, g.pow(hh, k)) - u.blk_a(u.ctx.l2g.coords(g.pow(a, k)), ch);
    Int bk = binom2(k);
    if (bk != 0) {
      RowVec corr = u.blk_b(ca, ca, ch) - u.blk_b(ca, u.ctx.gab.coords(hh), ch);
      row += corr * bk;
    }
    d.rows.row(static_cast<Eigen::Index>(t)) = row;
  }
  return d;
}

RowVec delta2_eval(const U3Pres& u, const RowVec& x, bool descending_solve) {
  const FiniteGroup& g = *u.ctx.G;
  const DiagSection& hab = u.ctx.hab;
  const Eigen::Index nh = u.nh;
  if (x.size() != wedge_gens(nh))
    throw std::invalid_argument("delta2_eval: wrong coordinate length");
  std::vector<RowVec> iota(static_cast<size_t>(nh));
  for (Eigen::Index p = 0; p < nh; ++p)
    iota[static_cast<size_t>(p)] = u.ctx.gab.coords(hab.gens[static_cast<size_t>(p)]);
  int gamma = 0;
  for (Eigen::Index p = 0; p < nh; ++p)
    for (Eigen::Index q = p + 1; q < nh; ++q) {
      const Int& a = x[wedge_index(nh, p, q)];
      if (a == 0) continue;
      int c = g.commutator(hab.gens[static_cast<size_t>(p)], hab.gens[static_cast<size_t>(q)]);
      gamma = g.op(gamma, g.pow(c, a));
    }
  RowVec row = zero_row(u.na + u.nb);
  for (Eigen::Index k = 0; k < nh; ++k) {
    std::vector<Int> alpha(static_cast<size_t>(nh));
    for (Eigen::Index l = 0; l < nh; ++l) {
      if (l < k)
        alpha[static_cast<size_t>(l)] = x[wedge_index(nh, l, k)];
      else if (l > k)
        alpha[static_cast<size_t>(l)] = -x[wedge_index(nh, k, l)];
    }
    int w = 0;
    for (Eigen::Index l = 0; l < nh; ++l)
      w = g.op(w, g.pow(hab.gens[static_cast<size_t>(l)], alpha[static_cast<size_t>(l)]));
    const Int& dk = hab.orders[static_cast<size_t>(k)];
    int gk = -1, gk2 = -1;
    for (int c0 = 0; c0 < g.order(); ++c0) {
      int c = descending_solve ? g.order() - 1 - c0 : c0;
      int cand = g.op(w, g.inv(g.pow(c, dk)));
      if (sub_contains(u.ctx.s.term(2), cand)) {
        gk = c;
        gk2 = cand;
        break;
      }
    }
    if (gk < 0) throw std::logic_error("delta2: no power decomposition over the group");
    RowVec cgk = u.ctx.gab.coords(gk);
    RowVec ek = unit_row(nh, k);
    row += u.blk_a(u.ctx.l2g.coords(gk2), ek);
    row += u.nu12(cgk, g.pow(hab.gens[static_cast<size_t>(k)], dk));
    Int bdk = binom2(dk);
    if (bdk != 0) {
      RowVec corr = u.blk_b(cgk, cgk, ek) - u.blk_b(cgk, iota[static_cast<size_t>(k)], ek);
      row += corr * bdk;
    }
    for (Eigen::Index l = 0; l < nh; ++l) {
      Int bl = binom2(alpha[static_cast<size_t>(l)]);
      if (bl != 0)
        row -= u.blk_b(iota[static_cast<size_t>(l)], iota[static_cast<size_t>(l)], ek) * bl;
    }
    for (Eigen::Index p = 0; p < nh; ++p)
      for (Eigen::Index q = p + 1; q < nh; ++q) {
        Int m = alpha[static_cast<size_t>(p)] * alpha[static_cast<size_t>(q)];
        if (m != 0)
          row -= u.blk_b(iota[static_cast<size_t>(p)], iota[static_cast<size_t>(q)], ek) * m;
      }
  }
  row -= u.nu03(gamma);
  return row;
}

Delta2 delta2_rows(const U3Pres& u, bool descending_solve) {
  AbMap c2h = comm_wedge_map(u.ctx.hab, u.ctx.hl2);
  Lattice dom = intersect(l2_mixed(u.ctx).kernel_lattice(), c2h.kernel_lattice());
  Mat rows(dom.rank(), u.na + u.nb);
  for (Eigen::Index r = 0; r < dom.rank(); ++r)
    rows.row(r) = delta2_eval(u, dom.basis().row(r), descending_solve);
  return Delta2{dom, std::move(rows)};
}

bool height_valid(const PairContext& ctx, const HeightTuple& t) {
  const size_t m = t.elements.size();
  if (m == 0 || t.k.size() != m || t.l.size() != m) return false;
  int lsum = 0;
  for (size_t j = 0; j < m; ++j) {
    if (t.k[j] < 1 || t.l[j] < 1) return false;
    lsum += t.l[j];
  }
  for (size_t j = 0; j < m; ++j) {
    if (lsum - t.l[j] + t.k[j] != t.n) return false;
    const Subgroup* lc = nullptr;
    switch (t.k[j]) {
      case 1: lc = &ctx.h; break;
      case 2: lc = &ctx.h2; break;
      case 3: lc = &ctx.h3; break;
      case 4: lc = &ctx.h4; break;
      default: return false;
    }
    if (!sub_contains(*lc, t.elements[j])) return false;
    if (!sub_contains(ctx.s.term(t.l[j]), t.elements[j])) return false;
  }
  return true;
}

R3Data r3_relations(const U3Pres& u) {
  const FiniteGroup& g = *u.ctx.G;
  R3Data out;
  Subgroup pool = intersect_subgroups(u.ctx.h, u.ctx.s.term(2));
  for (size_t i = 0; i < pool.size(); ++i) {
    if (pool[i] == 0) continue;
    for (size_t j = i + 1; j < pool.size(); ++j) out.pairs.push_back({pool[i], pool[j]});
  }
  for (const auto& pr : out.pairs)
    out.tuples.push_back({{pr.first, pr.second}, {1, 1}, {2, 2}, 3});
  const Eigen::Index np = static_cast<Eigen::Index>(out.pairs.size());
  Mat c(np, u.ctx.hl2.grp.ngens());
  for (Eigen::Index t = 0; t < np; ++t)
    c.row(t) = u.ctx.hl2.coords(
        g.commutator(out.pairs[static_cast<size_t>(t)].first, out.pairs[static_cast<size_t>(t)].second));
  Mat ker = la::preimage_lattice(c, u.ctx.hl2.grp.rels().basis());
  out.dom = Lattice::span(ker);
  out.rows = Mat(out.dom.rank(), u.na + u.nb);
  for (Eigen::Index r = 0; r < out.dom.rank(); ++r) {
    RowVec n = out.dom.basis().row(r);
    int gamma = 0;
    for (Eigen::Index q = 0; q < np; ++q) {
      if (n[q] == 0) continue;
      int cm = g.commutator(out.pairs[static_cast<size_t>(q)].first,
                            out.pairs[static_cast<size_t>(q)].second);
      gamma = g.op(gamma, g.pow(cm, n[q]));
    }
    RowVec row = u.nu03(gamma);
    for (Eigen::Index q = 0; q < np; ++q) {
      if (n[q] == 0) continue;
      const auto& pr = out.pairs[static_cast<size_t>(q)];
      RowVec term = u.blk_a(u.ctx.l2g.coords(pr.first), u.ctx.hab.coords(pr.second)) -
                    u.blk_a(u.ctx.l2g.coords(pr.second), u.ctx.hab.coords(pr.first));
      row -= term * n[q];
    }
    out.rows.row(r) = row;
  }
  return out;
}

FgAbGroup u3bar(const U3Pres& u, const R3Data& r) {
  return FgAbGroup(u.grp.ngens(), vstack(u.grp.rels().basis(), r.rows));
}

SelfPairSets cor65_sets(const U3Pres& u) {
  const FiniteGroup& g = *u.ctx.G;
  if (u.ctx.h != full_subgroup(g))
    throw std::invalid_argument("cor65_sets: requires the subgroup to be the whole group");
  const Eigen::Index total = u.na + u.nb;
  const Eigen::Index nh = u.nh;
  const DiagSection& hab = u.ctx.hab;
  const Int e = g.exponent();

  // family one: power rows over all element pairs; exponents beyond 3e add
  // nothing new since the rows are periodic up to the binomial correction
  std::vector<RowVec> rows1;
  for (int a = 1; a < g.order(); ++a) {
    int k0a = 1;
    while (!sub_contains(u.ctx.s.term(2), g.pow(a, k0a))) ++k0a;
    RowVec ca = u.ctx.gab.coords(a);
    for (int b = 1; b < g.order(); ++b) {
      int k0b = 1;
      while (!sub_contains(u.ctx.h2, g.pow(b, k0b))) ++k0b;
      Int k0 = lcm_int(k0a, k0b);
      RowVec cb = hab.coords(b);
      RowVec cbg = u.ctx.gab.coords(b);
      for (Int k = k0; k <= 3 * e; k += k0) {
        RowVec row = u.nu12(ca, g.pow(b, k)) - u.blk_a(u.ctx.l2g.coords(g.pow(a, k)), cb);
        Int bk = binom2(k);
        if (bk != 0) {
          RowVec corr = u.blk_b(ca, ca, cb) - u.blk_b(ca, cbg, cb);
          row += corr * bk;
        }
        rows1.push_back(row);
      }
    }
  }
  SelfPairSets out;
  out.u1 = Lattice::span(rows_to_mat(rows1, total)) + u.grp.rels();

  // family two: rewrite each kernel basis vector over wedge pairs from the
  // second series term plus torsion power pairs, then assemble the matching
  // antisymmetrized rows and the shared bracket correction
  AbMap c2h = comm_wedge_map(hab, u.ctx.hl2);
  Lattice dom = intersect(l2_mixed(u.ctx).kernel_lattice(), c2h.kernel_lattice());
  struct PoolEntry {
    int uu, vv;
    Int k;
    bool torsion;
  };
  std::vector<PoolEntry> pool;
  std::vector<RowVec> wrows;
  const Subgroup& t2 = u.ctx.s.term(2);
  for (size_t i = 0; i < t2.size(); ++i) {
    if (t2[i] == 0) continue;
    for (size_t j = i + 1; j < t2.size(); ++j) {
      pool.push_back({t2[i], t2[j], 1, false});
      wrows.push_back(wedge_expand(nh, hab.coords(t2[i]), hab.coords(t2[j])));
    }
  }
  {
    TorGroup tg = tor_pairs(u.ctx.gab.grp, u.ctx.gab.grp);
    auto pos_in = [](const std::vector<Eigen::Index>& tc, Eigen::Index ci) -> size_t {
      for (size_t i = 0; i < tc.size(); ++i)
        if (tc[i] == ci) return i;
      throw std::logic_error("cor65_sets: coordinate is not a torsion coordinate");
    };
    for (const TorPair& p : tg.pairs) {
      int c = g.pow(u.ctx.gab.gens[pos_in(u.ctx.gab.grp.torsion_coords(), p.ci)], p.mult_a);
      int d = g.pow(u.ctx.gab.gens[pos_in(u.ctx.gab.grp.torsion_coords(), p.cj)], p.mult_b);
      pool.push_back({c, d, p.g, true});
      wrows.push_back(wedge_expand(nh, hab.coords(c), hab.coords(g.pow(d, p.g))));
    }
  }
  Mat wmat = rows_to_mat(wrows, wedge_gens(nh));
  Mat wrels = exterior_square(hab.grp).rels().basis();
  std::vector<RowVec> rows2;
  for (Eigen::Index r = 0; r < dom.rank(); ++r) {
    RowVec x = dom.basis().row(r);
    auto sol = la::solve_mod(wmat, wrels, x);
    if (!sol) throw std::logic_error("cor65_sets: kernel vector escapes the spanning pool");
    RowVec row = zero_row(total);
    int gamma = 0;
    for (size_t t = 0; t < pool.size(); ++t) {
      Int n = (*sol)[static_cast<Eigen::Index>(t)];
      if (n == 0) continue;
      const PoolEntry& pe = pool[t];
      if (!pe.torsion) {
        RowVec term = u.blk_a(u.ctx.l2g.coords(pe.uu), hab.coords(pe.vv)) -
                      u.blk_a(u.ctx.l2g.coords(pe.vv), hab.coords(pe.uu));
        row += term * n;
        gamma = g.op(gamma, g.pow(g.commutator(pe.uu, pe.vv), n));
      } else {
        int dk = g.pow(pe.vv, pe.k);
        RowVec cc = u.ctx.gab.coords(pe.uu);
        RowVec cd = u.ctx.gab.coords(pe.vv);
        RowVec diff = cd - cc;
        Int bk = binom2(pe.k);
        RowVec term = u.blk_a(u.ctx.l2g.coords(g.pow(pe.uu, pe.k)), hab.coords(pe.vv)) -
                      u.blk_a(u.ctx.l2g.coords(dk), hab.coords(pe.uu));
        if (bk != 0) term += u.blk_b(cc, diff, hab.coords(pe.vv)) * bk;
        row += term * n;
        gamma = g.op(gamma, g.pow(g.commutator(pe.uu, dk), n));
      }
    }
    if (!sub_contains(u.ctx.h3, gamma))
      throw std::logic_error("cor65_sets: commutator product escapes the third term");
    row -= u.nu03(gamma);
    rows2.push_back(row);
  }
  out.u2 = Lattice::span(rows_to_mat(rows2, total)) + u.grp.rels();
  return out;
}

} // namespace foxcalc
