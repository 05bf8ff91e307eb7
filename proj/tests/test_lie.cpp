#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "foxcalc/hmodule.hpp"
#include "foxcalc/lie.hpp"

using namespace foxcalc;

namespace {

Lattice delta_image(const U3Pres& u, const Delta1& d1, const Delta2& d2) {
  return Lattice::span(vstack(d1.rows, d2.rows)) + u.grp.rels();
}

// Jacobi sum [x_i,[x_j,x_k]] + [x_j,[x_k,x_i]] + [x_k,[x_i,x_j]] through the
// bracket tables; must die in degree three for every valid chain.
bool jacobi_holds(const GradedLie& gl) {
  Eigen::Index n1 = gl.l1.grp.ngens();
  Eigen::Index n2 = gl.l2.grp.ngens();
  Eigen::Index n3 = gl.l3.grp.ngens();
  auto term = [&](Eigen::Index a, Eigen::Index b, Eigen::Index c) {
    RowVec inner = gl.b11.matrix().row(tensor_index(n1, b, c));
    RowVec out = zero_row(n3);
    for (Eigen::Index m = 0; m < n2; ++m) {
      if (inner[m] == 0) continue;
      Int cm = inner[m];
      out += gl.b12.matrix().row(tensor_index(n2, a, m)) * cm;
    }
    return out;
  };
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n1; ++j)
      for (Eigen::Index k = 0; k < n1; ++k) {
        RowVec sum = term(i, j, k) + term(j, k, i) + term(k, i, j);
        if (!gl.l3.grp.is_zero_elem(sum)) return false;
      }
  return true;
}

bool antisymmetric(const GradedLie& gl) {
  Eigen::Index n1 = gl.l1.grp.ngens();
  for (Eigen::Index i = 0; i < n1; ++i) {
    if (!gl.l2.grp.is_zero_elem(gl.b11.matrix().row(tensor_index(n1, i, i)))) return false;
    for (Eigen::Index j = 0; j < n1; ++j) {
      RowVec sum = gl.b11.matrix().row(tensor_index(n1, i, j)) +
                   gl.b11.matrix().row(tensor_index(n1, j, i));
      if (!gl.l2.grp.is_zero_elem(sum)) return false;
    }
  }
  return true;
}

} // namespace

TEST_CASE("diagonal sections expose invariant coordinates") {
  FiniteGroup q8 = FiniteGroup::quaternion8();
  Series s = lower_central(q8);
  DiagSection l1 = diag_section(q8, full_subgroup(q8), s.term(2));
  CHECK(l1.grp.torsion() == std::vector<Int>{2, 2});
  for (int a = 0; a < q8.order(); ++a)
    for (int b = 0; b < q8.order(); ++b) {
      RowVec lhs = l1.coords(q8.op(a, b));
      RowVec rhs = l1.coords(a) + l1.coords(b);
      CHECK(l1.grp.equal(lhs, rhs));
    }
  DiagSection l2 = diag_section(q8, s.term(2), s.term(3));
  CHECK(l2.grp.torsion() == std::vector<Int>{2});
  int m1 = q8.element_by_label("-1");
  REQUIRE(m1 >= 0);
  CHECK(l2.coords(m1) == unit_row(1, 0));

  FiniteGroup h3 = FiniteGroup::heisenberg(3);
  Series sh = lower_central(h3);
  CHECK(diag_section(h3, full_subgroup(h3), sh.term(2)).grp.torsion() == std::vector<Int>{3, 3});
  CHECK(diag_section(h3, sh.term(2), sh.term(3)).grp.torsion() == std::vector<Int>{3});
}

TEST_CASE("section and functor maps") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  Series s = lower_central(s3);
  Subgroup a3 = closure(s3, {s3.element_by_label("(123)")});
  DiagSection hab = diag_section(s3, a3, commutator_subgroup(s3, a3, a3));
  DiagSection gab = diag_section(s3, full_subgroup(s3), s.term(2));
  CHECK(hab.grp.torsion() == std::vector<Int>{3});
  CHECK(gab.grp.torsion() == std::vector<Int>{2});
  // the three-cycles sit inside the derived subgroup
  CHECK(section_map(hab, gab).is_zero_map());

  FiniteGroup q8 = FiniteGroup::quaternion8();
  Series sq = lower_central(q8);
  DiagSection l1 = diag_section(q8, full_subgroup(q8), sq.term(2));
  AbMap idm = AbMap::identity_map(l1.grp);
  CHECK(maps_equal(tensor_map(idm, idm), AbMap::identity_map(tensor(l1.grp, l1.grp))));
  CHECK(maps_equal(wedge_functor(idm), AbMap::identity_map(exterior_square(l1.grp))));

  AbMap w = l2_wedge(l1.grp);
  RowVec img = w.apply(unit_row(wedge_gens(2), 0));
  RowVec expect = unit_row(4, tensor_index(2, 0, 1)) - unit_row(4, tensor_index(2, 1, 0));
  CHECK(mat_equal(img, expect));
}

TEST_CASE("graded brackets are antisymmetric and satisfy jacobi") {
  struct Item {
    FiniteGroup g;
    Series s;
  };
  std::vector<Item> items;
  {
    FiniteGroup g = FiniteGroup::symmetric(3);
    Series s = lower_central(g);
    items.push_back({std::move(g), std::move(s)});
  }
  {
    FiniteGroup g = FiniteGroup::dihedral(4);
    Series s = lower_central(g);
    items.push_back({std::move(g), std::move(s)});
  }
  {
    FiniteGroup g = FiniteGroup::quaternion8();
    Series s = lower_central(g);
    items.push_back({std::move(g), std::move(s)});
  }
  {
    FiniteGroup g = FiniteGroup::alternating4();
    Series s = lower_central(g);
    items.push_back({std::move(g), std::move(s)});
  }
  {
    FiniteGroup g = FiniteGroup::heisenberg(3);
    Series s = lower_central(g);
    items.push_back({std::move(g), std::move(s)});
  }
  {
    FiniteGroup g = FiniteGroup::dihedral(8);
    Series s = lower_central(g);
    items.push_back({std::move(g), std::move(s)});
  }
  {
    FiniteGroup g = FiniteGroup::dihedral(4);
    int r = g.element_by_label("r");
    int r2 = g.element_by_label("r2");
    Series s = custom_series(g, {{1, g.element_by_label("s")}, {r}, {r2}, {}});
    items.push_back({std::move(g), std::move(s)});
  }
  for (const auto& it : items) {
    GradedLie gl = graded_lie(it.g, it.s);
    CHECK(antisymmetric(gl));
    CHECK(jacobi_holds(gl));
  }

  // frozen spots: the quaternion bracket pairs the two degree-one classes
  {
    GradedLie gl = graded_lie(items[2].g, items[2].s);
    CHECK_FALSE(gl.l2.grp.is_zero_elem(gl.b11.matrix().row(tensor_index(2, 0, 1))));
  }
  // a chain refining the rotation subgroup reaches degree three
  {
    const Item& it = items.back();
    GradedLie gl = graded_lie(it.g, it.s);
    CHECK(gl.l1.grp.torsion() == std::vector<Int>{2});
    CHECK(gl.l2.grp.torsion() == std::vector<Int>{2});
    CHECK(gl.l3.grp.torsion() == std::vector<Int>{2});
    CHECK_FALSE(gl.l3.grp.is_zero_elem(gl.b12.matrix().row(0)));
  }
  // the derived series of the sixteen element dihedral group has depth three
  {
    GradedLie gl = graded_lie(items[5].g, items[5].s);
    CHECK(gl.l3.grp.torsion() == std::vector<Int>{2});
  }

  FiniteGroup d4 = FiniteGroup::dihedral(4);
  Series bad;
  bad.kind = "custom";
  bad.terms = {closure(d4, {d4.element_by_label("r")}), trivial_subgroup()};
  CHECK_THROWS_AS(graded_lie(d4, bad), std::invalid_argument);
}

TEST_CASE("degree three presentation on a two element group") {
  FiniteGroup c2 = FiniteGroup::cyclic(2);
  Series s = lower_central(c2);
  PairContext ctx = pair_context(c2, s, full_subgroup(c2));
  U3Pres u = u3_build(ctx);
  CHECK(u.na == 0);
  CHECK(u.nb == 1);
  CHECK(u.grp.torsion() == std::vector<Int>{2});

  Delta1 d1 = delta1_rows(u);
  REQUIRE(d1.rows.rows() == 1);
  CHECK(mat_equal(d1.rows.row(0), zero_row(1)));
  Delta2 d2 = delta2_rows(u);
  CHECK(d2.dom.rank() == 0);

  GroupRing r(c2);
  Filtration f(r, s);
  CHECK(theta1(ctx, f).is_iso());
  CHECK(theta2(ctx, f).is_iso());
  CHECK(theta3(u, f).is_iso());
}

TEST_CASE("degree three presentation for a trivial subgroup") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  Series s = lower_central(s3);
  PairContext ctx = pair_context(s3, s, trivial_subgroup());
  U3Pres u = u3_build(ctx);
  CHECK(u.grp.is_trivial());
  CHECK(delta1_rows(u).rows.rows() == 0);
  CHECK(delta2_rows(u).dom.rank() == 0);
  GroupRing r(s3);
  Filtration f(r, s);
  CHECK(theta3(u, f).is_iso());
}

TEST_CASE("frozen power decomposition row on the klein group") {
  FiniteGroup g = FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2));
  Series s = lower_central(g);
  PairContext ctx = pair_context(g, s, full_subgroup(g));
  U3Pres u = u3_build(ctx);
  REQUIRE(u.na == 0);
  REQUIRE(u.nb == 8);

  Delta2 d2 = delta2_rows(u);
  REQUIRE(d2.dom.rank() == 1);
  CHECK(d2.dom.basis()(0, 0) == 2);
  RowVec expect = zero_row(8);
  expect[u.idx_b(1, 1, 0)] = -3;
  expect[u.idx_b(0, 0, 1)] = -1;
  CHECK(mat_equal(d2.rows.row(0), expect));
  CHECK(mat_equal(delta2_eval(u, d2.dom.basis().row(0)), expect));

  GroupRing r(g);
  Filtration f(r, s);
  AbMap t3 = theta3(u, f);
  CHECK(t3.cod().is_zero_elem(t3.apply(expect)));
}

TEST_CASE("kernel of the degree three comparison map") {
  auto flagship = [](const FiniteGroup& g, const Series& s, const Subgroup& h) {
    CAPTURE(g.name());
    PairContext ctx = pair_context(g, s, h);
    U3Pres u = u3_build(ctx);
    GroupRing r(g);
    Filtration f(r, s);
    CHECK(theta1(ctx, f).is_iso());
    CHECK(theta2(ctx, f).is_iso());
    AbMap t3 = theta3(u, f);
    CHECK(t3.is_surjective());
    Delta1 d1 = delta1_rows(u);
    Delta2 d2 = delta2_rows(u);
    CHECK(t3.kernel_lattice() == delta_image(u, d1, d2));
  };

  {
    FiniteGroup g = FiniteGroup::cyclic(4);
    flagship(g, lower_central(g), full_subgroup(g));
  }
  {
    FiniteGroup g = FiniteGroup::cyclic(6);
    flagship(g, lower_central(g), full_subgroup(g));
  }
  {
    FiniteGroup g = FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2));
    flagship(g, lower_central(g), full_subgroup(g));
  }
  {
    FiniteGroup g = FiniteGroup::quaternion8();
    flagship(g, lower_central(g), full_subgroup(g));
  }
  {
    FiniteGroup g = FiniteGroup::symmetric(3);
    flagship(g, lower_central(g), closure(g, {g.element_by_label("(123)")}));
  }
  {
    FiniteGroup g = FiniteGroup::dihedral(4);
    flagship(g, lower_central(g), closure(g, {g.element_by_label("r")}));
  }
  {
    FiniteGroup g = FiniteGroup::dihedral(8);
    flagship(g, lower_central(g), closure(g, {g.element_by_label("r")}));
  }
  {
    // chain strictly between the whole group and its derived refinement
    FiniteGroup g = FiniteGroup::dihedral(4);
    Series s = custom_series(g, {{1, g.element_by_label("s")},
                                 {g.element_by_label("r2"), g.element_by_label("s")},
                                 {g.element_by_label("r2")},
                                 {}});
    flagship(g, s, closure(g, {g.element_by_label("r2"), g.element_by_label("s")}));
  }
}

TEST_CASE("power decomposition order only moves rows by the torsion image") {
  auto compare = [](const FiniteGroup& g, const Series& s, const Subgroup& h) {
    CAPTURE(g.name());
    PairContext ctx = pair_context(g, s, h);
    U3Pres u = u3_build(ctx);
    Delta1 d1 = delta1_rows(u);
    Delta2 up = delta2_rows(u, false);
    Delta2 down = delta2_rows(u, true);
    REQUIRE(up.dom == down.dom);
    Lattice slack = Lattice::span(d1.rows) + u.grp.rels();
    for (Eigen::Index r = 0; r < up.rows.rows(); ++r)
      CHECK(slack.contains(RowVec(up.rows.row(r) - down.rows.row(r))));
  };
  {
    FiniteGroup g = FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2));
    compare(g, lower_central(g), full_subgroup(g));
  }
  {
    FiniteGroup g = FiniteGroup::quaternion8();
    compare(g, lower_central(g), full_subgroup(g));
  }
  {
    FiniteGroup g = FiniteGroup::dihedral(4);
    compare(g, lower_central(g), full_subgroup(g));
  }
  {
    FiniteGroup g = FiniteGroup::heisenberg(3);
    compare(g, lower_central(g), full_subgroup(g));
  }
}

TEST_CASE("relation rows vanish under the comparison map") {
  {
    FiniteGroup g = FiniteGroup::quaternion8();
    Series s = lower_central(g);
    PairContext ctx = pair_context(g, s, full_subgroup(g));
    U3Pres u = u3_build(ctx);
    R3Data r3 = r3_relations(u);
    CHECK(r3.pairs.empty());
    CHECK(same_invariants(u3bar(u, r3), u.grp));
  }
  {
    FiniteGroup g = FiniteGroup::dihedral(8);
    Series s = lower_central(g);
    PairContext ctx = pair_context(g, s, closure(g, {g.element_by_label("r")}));
    U3Pres u = u3_build(ctx);
    R3Data r3 = r3_relations(u);
    REQUIRE(r3.pairs.size() == 3);
    GroupRing r(g);
    Filtration f(r, s);
    AbMap t3 = theta3(u, f);
    for (Eigen::Index i = 0; i < r3.rows.rows(); ++i)
      CHECK(t3.cod().is_zero_elem(t3.apply(r3.rows.row(i))));
  }
}

TEST_CASE("relation rows can cut the presentation and match the kernel pairing") {
  // chain whose middle term is the diagonal klein subgroup
  FiniteGroup g = FiniteGroup::dihedral(4);
  int r2 = g.element_by_label("r2");
  int sref = g.element_by_label("s");
  Series s = custom_series(g, {{1, sref}, {r2, sref}, {r2}, {}});
  Subgroup h = closure(g, {r2, sref});
  PairContext ctx = pair_context(g, s, h);
  U3Pres u = u3_build(ctx);
  R3Data r3 = r3_relations(u);
  REQUIRE(r3.pairs.size() == 3);

  bool some_live = false;
  for (Eigen::Index i = 0; i < r3.rows.rows(); ++i)
    if (!u.grp.is_zero_elem(r3.rows.row(i))) some_live = true;
  CHECK(some_live);

  GroupRing ring(g);
  Filtration f(ring, s);
  AbMap t3 = theta3(u, f);
  for (Eigen::Index i = 0; i < r3.rows.rows(); ++i)
    CHECK(t3.cod().is_zero_elem(t3.apply(r3.rows.row(i))));

  // wedges of pool classes evaluate to the relation span modulo the torsion image
  const DiagSection& hab = ctx.hab;
  Subgroup pool = intersect_subgroups(ctx.h, ctx.s.term(2));
  std::vector<RowVec> wrows;
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = i + 1; j < pool.size(); ++j) {
      if (pool[i] == 0) continue;
      RowVec cu = hab.coords(pool[i]);
      RowVec cv = hab.coords(pool[j]);
      RowVec wr = zero_row(wedge_gens(u.nh));
      for (Eigen::Index p = 0; p < u.nh; ++p)
        for (Eigen::Index q = p + 1; q < u.nh; ++q) {
          Int c = cu[p] * cv[q] - cu[q] * cv[p];
          wr[wedge_index(u.nh, p, q)] += c;
        }
      wrows.push_back(std::move(wr));
    }
  Mat wmat(static_cast<Eigen::Index>(wrows.size()), wedge_gens(u.nh));
  for (Eigen::Index i = 0; i < wmat.rows(); ++i) wmat.row(i) = wrows[static_cast<size_t>(i)];
  AbMap c2h = comm_wedge_map(hab, ctx.hl2);
  Lattice gamma_dom = intersect(Lattice::span(wmat) + exterior_square(hab.grp).rels(),
                                c2h.kernel_lattice());
  Mat drows(gamma_dom.rank(), u.na + u.nb);
  for (Eigen::Index i = 0; i < gamma_dom.rank(); ++i)
    drows.row(i) = delta2_eval(u, gamma_dom.basis().row(i));

  Delta1 d1 = delta1_rows(u);
  Lattice slack = Lattice::span(d1.rows) + u.grp.rels();
  CHECK(Lattice::span(drows) + slack == Lattice::span(r3.rows) + slack);
}

TEST_CASE("relation pairs carry valid height data") {
  FiniteGroup g = FiniteGroup::dihedral(4);
  int r2 = g.element_by_label("r2");
  int sref = g.element_by_label("s");
  Series s = custom_series(g, {{1, sref}, {r2, sref}, {r2}, {}});
  PairContext ctx = pair_context(g, s, closure(g, {r2, sref}));
  U3Pres u = u3_build(ctx);
  R3Data r3 = r3_relations(u);
  REQUIRE(r3.tuples.size() == r3.pairs.size());
  for (const auto& t : r3.tuples) CHECK(height_valid(ctx, t));
  // perturbed weights must be rejected
  HeightTuple bad = r3.tuples.front();
  bad.k = {2, 1};
  CHECK_FALSE(height_valid(ctx, bad));
  bad = r3.tuples.front();
  bad.n = 4;
  CHECK_FALSE(height_valid(ctx, bad));
  bad = r3.tuples.front();
  bad.l = {2};
  CHECK_FALSE(height_valid(ctx, bad));
}

// bracket expansions solve a linear system; any two solutions differ by a
// kernel row, so every kernel row must expand to a relation of the
// presentation or the expansion maps would depend on the solver
TEST_CASE("bracket expansion is independent of the chosen preimage") {
  auto run = [](const FiniteGroup& g, const Series& s, const Subgroup& h) {
    PairContext ctx = pair_context(g, s, h);
    U3Pres u = u3_build(ctx);
    {
      Mat ker = la::preimage_lattice(u.bracket2, ctx.hl2.grp.rels().basis());
      for (Eigen::Index r = 0; r < ker.rows(); ++r)
        for (Eigen::Index i = 0; i < u.ng; ++i) {
          RowVec cg = unit_row(u.ng, i);
          RowVec out = zero_row(u.na + u.nb);
          for (size_t t = 0; t < u.pairs2.size(); ++t) {
            Int x = ker(r, static_cast<Eigen::Index>(t));
            if (x == 0) continue;
            auto [p, q] = u.pairs2[t];
            RowVec ip = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(p)]);
            RowVec iq = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(q)]);
            RowVec term = u.blk_b(cg, ip, unit_row(u.nh, q)) - u.blk_b(cg, iq, unit_row(u.nh, p));
            out += term * x;
          }
          CHECK(u.grp.is_zero_elem(out));
        }
    }
    {
      Mat ker = la::preimage_lattice(u.bracket3, ctx.hl3.grp.rels().basis());
      for (Eigen::Index r = 0; r < ker.rows(); ++r) {
        RowVec out = zero_row(u.na + u.nb);
        for (size_t t = 0; t < u.triples3.size(); ++t) {
          Int x = ker(r, static_cast<Eigen::Index>(t));
          if (x == 0) continue;
          auto [i, j, k] = u.triples3[t];
          RowVec ci = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(i)]);
          RowVec cj = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(j)]);
          RowVec ck = ctx.gab.coords(ctx.hab.gens[static_cast<size_t>(k)]);
          RowVec ei = unit_row(u.nh, i), ej = unit_row(u.nh, j), ek = unit_row(u.nh, k);
          RowVec term =
              u.blk_b(ci, cj, ek) - u.blk_b(ci, ck, ej) - u.blk_b(cj, ck, ei) + u.blk_b(ck, cj, ei);
          out += term * x;
        }
        CHECK(u.grp.is_zero_elem(out));
      }
    }
  };
  {
    FiniteGroup g = FiniteGroup::quaternion8();
    run(g, lower_central(g), full_subgroup(g));
  }
  {
    FiniteGroup g = FiniteGroup::dihedral(4);
    int r2 = g.element_by_label("r2");
    int sref = g.element_by_label("s");
    run(g, custom_series(g, {{1, sref}, {r2, sref}, {r2}, {}}), closure(g, {r2, sref}));
  }
}

TEST_CASE("self pair generating sets span the comparison kernel") {
  auto cover = [](const FiniteGroup& g) {
    CAPTURE(g.name());
    Series s = lower_central(g);
    PairContext ctx = pair_context(g, s, full_subgroup(g));
    U3Pres u = u3_build(ctx);
    SelfPairSets sets = cor65_sets(u);
    Delta1 d1 = delta1_rows(u);
    Delta2 d2 = delta2_rows(u);
    for (Eigen::Index i = 0; i < d1.rows.rows(); ++i)
      CHECK(sets.u1.contains(RowVec(d1.rows.row(i))));
    GroupRing r(g);
    Filtration f(r, s);
    AbMap t3 = theta3(u, f);
    Lattice ker = t3.kernel_lattice();
    CHECK(sets.u1 + sets.u2 == ker);
    CHECK(ker == delta_image(u, d1, d2));
  };
  cover(FiniteGroup::cyclic(2));
  cover(FiniteGroup::cyclic(4));
  cover(FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2)));
  cover(FiniteGroup::quaternion8());
  cover(FiniteGroup::symmetric(3));
}

TEST_CASE("mismatched inputs are rejected") {
  FiniteGroup q8 = FiniteGroup::quaternion8();
  FiniteGroup c4 = FiniteGroup::cyclic(4);
  Series s = lower_central(q8);
  PairContext ctx = pair_context(q8, s, full_subgroup(q8));
  GroupRing wrong(c4);
  Filtration fw(wrong, lower_central(c4));
  CHECK_THROWS_AS(theta1(ctx, fw), std::invalid_argument);

  U3Pres u = u3_build(ctx);
  CHECK_THROWS_AS(u.nu12(zero_row(u.ng), q8.element_by_label("i")), std::invalid_argument);

  Subgroup center2 = center(q8);
  PairContext sub = pair_context(q8, s, center2);
  U3Pres usub = u3_build(sub);
  CHECK_THROWS_AS(cor65_sets(usub), std::invalid_argument);
}
