#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "foxcalc/group.hpp"

using namespace foxcalc;

namespace {

Subgroup by_labels(const FiniteGroup& g, std::initializer_list<const char*> ls) {
  std::vector<int> gens;
  for (const char* l : ls) {
    int e = g.element_by_label(l);
    REQUIRE(e >= 0);
    gens.push_back(e);
  }
  return closure(g, gens);
}

void check_is_group(const FiniteGroup& g) {
  // the validated constructor already enforces the axioms; spot-check helpers
  for (int a = 0; a < g.order(); ++a) {
    CHECK(g.op(a, g.inv(a)) == 0);
    CHECK(g.pow(a, Int(g.element_order(a))) == 0);
    CHECK(g.pow(a, Int(-1)) == g.inv(a));
  }
}

} // namespace

TEST_CASE("preset construction") {
  CHECK(FiniteGroup::cyclic(1).order() == 1);
  CHECK(FiniteGroup::cyclic(6).order() == 6);
  CHECK(FiniteGroup::dihedral(4).order() == 8);
  CHECK(FiniteGroup::quaternion8().order() == 8);
  CHECK(FiniteGroup::symmetric(3).order() == 6);
  CHECK(FiniteGroup::symmetric(4).order() == 24);
  CHECK(FiniteGroup::alternating4().order() == 12);
  CHECK(FiniteGroup::heisenberg(3).order() == 27);
  FiniteGroup c2c4 = FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(4));
  CHECK(c2c4.order() == 8);
  check_is_group(FiniteGroup::dihedral(4));
  check_is_group(FiniteGroup::quaternion8());
  check_is_group(c2c4);

  CHECK(FiniteGroup::cyclic(4).element_by_label("a2") == 2);
  CHECK(c2c4.element_by_label("a.1") >= 0);
  CHECK(c2c4.element_order(c2c4.element_by_label("a.1")) == 2);
  CHECK(c2c4.element_order(c2c4.element_by_label("1.a")) == 4);
  CHECK(c2c4.element_by_label("missing") == -1);

  FiniteGroup q8 = FiniteGroup::quaternion8();
  CHECK(q8.element_order(q8.element_by_label("-1")) == 2);
  CHECK(q8.element_order(q8.element_by_label("i")) == 4);
  CHECK(q8.op(q8.element_by_label("i"), q8.element_by_label("j")) == q8.element_by_label("k"));
  CHECK(q8.op(q8.element_by_label("j"), q8.element_by_label("i")) == q8.element_by_label("-k"));

  CHECK(FiniteGroup::symmetric(3).exponent() == 6);
  CHECK(q8.exponent() == 4);

  FiniteGroup h3 = FiniteGroup::heisenberg(3);
  int x = h3.element_by_label("x"), y = h3.element_by_label("y"), z = h3.element_by_label("z");
  REQUIRE(x >= 0);
  REQUIRE(y >= 0);
  REQUIRE(z >= 0);
  CHECK(h3.commutator(x, y) == z);
  CHECK(h3.element_order(x) == 3);
  CHECK(center(h3) == closure(h3, {z}));
  CHECK(center(h3).size() == 3);
}

TEST_CASE("table validation diagnostics") {
  using T = std::vector<std::vector<int>>;
  CHECK_THROWS_WITH_AS(FiniteGroup::from_table("t", {}, T{{0, 1}, {1, 5}}),
                       doctest::Contains("entry (1, 1) out of range"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(FiniteGroup::from_table("t", {}, T{{1, 0}, {0, 1}}),
                       doctest::Contains("identity law fails at (0, 0)"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(FiniteGroup::from_table("t", {}, T{{0, 1, 2}, {1, 1, 2}, {2, 2, 1}}),
                       doctest::Contains("no inverse for element 1"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(FiniteGroup::from_table("t", {}, T{{0, 1, 2}, {1, 0, 2}, {2, 2, 0}}),
                       doctest::Contains("associativity fails at (1, 2, 2)"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(FiniteGroup::from_table("t", {"e", "e"}, T{{0, 1}, {1, 0}}),
                       doctest::Contains("duplicate label"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(FiniteGroup::from_table("t", {"e"}, T{{0, 1}, {1, 0}}),
                       doctest::Contains("label count"), std::invalid_argument);
}

TEST_CASE("json table loading") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path();
  fs::path good = dir / "foxcalc_test_c4.json";
  {
    std::ofstream out(good);
    out << R"({"name": "C4file", "order": 4, "labels": ["1", "a", "a2", "a3"],
               "table": [[0,1,2,3],[1,2,3,0],[2,3,0,1],[3,0,1,2]]})";
  }
  FiniteGroup g = FiniteGroup::from_json_file(good.string());
  FiniteGroup c4 = FiniteGroup::cyclic(4);
  CHECK(g.order() == 4);
  CHECK(g.name() == "C4file");
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(g.op(a, b) == c4.op(a, b));

  fs::path bad = dir / "foxcalc_test_bad.json";
  {
    std::ofstream out(bad);
    out << R"({"order": 2})";
  }
  CHECK_THROWS_WITH_AS(FiniteGroup::from_json_file(bad.string()), doctest::Contains("'table'"),
                       std::invalid_argument);
  CHECK_THROWS_AS(FiniteGroup::from_json_file((dir / "foxcalc_nonexistent.json").string()),
                  std::invalid_argument);
  {
    std::ofstream out(bad);
    out << R"({"order": 2, "table": [[1,0],[0,1]]})";
  }
  CHECK_THROWS_WITH_AS(FiniteGroup::from_json_file(bad.string()),
                       doctest::Contains("identity law fails"), std::invalid_argument);
  std::remove(good.string().c_str());
  std::remove(bad.string().c_str());
}

TEST_CASE("subgroup operations") {
  FiniteGroup d4 = FiniteGroup::dihedral(4);
  CHECK(closure(d4, {}) == trivial_subgroup());
  Subgroup rot = by_labels(d4, {"r"});
  CHECK(rot == Subgroup{0, 1, 2, 3});
  CHECK(is_subgroup(d4, rot));
  CHECK(is_normal(d4, rot));
  Subgroup refl = by_labels(d4, {"s"});
  CHECK(refl == Subgroup{0, 4});
  CHECK(!is_normal(d4, refl));
  CHECK(!is_subgroup(d4, Subgroup{0, 1}));
  CHECK(center(d4) == Subgroup{0, 2});

  CHECK(commutator_subgroup(d4, full_subgroup(d4), full_subgroup(d4)) == Subgroup{0, 2});
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  Subgroup a3 = by_labels(s3, {"(123)"});
  CHECK(a3.size() == 3);
  CHECK(commutator_subgroup(s3, full_subgroup(s3), full_subgroup(s3)) == a3);
  FiniteGroup q8 = FiniteGroup::quaternion8();
  CHECK(commutator_subgroup(q8, full_subgroup(q8), full_subgroup(q8)) == Subgroup{0, 1});

  CHECK(intersect_subgroups(rot, by_labels(d4, {"r2", "s"})) == Subgroup{0, 2});
  CHECK(power_subgroup(d4, full_subgroup(d4), Int(2)) == Subgroup{0, 2});
  CHECK(power_subgroup(FiniteGroup::cyclic(8), full_subgroup(FiniteGroup::cyclic(8)), Int(2)) ==
        Subgroup{0, 2, 4, 6});

  CHECK(normal_closure(s3, {s3.element_by_label("(12)")}) == full_subgroup(s3));
  CHECK(normal_closure(d4, {d4.element_by_label("s")}) == Subgroup{0, 2, 4, 6});

  CHECK(product_subgroup(d4, Subgroup{0, 2}, refl) == Subgroup{0, 2, 4, 6});
  CHECK(product_set(d4, refl, by_labels(d4, {"rs"})).size() == 4);
  CHECK_THROWS_AS(product_subgroup(d4, refl, by_labels(d4, {"rs"})), std::invalid_argument);
}

TEST_CASE("subgroup as group and quotients") {
  FiniteGroup d4 = FiniteGroup::dihedral(4);
  SubgroupGroup sub = subgroup_as_group(d4, by_labels(d4, {"r"}), "R");
  CHECK(sub.grp.order() == 4);
  CHECK(sub.grp.label(1) == "r");
  for (int a = 0; a < 4; ++a) {
    CHECK(sub.from_parent[static_cast<size_t>(sub.to_parent[static_cast<size_t>(a)])] == a);
    for (int b = 0; b < 4; ++b)
      CHECK(sub.to_parent[static_cast<size_t>(sub.grp.op(a, b))] ==
            d4.op(sub.to_parent[static_cast<size_t>(a)], sub.to_parent[static_cast<size_t>(b)]));
  }
  CHECK(sub.map_down(Subgroup{0, 2, 4, 6}) == Subgroup{0, 2});
  CHECK_THROWS_AS(subgroup_as_group(d4, Subgroup{0, 1, 4}, "bad"), std::invalid_argument);

  QuotientGroup q = quotient_by(d4, Subgroup{0, 2});
  CHECK(q.grp.order() == 4);
  CHECK(q.reps[0] == 0);
  for (int a = 0; a < d4.order(); ++a)
    for (int b = 0; b < d4.order(); ++b)
      CHECK(q.proj[static_cast<size_t>(d4.op(a, b))] ==
            q.grp.op(q.proj[static_cast<size_t>(a)], q.proj[static_cast<size_t>(b)]));
  FiniteGroup q8 = FiniteGroup::quaternion8();
  QuotientGroup q8z = quotient_by(q8, Subgroup{0, 1});
  CHECK(q8z.grp.order() == 4);
  for (int a = 1; a < 4; ++a) CHECK(q8z.grp.element_order(a) == 2);
  CHECK(q8z.image(closure(q8, {q8.element_by_label("i")})) == Subgroup{0, q8z.proj[2]});
  CHECK_THROWS_AS(quotient_by(d4, by_labels(d4, {"s"})), std::invalid_argument);
}

TEST_CASE("series construction") {
  FiniteGroup d4 = FiniteGroup::dihedral(4);
  Series lcs = lower_central(d4);
  REQUIRE(lcs.stored() == 3);
  CHECK(lcs.terms[0] == full_subgroup(d4));
  CHECK(lcs.terms[1] == Subgroup{0, 2});
  CHECK(lcs.terms[2] == Subgroup{0});
  CHECK(lcs.term(7) == Subgroup{0});
  CHECK(validate_nseries(d4, lcs).empty());

  FiniteGroup s3 = FiniteGroup::symmetric(3);
  Series lcs3 = lower_central(s3);
  REQUIRE(lcs3.stored() == 2);
  Subgroup a3 = by_labels(s3, {"(123)"});
  CHECK(lcs3.terms[1] == a3);
  CHECK(lcs3.term(5) == a3);
  CHECK(validate_nseries(s3, lcs3).empty());

  FiniteGroup h3 = FiniteGroup::heisenberg(3);
  Series lcsh = lower_central(h3);
  REQUIRE(lcsh.stored() == 3);
  CHECK(lcsh.terms[1] == center(h3));
  CHECK(lcsh.terms[2] == Subgroup{0});
  CHECK(validate_nseries(h3, lcsh).empty());

  FiniteGroup a4 = FiniteGroup::alternating4();
  Series lcsa = lower_central(a4);
  REQUIRE(lcsa.stored() == 2);
  CHECK(lcsa.terms[1].size() == 4);

  Subgroup rot = by_labels(d4, {"r"});
  Series ind = intersect_series(lower_central(d4), rot);
  REQUIRE(ind.stored() == 3);
  CHECK(ind.terms[0] == rot);
  CHECK(ind.terms[1] == Subgroup{0, 2});
  CHECK(ind.terms[2] == Subgroup{0});
  CHECK(ind.kind == "induced");

  Series act = action_series(d4, rot);
  REQUIRE(act.stored() == 3);
  CHECK(act.terms == ind.terms);
  CHECK(act.kind == "action");
  CHECK_THROWS_AS(action_series(d4, by_labels(d4, {"s"})), std::invalid_argument);

  SubgroupGroup sub = subgroup_as_group(d4, rot, "R");
  Series rest = restrict_series(sub, ind);
  CHECK(rest.terms[0] == full_subgroup(sub.grp));
  CHECK(rest.terms[1] == Subgroup{0, 2});
  CHECK(validate_nseries(sub.grp, rest).empty());

  QuotientGroup q = quotient_by(d4, Subgroup{0, 2});
  Series proj = project_series(q, lower_central(d4));
  CHECK(proj.terms[0] == full_subgroup(q.grp));
  CHECK(proj.terms.back() == Subgroup{0});

  Series cust = custom_series(
      d4, {{d4.element_by_label("r"), d4.element_by_label("s")}, {d4.element_by_label("r2")}});
  CHECK(cust.terms[1] == Subgroup{0, 2});
  // closures: the whole group is absent, so validation complains up front
  CHECK_THROWS_WITH_AS(custom_series(s3, {{s3.element_by_label("(123)")}}),
                       doctest::Contains("first term"), std::invalid_argument);
}

TEST_CASE("custom series must satisfy the commutator law") {
  FiniteGroup d4 = FiniteGroup::dihedral(4);
  Series bad;
  bad.kind = "custom";
  bad.terms = {full_subgroup(d4), {0}};
  std::string err = validate_nseries(d4, bad);
  CHECK(err.find("commutator law") != std::string::npos);
  CHECK_THROWS_WITH_AS(custom_series(d4, {{d4.element_by_label("r"), d4.element_by_label("s")}, {}}),
                       doctest::Contains("commutator law"), std::invalid_argument);

  Series notdesc;
  notdesc.kind = "custom";
  notdesc.terms = {full_subgroup(d4), {0, 2}, {0, 1, 2, 3}};
  CHECK(validate_nseries(d4, notdesc).find("not contained") != std::string::npos);

  Series notsub;
  notsub.kind = "custom";
  notsub.terms = {full_subgroup(d4), {0, 1}};
  CHECK(validate_nseries(d4, notsub).find("not a subgroup") != std::string::npos);
}

TEST_CASE("custom series accepts a valid chain") {
  FiniteGroup d4 = FiniteGroup::dihedral(4);
  Series s = custom_series(d4, {{d4.element_by_label("r"), d4.element_by_label("s")},
                                {d4.element_by_label("r")},
                                {d4.element_by_label("r2")}});
  CHECK(s.stored() == 3);
  CHECK(s.terms[1] == Subgroup{0, 1, 2, 3});
  CHECK(validate_nseries(d4, s).empty());
}

TEST_CASE("abelian sections") {
  FiniteGroup q8 = FiniteGroup::quaternion8();
  GroupAb abq8 = abelian_section(q8, full_subgroup(q8), Subgroup{0, 1});
  CHECK(abq8.grp.torsion() == std::vector<Int>{2, 2});
  CHECK(abq8.grp.free_rank() == 0);

  FiniteGroup s3 = FiniteGroup::symmetric(3);
  Subgroup a3 = closure(s3, {s3.element_by_label("(123)")});
  GroupAb abs3 = abelian_section(s3, full_subgroup(s3), a3);
  CHECK(abs3.grp.torsion() == std::vector<Int>{2});

  FiniteGroup c2c4 = FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(4));
  GroupAb ab = abelian_section(c2c4, full_subgroup(c2c4), trivial_subgroup());
  CHECK(ab.grp.torsion() == std::vector<Int>{2, 4});

  FiniteGroup h3 = FiniteGroup::heisenberg(3);
  GroupAb abh = abelian_section(h3, full_subgroup(h3), center(h3));
  CHECK(abh.grp.torsion() == std::vector<Int>{3, 3});

  FiniteGroup d4 = FiniteGroup::dihedral(4);
  GroupAb sec = abelian_section(d4, closure(d4, {1}), Subgroup{0, 2});
  CHECK(sec.grp.torsion() == std::vector<Int>{2});
  CHECK(sec.gens == std::vector<int>{1});
  CHECK(sec.grp.equal(sec.coords(3), sec.coords(1)));
  CHECK_THROWS_AS(sec.coords(4), std::invalid_argument);

  CHECK_THROWS_WITH_AS(abelian_section(s3, full_subgroup(s3), trivial_subgroup()),
                       doctest::Contains("not abelian"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(abelian_section(s3, full_subgroup(s3), closure(s3, {s3.element_by_label("(12)")})),
                       doctest::Contains("not normal"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(abelian_section(d4, closure(d4, {1}), closure(d4, {4})),
                       doctest::Contains("not contained"), std::invalid_argument);
}

TEST_CASE("section coordinates form a homomorphism with exact lifts") {
  std::vector<std::pair<FiniteGroup, Subgroup>> cases;
  {
    FiniteGroup g = FiniteGroup::quaternion8();
    Subgroup n = commutator_subgroup(g, full_subgroup(g), full_subgroup(g));
    cases.emplace_back(std::move(g), std::move(n));
  }
  {
    FiniteGroup g = FiniteGroup::symmetric(4);
    Subgroup n = commutator_subgroup(g, full_subgroup(g), full_subgroup(g));
    cases.emplace_back(std::move(g), std::move(n));
  }
  {
    FiniteGroup g = FiniteGroup::heisenberg(3);
    cases.emplace_back(std::move(g), center(FiniteGroup::heisenberg(3)));
  }
  {
    FiniteGroup g = FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(4));
    cases.emplace_back(std::move(g), trivial_subgroup());
  }
  std::mt19937 rng(31337);
  for (const auto& [g, n] : cases) {
    GroupAb ab = abelian_section(g, full_subgroup(g), n);
    CHECK(ab.grp.order() == Int(g.order()) / Int(static_cast<long>(n.size())));
    for (int x = 0; x < g.order(); ++x)
      for (int y = 0; y < g.order(); ++y)
        CHECK(ab.grp.equal(ab.coords(g.op(x, y)), ab.coords(x) + ab.coords(y)));
    // lifting a coordinate vector and reading coordinates back is the identity
    std::uniform_int_distribution<long> val(-6, 6);
    for (int trial = 0; trial < 25; ++trial) {
      RowVec w(ab.grp.ngens());
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = val(rng);
      CHECK(ab.grp.equal(ab.coords(ab.lift(w)), w));
    }
    // invariant-factor lifts land on elements of the advertised coset order
    for (size_t k = 0; k < ab.grp.torsion().size(); ++k) {
      Eigen::Index c = ab.grp.torsion_coords()[k];
      int h = ab.lift_invariant(c);
      RowVec w = ab.coords(h);
      CHECK(ab.grp.element_order(w) == ab.grp.torsion()[k]);
    }
  }
}

TEST_CASE("coset coordinates are constant on cosets") {
  FiniteGroup d4 = FiniteGroup::dihedral(4);
  GroupAb ab = abelian_section(d4, full_subgroup(d4), Subgroup{0, 2});
  for (int x = 0; x < d4.order(); ++x)
    for (int nu : Subgroup{0, 2})
      CHECK(ab.coords(d4.op(x, nu)) == ab.coords(x));
}
