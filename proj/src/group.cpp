#include "foxcalc/group.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace foxcalc {

namespace {

std::string table_err(const std::string& name, const std::string& what) {
  return "group table '" + name + "': " + what;
}

} // namespace

FiniteGroup FiniteGroup::from_table(std::string name, std::vector<std::string> labels,
                                    std::vector<std::vector<int>> table) {
  FiniteGroup g;
  g.n_ = static_cast<int>(table.size());
  if (g.n_ == 0) throw std::invalid_argument(table_err(name, "empty table"));
  for (int a = 0; a < g.n_; ++a) {
    if (static_cast<int>(table[static_cast<size_t>(a)].size()) != g.n_)
      throw std::invalid_argument(table_err(name, "row " + std::to_string(a) + " has wrong length"));
    for (int b = 0; b < g.n_; ++b) {
      int v = table[static_cast<size_t>(a)][static_cast<size_t>(b)];
      if (v < 0 || v >= g.n_)
        throw std::invalid_argument(table_err(name, "entry (" + std::to_string(a) + ", " +
                                                        std::to_string(b) + ") out of range"));
    }
  }
  for (int a = 0; a < g.n_; ++a) {
    if (table[0][static_cast<size_t>(a)] != a)
      throw std::invalid_argument(table_err(name, "identity law fails at (0, " + std::to_string(a) + ")"));
    if (table[static_cast<size_t>(a)][0] != a)
      throw std::invalid_argument(table_err(name, "identity law fails at (" + std::to_string(a) + ", 0)"));
  }
  g.inv_.assign(static_cast<size_t>(g.n_), -1);
  for (int a = 0; a < g.n_; ++a) {
    for (int b = 0; b < g.n_; ++b) {
      if (table[static_cast<size_t>(a)][static_cast<size_t>(b)] == 0 &&
          table[static_cast<size_t>(b)][static_cast<size_t>(a)] == 0) {
        g.inv_[static_cast<size_t>(a)] = b;
        break;
      }
    }
    if (g.inv_[static_cast<size_t>(a)] < 0)
      throw std::invalid_argument(table_err(name, "no inverse for element " + std::to_string(a)));
  }
  for (int a = 0; a < g.n_; ++a)
    for (int b = 0; b < g.n_; ++b) {
      int ab = table[static_cast<size_t>(a)][static_cast<size_t>(b)];
      for (int c = 0; c < g.n_; ++c) {
        int bc = table[static_cast<size_t>(b)][static_cast<size_t>(c)];
        if (table[static_cast<size_t>(ab)][static_cast<size_t>(c)] !=
            table[static_cast<size_t>(a)][static_cast<size_t>(bc)])
          throw std::invalid_argument(table_err(name, "associativity fails at (" + std::to_string(a) +
                                                          ", " + std::to_string(b) + ", " +
                                                          std::to_string(c) + ")"));
      }
    }
  if (labels.empty()) {
    labels.emplace_back("1");
    for (int a = 1; a < g.n_; ++a) labels.push_back("g" + std::to_string(a));
  }
  if (static_cast<int>(labels.size()) != g.n_)
    throw std::invalid_argument(table_err(name, "label count does not match order"));
  for (int a = 0; a < g.n_; ++a) {
    auto [it, fresh] = g.by_label_.emplace(labels[static_cast<size_t>(a)], a);
    (void)it;
    if (!fresh)
      throw std::invalid_argument(table_err(name, "duplicate label '" + labels[static_cast<size_t>(a)] + "'"));
  }
  g.name_ = std::move(name);
  g.labels_ = std::move(labels);
  g.table_ = std::move(table);
  return g;
}

FiniteGroup FiniteGroup::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open group table file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("group table file '" + path + "': " + e.what());
  }
  if (!j.is_object() || !j.contains("order") || !j.contains("table"))
    throw std::invalid_argument("group table file '" + path + "': need fields 'order' and 'table'");
  int n = j.at("order").get<int>();
  auto table = j.at("table").get<std::vector<std::vector<int>>>();
  if (static_cast<int>(table.size()) != n)
    throw std::invalid_argument("group table file '" + path + "': 'table' has " +
                                std::to_string(table.size()) + " rows, expected " + std::to_string(n));
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  std::string name = j.value("name", std::string("table"));
  return from_table(std::move(name), std::move(labels), std::move(table));
}

int FiniteGroup::pow(int a, const Int& k) const {
  int ord = element_order(a);
  Int r;
  mpz_fdiv_r_ui(r.get_mpz_t(), k.get_mpz_t(), static_cast<unsigned long>(ord));
  long e = r.get_si();
  int acc = 0;
  for (long t = 0; t < e; ++t) acc = op(acc, a);
  return acc;
}

int FiniteGroup::element_order(int a) const {
  int acc = a, ord = 1;
  while (acc != 0) {
    acc = op(acc, a);
    ++ord;
  }
  return ord;
}

Int FiniteGroup::exponent() const {
  Int e = 1;
  for (int a = 0; a < n_; ++a) e = lcm_int(e, Int(element_order(a)));
  return e;
}

int FiniteGroup::element_by_label(const std::string& l) const {
  auto it = by_label_.find(l);
  return it == by_label_.end() ? -1 : it->second;
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) throw std::invalid_argument("cyclic: order must be positive");
  std::vector<std::vector<int>> t(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[static_cast<size_t>(a)][static_cast<size_t>(b)] = (a + b) % n;
  std::vector<std::string> labels;
  for (int a = 0; a < n; ++a)
    labels.push_back(a == 0 ? "1" : (a == 1 ? "a" : "a" + std::to_string(a)));
  return from_table("C" + std::to_string(n), std::move(labels), std::move(t));
}

FiniteGroup FiniteGroup::dihedral(int n) {
  if (n < 1) throw std::invalid_argument("dihedral: rotation order must be positive");
  int m = 2 * n;
  auto id = [n](int i, int j) { return i + n * j; };
  std::vector<std::vector<int>> t(static_cast<size_t>(m), std::vector<int>(static_cast<size_t>(m)));
  for (int i1 = 0; i1 < n; ++i1)
    for (int j1 = 0; j1 < 2; ++j1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int j2 = 0; j2 < 2; ++j2) {
          int i = j1 ? (i1 - i2 + n) % n : (i1 + i2) % n;
          t[static_cast<size_t>(id(i1, j1))][static_cast<size_t>(id(i2, j2))] = id(i, j1 ^ j2);
        }
  std::vector<std::string> labels(static_cast<size_t>(m));
  for (int i = 0; i < n; ++i) {
    std::string ri = i == 0 ? "" : (i == 1 ? "r" : "r" + std::to_string(i));
    labels[static_cast<size_t>(id(i, 0))] = i == 0 ? "1" : ri;
    labels[static_cast<size_t>(id(i, 1))] = ri + "s";
  }
  return from_table("D" + std::to_string(n), std::move(labels), std::move(t));
}

FiniteGroup FiniteGroup::quaternion8() {
  // ids 2q+s with unit q in {1,i,j,k}, sign bit s
  static const int U[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int S[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  std::vector<std::vector<int>> t(8, std::vector<int>(8));
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      int qa = a / 2, sa = a % 2, qb = b / 2, sb = b % 2;
      t[static_cast<size_t>(a)][static_cast<size_t>(b)] =
          2 * U[qa][qb] + (sa ^ sb ^ S[qa][qb]);
    }
  return from_table("Q8", {"1", "-1", "i", "-i", "j", "-j", "k", "-k"}, std::move(t));
}

namespace {

std::vector<std::vector<int>> all_perms(int n) {
  std::vector<int> p(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

bool perm_even(const std::vector<int>& p) {
  int inv = 0;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 == 0;
}

std::string cycle_label(const std::vector<int>& p) {
  std::string out;
  std::vector<bool> seen(p.size(), false);
  for (size_t s = 0; s < p.size(); ++s) {
    if (seen[s] || p[s] == static_cast<int>(s)) continue;
    out += "(";
    size_t x = s;
    while (!seen[x]) {
      seen[x] = true;
      out += std::to_string(x + 1);
      x = static_cast<size_t>(p[x]);
    }
    out += ")";
  }
  return out.empty() ? "1" : out;
}

FiniteGroup perm_group(std::string name, const std::vector<std::vector<int>>& perms) {
  std::map<std::vector<int>, int> index;
  for (size_t i = 0; i < perms.size(); ++i) index[perms[i]] = static_cast<int>(i);
  int m = static_cast<int>(perms.size());
  std::vector<std::vector<int>> t(static_cast<size_t>(m), std::vector<int>(static_cast<size_t>(m)));
  std::vector<int> prod(perms[0].size());
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (size_t x = 0; x < prod.size(); ++x)
        prod[x] = perms[static_cast<size_t>(a)][static_cast<size_t>(perms[static_cast<size_t>(b)][x])];
      t[static_cast<size_t>(a)][static_cast<size_t>(b)] = index.at(prod);
    }
  std::vector<std::string> labels;
  for (const auto& p : perms) labels.push_back(cycle_label(p));
  return FiniteGroup::from_table(std::move(name), std::move(labels), std::move(t));
}

} // namespace

FiniteGroup FiniteGroup::symmetric(int n) {
  if (n < 1 || n > 4) throw std::invalid_argument("symmetric: supported degrees are 1..4");
  return perm_group("S" + std::to_string(n), all_perms(n));
}

FiniteGroup FiniteGroup::alternating4() {
  std::vector<std::vector<int>> perms;
  for (auto& p : all_perms(4))
    if (perm_even(p)) perms.push_back(p);
  return perm_group("A4", perms);
}

FiniteGroup FiniteGroup::heisenberg(int p) {
  if (p < 2) throw std::invalid_argument("heisenberg: modulus must be at least 2");
  int m = p * p * p;
  auto id = [p](int i, int j, int k) { return (i * p + j) * p + k; };
  std::vector<std::vector<int>> t(static_cast<size_t>(m), std::vector<int>(static_cast<size_t>(m)));
  for (int i1 = 0; i1 < p; ++i1)
    for (int j1 = 0; j1 < p; ++j1)
      for (int k1 = 0; k1 < p; ++k1)
        for (int i2 = 0; i2 < p; ++i2)
          for (int j2 = 0; j2 < p; ++j2)
            for (int k2 = 0; k2 < p; ++k2)
              t[static_cast<size_t>(id(i1, j1, k1))][static_cast<size_t>(id(i2, j2, k2))] =
                  id((i1 + i2) % p, (j1 + j2) % p, (k1 + k2 + i1 * j2) % p);
  std::vector<std::string> labels(static_cast<size_t>(m));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      for (int k = 0; k < p; ++k) {
        std::string l;
        auto put = [&l](const char* c, int e) {
          if (e == 0) return;
          l += c;
          if (e > 1) l += std::to_string(e);
        };
        put("x", i);
        put("y", j);
        put("z", k);
        labels[static_cast<size_t>(id(i, j, k))] = l.empty() ? "1" : l;
      }
  return from_table("Heis" + std::to_string(p), std::move(labels), std::move(t));
}

FiniteGroup FiniteGroup::product(const FiniteGroup& a, const FiniteGroup& b) {
  int na = a.order(), nb = b.order(), m = na * nb;
  std::vector<std::vector<int>> t(static_cast<size_t>(m), std::vector<int>(static_cast<size_t>(m)));
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      t[static_cast<size_t>(x)][static_cast<size_t>(y)] =
          a.op(x / nb, y / nb) * nb + b.op(x % nb, y % nb);
  std::vector<std::string> labels;
  for (int x = 0; x < m; ++x) labels.push_back(a.label(x / nb) + "." + b.label(x % nb));
  return from_table(a.name() + "x" + b.name(), std::move(labels), std::move(t));
}

bool sub_contains(const Subgroup& s, int g) {
  return std::binary_search(s.begin(), s.end(), g);
}

Subgroup trivial_subgroup() { return {0}; }

Subgroup full_subgroup(const FiniteGroup& g) {
  Subgroup s(static_cast<size_t>(g.order()));
  for (int a = 0; a < g.order(); ++a) s[static_cast<size_t>(a)] = a;
  return s;
}

Subgroup closure(const FiniteGroup& g, std::vector<int> gens) {
  std::vector<bool> in(static_cast<size_t>(g.order()), false);
  std::deque<int> work;
  auto add = [&](int x) {
    if (!in[static_cast<size_t>(x)]) {
      in[static_cast<size_t>(x)] = true;
      work.push_back(x);
    }
  };
  add(0);
  for (int x : gens) add(x);
  while (!work.empty()) {
    int x = work.front();
    work.pop_front();
    for (int h : gens) add(g.op(x, h));
  }
  Subgroup out;
  for (int a = 0; a < g.order(); ++a)
    if (in[static_cast<size_t>(a)]) out.push_back(a);
  return out;
}

bool is_subgroup(const FiniteGroup& g, const Subgroup& s) {
  if (s.empty() || !sub_contains(s, 0)) return false;
  for (int a : s)
    for (int b : s)
      if (!sub_contains(s, g.op(a, b))) return false;
  return true;
}

bool is_normal(const FiniteGroup& g, const Subgroup& s) {
  for (int a = 0; a < g.order(); ++a)
    for (int x : s)
      if (!sub_contains(s, g.conj(a, x))) return false;
  return true;
}

Subgroup commutator_subgroup(const FiniteGroup& g, const Subgroup& a, const Subgroup& b) {
  std::set<int> gens;
  for (int x : a)
    for (int y : b) gens.insert(g.commutator(x, y));
  return closure(g, std::vector<int>(gens.begin(), gens.end()));
}

std::vector<int> product_set(const FiniteGroup& g, const Subgroup& a, const Subgroup& b) {
  std::set<int> out;
  for (int x : a)
    for (int y : b) out.insert(g.op(x, y));
  return std::vector<int>(out.begin(), out.end());
}

Subgroup product_subgroup(const FiniteGroup& g, const Subgroup& a, const Subgroup& b) {
  Subgroup p = product_set(g, a, b);
  if (!is_subgroup(g, p))
    throw std::invalid_argument("product_subgroup: the product set is not a subgroup");
  return p;
}

Subgroup normal_closure(const FiniteGroup& g, const std::vector<int>& gens) {
  std::vector<int> all;
  for (int x : gens)
    for (int a = 0; a < g.order(); ++a) all.push_back(g.conj(a, x));
  return closure(g, all);
}

Subgroup center(const FiniteGroup& g) {
  Subgroup out;
  for (int z = 0; z < g.order(); ++z) {
    bool central = true;
    for (int a = 0; a < g.order() && central; ++a) central = g.op(z, a) == g.op(a, z);
    if (central) out.push_back(z);
  }
  return out;
}

Subgroup intersect_subgroups(const Subgroup& a, const Subgroup& b) {
  Subgroup out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Subgroup power_subgroup(const FiniteGroup& g, const Subgroup& s, const Int& k) {
  std::vector<int> gens;
  for (int x : s) gens.push_back(g.pow(x, k));
  return closure(g, gens);
}

Subgroup SubgroupGroup::map_down(const Subgroup& parent_set) const {
  Subgroup out;
  for (int x : parent_set) {
    int y = from_parent[static_cast<size_t>(x)];
    if (y >= 0) out.push_back(y);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SubgroupGroup subgroup_as_group(const FiniteGroup& g, const Subgroup& s, const std::string& name) {
  if (!is_subgroup(g, s))
    throw std::invalid_argument("subgroup_as_group: the given set is not a subgroup");
  std::vector<int> from_parent(static_cast<size_t>(g.order()), -1);
  for (size_t i = 0; i < s.size(); ++i) from_parent[static_cast<size_t>(s[i])] = static_cast<int>(i);
  int m = static_cast<int>(s.size());
  std::vector<std::vector<int>> t(static_cast<size_t>(m), std::vector<int>(static_cast<size_t>(m)));
  std::vector<std::string> labels;
  for (int x = 0; x < m; ++x) {
    labels.push_back(g.label(s[static_cast<size_t>(x)]));
    for (int y = 0; y < m; ++y)
      t[static_cast<size_t>(x)][static_cast<size_t>(y)] =
          from_parent[static_cast<size_t>(g.op(s[static_cast<size_t>(x)], s[static_cast<size_t>(y)]))];
  }
  return SubgroupGroup{FiniteGroup::from_table(name, std::move(labels), std::move(t)), s,
                       std::move(from_parent)};
}

Subgroup QuotientGroup::image(const Subgroup& parent_set) const {
  std::set<int> out;
  for (int x : parent_set) out.insert(proj[static_cast<size_t>(x)]);
  return Subgroup(out.begin(), out.end());
}

QuotientGroup quotient_by(const FiniteGroup& g, const Subgroup& normal) {
  if (!is_subgroup(g, normal) || !is_normal(g, normal))
    throw std::invalid_argument("quotient_by: need a normal subgroup");
  int n = g.order();
  std::vector<int> key(static_cast<size_t>(n));
  for (int x = 0; x < n; ++x) {
    int best = g.op(x, normal[0]);
    for (int nu : normal) best = std::min(best, g.op(x, nu));
    key[static_cast<size_t>(x)] = best;
  }
  std::vector<int> reps;
  for (int x = 0; x < n; ++x)
    if (key[static_cast<size_t>(x)] == x) reps.push_back(x);
  std::map<int, int> idx;
  for (size_t i = 0; i < reps.size(); ++i) idx[reps[i]] = static_cast<int>(i);
  std::vector<int> proj(static_cast<size_t>(n));
  for (int x = 0; x < n; ++x) proj[static_cast<size_t>(x)] = idx.at(key[static_cast<size_t>(x)]);
  int m = static_cast<int>(reps.size());
  std::vector<std::vector<int>> t(static_cast<size_t>(m), std::vector<int>(static_cast<size_t>(m)));
  std::vector<std::string> labels;
  for (int a = 0; a < m; ++a) {
    labels.push_back(g.label(reps[static_cast<size_t>(a)]));
    for (int b = 0; b < m; ++b)
      t[static_cast<size_t>(a)][static_cast<size_t>(b)] =
          proj[static_cast<size_t>(g.op(reps[static_cast<size_t>(a)], reps[static_cast<size_t>(b)]))];
  }
  FiniteGroup grp = FiniteGroup::from_table(g.name() + "/N" + std::to_string(normal.size()),
                                            std::move(labels), std::move(t));
  return QuotientGroup{std::move(grp), std::move(proj), std::move(reps)};
}

std::string validate_nseries(const FiniteGroup& g, const Series& s) {
  if (s.terms.empty()) return "series has no terms";
  if (s.terms[0] != full_subgroup(g)) return "first term must be the whole group";
  for (size_t i = 0; i < s.terms.size(); ++i) {
    if (!is_subgroup(g, s.terms[i])) return "term " + std::to_string(i + 1) + " is not a subgroup";
    if (i + 1 < s.terms.size())
      for (int x : s.terms[i + 1])
        if (!sub_contains(s.terms[i], x))
          return "term " + std::to_string(i + 2) + " is not contained in term " + std::to_string(i + 1);
  }
  int len = s.stored();
  for (int i = 1; i <= len; ++i)
    for (int j = 1; j <= len; ++j)
      for (int x : s.term(i))
        for (int y : s.term(j))
          if (!sub_contains(s.term(i + j), g.commutator(x, y)))
            return "commutator law fails for terms (" + std::to_string(i) + ", " + std::to_string(j) +
                   "): [" + g.label(x) + ", " + g.label(y) + "] is outside term " + std::to_string(i + j);
  return "";
}

Series lower_central(const FiniteGroup& g) {
  Series s;
  s.kind = "gamma";
  s.terms.push_back(full_subgroup(g));
  for (;;) {
    Subgroup next = commutator_subgroup(g, s.terms.back(), s.terms[0]);
    if (next == s.terms.back()) break;
    s.terms.push_back(std::move(next));
  }
  return s;
}

Series intersect_series(const Series& parent, const Subgroup& s) {
  Series out;
  out.kind = "induced";
  for (const auto& t : parent.terms) out.terms.push_back(intersect_subgroups(t, s));
  while (out.terms.size() > 1 && out.terms.back() == out.terms[out.terms.size() - 2])
    out.terms.pop_back();
  return out;
}

Series action_series(const FiniteGroup& gamma, const Subgroup& k) {
  if (!is_subgroup(gamma, k) || !is_normal(gamma, k))
    throw std::invalid_argument("action_series: need a normal subgroup");
  Series s;
  s.kind = "action";
  s.terms.push_back(k);
  Subgroup whole = full_subgroup(gamma);
  for (;;) {
    Subgroup next = commutator_subgroup(gamma, s.terms.back(), whole);
    if (next == s.terms.back()) break;
    s.terms.push_back(std::move(next));
  }
  return s;
}

Series custom_series(const FiniteGroup& g, const std::vector<std::vector<int>>& term_gens) {
  Series s;
  s.kind = "custom";
  for (const auto& gens : term_gens) s.terms.push_back(closure(g, gens));
  std::string err = validate_nseries(g, s);
  if (!err.empty()) throw std::invalid_argument("custom series: " + err);
  return s;
}

Series restrict_series(const SubgroupGroup& sub, const Series& parent_ids) {
  Series out;
  out.kind = parent_ids.kind;
  for (const auto& t : parent_ids.terms) out.terms.push_back(sub.map_down(t));
  return out;
}

Series project_series(const QuotientGroup& q, const Series& s) {
  Series out;
  out.kind = s.kind;
  for (const auto& t : s.terms) out.terms.push_back(q.image(t));
  while (out.terms.size() > 1 && out.terms.back() == out.terms[out.terms.size() - 2])
    out.terms.pop_back();
  return out;
}

RowVec GroupAb::coords(int g) const {
  if (!sub_contains(S, g))
    throw std::invalid_argument("section coords: element '" + G->label(g) + "' is outside the subgroup");
  return coord_of_[static_cast<size_t>(g)];
}

int GroupAb::lift(const RowVec& w) const {
  int acc = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    acc = G->op(acc, G->pow(gens[static_cast<size_t>(i)], w(i)));
  return acc;
}

int GroupAb::lift_invariant(Eigen::Index k) const { return lift(grp.inv_lift(k)); }

GroupAb abelian_section(const FiniteGroup& g, const Subgroup& s, const Subgroup& n) {
  if (!is_subgroup(g, s)) throw std::invalid_argument("abelian_section: numerator is not a subgroup");
  if (!is_subgroup(g, n)) throw std::invalid_argument("abelian_section: denominator is not a subgroup");
  for (int x : n)
    if (!sub_contains(s, x))
      throw std::invalid_argument("abelian_section: denominator is not contained in the numerator");
  for (int x : s)
    for (int nu : n)
      if (!sub_contains(n, g.conj(x, nu)))
        throw std::invalid_argument("abelian_section: denominator is not normal in the numerator");
  for (int x : s)
    for (int y : s)
      if (!sub_contains(n, g.commutator(x, y)))
        throw std::invalid_argument("abelian_section: the section [" + g.label(x) + ", " + g.label(y) +
                                    "] is not abelian");

  GroupAb out;
  out.G = &g;
  out.S = s;
  out.N = n;
  Subgroup cur = n;
  for (int x : s) {
    if (sub_contains(cur, x)) continue;
    out.gens.push_back(x);
    std::vector<int> all(n.begin(), n.end());
    all.insert(all.end(), out.gens.begin(), out.gens.end());
    cur = closure(g, all);
  }
  int ng = static_cast<int>(out.gens.size());

  std::vector<int> key(static_cast<size_t>(g.order()), -1);
  for (int x : s) {
    int best = g.order();
    for (int nu : n) best = std::min(best, g.op(x, nu));
    key[static_cast<size_t>(x)] = best;
  }
  std::map<int, RowVec> coord;
  std::deque<int> work;
  coord[0] = zero_row(ng);
  work.push_back(0);
  std::vector<RowVec> rel_rows;
  while (!work.empty()) {
    int r = work.front();
    work.pop_front();
    for (int t = 0; t < ng; ++t) {
      int y = key[static_cast<size_t>(g.op(r, out.gens[static_cast<size_t>(t)]))];
      RowVec cand = coord.at(r) + unit_row(ng, t);
      auto it = coord.find(y);
      if (it == coord.end()) {
        coord[y] = cand;
        work.push_back(y);
      } else {
        RowVec rel = cand - it->second;
        if (!is_zero(rel)) rel_rows.push_back(std::move(rel));
      }
    }
  }
  Mat rel(static_cast<Eigen::Index>(rel_rows.size()), ng);
  for (size_t i = 0; i < rel_rows.size(); ++i) rel.row(static_cast<Eigen::Index>(i)) = rel_rows[i];
  out.grp = FgAbGroup(ng, rel);
  if (out.grp.order() * Int(static_cast<long>(n.size())) != Int(static_cast<long>(s.size())))
    throw std::logic_error("abelian_section: presentation order mismatch");
  out.coord_of_.assign(static_cast<size_t>(g.order()), RowVec());
  for (int x : s) out.coord_of_[static_cast<size_t>(x)] = coord.at(key[static_cast<size_t>(x)]);
  return out;
}

} // namespace foxcalc
