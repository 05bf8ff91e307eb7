#pragma once

#include <map>
#include <string>
#include <vector>

#include "foxcalc/abelian.hpp"

namespace foxcalc {

// Finite group as a fully validated multiplication table; element 0 is the identity.
class FiniteGroup {
public:
  static FiniteGroup from_table(std::string name, std::vector<std::string> labels,
                                std::vector<std::vector<int>> table);
  static FiniteGroup from_json_file(const std::string& path);

  static FiniteGroup cyclic(int n);
  static FiniteGroup dihedral(int n); // order 2n
  static FiniteGroup quaternion8();
  static FiniteGroup symmetric(int n); // n <= 4
  static FiniteGroup alternating4();
  static FiniteGroup heisenberg(int p); // order p^3, unitriangular 3x3 mod p
  static FiniteGroup product(const FiniteGroup& a, const FiniteGroup& b);

  int order() const { return n_; }
  int op(int a, int b) const { return table_[static_cast<size_t>(a)][static_cast<size_t>(b)]; }
  int inv(int a) const { return inv_[static_cast<size_t>(a)]; }
  int pow(int a, const Int& k) const;
  int commutator(int a, int b) const { return op(op(a, b), op(inv(a), inv(b))); }
  int conj(int a, int b) const { return op(op(a, b), inv(a)); } // a b a^-1
  int element_order(int a) const;
  Int exponent() const;
  const std::string& name() const { return name_; }
  const std::string& label(int a) const { return labels_[static_cast<size_t>(a)]; }
  int element_by_label(const std::string& l) const; // -1 when absent

private:
  FiniteGroup() = default;
  int n_ = 0;
  std::string name_;
  std::vector<std::string> labels_;
  std::vector<std::vector<int>> table_;
  std::vector<int> inv_;
  std::map<std::string, int> by_label_;
};

// Subgroups are sorted element-id vectors.
using Subgroup = std::vector<int>;

bool sub_contains(const Subgroup& s, int g);
Subgroup trivial_subgroup();
Subgroup full_subgroup(const FiniteGroup& g);
Subgroup closure(const FiniteGroup& g, std::vector<int> gens);
bool is_subgroup(const FiniteGroup& g, const Subgroup& s);
bool is_normal(const FiniteGroup& g, const Subgroup& s);
Subgroup commutator_subgroup(const FiniteGroup& g, const Subgroup& a, const Subgroup& b);
std::vector<int> product_set(const FiniteGroup& g, const Subgroup& a, const Subgroup& b);
Subgroup product_subgroup(const FiniteGroup& g, const Subgroup& a, const Subgroup& b);
Subgroup normal_closure(const FiniteGroup& g, const std::vector<int>& gens);
Subgroup center(const FiniteGroup& g);
Subgroup intersect_subgroups(const Subgroup& a, const Subgroup& b);
// subgroup generated by k-th powers of elements of s
Subgroup power_subgroup(const FiniteGroup& g, const Subgroup& s, const Int& k);

struct SubgroupGroup {
  FiniteGroup grp;
  std::vector<int> to_parent;
  std::vector<int> from_parent; // -1 outside the subgroup
  Subgroup map_down(const Subgroup& parent_set) const; // intersects with the subgroup
};
SubgroupGroup subgroup_as_group(const FiniteGroup& g, const Subgroup& s, const std::string& name);

struct QuotientGroup {
  FiniteGroup grp;
  std::vector<int> proj; // parent id -> quotient id
  std::vector<int> reps; // quotient id -> smallest parent representative
  Subgroup image(const Subgroup& parent_set) const;
};
QuotientGroup quotient_by(const FiniteGroup& g, const Subgroup& normal);

// Descending chain S_1 >= S_2 >= ...; indexing beyond the stored terms
// repeats the last one (chains stabilize).
struct Series {
  std::vector<Subgroup> terms;
  std::string kind;
  const Subgroup& term(int i) const {
    size_t idx = static_cast<size_t>(std::max(i, 1)) - 1;
    return terms[std::min(idx, terms.size() - 1)];
  }
  int stored() const { return static_cast<int>(terms.size()); }
};

// empty result = valid; otherwise a diagnostic naming the failing law
std::string validate_nseries(const FiniteGroup& g, const Series& s);

Series lower_central(const FiniteGroup& g);
// terms S cap T_i of a parent-group series, in parent ids
Series intersect_series(const Series& parent, const Subgroup& s);
// K, [K, Gamma], [[K, Gamma], Gamma], ... in Gamma ids; requires K normal
Series action_series(const FiniteGroup& gamma, const Subgroup& k);
Series custom_series(const FiniteGroup& g, const std::vector<std::vector<int>>& term_gens);
// rewrite a series given in parent ids into subgroup ids
Series restrict_series(const SubgroupGroup& sub, const Series& parent_ids);
// image of a series under a quotient projection
Series project_series(const QuotientGroup& q, const Series& s);

// Abelian section S/N with tracked generators, coordinates, and lifts.
struct GroupAb {
  const FiniteGroup* G = nullptr;
  Subgroup S, N;
  FgAbGroup grp;
  std::vector<int> gens;          // minimal generating elements (ascending ids)
  RowVec coords(int g) const;     // g must lie in S
  int lift(const RowVec& w) const;          // product of gens[i]^w_i
  int lift_invariant(Eigen::Index k) const; // lift of the k-th diagonal generator

private:
  friend GroupAb abelian_section(const FiniteGroup&, const Subgroup&, const Subgroup&);
  std::vector<RowVec> coord_of_; // indexed by element id; empty outside S
};
GroupAb abelian_section(const FiniteGroup& g, const Subgroup& s, const Subgroup& n);

} // namespace foxcalc
