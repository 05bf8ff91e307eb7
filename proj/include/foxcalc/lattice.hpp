#pragma once

#include "foxcalc/normal_form.hpp"

namespace foxcalc {

// Subgroup of Z^ambient, stored as a canonical HNF basis (one row per basis
// vector, no zero rows). Two lattices are equal iff their bases are equal.
class Lattice {
public:
  Lattice() : ambient_(0), basis_(0, 0) {}
  explicit Lattice(Eigen::Index ambient) : ambient_(ambient), basis_(0, ambient) {}
  static Lattice span(const Mat& gens) {
    Lattice l(gens.cols());
    l.basis_ = la::hnf(gens);
    return l;
  }
  static Lattice full(Eigen::Index ambient) { return span(identity(ambient)); }

  Eigen::Index ambient() const { return ambient_; }
  Eigen::Index rank() const { return basis_.rows(); }
  const Mat& basis() const { return basis_; }
  bool is_zero() const { return basis_.rows() == 0; }

  bool contains(const RowVec& v) const { return la::solve_hnf(basis_, v).has_value(); }
  bool contains(const Lattice& other) const {
    for (Eigen::Index i = 0; i < other.basis_.rows(); ++i)
      if (!contains(RowVec(other.basis_.row(i)))) return false;
    return true;
  }
  // coefficients of v in the basis, if v lies in the lattice
  std::optional<RowVec> coords(const RowVec& v) const { return la::solve_hnf(basis_, v); }
  // canonical representative of v modulo the lattice
  RowVec reduce(const RowVec& v) const { return la::reduce_hnf(basis_, v); }

  friend Lattice operator+(const Lattice& a, const Lattice& b) {
    Lattice l(a.ambient_);
    l.basis_ = la::hnf(vstack(a.basis_, b.basis_));
    return l;
  }
  friend Lattice intersect(const Lattice& a, const Lattice& b) {
    Mat ker = la::preimage_lattice(a.basis_, b.basis_);
    Lattice l(a.ambient_);
    l.basis_ = la::hnf(ker * a.basis_);
    return l;
  }
  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.ambient_ == b.ambient_ && mat_equal(a.basis_, b.basis_);
  }
  friend bool operator!=(const Lattice& a, const Lattice& b) { return !(a == b); }

private:
  Eigen::Index ambient_;
  Mat basis_;
};

} // namespace foxcalc
