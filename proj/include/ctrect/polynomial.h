#pragma once

#include <array>
#include <initializer_list>
#include <limits>
#include <vector>

#include "ctrect/geom.h"

namespace ctrect {

// Dense univariate polynomial in lambda with ascending coefficients. The
// storage is fixed so that the solver inner loop never allocates; products of
// the EVL meet rows stay below degree 8.
class Poly {
 public:
  static constexpr int kMaxDegree = 8;

  Poly() = default;
  Poly(std::initializer_list<double> ascending);
  static Poly constant(double c) { return Poly({c}); }

  // Nominal degree (index of the highest stored coefficient, which may be 0).
  int degree() const { return degree_; }
  double operator[](int i) const { return i <= degree_ ? c_[i] : 0.0; }
  void set(int i, double value);

  double operator()(double x) const;
  Poly derivative() const;
  double max_abs_coeff() const;
  bool is_zero() const { return max_abs_coeff() == 0.0; }
  // Drops leading coefficients with |c| <= rel_tol * max|c|.
  Poly trimmed(double rel_tol) const;
  Poly scaled(double s) const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b);

 private:
  std::array<double, kMaxDegree + 1> c_{};
  int degree_ = 0;
};

inline constexpr Interval kAllReals{-std::numeric_limits<double>::infinity(),
                                    std::numeric_limits<double>::infinity()};

// Real roots of a polynomial of degree <= 4 inside `feasible`, ascending.
// Roots are isolated between consecutive critical points (found recursively
// from the derivative), refined by bracketed Newton iteration and polished by
// a final Newton step. Leading coefficients below 1e-12 * max|c| are dropped.
// Throws Error(kIdenticallyZero) when max|c| <= zero_tol.
std::vector<double> real_roots_quartic(const Poly& p,
                                       Interval feasible = Interval{},
                                       double zero_tol = 0.0);

// Allocation-free core of real_roots_quartic. Returns the number of roots
// written to `out`, or -1 when the polynomial is identically zero.
int real_roots_into(const Poly& p, Interval feasible, double zero_tol,
                    std::array<double, Poly::kMaxDegree>& out);

}  // namespace ctrect
