#include "ctrect/polynomial.h"

#include <algorithm>
#include <cmath>

#include "ctrect/errors.h"

namespace ctrect {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kMergeTol = 1e-8;

// Rounding error bound for Horner evaluation at x.
double eval_error_bound(const Poly& p, double x) {
  double acc = 0.0;
  const double ax = std::abs(x);
  for (int i = p.degree(); i >= 0; --i) acc = acc * ax + std::abs(p[i]);
  return 8.0 * (p.degree() + 1) * kEps * acc;
}

double polish(const Poly& p, const Poly& dp, double x) {
  for (int step = 0; step < 2; ++step) {
    const double fx = p(x);
    const double d = dp(x);
    if (fx == 0.0 || d == 0.0) break;
    const double xn = x - fx / d;
    if (!(std::abs(p(xn)) < std::abs(fx))) break;
    x = xn;
  }
  return x;
}

// Root of p in (a, b) given a strict sign change. Newton steps that leave the
// bracket are replaced by bisection.
double solve_bracket(const Poly& p, const Poly& dp, double a, double b, double fa) {
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double fx = p(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (fa < 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double d = dp(x);
    double xn = d != 0.0 ? x - fx / d : 0.5 * (a + b);
    if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
    const double scale = std::max(1.0, std::abs(x));
    if (std::abs(xn - x) <= 4.0 * kEps * scale) return xn;
    x = xn;
    if (b - a <= 4.0 * kEps * std::max(std::abs(a), std::abs(b))) return x;
  }
  return x;
}

// Appends the roots of p (leading coefficient non-zero) in [lo, hi] to out.
int roots_in(const Poly& p, double lo, double hi, double* out) {
  const int n = p.degree();
  if (n == 0) return 0;
  if (n == 1) {
    const double r = -p[0] / p[1];
    if (r >= lo && r <= hi) {
      out[0] = r;
      return 1;
    }
    return 0;
  }
  const Poly dp = p.derivative();
  double crit[2 * Poly::kMaxDegree + 2];
  int n_crit = 0;
  if (n == 2) {
    const double c = -p[1] / (2.0 * p[2]);
    if (c > lo && c < hi) crit[n_crit++] = c;
  } else {
    const Poly dpt = dp.trimmed(1e-12);
    n_crit = roots_in(dpt, lo, hi, crit);
    std::sort(crit, crit + n_crit);
  }

  int count = 0;
  double bounds[2 * Poly::kMaxDegree + 4];
  int nb = 0;
  bounds[nb++] = lo;
  for (int i = 0; i < n_crit; ++i) {
    if (crit[i] > lo && crit[i] < hi) bounds[nb++] = crit[i];
  }
  bounds[nb++] = hi;

  double fvals[2 * Poly::kMaxDegree + 4];
  for (int i = 0; i < nb; ++i) fvals[i] = p(bounds[i]);

  for (int i = 0; i < nb; ++i) {
    const bool interior = i > 0 && i + 1 < nb;
    if (fvals[i] == 0.0 ||
        (interior && std::abs(fvals[i]) <= eval_error_bound(p, bounds[i]))) {
      // Exact root at a bound, or a (numerically) multiple root at a
      // critical point.
      out[count++] = bounds[i];
    }
  }
  for (int i = 0; i + 1 < nb; ++i) {
    const double fa = fvals[i];
    const double fb = fvals[i + 1];
    if (fa == 0.0 || fb == 0.0) continue;
    if ((fa < 0.0) != (fb < 0.0)) {
      out[count++] = polish(p, dp, solve_bracket(p, dp, bounds[i], bounds[i + 1], fa));
    }
  }
  return count;
}

}  // namespace

Poly::Poly(std::initializer_list<double> ascending) {
  int i = 0;
  for (double v : ascending) {
    if (i > kMaxDegree) break;
    c_[i++] = v;
  }
  degree_ = std::max(0, i - 1);
}

void Poly::set(int i, double value) {
  c_[i] = value;
  if (i > degree_) degree_ = i;
}

double Poly::operator()(double x) const {
  double acc = c_[degree_];
  for (int i = degree_ - 1; i >= 0; --i) acc = acc * x + c_[i];
  return acc;
}

Poly Poly::derivative() const {
  Poly d;
  if (degree_ == 0) return d;
  for (int i = 1; i <= degree_; ++i) d.c_[i - 1] = i * c_[i];
  d.degree_ = degree_ - 1;
  return d;
}

double Poly::max_abs_coeff() const {
  double m = 0.0;
  for (int i = 0; i <= degree_; ++i) m = std::max(m, std::abs(c_[i]));
  return m;
}

Poly Poly::trimmed(double rel_tol) const {
  Poly t = *this;
  const double m = max_abs_coeff();
  while (t.degree_ > 0 && std::abs(t.c_[t.degree_]) <= rel_tol * m) {
    t.c_[t.degree_] = 0.0;
    --t.degree_;
  }
  return t;
}

Poly Poly::scaled(double s) const {
  Poly r = *this;
  for (int i = 0; i <= degree_; ++i) r.c_[i] *= s;
  return r;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r;
  r.degree_ = std::max(a.degree_, b.degree_);
  for (int i = 0; i <= r.degree_; ++i) r.c_[i] = a.c_[i] + b.c_[i];
  return r;
}

Poly operator-(const Poly& a, const Poly& b) {
  Poly r;
  r.degree_ = std::max(a.degree_, b.degree_);
  for (int i = 0; i <= r.degree_; ++i) r.c_[i] = a.c_[i] - b.c_[i];
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  r.degree_ = std::min(a.degree_ + b.degree_, Poly::kMaxDegree);
  for (int i = 0; i <= a.degree_; ++i) {
    if (a.c_[i] == 0.0) continue;
    for (int j = 0; j <= b.degree_ && i + j <= Poly::kMaxDegree; ++j) {
      r.c_[i + j] += a.c_[i] * b.c_[j];
    }
  }
  return r;
}

bool operator==(const Poly& a, const Poly& b) {
  const int n = std::max(a.degree_, b.degree_);
  for (int i = 0; i <= n; ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

int real_roots_into(const Poly& p, Interval feasible, double zero_tol,
                    std::array<double, Poly::kMaxDegree>& out) {
  const double m = p.max_abs_coeff();
  if (!(m > zero_tol) || m == 0.0) return -1;
  const Poly t = p.trimmed(1e-12);
  const int n = t.degree();
  if (n == 0) return 0;

  // Cauchy bound closes unbounded search intervals.
  double cauchy = 0.0;
  for (int i = 0; i < n; ++i) cauchy = std::max(cauchy, std::abs(t[i] / t[n]));
  cauchy = 1.0 + 1.01 * cauchy;
  const double lo = std::max(feasible.lo, -cauchy);
  const double hi = std::min(feasible.hi, cauchy);
  if (!(lo <= hi)) return 0;

  double raw[4 * Poly::kMaxDegree + 8];
  int count = roots_in(t, lo, hi, raw);
  std::sort(raw, raw + count);
  int kept = 0;
  for (int i = 0; i < count && kept < Poly::kMaxDegree; ++i) {
    if (kept > 0 &&
        std::abs(raw[i] - out[kept - 1]) <= kMergeTol * std::max(1.0, std::abs(raw[i]))) {
      continue;
    }
    out[kept++] = raw[i];
  }
  return kept;
}

std::vector<double> real_roots_quartic(const Poly& p, Interval feasible, double zero_tol) {
  std::array<double, Poly::kMaxDegree> buf{};
  const int n = real_roots_into(p, feasible, zero_tol, buf);
  if (n < 0) {
    throw Error(ErrorCode::kIdenticallyZero, "polynomial is identically zero");
  }
  return std::vector<double>(buf.begin(), buf.begin() + n);
}

}  // namespace ctrect
