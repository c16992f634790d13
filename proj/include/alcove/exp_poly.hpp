#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "alcove/base.hpp"

namespace alcove::exp_poly {

using MultiIndex = std::vector<int>;

// Sparse multivariate polynomial over the complex numbers.
class Polynomial {
 public:
  explicit Polynomial(int nvars) : nvars_(nvars) {
    if (nvars < 1) throw std::invalid_argument("Polynomial: nvars must be positive");
  }

  static Polynomial constant(int nvars, Cplx c) {
    Polynomial p(nvars);
    p.add_monomial(MultiIndex(nvars, 0), c);
    return p;
  }

  static Polynomial monomial(int nvars, const MultiIndex& idx, Cplx c) {
    Polynomial p(nvars);
    p.add_monomial(idx, c);
    return p;
  }

  // Linear polynomial g·v + c0.
  static Polynomial linear(const Vec& g, double c0) {
    Polynomial p(static_cast<int>(g.size()));
    for (int i = 0; i < g.size(); ++i) {
      if (g[i] != 0.0) {
        MultiIndex idx(g.size(), 0);
        idx[i] = 1;
        p.add_monomial(idx, g[i]);
      }
    }
    if (c0 != 0.0) p.add_monomial(MultiIndex(g.size(), 0), c0);
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return coef_.empty(); }
  const std::map<MultiIndex, Cplx>& coefficients() const { return coef_; }

  void add_monomial(const MultiIndex& idx, Cplx c) {
    if (static_cast<int>(idx.size()) != nvars_)
      throw std::invalid_argument("Polynomial: multi-index has wrong length");
    if (c == 0.0) return;
    auto it = coef_.find(idx);
    if (it == coef_.end()) {
      coef_.emplace(idx, c);
    } else {
      it->second += c;
      if (it->second == 0.0) coef_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& q) {
    for (const auto& [idx, c] : q.coef_) add_monomial(idx, c);
    return *this;
  }

  Polynomial operator+(const Polynomial& q) const {
    Polynomial r = *this;
    r += q;
    return r;
  }

  Polynomial scaled(Cplx s) const {
    Polynomial r(nvars_);
    if (s == 0.0) return r;
    for (const auto& [idx, c] : coef_) r.coef_.emplace(idx, s * c);
    return r;
  }

  Polynomial operator*(const Polynomial& q) const {
    Polynomial r(nvars_);
    for (const auto& [ia, ca] : coef_)
      for (const auto& [ib, cb] : q.coef_) {
        MultiIndex idx(nvars_);
        for (int i = 0; i < nvars_; ++i) idx[i] = ia[i] + ib[i];
        r.add_monomial(idx, ca * cb);
      }
    return r;
  }

  Polynomial pow(int e) const {
    Polynomial r = constant(nvars_, 1.0);
    for (int i = 0; i < e; ++i) r = r * (*this);
    return r;
  }

  // d/dv_i
  Polynomial partial(int i) const {
    Polynomial r(nvars_);
    for (const auto& [idx, c] : coef_) {
      if (idx[i] == 0) continue;
      MultiIndex j = idx;
      j[i] -= 1;
      r.add_monomial(j, c * static_cast<double>(idx[i]));
    }
    return r;
  }

  Cplx eval(const Vec& v) const {
    Cplx s = 0.0;
    for (const auto& [idx, c] : coef_) {
      Cplx m = c;
      for (int i = 0; i < nvars_; ++i)
        for (int e = 0; e < idx[i]; ++e) m *= v[i];
      s += m;
    }
    return s;
  }

  // p(M v + b)
  Polynomial compose_affine(const Mat& M, const Vec& b) const {
    std::vector<Polynomial> lin;
    lin.reserve(nvars_);
    for (int i = 0; i < nvars_; ++i) lin.push_back(linear(M.row(i).transpose(), b[i]));
    Polynomial r(nvars_);
    for (const auto& [idx, c] : coef_) {
      Polynomial m = constant(nvars_, c);
      for (int i = 0; i < nvars_; ++i)
        for (int e = 0; e < idx[i]; ++e) m = m * lin[i];
      r += m;
    }
    return r;
  }

  int degree() const {
    int d = 0;
    for (const auto& [idx, c] : coef_) {
      int t = 0;
      for (int e : idx) t += e;
      d = std::max(d, t);
    }
    return d;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [idx, c] : coef_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  int nvars_;
  std::map<MultiIndex, Cplx> coef_;
};

// Tolerance-aware lexicographic order on complex covectors.  Exponents arising
// here are orthogonal images of a handful of base covectors, so keys closer
// than the tolerance are genuinely equal and get merged.
struct ExponentLess {
  double tol = 1e-10;

  bool operator()(const CVec& a, const CVec& b) const {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i].real() < b[i].real() - tol) return true;
      if (a[i].real() > b[i].real() + tol) return false;
      if (a[i].imag() < b[i].imag() - tol) return true;
      if (a[i].imag() > b[i].imag() + tol) return false;
    }
    return false;
  }
};

// Finite sum  f(v) = sum_mu p_mu(v) exp(mu(v))  with complex covectors mu and
// polynomial coefficients p_mu.
class ExpPolynomial {
 public:
  static constexpr double exponent_tol = 1e-10;

  explicit ExpPolynomial(int n) : n_(n), terms_(ExponentLess{exponent_tol}) {
    if (n < 1) throw std::invalid_argument("ExpPolynomial: dimension must be positive");
  }

  static ExpPolynomial zero(int n) { return ExpPolynomial(n); }

  static ExpPolynomial constant(int n, Cplx c) {
    ExpPolynomial f(n);
    f.add_term(CVec::Zero(n), Polynomial::constant(n, c));
    return f;
  }

  static ExpPolynomial exponential(const CVec& mu, Cplx c = 1.0) {
    ExpPolynomial f(static_cast<int>(mu.size()));
    f.add_term(mu, Polynomial::constant(f.n_, c));
    return f;
  }

  int dim() const { return n_; }
  std::size_t num_terms() const { return terms_.size(); }
  const std::map<CVec, Polynomial, ExponentLess>& terms() const { return terms_; }

  void add_term(const CVec& mu, const Polynomial& p) {
    if (static_cast<int>(mu.size()) != n_ || p.nvars() != n_)
      throw std::invalid_argument("ExpPolynomial: dimension mismatch");
    if (p.is_zero()) return;
    auto it = terms_.find(mu);
    if (it == terms_.end()) {
      terms_.emplace(mu, p);
    } else {
      it->second += p;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Cplx eval(const Vec& v) const {
    // Kahan-compensated sum over terms
    Cplx s = 0.0, comp = 0.0;
    for (const auto& [mu, p] : terms_) {
      Cplx x = p.eval(v) * std::exp(pairing(mu, v));
      Cplx y = x - comp;
      Cplx t = s + y;
      comp = (t - s) - y;
      s = t;
    }
    return s;
  }

  ExpPolynomial operator+(const ExpPolynomial& g) const {
    ExpPolynomial r = *this;
    for (const auto& [mu, p] : g.terms_) r.add_term(mu, p);
    return r;
  }

  ExpPolynomial operator-(const ExpPolynomial& g) const { return *this + g.scaled(-1.0); }

  ExpPolynomial scaled(Cplx s) const {
    ExpPolynomial r(n_);
    if (s == 0.0) return r;
    for (const auto& [mu, p] : terms_) r.terms_.emplace(mu, p.scaled(s));
    return r;
  }

  // d/dt f(v + t u) at t = 0:  (p e^mu) -> (du p + mu(u) p) e^mu
  ExpPolynomial directional_derivative(const Vec& u) const {
    ExpPolynomial r(n_);
    for (const auto& [mu, p] : terms_) {
      Polynomial q = p.scaled(pairing(mu, u));
      for (int i = 0; i < n_; ++i)
        if (u[i] != 0.0) q += p.partial(i).scaled(u[i]);
      r.add_term(mu, q);
    }
    return r;
  }

  ExpPolynomial laplacian() const {
    ExpPolynomial r(n_);
    for (const auto& [mu, p] : terms_) {
      Polynomial q(n_);
      for (int i = 0; i < n_; ++i) {
        Polynomial pi = p.partial(i);
        q += pi.partial(i);
        q += pi.scaled(2.0 * mu[i]);
        q += p.scaled(mu[i] * mu[i]);
      }
      r.add_term(mu, q);
    }
    return r;
  }

  // (pullback g)(v) = f(M v + b); exponent mu becomes M^T mu with the constant
  // exp(mu(b)) absorbed into the coefficient.
  ExpPolynomial pullback(const AffineMap& g) const {
    ExpPolynomial r(n_);
    for (const auto& [mu, p] : terms_) {
      CVec nu = apply_real(g.M.transpose(), mu);
      Cplx s = std::exp(pairing(mu, g.b));
      r.add_term(nu, p.compose_affine(g.M, g.b).scaled(s));
    }
    return r;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [mu, p] : terms_) m = std::max(m, p.max_abs_coeff());
    return m;
  }

 private:
  int n_;
  std::map<CVec, Polynomial, ExponentLess> terms_;
};

// Largest coefficient difference after matching terms up to exponent
// canonicalization; the metric behind every symbolic identity check.
inline double max_coeff_distance(const ExpPolynomial& f, const ExpPolynomial& g) {
  double dist = 0.0;
  auto poly_dist = [](const Polynomial& a, const Polynomial& b) {
    double d = 0.0;
    for (const auto& [idx, c] : a.coefficients()) {
      auto it = b.coefficients().find(idx);
      Cplx cb = (it == b.coefficients().end()) ? Cplx(0.0) : it->second;
      d = std::max(d, std::abs(c - cb));
    }
    for (const auto& [idx, c] : b.coefficients())
      if (a.coefficients().find(idx) == a.coefficients().end())
        d = std::max(d, std::abs(c));
    return d;
  };
  const Polynomial zero(f.dim());
  for (const auto& [mu, p] : f.terms()) {
    auto it = g.terms().find(mu);
    dist = std::max(dist, poly_dist(p, it == g.terms().end() ? zero : it->second));
  }
  for (const auto& [mu, p] : g.terms())
    if (f.terms().find(mu) == f.terms().end())
      dist = std::max(dist, poly_dist(p, zero));
  return dist;
}

inline bool approx_equal(const ExpPolynomial& f, const ExpPolynomial& g, double tol) {
  return max_coeff_distance(f, g) <= tol;
}

}  // namespace alcove::exp_poly
