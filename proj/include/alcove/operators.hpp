#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "alcove/exp_poly.hpp"
#include "alcove/root_systems.hpp"

namespace alcove::operators {

using exp_poly::ExpPolynomial;
using exp_poly::Polynomial;
using root_systems::AffineRoot;
using root_systems::Multiplicity;
using root_systems::RootSystemData;

namespace detail {

inline Cplx cpow_int(Cplx z, int e) {
  if (e < 0) return cpow_int(1.0 / z, -e);
  Cplx r = 1.0;
  while (e-- > 0) r *= z;
  return r;
}

inline double fact(int r) {
  double f = 1.0;
  for (int i = 2; i <= r; ++i) f *= i;
  return f;
}

using TGraded = std::vector<Polynomial>;  // coefficient polynomials of t^0, t^1, ...

inline TGraded tgraded_mul(const TGraded& a, const TGraded& b, int n) {
  TGraded out(a.size() + b.size() - 1, Polynomial(n));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// p(v - t d) as a polynomial in t with coefficients in v
inline TGraded shift_expand(const Polynomial& p, const Vec& d) {
  const int n = p.nvars();
  TGraded out(1, Polynomial(n));
  for (const auto& [idx, coef] : p.coefficients()) {
    TGraded term(1, Polynomial::constant(n, coef));
    for (int var = 0; var < n; ++var) {
      int e = idx[var];
      if (e == 0) continue;
      TGraded g(e + 1, Polynomial(n));
      double binom = 1.0;
      for (int s = 0; s <= e; ++s) {
        exp_poly::MultiIndex mi(n, 0);
        mi[var] = e - s;
        g[s] = Polynomial::monomial(n, mi, binom * std::pow(-d[var], s));
        binom = binom * (e - s) / (s + 1);
      }
      term = tgraded_mul(term, g, n);
    }
    if (term.size() > out.size()) out.resize(term.size(), Polynomial(n));
    for (std::size_t r = 0; r < term.size(); ++r) out[r] += term[r];
  }
  return out;
}

}  // namespace detail

// Rank-lowering smoothing integral (I(a)f)(v) = int_0^{a(v)} f(v - t Da^vee) dt,
// computed in closed form term by term.  Exponents with |mu(Da^vee)| below the
// branch tolerance are projected onto the wall direction and integrated
// polynomially, which keeps the removable singularity harmless.
inline ExpPolynomial integral_op(const RootSystemData& rs, const AffineRoot& a,
                                 const ExpPolynomial& f, double branch_tol = 1e-8) {
  const int n = f.dim();
  const Vec& da = rs.roots[a.base];
  const Vec& d = rs.coroots[a.base];
  const double m = static_cast<double>(a.offset);
  const Polynomial X = Polynomial::linear(da, m);

  ExpPolynomial out(n);
  for (const auto& [mu, p] : f.terms()) {
    const Cplx c = pairing(mu, d);
    detail::TGraded q = detail::shift_expand(p, d);
    std::vector<Polynomial> xpow{Polynomial::constant(n, 1.0)};
    while (xpow.size() <= q.size()) xpow.push_back(xpow.back() * X);

    if (std::abs(c) > branch_tol) {
      const Cplx ic = 1.0 / c;
      Polynomial head(n);
      Polynomial tail(n);
      for (std::size_t r = 0; r < q.size(); ++r) {
        if (q[r].is_zero()) continue;
        head += q[r].scaled(detail::fact(static_cast<int>(r)) *
                            detail::cpow_int(ic, static_cast<int>(r) + 1));
        for (std::size_t s = 0; s <= r; ++s) {
          Cplx w = detail::fact(static_cast<int>(r)) / detail::fact(static_cast<int>(s)) *
                   detail::cpow_int(ic, static_cast<int>(r) + 1 - static_cast<int>(s));
          tail += (xpow[s] * q[r]).scaled(w);
        }
      }
      out.add_term(mu, head);
      CVec nu = mu - c * da.cast<Cplx>();
      out.add_term(nu, tail.scaled(-std::exp(-c * m)));
    } else {
      // project the exponent so that nu(Da^vee) vanishes exactly
      CVec nu = mu - (c / 2.0) * da.cast<Cplx>();
      Polynomial acc(n);
      for (std::size_t r = 0; r < q.size(); ++r) {
        if (q[r].is_zero()) continue;
        acc += (xpow[r + 1] * q[r]).scaled(1.0 / (static_cast<double>(r) + 1.0));
      }
      out.add_term(nu, acc);
    }
  }
  return out;
}

// Q_{k,a} f = f o s_a + k_a I(a) f
inline ExpPolynomial q_reflect(const RootSystemData& rs, const AffineRoot& a,
                               const Multiplicity& k, const ExpPolynomial& f) {
  ExpPolynomial out = f.pullback(affine_reflection(rs, a));
  double ka = k.of_root(rs, a.base);
  if (ka != 0.0) out = out + integral_op(rs, a, f).scaled(ka);
  return out;
}

// Composite over a word of simple affine indices, word.front() outermost.
inline ExpPolynomial q_word(const RootSystemData& rs, const std::vector<int>& word,
                            const Multiplicity& k, const ExpPolynomial& f) {
  ExpPolynomial g = f;
  for (std::size_t i = word.size(); i-- > 0;)
    g = q_reflect(rs, simple_affine(rs, word[i]), k, g);
  return g;
}

// Indicator of the affine roots separating v from the fundamental alcove.
inline int chi(const RootSystemData& rs, const AffineRoot& a, const Vec& v) {
  return affine_value(rs, a, v) < 0.0 ? 1 : 0;
}

// Positive affine roots made negative by s_{j_m} ... s_{j_1} (word as produced
// by fold_to_alcove).
inline std::vector<AffineRoot> inversion_set(const RootSystemData& rs,
                                             const std::vector<int>& word) {
  std::vector<AffineRoot> out;
  out.reserve(word.size());
  for (std::size_t r = 0; r < word.size(); ++r) {
    AffineRoot b = simple_affine(rs, word[r]);
    for (std::size_t t = r; t-- > 0;) b = act_simple_on_affine(rs, word[t], b);
    out.push_back(b);
  }
  return out;
}

// Piecewise-analytic function obtained by propagating alcove data across the
// wall arrangement.  Composites are cached per folding word; the cache is
// internally synchronized so concurrent evaluations are safe.
class PiecewiseEval {
 public:
  PiecewiseEval(const RootSystemData& rs, const Multiplicity& k, ExpPolynomial f)
      : rs_(&rs), k_(k), mutex_(std::make_unique<std::mutex>()) {
    cache_.emplace(std::vector<int>{}, std::move(f));
  }

  const RootSystemData& root_system() const { return *rs_; }
  const Multiplicity& multiplicity() const { return k_; }
  const ExpPolynomial& seed() const { return cache_.at({}); }

  // composite attached to a folding word, built through its prefixes
  ExpPolynomial piece(const std::vector<int>& word) const {
    std::lock_guard<std::mutex> lock(*mutex_);
    return piece_locked(word);
  }

  Cplx eval(const Vec& v) const {
    auto fr = fold_to_alcove(*rs_, v);
    std::lock_guard<std::mutex> lock(*mutex_);
    return piece_locked(fr.word).eval(fr.image);
  }

  // analytic representative valid on the alcove containing v
  ExpPolynomial local_rep(const Vec& v) const {
    auto fr = fold_to_alcove(*rs_, v);
    std::lock_guard<std::mutex> lock(*mutex_);
    return piece_locked(fr.word).pullback(fr.map);
  }

 private:
  const ExpPolynomial& piece_locked(const std::vector<int>& word) const {
    auto hit = cache_.find(word);
    if (hit != cache_.end()) return hit->second;
    std::vector<int> prefix;
    const ExpPolynomial* cur = &cache_.at(prefix);
    for (int j : word) {
      prefix.push_back(j);
      auto it = cache_.find(prefix);
      if (it == cache_.end())
        it = cache_.emplace(prefix, q_reflect(*rs_, simple_affine(*rs_, j), k_, *cur)).first;
      cur = &it->second;
    }
    return *cur;
  }

  const RootSystemData* rs_;
  Multiplicity k_;
  mutable std::map<std::vector<int>, ExpPolynomial> cache_;
  mutable std::unique_ptr<std::mutex> mutex_;
};

inline PiecewiseEval propagate(const RootSystemData& rs, const Multiplicity& k,
                               const ExpPolynomial& f) {
  return PiecewiseEval(rs, k, f);
}

inline Cplx piecewise_eval(const PiecewiseEval& P, const Vec& v) { return P.eval(v); }

// Function known through an analytic representative near each regular point.
// The wrapped closure may reference external state; keep that state alive.
struct AlcoveFn {
  int dim = 0;
  std::function<ExpPolynomial(const Vec&)> local_rep;
  Cplx eval(const Vec& v) const { return local_rep(v).eval(v); }
};

inline AlcoveFn as_alcove_fn(const ExpPolynomial& f) {
  return {f.dim(), [f](const Vec&) { return f; }};
}

inline AlcoveFn as_alcove_fn(const PiecewiseEval& P) {
  const PiecewiseEval* p = &P;
  return {P.seed().dim(), [p](const Vec& v) { return p->local_rep(v); }};
}

// F o g for an affine isometry g
inline AlcoveFn compose_reflect(AlcoveFn F, const AffineMap& g) {
  return {F.dim, [F, g](const Vec& v) { return F.local_rep(g(v)).pullback(g); }};
}

// Dunkl-type operator in alcove form: near a regular v with folding word w,
// (D_u F)(v) = (d_u F)(v) + sum over the inversion set of k_b Db(u) F(s_b v).
inline AlcoveFn dunkl(const RootSystemData& rs, const Multiplicity& k, AlcoveFn F,
                      const Vec& u, double wall_tol = 1e-9) {
  const RootSystemData* prs = &rs;
  return {F.dim, [prs, k, F, u, wall_tol](const Vec& v) {
            if (root_systems::alcove_margin(*prs, v) <= wall_tol)
              throw std::invalid_argument("Dunkl evaluation requires a regular point");
            auto fr = fold_to_alcove(*prs, v);
            ExpPolynomial rep = F.local_rep(v).directional_derivative(u);
            for (const AffineRoot& b : inversion_set(*prs, fr.word)) {
              AffineMap sb = affine_reflection(*prs, b);
              double coef = k.of_root(*prs, b.base) * prs->roots[b.base].dot(u);
              if (coef == 0.0) continue;
              rep = rep + F.local_rep(sb(v)).pullback(sb).scaled(coef);
            }
            return rep;
          }};
}

inline Cplx dunkl_eval(const PiecewiseEval& P, const Vec& u, const Vec& v,
                       double wall_tol = 1e-9) {
  return dunkl(P.root_system(), P.multiplicity(), as_alcove_fn(P), u, wall_tol).eval(v);
}

// J_k f = d_{phi^vee} (Q_{k,a_0} f) + k_phi f
inline ExpPolynomial intertwiner(const RootSystemData& rs, const Multiplicity& k,
                                 const ExpPolynomial& f) {
  ExpPolynomial q = q_reflect(rs, simple_affine(rs, 0), k, f);
  return q.directional_derivative(rs.coroots[rs.highest]) + f.scaled(k.k_highest(rs));
}

// ---------------------------------------------------------------------------
// Relation checkers.  Sampled certificates, not proofs.

struct CheckReport {
  double max_deviation = 0.0;
  int samples = 0;
  void record(double d) {
    if (d > max_deviation) max_deviation = d;
    ++samples;
  }
  bool pass(double tol) const { return samples > 0 && max_deviation < tol; }
};

inline std::vector<Vec> sample_regular_points(const RootSystemData& rs, int count,
                                              double scale, std::uint32_t seed,
                                              double margin = 1e-3) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  std::vector<Vec> pts;
  int guard = 0;
  while (static_cast<int>(pts.size()) < count) {
    if (++guard > 1000 * count)
      throw std::runtime_error("could not sample enough regular points");
    Vec v(rs.rank);
    for (int i = 0; i < rs.rank; ++i) v[i] = d(gen);
    if (root_systems::alcove_margin(rs, v) > margin) pts.push_back(v);
  }
  return pts;
}

// s_a D_u = D_{s_{Da} u} s_a + k_a Da(u), for the wall a = a_j of the
// fundamental alcove, evaluated on an analytic sample function.
inline CheckReport check_cross_relation(const RootSystemData& rs, const Multiplicity& k,
                                        int j, const Vec& u, const ExpPolynomial& f,
                                        const std::vector<Vec>& points) {
  AffineRoot a = simple_affine(rs, j);
  AffineMap sa = affine_reflection(rs, a);
  const Vec& da = rs.roots[a.base];
  Vec ru = u - da.dot(u) * rs.coroots[a.base];
  double ka = k.of_root(rs, a.base);

  AlcoveFn F = as_alcove_fn(f);
  AlcoveFn lhs = compose_reflect(dunkl(rs, k, F, u), sa);
  AlcoveFn rhs = dunkl(rs, k, compose_reflect(F, sa), ru);

  CheckReport rep;
  for (const Vec& v : points)
    rep.record(std::abs(lhs.eval(v) - rhs.eval(v) - ka * da.dot(u) * f.eval(v)));
  return rep;
}

inline CheckReport check_commutator(const RootSystemData& rs, const Multiplicity& k,
                                    const Vec& u1, const Vec& u2, const ExpPolynomial& f,
                                    const std::vector<Vec>& points) {
  AlcoveFn F = as_alcove_fn(f);
  AlcoveFn a = dunkl(rs, k, dunkl(rs, k, F, u1), u2);
  AlcoveFn b = dunkl(rs, k, dunkl(rs, k, F, u2), u1);
  CheckReport rep;
  for (const Vec& v : points) rep.record(std::abs(a.eval(v) - b.eval(v)));
  return rep;
}

// The invariant quadratic p_2 = |.|^2 acts through plain differentiation:
// the finite-difference Laplacian of the propagated function must match the
// propagation of the Laplacian of the alcove data.
inline CheckReport check_w0_invariant_descent(const RootSystemData& rs, const Multiplicity& k,
                                              const PiecewiseEval& P,
                                              const std::vector<Vec>& points,
                                              double h_base = 5e-4) {
  PiecewiseEval lap(rs, k, P.seed().laplacian());
  CheckReport rep;
  for (const Vec& v : points) {
    double wall = std::numeric_limits<double>::infinity();
    for (int i : rs.positive) {
      double x = rs.roots[i].dot(v);
      wall = std::min(wall, std::abs(x - std::round(x)) / rs.roots[i].norm());
    }
    double h = std::min(h_base, 0.5 * wall);
    if (h <= 0.0) throw std::invalid_argument("descent check requires regular points");
    Cplx fd = 0.0;
    for (int i = 0; i < rs.rank; ++i) {
      Vec step = Vec::Zero(rs.rank);
      step[i] = h;
      fd += P.eval(v + step) - 2.0 * P.eval(v) + P.eval(v - step);
    }
    fd /= h * h;
    rep.record(std::abs(fd - lap.eval(v)));
  }
  return rep;
}

// Order of s_i s_j in the affine Weyl group, from the affine Cartan pairings;
// 0 means infinite (rank-one affine diagram).
inline int braid_order(const RootSystemData& rs, int i, int j) {
  if (i == j) return 1;
  AffineRoot ai = simple_affine(rs, i);
  AffineRoot aj = simple_affine(rs, j);
  double cij = rs.roots[ai.base].dot(rs.coroots[aj.base]);
  double cji = rs.roots[aj.base].dot(rs.coroots[ai.base]);
  int prod = static_cast<int>(std::lround(cij * cji));
  switch (prod) {
    case 0: return 2;
    case 1: return 3;
    case 2: return 4;
    case 3: return 6;
    default: return 0;
  }
}

}  // namespace alcove::operators
