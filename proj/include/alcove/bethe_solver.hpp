#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "alcove/root_systems.hpp"

namespace alcove::bethe_solver {

using root_systems::Multiplicity;
using root_systems::RootSystemData;
using root_systems::WeylGroup;

inline constexpr double two_pi = 6.283185307179586476925286766559;

inline void require_positive(const Multiplicity& k) {
  if (!k.strictly_positive())
    throw std::invalid_argument("coupling must be strictly positive for the Bethe system");
}

// h_k = 2 sum over all roots of 1/k_alpha
inline double coxeter_scale(const RootSystemData& rs, const Multiplicity& k) {
  double h = 0.0;
  for (int i = 0; i < rs.num_roots(); ++i) h += 2.0 / k.of_root(rs, i);
  return h;
}

inline Vec sigma(const RootSystemData& rs, const Multiplicity& k, const Vec& xi) {
  Vec s = Vec::Zero(rs.rank);
  for (int i = 0; i < rs.num_roots(); ++i)
    s += std::atan(xi.dot(rs.coroots[i]) / k.of_root(rs, i)) * rs.roots[i];
  return s;
}

inline double master_value(const RootSystemData& rs, const Multiplicity& k, const Vec& mu_cov,
                           const Vec& xi) {
  require_positive(k);
  double s = 0.5 * xi.squaredNorm() - two_pi * mu_cov.dot(xi);
  for (int i = 0; i < rs.num_roots(); ++i) {
    double x = xi.dot(rs.coroots[i]);
    double c = k.of_root(rs, i);
    // int_0^x arctan(t/c) dt
    double arc = x * std::atan(x / c) - 0.5 * c * std::log1p(x * x / (c * c));
    s += 0.5 * rs.len2[i] * arc;
  }
  return s;
}

inline Vec master_gradient(const RootSystemData& rs, const Multiplicity& k, const Vec& mu_cov,
                           const Vec& xi) {
  require_positive(k);
  return xi + sigma(rs, k, xi) - two_pi * mu_cov;
}

inline Mat master_hessian(const RootSystemData& rs, const Multiplicity& k, const Vec& xi) {
  require_positive(k);
  Mat h = Mat::Identity(rs.rank, rs.rank);
  for (int i = 0; i < rs.num_roots(); ++i) {
    double x = xi.dot(rs.coroots[i]);
    double c = k.of_root(rs, i);
    h += (0.5 * c * rs.len2[i] / (c * c + x * x)) * (rs.coroots[i] * rs.coroots[i].transpose());
  }
  return h;
}

// max over W_0 of |lhs - rhs| of the exponential form of the equations
inline double bae_residual(const RootSystemData& rs, const WeylGroup& wg, const Multiplicity& k,
                           const CVec& lambda) {
  const Vec& phiv = rs.coroots[rs.highest];
  double kphi = k.k_highest(rs);
  std::vector<int> carriers;  // positive roots not orthogonal to phi^vee
  for (int i : rs.positive)
    if (rs.roots[i].dot(phiv) > 0.5) carriers.push_back(i);

  double worst = 0.0;
  for (int w = 0; w < wg.size(); ++w) {
    CVec lw = wg.act(w, lambda);
    Cplx zphi = pairing(lw, phiv);
    Cplx rhs = (zphi - kphi) / (zphi + kphi);
    for (int i : carriers) {
      Cplx z = pairing(lw, rs.coroots[i]);
      double ka = k.of_root(rs, i);
      rhs *= (z - ka) / (z + ka);
    }
    worst = std::max(worst, std::abs(std::exp(zphi) - rhs));
  }
  return worst;
}

struct Regularity {
  bool regular = false;
  double margin = 0.0;
  bool indeterminate = false;  // margin inside [1e-12, 1e-9]
};

inline Regularity classify_regularity(const RootSystemData& rs, const Vec& xi,
                                      double tol = 1e-9) {
  double m = std::numeric_limits<double>::infinity();
  for (int i : rs.positive) m = std::min(m, std::abs(xi.dot(rs.coroots[i])));
  return {m > tol, m, m >= 1e-12 && m <= tol};
}

struct GapRow {
  int root = -1;
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
};

struct GapReport {
  bool checked = false;
  std::vector<GapRow> rows;
  double min_slack = std::numeric_limits<double>::infinity();
  bool dominance_consistent = false;
};

inline GapReport gap_certificate(const RootSystemData& rs, const Multiplicity& k,
                                 const Vec& mu_cov, const Vec& mu_hat) {
  require_positive(k);
  if (!root_systems::is_dominant(rs, mu_cov))
    throw std::invalid_argument("gap certificate requires a dominant weight");
  double ratio = coxeter_scale(rs, k) / rs.rank;
  GapReport rep;
  rep.checked = true;
  for (int i : rs.positive) {
    GapRow row;
    row.root = i;
    double p = two_pi * mu_cov.dot(rs.coroots[i]);
    row.lower = p / (1.0 + ratio);
    row.upper = p;
    row.value = mu_hat.dot(rs.coroots[i]);
    rep.rows.push_back(row);
    rep.min_slack = std::min({rep.min_slack, row.value - row.lower, row.upper - row.value});
  }
  rep.dominance_consistent = root_systems::is_dominant(rs, mu_hat, 1e-9);
  return rep;
}

struct BetheSolution {
  std::vector<int> mu;
  Vec mu_cov;
  Vec mu_hat;
  double energy = 0.0;
  double grad_norm = 0.0;
  double bae_residual = 0.0;
  int iterations = 0;
  Regularity regularity;
  GapReport gaps;

  CVec lambda() const { return Cplx(0.0, 1.0) * mu_hat.cast<Cplx>(); }
};

// Newton minimization of the strictly convex master function, with Armijo
// backtracking.  Convexity and coercivity make this globally convergent; the
// iteration cap signals conditioning trouble, not non-existence.
inline BetheSolution solve(const RootSystemData& rs, const WeylGroup& wg, const Multiplicity& k,
                           const std::vector<int>& mu_coeffs, double tol = 1e-12,
                           int max_iter = 100) {
  require_positive(k);
  BetheSolution sol;
  sol.mu = mu_coeffs;
  sol.mu_cov = root_systems::weight_covector(rs, mu_coeffs);

  double ratio = coxeter_scale(rs, k) / rs.rank;
  Vec xi = (two_pi / (1.0 + ratio)) * sol.mu_cov;
  Vec g = master_gradient(rs, k, sol.mu_cov, xi);
  int iter = 0;
  while (g.norm() >= tol) {
    if (++iter > max_iter)
      throw std::runtime_error("Newton iteration did not reach the requested tolerance");
    Vec step = master_hessian(rs, k, xi).ldlt().solve(-g);
    double slope = g.dot(step);
    double s0 = master_value(rs, k, sol.mu_cov, xi);
    // slack at the rounding level of s0, so the full Newton step survives the
    // test once the decrease is smaller than what doubles can resolve
    double slack = 1e-14 * (1.0 + std::abs(s0));
    double t = 1.0;
    int backtracks = 0;
    while (master_value(rs, k, sol.mu_cov, xi + t * step) > s0 + 1e-4 * t * slope + slack) {
      t *= 0.5;
      if (++backtracks > 100) throw std::runtime_error("line search failed");
    }
    xi += t * step;
    g = master_gradient(rs, k, sol.mu_cov, xi);
  }

  sol.mu_hat = xi;
  sol.energy = xi.squaredNorm();
  sol.grad_norm = g.norm();
  sol.iterations = iter;
  sol.bae_residual = bae_residual(rs, wg, k, sol.lambda());
  sol.regularity = classify_regularity(rs, xi);
  if (root_systems::is_dominant(rs, sol.mu_cov)) sol.gaps = gap_certificate(rs, k, sol.mu_cov, xi);
  return sol;
}

struct PauliCertificate {
  bool regular = false;
  double margin = 0.0;
  bool indeterminate = false;
  Mat K;
  double min_eigenvalue = 0.0;
  double hessian_match = 0.0;  // deviation from the master Hessian route
  bool excluded() const { return !regular; }
};

// Exclusion map at a purely imaginary spectral point lambda = i xi.
inline PauliCertificate pauli_certificate(const RootSystemData& rs, const Multiplicity& k,
                                          const CVec& lambda) {
  require_positive(k);
  if (lambda.real().lpNorm<Eigen::Infinity>() > 1e-10)
    throw std::invalid_argument("exclusion certificate requires a purely imaginary covector");
  Vec xi = lambda.imag();

  Mat K = Mat::Identity(rs.rank, rs.rank);
  for (int i = 0; i < rs.num_roots(); ++i) {
    double c = k.of_root(rs, i);
    double x = xi.dot(rs.coroots[i]);
    // k^2 - lambda(alpha^vee)^2 = k^2 + x^2 for imaginary lambda
    K += (c / (c * c + x * x)) * (rs.coroots[i] * rs.roots[i].transpose());
  }

  PauliCertificate cert;
  Regularity reg = classify_regularity(rs, xi);
  cert.regular = reg.regular;
  cert.margin = reg.margin;
  cert.indeterminate = reg.indeterminate;
  cert.K = K;
  cert.hessian_match = (K - master_hessian(rs, k, xi)).lpNorm<Eigen::Infinity>();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (K + K.transpose()));
  cert.min_eigenvalue = es.eigenvalues().minCoeff();
  return cert;
}

struct LimitRow {
  double k = 0.0;
  double deviation = 0.0;      // | mu_hat - 2 pi mu |
  double max_pair_gap = 0.0;   // max over positive roots of 2 pi mu(b^vee) - mu_hat(b^vee)
  double envelope = 0.0;       // bound on the pairing gap from the moment inequalities
};

inline std::vector<LimitRow> impenetrable_limit_study(const RootSystemData& rs,
                                                      const WeylGroup& wg,
                                                      const std::vector<int>& mu_coeffs,
                                                      const std::vector<double>& k_values) {
  Vec mu_cov = root_systems::weight_covector(rs, mu_coeffs);
  if (!root_systems::is_dominant(rs, mu_cov))
    throw std::invalid_argument("limit study requires a dominant weight");
  std::vector<LimitRow> table;
  for (double kv : k_values) {
    Multiplicity k(kv);
    BetheSolution sol = solve(rs, wg, k, mu_coeffs);
    LimitRow row;
    row.k = kv;
    row.deviation = (sol.mu_hat - two_pi * mu_cov).norm();
    double ratio = coxeter_scale(rs, k) / rs.rank;
    for (int i : rs.positive) {
      double p = mu_cov.dot(rs.coroots[i]);
      row.max_pair_gap =
          std::max(row.max_pair_gap, two_pi * p - sol.mu_hat.dot(rs.coroots[i]));
      row.envelope = std::max(row.envelope, two_pi * p * ratio / (1.0 + ratio));
    }
    table.push_back(row);
  }
  return table;
}

struct EquivarianceReport {
  double max_deviation = 0.0;
  int samples = 0;
};

inline EquivarianceReport equivariance_check(const RootSystemData& rs, const WeylGroup& wg,
                                             const Multiplicity& k,
                                             const std::vector<int>& mu_coeffs) {
  BetheSolution base = solve(rs, wg, k, mu_coeffs);
  EquivarianceReport rep;
  for (int w = 0; w < wg.size(); ++w) {
    Vec wmu = wg.act(w, base.mu_cov);
    BetheSolution moved = solve(rs, wg, k, root_systems::weight_coeffs(rs, wmu));
    double dev = (moved.mu_hat - wg.act(w, base.mu_hat)).norm();
    rep.max_deviation = std::max(rep.max_deviation, dev);
    ++rep.samples;
  }
  return rep;
}

}  // namespace alcove::bethe_solver
