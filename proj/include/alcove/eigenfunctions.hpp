#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "alcove/operators.hpp"

namespace alcove::eigenfunctions {

using exp_poly::ExpPolynomial;
using root_systems::AffineRoot;
using root_systems::Multiplicity;
using root_systems::RootSystemData;
using root_systems::WeylGroup;

struct CFunctionValue {
  Cplx value{0.0, 0.0};
  bool pole_flag = false;
};

inline CFunctionValue c_tilde(const RootSystemData& rs, const Multiplicity& k,
                              const CVec& lambda) {
  CFunctionValue out;
  out.value = 1.0;
  for (int i : rs.positive) {
    Cplx z = pairing(lambda, rs.coroots[i]);
    if (std::abs(z) < 1e-12) out.pole_flag = true;
    out.value *= (z + k.of_root(rs, i)) / z;
  }
  return out;
}

// regularized form: factors with a vanishing pairing are dropped
inline CFunctionValue c_reg(const RootSystemData& rs, const Multiplicity& k, const CVec& lambda) {
  CFunctionValue out;
  out.value = 1.0;
  for (int i : rs.positive) {
    Cplx z = pairing(lambda, rs.coroots[i]);
    if (std::abs(z) < 1e-12) {
      out.pole_flag = true;
      continue;
    }
    out.value *= (z + k.of_root(rs, i)) / z;
  }
  return out;
}

inline ExpPolynomial psi_bethe(const RootSystemData& rs, const WeylGroup& wg,
                               const Multiplicity& k, const CVec& lambda) {
  if (!root_systems::is_regular(rs, lambda))
    throw std::invalid_argument("plane-wave expansion needs a regular spectral covector");
  ExpPolynomial psi(rs.rank);
  double cmax = 0.0;
  for (int w = 0; w < wg.size(); ++w) {
    CVec lw = wg.act(w, lambda);
    Cplx coeff = c_tilde(rs, k, lw).value / static_cast<double>(wg.size());
    cmax = std::max(cmax, std::abs(coeff));
    psi = psi + ExpPolynomial::exponential(lw, coeff);
  }
  Cplx at0 = psi.eval(Vec::Zero(rs.rank));
  if (std::abs(at0 - 1.0) > 1e-12 * (1.0 + cmax) * wg.size())
    throw std::runtime_error("normalization identity failed at the origin");
  return psi;
}

// same function assembled through the integral-reflection representation
inline ExpPolynomial psi_via_q(const RootSystemData& rs, const WeylGroup& wg,
                               const Multiplicity& k, const CVec& lambda) {
  ExpPolynomial acc(rs.rank);
  ExpPolynomial seed = ExpPolynomial::exponential(lambda, 1.0);
  for (int w = 0; w < wg.size(); ++w)
    acc = acc + operators::q_word(rs, wg.reduced_word[w], k, seed);
  return acc.scaled(1.0 / static_cast<double>(wg.size()));
}

inline ExpPolynomial psi_impenetrable(const RootSystemData& rs, const WeylGroup& wg,
                                      const CVec& lambda) {
  if (!root_systems::is_regular(rs, lambda))
    throw std::invalid_argument("antisymmetrization needs a regular spectral covector");
  constexpr double tp = 2.0 * 3.14159265358979323846;
  CVec mu = lambda / Cplx(0.0, tp);
  if (mu.imag().lpNorm<Eigen::Infinity>() > 1e-9)
    throw std::invalid_argument("spectral covector must lie in 2 pi i times the weight lattice");
  root_systems::weight_coeffs(rs, Vec(mu.real()));  // throws when not a weight

  Cplx norm = 1.0 / static_cast<double>(wg.size());
  for (int i = 0; i < rs.num_roots(); ++i) norm /= pairing(lambda, rs.coroots[i]);
  ExpPolynomial psi(rs.rank);
  for (int w = 0; w < wg.size(); ++w) {
    double sign = wg.length[w] % 2 == 0 ? 1.0 : -1.0;
    psi = psi + ExpPolynomial::exponential(wg.act(w, lambda), sign * norm);
  }
  return psi;
}

// W-invariant extension: fold to the closed fundamental alcove, evaluate there
inline Cplx phi_eval(const RootSystemData& rs, const ExpPolynomial& psi, const Vec& v) {
  return psi.eval(root_systems::fold_to_alcove(rs, v).image);
}

// Euclidean distance to the nearest affine wall
inline double wall_distance(const RootSystemData& rs, const Vec& v) {
  double d = std::numeric_limits<double>::infinity();
  for (int i : rs.positive) {
    double x = rs.roots[i].dot(v);
    d = std::min(d, std::abs(x - std::round(x)) / rs.roots[i].norm());
  }
  return d;
}

struct EigenReport {
  double max_rel_dev = 0.0;
  int samples = 0;
  double h = 0.0;
};

inline EigenReport verify_eigen(const RootSystemData& rs, const ExpPolynomial& psi,
                                double energy, const std::vector<Vec>& grid, double h = 1e-4) {
  EigenReport rep;
  rep.h = h;
  for (const Vec& v : grid) {
    if (wall_distance(rs, v) <= 2.0 * h)
      throw std::invalid_argument("grid point too close to a wall for the FD stencil");
    Cplx centre = phi_eval(rs, psi, v);
    Cplx lap = 0.0;
    for (int i = 0; i < rs.rank; ++i) {
      Vec e = Vec::Zero(rs.rank);
      e[i] = h;
      lap += phi_eval(rs, psi, v + e) - 2.0 * centre + phi_eval(rs, psi, v - e);
    }
    lap /= h * h;
    double dev = std::abs(lap + energy * centre) / (energy * std::abs(centre) + 1.0);
    rep.max_rel_dev = std::max(rep.max_rel_dev, dev);
    ++rep.samples;
  }
  return rep;
}

namespace detail {

// derivatives at 0+ from a one-sided degree-4 interpolant through five points
// t_i = side (offset + i h), scaled by h for conditioning
inline std::vector<Cplx> one_sided_derivatives(const std::function<Cplx(double)>& g, double side,
                                               double offset, double h, int r_max) {
  Eigen::MatrixXcd vand(5, 5);
  Eigen::VectorXcd vals(5);
  for (int i = 0; i < 5; ++i) {
    double t = side * (offset + i * h);
    double u = t / h;
    double p = 1.0;
    for (int m = 0; m < 5; ++m) {
      vand(i, m) = p;
      p *= u;
    }
    vals(i) = g(t);
  }
  Eigen::VectorXcd c = vand.fullPivLu().solve(vals);
  std::vector<Cplx> ders;
  double fact = 1.0;
  for (int r = 0; r <= r_max; ++r) {
    if (r > 0) fact *= r;
    ders.push_back(fact * c(r) / std::pow(h, r));
  }
  return ders;
}

}  // namespace detail

struct JumpRow {
  AffineRoot wall;
  Vec point;
  int order = 0;
  Cplx jump{0.0, 0.0};
  Cplx expected{0.0, 0.0};
  double deriv_scale = 0.0;  // |above| + |below| at this order, for noise-aware ratios
};

// the stencil noise grows like h^{-r}, so deviations are measured against the
// one-sided derivative magnitudes rather than absolutely
struct JumpReport {
  std::vector<JumpRow> rows;
  double max_even_rel = 0.0;
  double max_odd_rel = 0.0;
};

// one-sided derivative jumps of the folded eigenfunction across sampled walls
inline JumpReport verify_jumps(const RootSystemData& rs, const Multiplicity& k,
                               const ExpPolynomial& psi,
                               const std::vector<std::pair<AffineRoot, Vec>>& samples,
                               int r_max = 3, double h = 1e-4, double offset = 1e-6) {
  JumpReport rep;
  for (const auto& [wall, v] : samples) {
    if (!root_systems::affine_positive(rs, wall))
      throw std::invalid_argument("wall must be given by its positive affine root");
    if (std::abs(root_systems::affine_value(rs, wall, v)) > 1e-9)
      throw std::invalid_argument("sample point does not lie on the stated wall");
    double guard = std::numeric_limits<double>::infinity();
    for (int i : rs.positive) {
      if (i == wall.base || i == rs.neg_of[wall.base]) continue;
      double x = rs.roots[i].dot(v);
      guard = std::min(guard, std::abs(x - std::round(x)) / rs.roots[i].norm());
    }
    if (guard <= 1e-3) throw std::invalid_argument("wall sample is not sub-regular");

    const Vec dir = rs.coroots[wall.base];
    auto g = [&](double t) { return phi_eval(rs, psi, v + t * dir); };
    std::vector<Cplx> above = detail::one_sided_derivatives(g, +1.0, offset, h, r_max);
    std::vector<Cplx> below = detail::one_sided_derivatives(g, -1.0, offset, h, r_max);

    double ka = k.of_root(rs, wall.base);
    for (int r = 1; r <= r_max; ++r) {
      JumpRow row;
      row.wall = wall;
      row.point = v;
      row.order = r;
      row.jump = above[r] - below[r];
      row.expected = r % 2 == 1 ? 2.0 * ka * above[r - 1] : Cplx(0.0, 0.0);
      row.deriv_scale = std::abs(above[r]) + std::abs(below[r]);
      rep.rows.push_back(row);
      if (r % 2 == 0) {
        rep.max_even_rel =
            std::max(rep.max_even_rel, std::abs(row.jump) / (row.deriv_scale + 1.0));
      } else {
        double scale = std::abs(row.expected) + 1e-3 * row.deriv_scale + 1e-12;
        rep.max_odd_rel = std::max(rep.max_odd_rel, std::abs(row.jump - row.expected) / scale);
      }
    }
  }
  return rep;
}

// points on interior walls, each sub-regular with clearance against every
// other wall
inline std::vector<std::pair<AffineRoot, Vec>> sample_wall_points(const RootSystemData& rs,
                                                                 int count, unsigned seed = 42,
                                                                 double margin = 1e-3) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> box(-1.5, 1.5);
  std::vector<std::pair<AffineRoot, Vec>> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 10000 * count)
      throw std::runtime_error("could not sample enough sub-regular wall points");
    Vec v(rs.rank);
    for (int i = 0; i < rs.rank; ++i) v[i] = box(gen);

    int best = -1;
    double bestd = std::numeric_limits<double>::infinity();
    for (int i : rs.positive) {
      double x = rs.roots[i].dot(v);
      double d = std::abs(x - std::round(x)) / rs.roots[i].norm();
      if (d < bestd) {
        bestd = d;
        best = i;
      }
    }
    const Vec& a = rs.roots[best];
    int m = static_cast<int>(std::round(a.dot(v)));
    Vec w = v - ((a.dot(v) - m) / a.squaredNorm()) * a;

    double guard = std::numeric_limits<double>::infinity();
    for (int i : rs.positive) {
      if (i == best) continue;
      double x = rs.roots[i].dot(w);
      guard = std::min(guard, std::abs(x - std::round(x)) / rs.roots[i].norm());
    }
    if (guard <= margin) continue;

    AffineRoot wall = m >= 1 ? AffineRoot{rs.neg_of[best], m} : AffineRoot{best, -m};
    out.emplace_back(wall, w);
  }
  return out;
}

}  // namespace alcove::eigenfunctions
