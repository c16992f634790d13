// Acceptance gate: nine numbered end-to-end criteria, one line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "alcove/bethe_solver.hpp"
#include "alcove/eigenfunctions.hpp"
#include "alcove/operators.hpp"
#include "alcove/root_systems.hpp"

using namespace alcove;
using exp_poly::ExpPolynomial;
using exp_poly::max_coeff_distance;
using root_systems::Multiplicity;
using root_systems::RootSystemData;
using root_systems::WeylGroup;
using root_systems::build_root_system;
using root_systems::enumerate_weyl;

namespace {

std::mt19937 rng(42);
int failures = 0;

double uni(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void report(int n, const std::string& label, bool ok, const std::string& detail) {
  std::printf("criterion %d (%s): %s (%s)\n", n, label.c_str(), ok ? "PASS" : "FAIL",
              detail.c_str());
  if (!ok) ++failures;
}

CVec biased_regular(const RootSystemData& rs) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    CVec lam(rs.rank);
    for (int i = 0; i < rs.rank; ++i) lam[i] = Cplx(uni(-2.0, 2.0), uni(-2.0, 2.0));
    if (root_systems::regularity_margin(rs, lam) > 0.3) return lam;
  }
  throw std::runtime_error("no regular covector found");
}

ExpPolynomial sample_input(const RootSystemData& rs) {
  ExpPolynomial f = ExpPolynomial::exponential(biased_regular(rs), Cplx(uni(-1, 1), uni(-1, 1)));
  exp_poly::MultiIndex idx(rs.rank, 0);
  idx[0] = 1;
  ExpPolynomial g(rs.rank);
  g.add_term(biased_regular(rs),
             exp_poly::Polynomial::monomial(rs.rank, idx, Cplx(uni(-1, 1), uni(-1, 1))));
  return f + g;
}

struct Instance {
  char type;
  int rank;
  RootSystemData rs;
  WeylGroup wg;
  Multiplicity k{1.0};
  bethe_solver::BetheSolution sol;
};

}  // namespace

int main() {
  std::vector<Instance> instances;

  // 1: rank-one solver against scalar bisection
  try {
    RootSystemData rs = build_root_system('A', 1);
    WeylGroup wg = enumerate_weyl(rs);
    double lo = 0.1, hi = 2.0 * bethe_solver::two_pi;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      double f = mid + 4.0 * std::atan(mid / 2.0) - bethe_solver::two_pi;
      (f > 0.0 ? hi : lo) = mid;
    }
    double t_star = 0.5 * (lo + hi);
    bethe_solver::solve(rs, wg, Multiplicity(2.0), {1});  // warm
    auto t0 = std::chrono::steady_clock::now();
    bethe_solver::BetheSolution sol = bethe_solver::solve(rs, wg, Multiplicity(2.0), {1});
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    double dev = std::abs(sol.mu_hat.dot(rs.coroots[0]) - t_star);
    char d[128];
    std::snprintf(d, sizeof(d), "dev=%.2e tol=1e-10, %.3f ms < 1 ms", dev, ms);
    report(1, "rank-one bisection oracle", dev < 1e-10 && ms < 1.0, d);
  } catch (const std::exception& e) {
    report(1, "rank-one bisection oracle", false, e.what());
  }

  // 2: exponential-form residual across ten types
  try {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (auto [type, rank] : {std::pair{'A', 1}, {'A', 2}, {'A', 3}, {'A', 4}, {'B', 2},
                              {'B', 3}, {'C', 3}, {'D', 4}, {'G', 2}, {'F', 4}}) {
      Instance inst;
      inst.type = type;
      inst.rank = rank;
      inst.rs = build_root_system(type, rank);
      inst.wg = enumerate_weyl(inst.rs);
      inst.k = Multiplicity(uni(0.1, 10.0), uni(0.1, 10.0));
      std::vector<int> mu(rank);
      for (int& c : mu) c = std::uniform_int_distribution<int>(1, 3)(rng);
      inst.sol = bethe_solver::solve(inst.rs, inst.wg, inst.k, mu);
      worst = std::max(worst, inst.sol.bae_residual);
      instances.push_back(std::move(inst));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char d[128];
    std::snprintf(d, sizeof(d), "max residual=%.2e tol=1e-9 over 10 types, %.1f s < 60 s", worst, secs);
    report(2, "exponential-form residuals", worst < 1e-9 && secs < 60.0, d);
  } catch (const std::exception& e) {
    report(2, "exponential-form residuals", false, e.what());
  }

  // 3: moment-gap bounds and the dominant envelope of sigma
  try {
    double worst_slack = std::numeric_limits<double>::infinity();
    double sigma_violation = 0.0;
    for (const Instance& inst : instances) {
      if (!inst.sol.gaps.checked) throw std::runtime_error("gap certificate missing");
      worst_slack = std::min(worst_slack, inst.sol.gaps.min_slack);
      double ratio = bethe_solver::coxeter_scale(inst.rs, inst.k) / inst.rs.rank;
      for (int t = 0; t < 100; ++t) {
        Vec lam = Vec::Zero(inst.rank);
        for (int i = 0; i < inst.rank; ++i)
          lam += uni(0.0, 4.0) * inst.rs.fundamental_weights[i];
        Vec s = bethe_solver::sigma(inst.rs, inst.k, lam);
        for (int i : inst.rs.positive) {
          double sp = s.dot(inst.rs.coroots[i]);
          double cap = ratio * lam.dot(inst.rs.coroots[i]);
          sigma_violation = std::max({sigma_violation, -sp, sp - cap});
        }
      }
    }
    char d[160];
    std::snprintf(d, sizeof(d), "min gap slack=%.2e (>=0), sigma envelope violation=%.2e tol=1e-9",
                  worst_slack, sigma_violation);
    report(3, "moment gaps and sigma envelope", worst_slack >= 0.0 && sigma_violation < 1e-9, d);
  } catch (const std::exception& e) {
    report(3, "moment gaps and sigma envelope", false, e.what());
  }

  // 4: equivariance over full Weyl orbits
  try {
    double worst = 0.0;
    for (auto [type, rank, mu] :
         {std::tuple<char, int, std::vector<int>>{'A', 2, {2, 1}}, {'B', 2, {1, 2}}}) {
      RootSystemData rs = build_root_system(type, rank);
      WeylGroup wg = enumerate_weyl(rs);
      worst = std::max(worst,
                       bethe_solver::equivariance_check(rs, wg, Multiplicity(1.3), mu).max_deviation);
    }
    char d[96];
    std::snprintf(d, sizeof(d), "max orbit deviation=%.2e tol=1e-9", worst);
    report(4, "Weyl orbit equivariance", worst < 1e-9, d);
  } catch (const std::exception& e) {
    report(4, "Weyl orbit equivariance", false, e.what());
  }

  // 5: large-coupling envelope
  try {
    bool ok = true;
    double worst_margin = 0.0;
    for (auto [type, rank, mu] :
         {std::tuple<char, int, std::vector<int>>{'A', 1, {1}}, {'A', 2, {1, 1}}}) {
      RootSystemData rs = build_root_system(type, rank);
      WeylGroup wg = enumerate_weyl(rs);
      auto table = bethe_solver::impenetrable_limit_study(rs, wg, mu, {1e6});
      ok = ok && table[0].deviation <= table[0].envelope;
      worst_margin = std::max(worst_margin, table[0].deviation / table[0].envelope);
    }
    char d[128];
    std::snprintf(d, sizeof(d), "k=1e6, worst deviation/envelope=%.3f (<=1)", worst_margin);
    report(5, "impenetrable-limit envelope", ok, d);
  } catch (const std::exception& e) {
    report(5, "impenetrable-limit envelope", false, e.what());
  }

  // 6: operator algebra suite
  try {
    RootSystemData rs = build_root_system('B', 2);
    WeylGroup wg = enumerate_weyl(rs);
    Multiplicity k(1.7, 0.6);
    ExpPolynomial f = sample_input(rs);
    double scale = 1.0 + f.max_abs_coeff();

    double dev_sq = 0.0;
    for (int j = 0; j <= rs.rank; ++j) {
      root_systems::AffineRoot a = root_systems::simple_affine(rs, j);
      dev_sq = std::max(dev_sq,
                        operators::integral_op(rs, a, operators::integral_op(rs, a, f)).max_abs_coeff() / scale);
    }

    double dev_braid = 0.0;
    for (auto [bt, br] : {std::pair{'A', 2}, {'B', 2}, {'G', 2}}) {
      RootSystemData brs = build_root_system(bt, br);
      Multiplicity bk(1.2, 0.8);
      ExpPolynomial bf = sample_input(brs);
      for (int j1 = 0; j1 <= brs.rank; ++j1)
        for (int j2 = j1 + 1; j2 <= brs.rank; ++j2) {
          int m = operators::braid_order(brs, j1, j2);
          if (m == 0) continue;
          std::vector<int> w1, w2;
          for (int t = 0; t < m; ++t) {
            w1.push_back(t % 2 == 0 ? j1 : j2);
            w2.push_back(t % 2 == 0 ? j2 : j1);
          }
          dev_braid = std::max(dev_braid,
                               max_coeff_distance(operators::q_word(brs, w1, bk, bf),
                                                  operators::q_word(brs, w2, bk, bf)));
        }
    }

    double dev_wall = 0.0;
    for (int j = 0; j <= rs.rank; ++j) {
      root_systems::AffineRoot a = root_systems::simple_affine(rs, j);
      ExpPolynomial qf = operators::q_reflect(rs, a, k, f);
      const Vec& grad = rs.roots[a.base];
      for (int t = 0; t < 10; ++t) {
        Vec v(rs.rank);
        for (int i = 0; i < rs.rank; ++i) v[i] = uni(-1.0, 1.0);
        v -= (root_systems::affine_value(rs, a, v) / grad.squaredNorm()) * grad;
        dev_wall = std::max(dev_wall, std::abs(qf.eval(v) - f.eval(v)) / scale);
      }
    }

    std::vector<Vec> pts = operators::sample_regular_points(rs, 20, 1.2, 42);
    Vec u1(rs.rank), u2(rs.rank);
    for (int i = 0; i < rs.rank; ++i) {
      u1[i] = uni(-1.0, 1.0);
      u2[i] = uni(-1.0, 1.0);
    }
    double dev_cross = 0.0;
    for (int j = 0; j <= rs.rank; ++j)
      dev_cross = std::max(dev_cross,
                           operators::check_cross_relation(rs, k, j, u1, f, pts).max_deviation);
    double dev_comm = operators::check_commutator(rs, k, u1, u2, f, pts).max_deviation;

    operators::PiecewiseEval pf = operators::propagate(rs, k, f);
    operators::PiecewiseEval pdf = operators::propagate(rs, k, f.directional_derivative(u1));
    double dev_tw = 0.0;
    for (const Vec& v : pts)
      dev_tw = std::max(dev_tw, std::abs(operators::dunkl_eval(pf, u1, v) - pdf.eval(v)) / scale);

    CVec mu = biased_regular(rs);
    Cplx z = pairing(mu, rs.coroots[rs.highest]);
    Mat sphi = root_systems::affine_reflection(rs, {rs.highest, 0}).M;
    ExpPolynomial jk = operators::intertwiner(rs, k, ExpPolynomial::exponential(mu, 1.0));
    ExpPolynomial jk_closed = ExpPolynomial::exponential(
        CVec(sphi.transpose().cast<Cplx>() * mu), -(z + k.k_highest(rs)) * std::exp(z));
    double dev_jk = max_coeff_distance(jk, jk_closed);

    bool ok = dev_sq < 1e-12 && dev_braid < 1e-10 && dev_wall < 1e-10 && dev_cross < 1e-8 &&
              dev_comm < 1e-8 && dev_tw < 1e-8 && dev_jk < 1e-10;
    char d[256];
    std::snprintf(d, sizeof(d),
                  "I^2=%.1e braid=%.1e wall=%.1e cross=%.1e comm=%.1e intertwine=%.1e J=%.1e",
                  dev_sq, dev_braid, dev_wall, dev_cross, dev_comm, dev_tw, dev_jk);
    report(6, "operator algebra suite", ok, d);
  } catch (const std::exception& e) {
    report(6, "operator algebra suite", false, e.what());
  }

  // 7: spectral detector at and off the solution
  try {
    RootSystemData rs = build_root_system('A', 2);
    WeylGroup wg = enumerate_weyl(rs);
    Multiplicity k(1.1);
    bethe_solver::BetheSolution sol = bethe_solver::solve(rs, wg, k, {1, 2});
    ExpPolynomial psi = eigenfunctions::psi_bethe(rs, wg, k, sol.lambda());
    double on = max_coeff_distance(operators::q_word(rs, {0}, k, psi), psi);
    CVec off_lam = sol.lambda() + Cplx(0.0, 0.1) * rs.rho.cast<Cplx>();
    ExpPolynomial psi_off = eigenfunctions::psi_bethe(rs, wg, k, off_lam);
    double off = max_coeff_distance(operators::q_word(rs, {0}, k, psi_off), psi_off);
    char d[128];
    std::snprintf(d, sizeof(d), "on-shell=%.2e tol=1e-8, perturbed=%.2e > 1e-3", on, off);
    report(7, "BAE detector", on < 1e-8 && off > 1e-3, d);
  } catch (const std::exception& e) {
    report(7, "BAE detector", false, e.what());
  }

  // 8: eigen-equation convergence order, wall jumps, impenetrable zeros
  try {
    RootSystemData rs = build_root_system('A', 2);
    WeylGroup wg = enumerate_weyl(rs);
    Multiplicity k(1.4);
    bethe_solver::BetheSolution sol = bethe_solver::solve(rs, wg, k, {2, 1});
    ExpPolynomial psi = eigenfunctions::psi_bethe(rs, wg, k, sol.lambda());

    std::vector<Vec> grid = operators::sample_regular_points(rs, 5, 0.8, 42, 2e-2);
    double coarse = eigenfunctions::verify_eigen(rs, psi, sol.energy, grid, 1e-3).max_rel_dev;
    double fine = eigenfunctions::verify_eigen(rs, psi, sol.energy, grid, 5e-4).max_rel_dev;
    double order = std::log2(coarse / fine);

    RootSystemData rb = build_root_system('B', 2);
    WeylGroup wgb = enumerate_weyl(rb);
    Multiplicity kb(1.6, 0.5);
    bethe_solver::BetheSolution solb = bethe_solver::solve(rb, wgb, kb, {1, 1});
    ExpPolynomial psib = eigenfunctions::psi_bethe(rb, wgb, kb, solb.lambda());
    eigenfunctions::JumpReport jumps =
        eigenfunctions::verify_jumps(rb, kb, psib, eigenfunctions::sample_wall_points(rb, 10, 42));
    double first = 0.0;
    for (const auto& row : jumps.rows)
      if (row.order == 1)
        first = std::max(first, std::abs(row.jump - row.expected) /
                                    std::max(std::abs(row.expected), 1e-3 * (row.deriv_scale + 1.0)));

    constexpr double tp = bethe_solver::two_pi;
    Vec mu_imp = root_systems::weight_covector(rs, {1, 1});
    ExpPolynomial psi_inf =
        eigenfunctions::psi_impenetrable(rs, wg, Cplx(0.0, tp) * mu_imp.cast<Cplx>());
    double wall_val = 0.0;
    for (const auto& [wall, v] : eigenfunctions::sample_wall_points(rs, 10, 7)) {
      (void)wall;
      wall_val = std::max(wall_val, std::abs(psi_inf.eval(v)));
    }

    bool ok = order >= 1.8 && first < 1e-3 && jumps.max_even_rel < 1e-5 && wall_val < 1e-10;
    char d[192];
    std::snprintf(d, sizeof(d),
                  "FD order=%.2f (>=1.8), first-order jump rel=%.1e tol=1e-3, even rel=%.1e, "
                  "impenetrable wall max=%.1e tol=1e-10",
                  order, first, jumps.max_even_rel, wall_val);
    report(8, "eigen equation and jumps", ok, d);
  } catch (const std::exception& e) {
    report(8, "eigen equation and jumps", false, e.what());
  }

  // 9: Pauli exclusion of the singular weight
  try {
    RootSystemData rs = build_root_system('A', 2);
    WeylGroup wg = enumerate_weyl(rs);
    Multiplicity k(1.0);
    bethe_solver::BetheSolution sol = bethe_solver::solve(rs, wg, k, {1, 0});
    bethe_solver::PauliCertificate cert = bethe_solver::pauli_certificate(rs, k, sol.lambda());
    bool ok = !sol.regularity.regular && cert.excluded() && cert.hessian_match < 1e-10 &&
              cert.min_eigenvalue > 0.0;
    char d[160];
    std::snprintf(d, sizeof(d), "excluded=%d, Hessian match=%.2e tol=1e-10, min eig=%.3f > 0",
                  cert.excluded() ? 1 : 0, cert.hessian_match, cert.min_eigenvalue);
    report(9, "Pauli certification", ok, d);
  } catch (const std::exception& e) {
    report(9, "Pauli certification", false, e.what());
  }

  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
