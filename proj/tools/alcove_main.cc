#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "alcove/bethe_solver.hpp"
#include "alcove/eigenfunctions.hpp"
#include "alcove/operators.hpp"
#include "alcove/root_systems.hpp"

using json = nlohmann::ordered_json;
using namespace alcove;
using root_systems::Multiplicity;
using root_systems::RootSystemData;
using root_systems::WeylGroup;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitExcluded = 2;

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;
};

struct Job {
  char type = 'A';
  int rank = 1;
  double k_long = 1.0;
  double k_short = 1.0;
  std::vector<int> weight;
  double tol = 1e-12;
  int max_iter = 100;
  unsigned seed = 42;
  std::vector<GridAxis> grid;
  std::vector<double> sweep_k;
  bool sweep_k_given = false;
  std::vector<std::vector<int>> sweep_weights;
  bool sweep_weights_given = false;
  bool perturb_lambda = false;
};

int require_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw std::invalid_argument(what + " must be an integer");
  return v.get<int>();
}

Job load_job(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json cfg = json::parse(in);

  Job job;
  if (!cfg.contains("system")) throw std::invalid_argument("config needs a system block");
  std::string type = cfg["system"].value("type", "");
  if (type.size() != 1) throw std::invalid_argument("system.type must be a single letter");
  job.type = type[0];
  job.rank = require_int(cfg["system"].at("rank"), "system.rank");

  if (cfg.contains("multiplicity")) {
    job.k_long = cfg["multiplicity"].value("long", 1.0);
    job.k_short = cfg["multiplicity"].value("short", job.k_long);
  }
  if (job.k_long <= 0.0 || job.k_short <= 0.0)
    throw std::invalid_argument("multiplicities must be strictly positive");

  if (cfg.contains("weight")) {
    for (const json& c : cfg["weight"]) job.weight.push_back(require_int(c, "weight entry"));
  } else {
    job.weight.assign(job.rank, 1);
  }

  if (cfg.contains("solve")) {
    job.tol = cfg["solve"].value("tol", job.tol);
    job.max_iter = cfg["solve"].value("max_iter", job.max_iter);
  }
  if (cfg.contains("grid")) {
    for (const json& ax : cfg["grid"].at("axes")) {
      if (!ax.is_array() || ax.size() != 3) throw std::invalid_argument("grid axis must be [lo, hi, n]");
      GridAxis g{ax[0].get<double>(), ax[1].get<double>(), require_int(ax[2], "grid count")};
      if (g.n < 1) throw std::invalid_argument("grid count must be at least 1");
      job.grid.push_back(g);
    }
  }
  if (cfg.contains("sweep")) {
    const json& sw = cfg["sweep"];
    if (sw.contains("k_values")) {
      job.sweep_k_given = true;
      for (const json& v : sw["k_values"]) job.sweep_k.push_back(v.get<double>());
    }
    if (sw.contains("weights")) {
      job.sweep_weights_given = true;
      for (const json& wrow : sw["weights"]) {
        std::vector<int> w;
        for (const json& c : wrow) w.push_back(require_int(c, "sweep weight entry"));
        job.sweep_weights.push_back(std::move(w));
      }
    }
  }
  if (cfg.contains("verify")) {
    job.seed = cfg["verify"].value("seed", 42);
    job.perturb_lambda = cfg["verify"].value("perturb_lambda", false);
  }
  return job;
}

std::vector<GridAxis> parse_grid_flag(const std::string& spec) {
  std::vector<GridAxis> axes;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    GridAxis g;
    if (std::sscanf(part.c_str(), "%lf:%lf:%d", &g.lo, &g.hi, &g.n) != 3 || g.n < 1)
      throw std::invalid_argument("bad grid axis spec: " + part);
    axes.push_back(g);
  }
  return axes;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write output file: " + out_path);
  out << text;
}

json solution_document(const RootSystemData& rs, const Job& job,
                       const bethe_solver::BetheSolution& sol,
                       const bethe_solver::PauliCertificate& cert) {
  json doc;
  doc["system"] = {{"type", std::string(1, job.type)}, {"rank", job.rank}};
  doc["multiplicity"] = {{"long", job.k_long}, {"short", job.k_short}};
  doc["mu"] = sol.mu;
  json coords = json::array(), pair_simple = json::array();
  for (int i = 0; i < rs.rank; ++i) coords.push_back(sol.mu_hat[i]);
  for (int j = 0; j < rs.rank; ++j)
    pair_simple.push_back(sol.mu_hat.dot(rs.coroots[rs.simple[j]]));
  doc["mu_hat"] = {{"coordinates", coords},
                   {"pairings", pair_simple},
                   {"highest_pairing", sol.mu_hat.dot(rs.coroots[rs.highest])}};
  doc["energy"] = sol.energy;
  doc["grad_norm"] = sol.grad_norm;
  doc["iterations"] = sol.iterations;
  doc["bae_residual"] = sol.bae_residual;
  doc["regular"] = sol.regularity.regular;
  doc["regularity_margin"] = sol.regularity.margin;
  doc["indeterminate"] = sol.regularity.indeterminate;

  json gaps = json::array();
  if (sol.gaps.checked) {
    for (const auto& row : sol.gaps.rows) {
      gaps.push_back({{"root", row.root},
                      {"lower", row.lower},
                      {"value", row.value},
                      {"upper", row.upper},
                      {"slack_lower", row.value - row.lower},
                      {"slack_upper", row.upper - row.value}});
    }
  }
  doc["gap_bounds"] = gaps;
  doc["pauli"] = {{"min_eig_K", cert.min_eigenvalue},
                  {"hessian_match", cert.hessian_match},
                  {"excluded", cert.excluded()}};
  if (cert.excluded()) doc["reason"] = "singular BAE solution; no W-invariant state (Pauli principle)";
  return doc;
}

int cmd_solve(const Job& job, const std::string& out_path) {
  RootSystemData rs = root_systems::build_root_system(job.type, job.rank);
  WeylGroup wg = root_systems::enumerate_weyl(rs);
  Multiplicity k(job.k_long, job.k_short);
  bethe_solver::BetheSolution sol = bethe_solver::solve(rs, wg, k, job.weight, job.tol, job.max_iter);
  bethe_solver::PauliCertificate cert = bethe_solver::pauli_certificate(rs, k, sol.lambda());
  emit(solution_document(rs, job, sol, cert).dump(2) + "\n", out_path);
  return cert.excluded() ? kExitExcluded : kExitOk;
}

int cmd_eval(const Job& job, const std::string& out_path) {
  RootSystemData rs = root_systems::build_root_system(job.type, job.rank);
  WeylGroup wg = root_systems::enumerate_weyl(rs);
  Multiplicity k(job.k_long, job.k_short);
  bethe_solver::BetheSolution sol = bethe_solver::solve(rs, wg, k, job.weight, job.tol, job.max_iter);
  if (!sol.regularity.regular) {
    std::cerr << "spectral point is singular; no invariant eigenfunction to evaluate\n";
    return kExitExcluded;
  }
  if (static_cast<int>(job.grid.size()) != rs.rank)
    throw std::invalid_argument("grid needs one axis per coordinate");

  exp_poly::ExpPolynomial psi = eigenfunctions::psi_bethe(rs, wg, k, sol.lambda());

  std::ostringstream csv;
  csv << "# type=" << job.type << " rank=" << job.rank << " k_long=" << fmt17(job.k_long)
      << " k_short=" << fmt17(job.k_short) << "\n";
  csv << "# lambda_im=";
  for (int i = 0; i < rs.rank; ++i) csv << (i ? "," : "") << fmt17(sol.mu_hat[i]);
  csv << " energy=" << fmt17(sol.energy) << "\n";
  for (int i = 0; i < rs.rank; ++i) csv << "x" << i << ",";
  csv << "re_phi,im_phi\n";

  std::vector<int> idx(rs.rank, 0);
  while (true) {
    Vec v(rs.rank);
    for (int i = 0; i < rs.rank; ++i) {
      const GridAxis& g = job.grid[i];
      v[i] = g.n == 1 ? g.lo : g.lo + (g.hi - g.lo) * idx[i] / (g.n - 1);
    }
    Cplx val = eigenfunctions::phi_eval(rs, psi, v);
    for (int i = 0; i < rs.rank; ++i) csv << fmt17(v[i]) << ",";
    csv << fmt17(val.real()) << "," << fmt17(val.imag()) << "\n";

    int axis = rs.rank - 1;
    while (axis >= 0 && ++idx[axis] == job.grid[axis].n) idx[axis--] = 0;
    if (axis < 0) break;
  }
  emit(csv.str(), out_path);
  return kExitOk;
}

int cmd_sweep(const Job& job, const std::string& out_path) {
  RootSystemData rs = root_systems::build_root_system(job.type, job.rank);
  WeylGroup wg = root_systems::enumerate_weyl(rs);

  std::vector<double> ks = job.sweep_k_given ? job.sweep_k : std::vector<double>{job.k_long};
  std::vector<std::vector<int>> weights =
      job.sweep_weights_given ? job.sweep_weights : std::vector<std::vector<int>>{job.weight};

  std::ostringstream csv;
  csv << "k_long,k_short";
  for (int i = 0; i < rs.rank; ++i) csv << ",mu" << i;
  for (int i = 0; i < rs.rank; ++i) csv << ",pairing" << i;
  csv << ",energy,slack_lower,slack_upper\n";

  for (double kv : ks) {
    double ratio = job.k_short / job.k_long;
    Multiplicity k(kv, kv * ratio);
    for (const std::vector<int>& w : weights) {
      bethe_solver::BetheSolution sol = bethe_solver::solve(rs, wg, k, w, job.tol, job.max_iter);
      csv << fmt17(kv) << "," << fmt17(kv * ratio);
      for (int c : w) csv << "," << c;
      for (int j = 0; j < rs.rank; ++j)
        csv << "," << fmt17(sol.mu_hat.dot(rs.coroots[rs.simple[j]]));
      double slack_lo = 0.0, slack_up = 0.0;
      if (sol.gaps.checked) {
        slack_lo = slack_up = std::numeric_limits<double>::infinity();
        for (const auto& row : sol.gaps.rows) {
          slack_lo = std::min(slack_lo, row.value - row.lower);
          slack_up = std::min(slack_up, row.upper - row.value);
        }
      }
      csv << "," << fmt17(sol.energy) << "," << fmt17(slack_lo) << "," << fmt17(slack_up) << "\n";
    }
  }
  emit(csv.str(), out_path);
  return kExitOk;
}

struct Check {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

CVec random_regular_cvec(const RootSystemData& rs, std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int attempt = 0; attempt < 500; ++attempt) {
    CVec lam(rs.rank);
    for (int i = 0; i < rs.rank; ++i) lam[i] = Cplx(u(gen), u(gen));
    double margin = std::numeric_limits<double>::infinity();
    for (int i : rs.positive)
      margin = std::min(margin, std::abs(pairing(lam, rs.coroots[i])));
    if (margin > 0.3) return lam;
  }
  throw std::runtime_error("could not sample a regular covector");
}

int cmd_verify(const Job& job, const std::string& out_path) {
  RootSystemData rs = root_systems::build_root_system(job.type, job.rank);
  WeylGroup wg = root_systems::enumerate_weyl(rs);
  Multiplicity k(job.k_long, job.k_short);
  std::mt19937 gen(job.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  exp_poly::ExpPolynomial f(rs.rank);
  for (int t = 0; t < 2; ++t)
    f = f + exp_poly::ExpPolynomial::exponential(random_regular_cvec(rs, gen),
                                                 Cplx(u(gen), u(gen)));

  std::vector<Check> checks;
  auto add = [&checks](const std::string& name, double dev, double tol) {
    checks.push_back({name, dev, tol, dev < tol});
  };

  {
    double worst = 0.0;
    for (int j = 0; j <= rs.rank; ++j) {
      root_systems::AffineRoot a = root_systems::simple_affine(rs, j);
      exp_poly::ExpPolynomial twice =
          operators::integral_op(rs, a, operators::integral_op(rs, a, f));
      worst = std::max(worst, twice.max_abs_coeff() / (1.0 + f.max_abs_coeff()));
    }
    add("quadratic", worst, 1e-12);
  }
  {
    double worst = 0.0;
    for (int j1 = 0; j1 <= rs.rank; ++j1)
      for (int j2 = j1 + 1; j2 <= rs.rank; ++j2) {
        int m = operators::braid_order(rs, j1, j2);
        if (m == 0) continue;
        std::vector<int> w1, w2;
        for (int t = 0; t < m; ++t) {
          w1.push_back(t % 2 == 0 ? j1 : j2);
          w2.push_back(t % 2 == 0 ? j2 : j1);
        }
        worst = std::max(worst, exp_poly::max_coeff_distance(operators::q_word(rs, w1, k, f),
                                                             operators::q_word(rs, w2, k, f)));
      }
    add("braid", worst, 1e-10);
  }
  {
    double worst = 0.0;
    for (int j = 0; j <= rs.rank; ++j) {
      root_systems::AffineRoot a = root_systems::simple_affine(rs, j);
      exp_poly::ExpPolynomial qf = operators::q_reflect(rs, a, k, f);
      const Vec& grad = rs.roots[a.base];
      for (int t = 0; t < 10; ++t) {
        Vec v(rs.rank);
        for (int i = 0; i < rs.rank; ++i) v[i] = u(gen);
        v -= (root_systems::affine_value(rs, a, v) / grad.squaredNorm()) * grad;
        worst = std::max(worst, std::abs(qf.eval(v) - f.eval(v)) / (1.0 + f.max_abs_coeff()));
      }
    }
    add("wall_restriction", worst, 1e-10);
  }
  {
    std::vector<Vec> pts = operators::sample_regular_points(rs, 20, 1.2, job.seed + 1);
    Vec dir(rs.rank);
    for (int i = 0; i < rs.rank; ++i) dir[i] = u(gen);
    double worst = 0.0;
    for (int j = 0; j <= rs.rank; ++j)
      worst = std::max(worst,
                       operators::check_cross_relation(rs, k, j, dir, f, pts).max_deviation);
    add("cross_relation", worst, 1e-8);

    Vec dir2(rs.rank);
    for (int i = 0; i < rs.rank; ++i) dir2[i] = u(gen);
    add("commutator", operators::check_commutator(rs, k, dir, dir2, f, pts).max_deviation, 1e-8);

    operators::PiecewiseEval pf = operators::propagate(rs, k, f);
    operators::PiecewiseEval pdf = operators::propagate(rs, k, f.directional_derivative(dir));
    double worst_tw = 0.0;
    for (const Vec& v : pts)
      worst_tw = std::max(worst_tw, std::abs(operators::dunkl_eval(pf, dir, v) - pdf.eval(v)) /
                                        (1.0 + f.max_abs_coeff()));
    add("intertwining", worst_tw, 1e-8);
  }
  {
    CVec mu = random_regular_cvec(rs, gen);
    Cplx z = pairing(mu, rs.coroots[rs.highest]);
    double kphi = k.k_highest(rs);
    exp_poly::ExpPolynomial lhs =
        operators::intertwiner(rs, k, exp_poly::ExpPolynomial::exponential(mu, 1.0));
    Mat sphi = root_systems::affine_reflection(rs, {rs.highest, 0}).M;
    CVec smu = sphi.transpose().cast<Cplx>() * mu;
    exp_poly::ExpPolynomial rhs =
        exp_poly::ExpPolynomial::exponential(smu, -(z + kphi) * std::exp(z));
    add("intertwiner_closed_form", exp_poly::max_coeff_distance(lhs, rhs), 1e-10);
  }

  bethe_solver::BetheSolution sol = bethe_solver::solve(rs, wg, k, job.weight, job.tol, job.max_iter);
  {
    double slack = sol.gaps.checked ? sol.gaps.min_slack : 0.0;
    add("gap_bounds", std::max(0.0, -slack), 1e-9);
    add("equivariance", bethe_solver::equivariance_check(rs, wg, k, job.weight).max_deviation,
        1e-9);
    double worst = 0.0;
    for (const auto& row : bethe_solver::impenetrable_limit_study(rs, wg, job.weight,
                                                                  {1.0, 10.0, 100.0}))
      worst = std::max(worst, std::max(0.0, row.max_pair_gap - row.envelope));
    add("limit_study", worst, 1e-9);
  }
  {
    CVec lam = sol.lambda();
    if (job.perturb_lambda) lam += Cplx(0.0, 0.1) * rs.rho.cast<Cplx>();
    exp_poly::ExpPolynomial psi = eigenfunctions::psi_bethe(rs, wg, k, lam);
    add("bae_detector",
        exp_poly::max_coeff_distance(operators::q_word(rs, {0}, k, psi), psi), 1e-8);

    std::vector<Vec> grid = operators::sample_regular_points(rs, 5, 0.8, job.seed + 2, 2e-2);
    double energy = lam.squaredNorm();  // = |mu_hat|^2 for imaginary lambda
    add("eigen_fd", eigenfunctions::verify_eigen(rs, psi, energy, grid).max_rel_dev, 1e-6);

    eigenfunctions::JumpReport jumps =
        eigenfunctions::verify_jumps(rs, k, psi, eigenfunctions::sample_wall_points(rs, 5, job.seed));
    double first = 0.0;
    for (const auto& row : jumps.rows)
      if (row.order == 1)
        first = std::max(first, std::abs(row.jump - row.expected) /
                                    (std::abs(row.expected) + 1e-3 * row.deriv_scale + 1e-12));
    add("jumps_first_order", first, 1e-3);
    add("jumps_even_order", jumps.max_even_rel, 1e-6);
  }

  json doc;
  doc["system"] = {{"type", std::string(1, job.type)}, {"rank", job.rank}};
  doc["multiplicity"] = {{"long", job.k_long}, {"short", job.k_short}};
  doc["seed"] = job.seed;
  doc["perturb_lambda"] = job.perturb_lambda;
  bool all = true;
  json arr = json::array();
  for (const Check& c : checks) {
    arr.push_back({{"name", c.name},
                   {"max_deviation", c.max_deviation},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}});
    all = all && c.pass;
  }
  doc["checks"] = arr;
  doc["all_pass"] = all;
  emit(doc.dump(2) + "\n", out_path);
  return all ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bethe ansatz solver and eigenfunction toolkit for affine root systems"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, grid_spec;
  double tol_flag = 0.0;
  int max_iter_flag = 0, seed_flag = 0;
  app.add_option("--config", config_path, "job configuration (JSON)")->required();
  app.add_option("--out", out_path, "output file (default stdout)");
  CLI::Option* opt_tol = app.add_option("--tol", tol_flag, "solver tolerance override");
  CLI::Option* opt_iter = app.add_option("--max-iter", max_iter_flag, "solver iteration cap override");
  CLI::Option* opt_seed = app.add_option("--seed", seed_flag, "RNG seed override for sampled checks");
  app.add_option("--grid", grid_spec, "grid axes lo:hi:n,... override");

  CLI::App* sub_solve = app.add_subcommand("solve", "solve the Bethe equations for one weight");
  CLI::App* sub_eval = app.add_subcommand("eval", "evaluate the invariant eigenfunction on a grid");
  CLI::App* sub_verify = app.add_subcommand("verify", "run the operator and solver check suite");
  CLI::App* sub_sweep = app.add_subcommand("sweep", "tabulate solutions over couplings or weights");

  CLI11_PARSE(app, argc, argv);

  try {
    Job job = load_job(config_path);
    if (opt_tol->count() > 0) job.tol = tol_flag;
    if (opt_iter->count() > 0) job.max_iter = max_iter_flag;
    if (opt_seed->count() > 0) job.seed = static_cast<unsigned>(seed_flag);
    if (!grid_spec.empty()) job.grid = parse_grid_flag(grid_spec);

    if (sub_solve->parsed()) return cmd_solve(job, out_path);
    if (sub_eval->parsed()) return cmd_eval(job, out_path);
    if (sub_verify->parsed()) return cmd_verify(job, out_path);
    if (sub_sweep->parsed()) return cmd_sweep(job, out_path);
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
