#include <catch2/catch.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "json.hpp"

#include "alcove/bethe_solver.hpp"
#include "alcove/eigenfunctions.hpp"
#include "alcove/root_systems.hpp"

using json = nlohmann::json;
using namespace alcove;

namespace {

int file_counter = 0;

std::string scratch_path(const std::string& stem) {
  return "/tmp/alcove_cli_" + std::to_string(getpid()) + "_" + std::to_string(file_counter++) +
         "_" + stem;
}

std::string write_file(const std::string& stem, const std::string& text) {
  std::string path = scratch_path(stem);
  std::ofstream out(path);
  out << text;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  std::string out = scratch_path("stdout"), err = scratch_path("stderr");
  std::string cmd = std::string(ALCOVE_CLI_PATH) + " " + args + " > " + out + " 2> " + err;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

// data lines of a CSV payload, comments and header stripped
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

const std::string a1_config = R"({
  "system": {"type": "A", "rank": 1},
  "multiplicity": {"long": 2.0},
  "weight": [1]
})";

}  // namespace

TEST_CASE("solve document against the library", "[cli]") {
  std::string cfg = write_file("a1.json", a1_config);
  RunResult r = run_cli("solve --config " + cfg);
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);

  root_systems::RootSystemData rs = root_systems::build_root_system('A', 1);
  root_systems::WeylGroup wg = root_systems::enumerate_weyl(rs);
  bethe_solver::BetheSolution sol =
      bethe_solver::solve(rs, wg, root_systems::Multiplicity(2.0), {1});

  CHECK(doc["regular"].get<bool>());
  CHECK_FALSE(doc["pauli"]["excluded"].get<bool>());
  CHECK(doc["bae_residual"].get<double>() < 1e-9);
  double pairing = doc["mu_hat"]["pairings"][0].get<double>();
  CHECK(pairing == Approx(sol.mu_hat.dot(rs.coroots[0])).margin(1e-12));
  CHECK(doc["energy"].get<double>() == Approx(sol.energy).margin(1e-12));
  CHECK(doc["gap_bounds"].size() == 1);
  CHECK(doc["gap_bounds"][0]["slack_lower"].get<double>() > 0.0);
}

TEST_CASE("exclusion exit codes", "[cli]") {
  SECTION("singular weight on the dominant wall") {
    std::string cfg = write_file("a2_singular.json", R"({
      "system": {"type": "A", "rank": 2},
      "multiplicity": {"long": 1.0},
      "weight": [1, 0]
    })");
    RunResult r = run_cli("solve --config " + cfg);
    CHECK(r.exit_code == 2);
    json doc = json::parse(r.out);
    CHECK_FALSE(doc["regular"].get<bool>());
    CHECK(doc["pauli"]["excluded"].get<bool>());
    CHECK(doc.contains("reason"));
    CHECK(doc["pauli"]["min_eig_K"].get<double>() > 0.0);
  }

  SECTION("zero weight") {
    std::string cfg = write_file("a1_zero.json", R"({
      "system": {"type": "A", "rank": 1},
      "multiplicity": {"long": 2.0},
      "weight": [0]
    })");
    RunResult r = run_cli("solve --config " + cfg);
    CHECK(r.exit_code == 2);
    json doc = json::parse(r.out);
    CHECK(doc["mu_hat"]["pairings"][0].get<double>() == 0.0);
    CHECK(doc["pauli"]["excluded"].get<bool>());
  }
}

TEST_CASE("grid evaluation", "[cli]") {
  std::string cfg = write_file("a1_eval.json", a1_config);

  SECTION("origin normalization") {
    RunResult r = run_cli("eval --config " + cfg + " --grid 0:0:1");
    REQUIRE(r.exit_code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1);
    CHECK(std::stod(rows[0][1]) == Approx(1.0).margin(1e-12));
    CHECK(std::stod(rows[0][2]) == Approx(0.0).margin(1e-12));
  }

  SECTION("matches the library evaluation") {
    RunResult r = run_cli("eval --config " + cfg + " --grid -0.7:0.3:11");
    REQUIRE(r.exit_code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 11);

    root_systems::RootSystemData rs = root_systems::build_root_system('A', 1);
    root_systems::WeylGroup wg = root_systems::enumerate_weyl(rs);
    root_systems::Multiplicity k(2.0);
    bethe_solver::BetheSolution sol = bethe_solver::solve(rs, wg, k, {1});
    exp_poly::ExpPolynomial psi = eigenfunctions::psi_bethe(rs, wg, k, sol.lambda());
    for (const auto& row : rows) {
      Vec v(1);
      v[0] = std::stod(row[0]);
      Cplx expected = eigenfunctions::phi_eval(rs, psi, v);
      CHECK(std::stod(row[1]) == Approx(expected.real()).margin(1e-12));
      CHECK(std::stod(row[2]) == Approx(expected.imag()).margin(1e-12));
    }
  }

  SECTION("periodic under a coroot translation") {
    root_systems::RootSystemData rs = root_systems::build_root_system('A', 1);
    double gamma = rs.coroots[0][0];
    char shifted[128];
    std::snprintf(shifted, sizeof(shifted), "%.17g:%.17g:5", -0.4 + gamma, 0.4 + gamma);
    RunResult base = run_cli("eval --config " + cfg + " --grid -0.4:0.4:5");
    RunResult moved = run_cli("eval --config " + cfg + " --grid " + shifted);
    REQUIRE(base.exit_code == 0);
    REQUIRE(moved.exit_code == 0);
    auto rb = csv_rows(base.out), rm = csv_rows(moved.out);
    REQUIRE(rb.size() == rm.size());
    for (size_t i = 0; i < rb.size(); ++i) {
      CHECK(std::stod(rm[i][1]) == Approx(std::stod(rb[i][1])).margin(1e-12));
      CHECK(std::stod(rm[i][2]) == Approx(std::stod(rb[i][2])).margin(1e-12));
    }
  }

  SECTION("singular spectral point refuses evaluation") {
    std::string bad = write_file("a2_eval_singular.json", R"({
      "system": {"type": "A", "rank": 2},
      "multiplicity": {"long": 1.0},
      "weight": [1, 0],
      "grid": {"axes": [[0, 1, 3], [0, 1, 3]]}
    })");
    RunResult r = run_cli("eval --config " + bad);
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("verification report", "[cli]") {
  std::string cfg = write_file("b2_verify.json", R"({
    "system": {"type": "B", "rank": 2},
    "multiplicity": {"long": 1.3, "short": 0.7},
    "weight": [2, 1],
    "verify": {"seed": 42}
  })");

  SECTION("default suite passes") {
    RunResult r = run_cli("verify --config " + cfg);
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["all_pass"].get<bool>());
    REQUIRE(doc["checks"].size() >= 10);
    for (const json& c : doc["checks"]) {
      CHECK(c.contains("name"));
      CHECK(c.contains("max_deviation"));
      CHECK(c.contains("tolerance"));
      CHECK(c["pass"].get<bool>());
    }
  }

  SECTION("identical configs give identical bytes") {
    RunResult a = run_cli("verify --config " + cfg);
    RunResult b = run_cli("verify --config " + cfg);
    CHECK(a.out == b.out);
  }

  SECTION("perturbed spectral point is caught") {
    std::string bad = write_file("b2_perturbed.json", R"({
      "system": {"type": "B", "rank": 2},
      "multiplicity": {"long": 1.3, "short": 0.7},
      "weight": [2, 1],
      "verify": {"seed": 42, "perturb_lambda": true}
    })");
    RunResult r = run_cli("verify --config " + bad);
    CHECK(r.exit_code == 1);
    json doc = json::parse(r.out);
    CHECK_FALSE(doc["all_pass"].get<bool>());
    bool detector_failed = false, eigen_ok = false;
    for (const json& c : doc["checks"]) {
      if (c["name"] == "bae_detector") detector_failed = !c["pass"].get<bool>();
      if (c["name"] == "eigen_fd") eigen_ok = c["pass"].get<bool>();
    }
    CHECK(detector_failed);
    CHECK(eigen_ok);
  }
}

TEST_CASE("sweep tables", "[cli]") {
  SECTION("coupling sweep approaches the impenetrable pairing") {
    std::string cfg = write_file("a1_sweep.json", R"({
      "system": {"type": "A", "rank": 1},
      "multiplicity": {"long": 2.0},
      "weight": [1],
      "sweep": {"k_values": [1.0, 10.0, 100.0, 10000.0]}
    })");
    RunResult r = run_cli("sweep --config " + cfg);
    REQUIRE(r.exit_code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    double prev = 0.0;
    for (const auto& row : rows) {
      double pairing = std::stod(row[3]);
      CHECK(pairing > prev);
      CHECK(pairing < 6.283185307179587);
      CHECK(std::stod(row[5]) > -1e-9);  // lower-bound slack
      prev = pairing;
    }
    CHECK(prev > 6.28);
  }

  SECTION("weight sweep rows stay distinct") {
    std::string cfg = write_file("a2_sweep.json", R"({
      "system": {"type": "A", "rank": 2},
      "multiplicity": {"long": 0.8},
      "weight": [1, 1],
      "sweep": {"weights": [[1, 1], [2, 1], [1, 2]]}
    })");
    RunResult r = run_cli("sweep --config " + cfg);
    REQUIRE(r.exit_code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = i + 1; j < rows.size(); ++j) {
        double di = std::abs(std::stod(rows[i][4]) - std::stod(rows[j][4])) +
                    std::abs(std::stod(rows[i][5]) - std::stod(rows[j][5]));
        CHECK(di > 1e-6);
      }
  }

  SECTION("empty sweep emits only the header") {
    std::string cfg = write_file("a1_empty.json", R"({
      "system": {"type": "A", "rank": 1},
      "multiplicity": {"long": 2.0},
      "weight": [1],
      "sweep": {"k_values": []}
    })");
    RunResult r = run_cli("sweep --config " + cfg);
    REQUIRE(r.exit_code == 0);
    CHECK(csv_rows(r.out).empty());
    CHECK(r.out.substr(0, 6) == "k_long");
  }
}

TEST_CASE("configuration validation", "[cli]") {
  SECTION("malformed JSON") {
    std::string cfg = write_file("broken.json", "{not json");
    CHECK(run_cli("solve --config " + cfg).exit_code == 1);
  }

  SECTION("missing system block") {
    std::string cfg = write_file("nosystem.json", R"({"multiplicity": {"long": 1.0}})");
    CHECK(run_cli("solve --config " + cfg).exit_code == 1);
  }

  SECTION("non-integer weight") {
    std::string cfg = write_file("fracweight.json", R"({
      "system": {"type": "A", "rank": 2},
      "multiplicity": {"long": 1.0},
      "weight": [1.5, 1]
    })");
    RunResult r = run_cli("solve --config " + cfg);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("integer") != std::string::npos);
  }

  SECTION("nonpositive multiplicity") {
    std::string cfg = write_file("zerok.json", R"({
      "system": {"type": "A", "rank": 1},
      "multiplicity": {"long": 0.0},
      "weight": [1]
    })");
    CHECK(run_cli("solve --config " + cfg).exit_code == 1);
  }

  SECTION("unknown system type") {
    std::string cfg = write_file("badtype.json", R"({
      "system": {"type": "Z", "rank": 2},
      "multiplicity": {"long": 1.0},
      "weight": [1, 1]
    })");
    CHECK(run_cli("solve --config " + cfg).exit_code == 1);
  }

  SECTION("bad grid flag") {
    std::string cfg = write_file("gridcfg.json", a1_config);
    CHECK(run_cli("eval --config " + cfg + " --grid nonsense").exit_code == 1);
  }

  SECTION("missing config flag") {
    CHECK(run_cli("solve").exit_code != 0);
  }
}
