// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests for the rkmf-bench executable: every test launches the
// real binary in a subprocess and inspects exit code, stdout/stderr, and any
// files it wrote. Library calls appear only to produce oracle values.
#include <doctest.h>

#include <sys/wait.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rkmf/approximants.hpp"
#include "rkmf/basis.hpp"
#include "rkmf/densefun.hpp"
#include "rkmf/problems.hpp"
#include "rkmf/sparse.hpp"
#include "rkmf/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using rkmf::Index;
using rkmf::Matrix;
using rkmf::Real;
using rkmf::Vector;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string scratch(const std::string& name) {
  fs::create_directories("cli_scratch");
  return "cli_scratch/" + name;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = scratch("last_stdout.txt");
  const std::string err_path = scratch("last_stderr.txt");
  const std::string cmd = std::string("\"") + RKMF_CLI_PATH + "\" " + args +
                          " > " + out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out_path);
  r.err = read_text(err_path);
  return r;
}

std::string write_config(const std::string& name, const json& cfg) {
  const std::string path = scratch(name);
  write_text(path, cfg.dump(2) + "\n");
  return path;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

Real to_d(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

const char* kHeader =
    "method,n,m_or_totalm,cycle,matvecs,rel_error,update_norm,kappa_W,"
    "leftmost_ritz_re,elapsed_ms,note";

json conv_diff_problem(Index nx, Index ny, Real alpha, Real beta,
                       std::uint64_t seed) {
  return json{{"kind", "conv_diff"}, {"nx", nx},     {"ny", ny},
              {"alpha", alpha},      {"beta", beta}, {"seed", seed}};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("generate writes a loadable problem") {
    const std::string prefix = scratch("gen1");
    json cfg{{"problem", conv_diff_problem(6, 5, 0.1, 0.01, 9)},
             {"output", prefix}};
    const auto r =
        run_cli("generate --config " + write_config("gen1.json", cfg));
    CHECK(r.code == 0);
    CHECK(r.out.find("wrote " + prefix + ".mtx") != std::string::npos);
    CHECK(r.out.find("(n=30,") != std::string::npos);

    const auto expected = rkmf::problems::gen_conv_diff(
        6, 5, 1, 0.1, 0.01, 1.0, 9, rkmf::problems::ConvDiffBoundary::Paper);
    const auto loaded = rkmf::problems::load_problem(
        prefix + ".mtx", prefix + ".b.txt",
        rkmf::densefun::FunctionSpec::phi1_neg(1.0));
    REQUIRE(loaded.L.n_rows == expected.L.n_rows);
    CHECK(rkmf::sparse::densify(loaded.L) ==
          rkmf::sparse::densify(expected.L));
    CHECK(loaded.b == expected.b);
    const Vector u0 = rkmf::sparse::load_vector(prefix + ".u0.txt");
    CHECK(u0 == expected.u0);
  }

  TEST_CASE("generate without an output prefix is a config error") {
    json cfg{{"problem", conv_diff_problem(4, 4, 0.1, 0.01, 0)}};
    const auto r =
        run_cli("generate --config " + write_config("gen2.json", cfg));
    CHECK(r.code == 1);
    CHECK(r.err.find("output prefix") != std::string::npos);
  }

  TEST_CASE("unknown problem kind is a config error") {
    json cfg{{"problem", {{"kind", "heat"}}}, {"output", scratch("gen3")}};
    const auto r =
        run_cli("generate --config " + write_config("gen3.json", cfg));
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown problem kind") != std::string::npos);
  }

  TEST_CASE("run prints CSV to stdout when no output is given") {
    json cfg{{"problem", conv_diff_problem(8, 8, 0.1, 0.01, 0)},
             {"methods", json::array({{{"name", "arnoldi"}, {"m", 10}}})},
             {"reference", {{"mode", "none"}}}};
    const auto r = run_cli("run --config " + write_config("run1.json", cfg));
    CHECK(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == parse_csv(std::string(kHeader) + "\n")[0]);
    REQUIRE(rows[1].size() == 11);
    CHECK(rows[1][0] == "arnoldi");
    CHECK(rows[1][1] == "64");
    CHECK(rows[1][2] == "10");
    CHECK(rows[1][3] == "0");
    CHECK(rows[1][4] == "10");
    CHECK(std::isnan(to_d(rows[1][5])));  // no reference
    CHECK(rows[1][10].empty());
  }

  TEST_CASE("single-method run matches the library call") {
    json cfg{{"problem", conv_diff_problem(10, 10, 0.1, 0.01, 3)},
             {"methods", json::array({{{"name", "arnoldi"}, {"m", 12}}})},
             {"output", scratch("single.csv")}};
    const auto r = run_cli("run --config " + write_config("single.json", cfg));
    REQUIRE(r.code == 0);

    const auto prob = rkmf::problems::gen_conv_diff(
        10, 10, 1, 0.1, 0.01, 1.0, 3, rkmf::problems::ConvDiffBoundary::Paper);
    const Vector ref = rkmf::problems::reference_solution(prob);
    const auto dec = rkmf::basis::arnoldi(prob.L, prob.b, 12);
    const auto ap = rkmf::approx::fom(dec, prob.f);
    const Real rel = (ap.value - ref).norm() / ref.norm();

    const auto rows = parse_csv(read_text(scratch("single.csv")));
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "arnoldi");
    CHECK(rows[1][1] == "100");
    CHECK(rows[1][4] == "12");
    // %.17g round-trips doubles exactly, and the sweep runs the same
    // deterministic code path, so the parsed values match bit for bit.
    CHECK(to_d(rows[1][5]) == rel);
    CHECK(to_d(rows[1][7]) == ap.diag.kappa_W);
    CHECK(to_d(rows[1][9]) == 0.0);  // timing off
  }

  TEST_CASE("empty method list yields a header-only CSV") {
    const std::string out = scratch("empty.csv");
    json cfg{{"problem", conv_diff_problem(6, 6, 0.1, 0.01, 0)},
             {"methods", json::array()},
             {"reference", {{"mode", "none"}}},
             {"output", out}};
    const auto r = run_cli("run --config " + write_config("empty.json", cfg));
    CHECK(r.code == 0);
    CHECK(read_text(out) == std::string(kHeader) + "\n");
  }

  TEST_CASE("rerun with fixed seeds is byte-identical") {
    json cfg{{"problem", conv_diff_problem(10, 10, 0.1, 0.01, 4)},
             {"methods",
              json::array(
                  {{{"name", "arnoldi"}, {"m", 5}, {"m_grid", {5, 10}}},
                   {{"name", "rand"}, {"m", 10}, {"d", 40}, {"seed", 5}},
                   {{"name", "restart-rand"},
                    {"m_r", 6},
                    {"d", 48},
                    {"seed", 7},
                    {"tol", 1e-8}}})}};
    const std::string cfg_path = write_config("repeat.json", cfg);
    const std::string out1 = scratch("repeat1.csv");
    const std::string out2 = scratch("repeat2.csv");
    CHECK(run_cli("run --config " + cfg_path + " --output " + out1).code == 0);
    CHECK(run_cli("run --config " + cfg_path + " --output " + out2).code == 0);
    const std::string a = read_text(out1);
    CHECK(a == read_text(out2));
    CHECK(a.size() > std::string(kHeader).size());
  }

  TEST_CASE("run output is independent of the thread count") {
    json cfg{{"problem", conv_diff_problem(10, 10, 0.1, 0.01, 4)},
             {"methods",
              json::array({{{"name", "arnoldi"}, {"m", 8}},
                           {{"name", "sfom"}, {"m", 8}, {"d", 32}},
                           {{"name", "rand-ls"}, {"m", 8}, {"d", 32}},
                           {{"name", "incomplete"}, {"m", 8}}})}};
    const std::string cfg_path = write_config("threads.json", cfg);
    const std::string out1 = scratch("threads1.csv");
    const std::string out4 = scratch("threads4.csv");
    CHECK(run_cli("run --config " + cfg_path + " --threads 1 --output " +
                  out1)
              .code == 0);
    CHECK(run_cli("run --config " + cfg_path + " --threads 4 --output " +
                  out4)
              .code == 0);
    CHECK(read_text(out1) == read_text(out4));
  }

  TEST_CASE("--seed overrides problem and method seeds") {
    auto make = [](std::uint64_t prob_seed, std::uint64_t method_seed) {
      return json{{"problem", conv_diff_problem(10, 10, 0.1, 0.01, prob_seed)},
                  {"methods", json::array({{{"name", "rand"},
                                            {"m", 12},
                                            {"d", 48},
                                            {"seed", method_seed}}})}};
    };
    const std::string base = write_config("seed_base.json", make(1, 2));
    const std::string expl = write_config("seed_expl.json", make(11, 11));
    const std::string out_a = scratch("seed_a.csv");
    const std::string out_b = scratch("seed_b.csv");
    const std::string out_c = scratch("seed_c.csv");
    CHECK(run_cli("run --config " + base + " --output " + out_a).code == 0);
    CHECK(run_cli("run --config " + base + " --seed 11 --output " + out_b)
              .code == 0);
    CHECK(run_cli("run --config " + expl + " --output " + out_c).code == 0);
    CHECK(read_text(out_a) != read_text(out_b));
    CHECK(read_text(out_b) == read_text(out_c));
  }

  TEST_CASE("unknown method name is a config error") {
    json cfg{{"problem", conv_diff_problem(6, 6, 0.1, 0.01, 0)},
             {"methods", json::array({{{"name", "newton"}}})}};
    const auto r = run_cli("run --config " + write_config("badm.json", cfg));
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown method name") != std::string::npos);
  }

  TEST_CASE("reference modes: none, file, restart-highm") {
    const auto prob = rkmf::problems::gen_conv_diff(
        10, 10, 1, 0.1, 0.01, 1.0, 3, rkmf::problems::ConvDiffBoundary::Paper);
    const Vector ref = rkmf::problems::reference_solution(prob);
    const std::string ref_path = scratch("ref_vec.txt");
    rkmf::sparse::save_vector(ref, ref_path);

    auto cfg_for = [&](const json& reference) {
      return json{{"problem", conv_diff_problem(10, 10, 0.1, 0.01, 3)},
                  {"methods", json::array({{{"name", "arnoldi"}, {"m", 30}}})},
                  {"reference", reference}};
    };
    const auto ap =
        rkmf::approx::fom(rkmf::basis::arnoldi(prob.L, prob.b, 30), prob.f);
    const Real rel = (ap.value - ref).norm() / ref.norm();

    auto r = run_cli("run --config " +
                     write_config("ref_none.json",
                                  cfg_for(json{{"mode", "none"}})));
    REQUIRE(r.code == 0);
    CHECK(std::isnan(to_d(parse_csv(r.out)[1][5])));

    r = run_cli("run --config " +
                write_config("ref_file.json", cfg_for(json{{"mode", "file"},
                                                           {"path",
                                                            ref_path}})));
    REQUIRE(r.code == 0);
    CHECK(to_d(parse_csv(r.out)[1][5]) == rel);

    r = run_cli("run --config " +
                write_config("ref_highm.json",
                             cfg_for(json{{"mode", "restart-highm"}})));
    REQUIRE(r.code == 0);
    const Real rel_hm = to_d(parse_csv(r.out)[1][5]);
    CHECK(std::isfinite(rel_hm));
    CHECK(rel_hm <= 1e-6);
  }

  TEST_CASE("arnoldi error is nonincreasing to a plateau") {
    json cfg{{"problem", {{"kind", "membrane"}, {"n_r", 8}, {"t", 1.0}}},
             {"methods", json::array({{{"name", "arnoldi"},
                                       {"m", 5},
                                       {"m_grid", {5, 10, 20, 40}}}})}};
    const auto r = run_cli("run --config " + write_config("mono.json", cfg));
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 5);
    const Real first = to_d(rows[1][5]);
    const Real last = to_d(rows[4][5]);
    CHECK(std::isfinite(first));
    CHECK(last <= first);
    CHECK(last <= 1e-8);
  }

  TEST_CASE("budget warning is printed for oversized restart configs") {
    json cfg{{"problem", conv_diff_problem(8, 8, 0.1, 0.01, 0)},
             {"methods", json::array({{{"name", "restart"},
                                       {"m_r", 50},
                                       {"k_max", 100},
                                       {"tol", 1.0}}})},
             {"reference", {{"mode", "none"}}}};
    const auto r = run_cli("run --config " + write_config("budget.json", cfg));
    CHECK(r.code == 0);
    CHECK(r.err.find("exceeds the total-m budget") != std::string::npos);
  }

  TEST_CASE("timing flag reports a phase summary on stderr") {
    json cfg{{"problem", conv_diff_problem(8, 8, 0.1, 0.01, 0)},
             {"methods", json::array({{{"name", "arnoldi"}, {"m", 10}}})},
             {"reference", {{"mode", "none"}}},
             {"timing", true}};
    const auto r = run_cli("run --config " + write_config("timing.json", cfg));
    REQUIRE(r.code == 0);
    CHECK(r.err.find("timing arnoldi: basis build") != std::string::npos);
    CHECK(to_d(parse_csv(r.out)[1][9]) > 0.0);
  }

  TEST_CASE("spectrum of a diagonal external matrix is its diagonal") {
    const auto A = rkmf::sparse::from_triplets(
        3, 3, {{0, 0, 2.0}, {1, 1, 5.0}, {2, 2, 9.0}});
    const std::string mtx = scratch("diag.mtx");
    const std::string rhs = scratch("diag.b.txt");
    rkmf::sparse::save_matrix_market(A, mtx);
    rkmf::sparse::save_vector(Vector::Ones(3), rhs);
    json cfg{{"problem",
              {{"kind", "external"},
               {"matrix", mtx},
               {"rhs", rhs},
               {"function", {{"kind", "exp_neg"}}}}}};
    const auto r =
        run_cli("spectrum --config " + write_config("spec_diag.json", cfg));
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"re", "im"});
    const Real want[3] = {2.0, 5.0, 9.0};
    for (int i = 0; i < 3; ++i) {
      CHECK(to_d(rows[i + 1][0]) == doctest::Approx(want[i]).epsilon(1e-13));
      CHECK(to_d(rows[i + 1][1]) == 0.0);
    }
  }

  TEST_CASE("spectrum of a symmetric matrix is real") {
    const Index n = 12;
    std::vector<rkmf::sparse::Triplet> tr;
    for (Index i = 0; i < n; ++i) {
      tr.push_back({i, i, 2.0 + 0.1 * static_cast<Real>(i)});
      if (i + 1 < n) {
        tr.push_back({i, i + 1, -1.0});
        tr.push_back({i + 1, i, -1.0});
      }
    }
    const auto A = rkmf::sparse::from_triplets(n, n, tr);
    const std::string mtx = scratch("sym.mtx");
    const std::string rhs = scratch("sym.b.txt");
    rkmf::sparse::save_matrix_market(A, mtx);
    rkmf::sparse::save_vector(Vector::Ones(n), rhs);
    json cfg{{"problem",
              {{"kind", "external"},
               {"matrix", mtx},
               {"rhs", rhs},
               {"function", {{"kind", "exp_neg"}}}}}};
    const auto r =
        run_cli("spectrum --config " + write_config("spec_sym.json", cfg));
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == static_cast<std::size_t>(n) + 1);

    Eigen::SelfAdjointEigenSolver<Matrix> es(rkmf::sparse::densify(A));
    for (Index i = 0; i < n; ++i) {
      CHECK(to_d(rows[i + 1][0]) ==
            doctest::Approx(es.eigenvalues()(i)).epsilon(1e-12));
      CHECK(to_d(rows[i + 1][1]) == 0.0);
    }
  }

  TEST_CASE("spectrum shows complex modes on a convection-dominated grid") {
    json cfg{{"problem", conv_diff_problem(20, 20, 0.01, 1.0, 0)}};
    const auto r =
        run_cli("spectrum --config " + write_config("spec_cd.json", cfg));
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 401);
    Real max_im = 0.0;
    Real prev_re = -std::numeric_limits<Real>::infinity();
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const Real re = to_d(rows[i][0]);
      max_im = std::max(max_im, std::abs(to_d(rows[i][1])));
      CHECK(re >= prev_re);  // sorted by real part
      prev_re = re;
    }
    CHECK(max_im > 1e-6);
  }

  TEST_CASE("spectrum guard rejects problems above max_n") {
    json cfg{{"problem", conv_diff_problem(12, 12, 0.1, 0.01, 0)},
             {"max_n", 100}};
    const auto r =
        run_cli("spectrum --config " + write_config("spec_big.json", cfg));
    CHECK(r.code == 1);
    CHECK(r.err.find("use a smaller grid or raise max_n") !=
          std::string::npos);
  }

  TEST_CASE("unwritable output is a runtime failure (exit 2)") {
    json cfg{{"problem", conv_diff_problem(6, 6, 0.1, 0.01, 0)},
             {"methods", json::array()},
             {"reference", {{"mode", "none"}}}};
    const auto r =
        run_cli("run --config " + write_config("unwritable.json", cfg) +
                " --output cli_scratch/no_such_dir/out.csv");
    CHECK(r.code == 2);
    CHECK(r.err.find("cannot open for writing") != std::string::npos);
  }

  TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli("run").code == 1);                        // missing --config
    CHECK(run_cli("frobnicate --config x.json").code == 1);  // bad subcommand
    CHECK(run_cli("").code == 1);                           // no subcommand

    json cfg{{"problem", conv_diff_problem(6, 6, 0.1, 0.01, 0)},
             {"methods", json::array()}};
    const std::string cfg_path = write_config("usage.json", cfg);
    const auto r = run_cli("run --config " + cfg_path + " --threads 0");
    CHECK(r.code == 1);
    CHECK(r.err.find("--threads must be >= 1") != std::string::npos);

    CHECK(run_cli("run --config cli_scratch/missing.json").code == 1);
    write_text(scratch("broken.json"), "{not json");
    CHECK(run_cli("run --config cli_scratch/broken.json").code == 1);
  }
}
