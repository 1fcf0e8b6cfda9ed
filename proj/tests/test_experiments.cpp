#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "steklov/experiments.hpp"

using namespace steklov;

namespace {
SweepConfig tiny_config() {
  SweepConfig cfg;
  cfg.p = 3;
  cfg.ells = {0.5, 0.25};
  cfg.res = {4, 8, 8, 1};
  return cfg;
}
}  // namespace

TEST_CASE("sweep records satisfy the structural invariants") {
  auto cfg = tiny_config();
  auto recs = run_sweep(cfg);
  REQUIRE(recs.size() == 2);
  for (const auto& r : recs) {
    REQUIRE(r.ok);
    CHECK(r.sigma1_sp > 0);
    CHECK(r.mult == 2);  // p - 1
    CHECK(r.isotypic == "big:1");
    CHECK(r.sigma1_sp_prime > 0);
    CHECK(r.sigma1n_a > 0);
    CHECK(r.sigma1n_a <= r.sigma1_sp_prime + 1e-12);
    CHECK(r.sigma1_sp <= std::max(r.r_f1, r.r_f2) + 1e-12);
    CHECK(r.a_const == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(analytic_bound(3, r.ell, r.a_const)).epsilon(1e-14));
    CHECK(r.max_residual < 1e-10);
  }
  // sigma1 decreases with shrinking ell
  CHECK(recs[1].sigma1_sp < recs[0].sigma1_sp);
  // the Steklov-Neumann subdomain value is ell-invariant
  CHECK(recs[0].sigma1n_a == doctest::Approx(recs[1].sigma1n_a).epsilon(1e-12));
}

TEST_CASE("sweep is deterministic and worker-count independent") {
  auto cfg = tiny_config();
  auto a = run_sweep(cfg);
#ifdef _WIN32
#else
  setenv("STEKLOV_LAB_WORKERS", "2", 1);
#endif
  auto b = run_sweep(cfg);
#ifndef _WIN32
  unsetenv("STEKLOV_LAB_WORKERS");
#endif
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].sigma1_sp == b[i].sigma1_sp);
    CHECK(a[i].sigma1_sp_prime == b[i].sigma1_sp_prime);
    CHECK(a[i].mult == b[i].mult);
  }
}

TEST_CASE("a bad ell is isolated to its own record") {
  auto cfg = tiny_config();
  cfg.ells = {0.5, -1.0};
  auto recs = run_sweep(cfg);
  CHECK(recs[0].ok);
  CHECK(!recs[1].ok);
  CHECK(!recs[1].error.empty());
}

TEST_CASE("config JSON round-trip") {
  auto cfg = tiny_config();
  cfg.cluster_rel_tol = 3e-5;
  cfg.with_neumann = false;
  nlohmann::json j = cfg;
  auto back = j.get<SweepConfig>();
  CHECK(back.p == cfg.p);
  CHECK(back.ells == cfg.ells);
  CHECK(back.res.square_n == cfg.res.square_n);
  CHECK(back.res.n_rho == cfg.res.n_rho);
  CHECK(back.res.n_t == cfg.res.n_t);
  CHECK(back.cluster_rel_tol == cfg.cluster_rel_tol);
  CHECK(back.with_neumann == false);
  // partial configs fall back to defaults
  auto partial = nlohmann::json{{"p", 5}}.get<SweepConfig>();
  CHECK(partial.p == 5);
  CHECK(partial.ells.size() == 5);
  CHECK(partial.res.square_n == 8);
}

TEST_CASE("emitters write the full artifact set") {
  namespace fs = std::filesystem;
  auto cfg = tiny_config();
  auto recs = run_sweep(cfg);
  auto dir = fs::temp_directory_path() / "steklov_emit_test";
  fs::create_directories(dir);
  emit_outputs(cfg, recs, dir.string());

  for (const char* name : {"records.csv", "records.json", "sigma1.svg", "manifest.json"})
    CHECK(fs::exists(dir / name));

  std::ifstream csv(dir / "records.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "ell,sigma1_Sp,mult,sigma1_Sp_prime,sigma1N_A,R_f1,R_f2,bound");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 2);

  auto jrecs = nlohmann::json::parse(std::ifstream(dir / "records.json"));
  REQUIRE(jrecs.is_array());
  CHECK(jrecs.size() == 2);
  CHECK(jrecs[0]["mult"] == 2);

  auto manifest = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
  CHECK(manifest["n_records"] == 2);
  CHECK(manifest["config"]["p"] == 3);
  // hash depends only on the config serialization
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  std::string again;
  {
    char buf[32];
    nlohmann::json jc = cfg;
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(jc.dump())));
    again = buf;
  }
  CHECK(manifest["config_hash"] == again);

  std::stringstream svg;
  svg << std::ifstream(dir / "sigma1.svg").rdbuf();
  CHECK(svg.str().find("<polyline") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("combinatorial audit at p=3 and p=5") {
  Resolution res{4, 8, 8, 1};
  auto a3 = audit_combinatorics(3, res);
  CHECK(a3.p == 3);
  CHECK(a3.block_chi == -1);
  CHECK(a3.block_boundary == 3);
  CHECK(a3.chi == -12);
  CHECK(a3.boundary_components == 6);
  CHECK(a3.genus_euler == 4);
  CHECK(a3.genus_tube == 4);
  CHECK(a3.oracles_agree);
  CHECK(a3.genus_claimed == 7);
  CHECK(a3.regions_off_mid_circles == 3);
  CHECK(a3.adjacent_band_claim);
  CHECK(a3.action_is_automorphism);
  CHECK(a3.kappa_congruence);
  CHECK(!a3.notes.empty());  // genus conflict is surfaced, not asserted

  auto a5 = audit_combinatorics(5, res);
  CHECK(a5.chi == -40);
  CHECK(a5.boundary_components == 10);
  CHECK(a5.genus_euler == 16);
  CHECK(a5.oracles_agree);
  CHECK(!a5.adjacent_band_claim);
  CHECK(a5.action_is_automorphism);
}
