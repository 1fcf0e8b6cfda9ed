// steklov_lab: command-line front end for the discrete Steklov laboratory.
//
//   group     group order, generators, relations check
//   cayley    Cayley-graph statistics (--dot for Graphviz output)
//   reps      character table and irreducibility certificates
//   surface   block / surface combinatorics and genus audit
//   spectrum  Steklov spectrum of S_p (--decompose for isotypic labels)
//   sweep     ell-sweep driven by a JSON config (--config), writes an out dir
//   audit     combinatorial audit report
//
// Output is JSON on stdout unless a subcommand-specific format is requested.
// Exit codes: 0 success, 1 computation failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "steklov/experiments.hpp"

using nlohmann::json;
using namespace steklov;

namespace {

Resolution resolution_from(int n) {
  Resolution r;
  r.square_n = n;
  r.n_t = 2 * n;
  r.n_rho = 4 * n;
  r.pants_level = 2;
  return r;
}

void check_p(int p, bool allow_large) {
  if (!is_prime(p) || p < 3) throw CLI::ValidationError("--p", "p must be an odd prime");
  if (p > 13 && !allow_large)
    throw CLI::ValidationError("--p", "p > 13 is expensive; pass --allow-large to proceed");
}

json group_info(int p) {
  auto ctx = make_context(p);
  auto elem_order = [](const GroupElement& g) {
    GroupElement x = g;
    int n = 1;
    while (!(x.a == 0 && x.b == 1)) {
      x = mul(x, g);
      ++n;
    }
    return n;
  };
  json rels = {{"delta1_order", elem_order(ctx.delta1)},
               {"delta2_order", elem_order(ctx.delta2)},
               {"conjugation", "delta2^-1 delta1 delta2 = delta1^k"}};
  return {{"p", p},
          {"order", ctx.order},
          {"k", ctx.k},
          {"delta1", {ctx.delta1.a, ctx.delta1.b}},
          {"delta2", {ctx.delta2.a, ctx.delta2.b}},
          {"relations", rels}};
}

json cayley_info(int p, bool dot, std::ostream& os) {
  auto ctx = make_context(p);
  auto g = build_cayley(ctx);
  if (dot) {
    os << "digraph cayley {\n";
    for (const auto& e : g.edges)
      os << "  v" << e.src << " -> v" << e.dst << " [color="
         << (e.color == EdgeColor::D1 ? "blue" : "red") << "];\n";
    os << "}\n";
    return json();
  }
  auto part = delta2_cycles(g);
  auto profile = cycle_transition_profile(g, part);
  return {{"p", p},
          {"vertices", g.ctx.order},
          {"edges", g.edges.size()},
          {"connected", is_connected(g)},
          {"delta2_cycles", part.cycles.size()},
          {"transition_profile", profile},
          {"adjacent_band_claim", transitions_within_adjacent_bands(profile)}};
}

json reps_info(int p) {
  auto ctx = make_context(p);
  auto table = character_table(ctx);
  json jt = {{"labels", table.labels},
             {"degrees", table.degrees},
             {"degree_square_sum", table.degree_square_sum()},
             {"class_sizes", table.class_sizes}};
  json certs = json::array();
  for (const auto& rep : all_irreps(ctx)) {
    auto c = irreducibility_certificate(ctx, rep);
    certs.push_back({{"label", rep.label},
                     {"degree", rep.degree},
                     {"character_norm", c.character_norm},
                     {"commutant_dimension", c.commutant_dimension},
                     {"irreducible", c.irreducible}});
  }
  return {{"p", p}, {"character_table", jt}, {"certificates", certs}};
}

json surface_info(int p, double ell, const Resolution& res) {
  auto ctx = make_context(p);
  auto graph = build_cayley(ctx);
  auto pr = make_collar_profile(ell, res.n_rho, res.n_t);
  auto s = assemble_surface(ctx, graph, pr, res);
  auto rep = euler_genus(s);
  return {{"p", p},
          {"ell", ell},
          {"collar_half_width", collar_half_width(ell)},
          {"vertices", s.n_vertices},
          {"edges", s.edges.size()},
          {"faces", s.faces.size()},
          {"boundary_vertices", s.boundary_vertices.size()},
          {"chi", rep.chi},
          {"boundary_components", rep.boundary_count},
          {"genus_euler", rep.genus},
          {"genus_tube", rep.genus_tube},
          {"genus_oracles_agree", rep.oracles_agree},
          {"genus_claimed", rep.paper_genus}};
}

json spectrum_info(int p, double ell, const Resolution& res, int count, bool decompose) {
  auto ctx = make_context(p);
  auto graph = build_cayley(ctx);
  auto pr = make_collar_profile(ell, res.n_rho, res.n_t);
  auto s = assemble_surface(ctx, graph, pr, res);
  auto op = dtn_operator(s);
  auto spec = steklov_spectrum(op);
  auto cluster = sigma1_cluster(spec, 1e-8, 1e-4);

  int keep = count < 0 ? std::min<int>(20, spec.eigenvalues.size())
                       : std::min<int>(count, spec.eigenvalues.size());
  json j = {{"p", p},
            {"ell", ell},
            {"eigenvalues", std::vector<double>(spec.eigenvalues.begin(),
                                                spec.eigenvalues.begin() + keep)},
            {"sigma1", spec.eigenvalues[cluster.front()]},
            {"sigma1_multiplicity", cluster.size()},
            {"max_residual", spec.max_residual}};
  if (decompose) {
    auto report = eigenspace_isotypic(s, op, spec, cluster, ctx, all_irreps(ctx));
    j["isotypic"] = report.multiplicity;
    j["commutation_defect"] = report.commutation_defect;
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Steklov spectra of highly symmetric glued surfaces"};
  app.require_subcommand(1);

  int p = 3, resolution = 4, count = -1;
  double ell = 0.5;
  bool allow_large = false, dot = false, decompose = false, json_out = true;
  std::string config_path, out_dir = "out";

  app.add_flag("--allow-large", allow_large, "permit p > 13");
  app.add_flag("--json,!--no-json", json_out, "JSON output (default on)");

  auto add_p = [&](CLI::App* c) { c->add_option("--p", p, "odd prime p"); };
  auto add_geom = [&](CLI::App* c) {
    add_p(c);
    c->add_option("--ell", ell, "cuff length ell");
    c->add_option("--resolution", resolution,
                  "base resolution n: square_n=n, n_t=2n, n_rho=4n");
  };

  auto* cg = app.add_subcommand("group", "group structure");
  add_p(cg);
  auto* cc = app.add_subcommand("cayley", "Cayley graph");
  add_p(cc);
  cc->add_flag("--dot", dot, "emit Graphviz instead of JSON");
  auto* cr = app.add_subcommand("reps", "irreducible representations");
  add_p(cr);
  auto* cs = app.add_subcommand("surface", "surface combinatorics");
  add_geom(cs);
  auto* csp = app.add_subcommand("spectrum", "Steklov spectrum");
  add_geom(csp);
  csp->add_option("--count", count, "number of eigenvalues to print");
  csp->add_flag("--decompose", decompose, "isotypic decomposition of the sigma1 cluster");
  auto* cw = app.add_subcommand("sweep", "ell sweep from a JSON config");
  cw->add_option("--config", config_path, "JSON config file")->required();
  cw->add_option("--out", out_dir, "output directory");
  auto* ca = app.add_subcommand("audit", "combinatorial audit");
  add_geom(ca);

  CLI11_PARSE(app, argc, argv);

  try {
    json out;
    if (cg->parsed()) {
      check_p(p, allow_large);
      out = group_info(p);
    } else if (cc->parsed()) {
      check_p(p, allow_large);
      out = cayley_info(p, dot, std::cout);
      if (dot) return 0;
    } else if (cr->parsed()) {
      check_p(p, allow_large);
      out = reps_info(p);
    } else if (cs->parsed()) {
      check_p(p, allow_large);
      out = surface_info(p, ell, resolution_from(resolution));
    } else if (csp->parsed()) {
      check_p(p, allow_large);
      out = spectrum_info(p, ell, resolution_from(resolution), count, decompose);
    } else if (ca->parsed()) {
      check_p(p, allow_large);
      out = audit_combinatorics(p, resolution_from(resolution), ell);
    } else if (cw->parsed()) {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "steklov_lab: cannot read config " << config_path << "\n";
        return 2;
      }
      SweepConfig cfg = json::parse(f).get<SweepConfig>();
      check_p(cfg.p, allow_large);
      auto recs = run_sweep(cfg);
      std::filesystem::create_directories(out_dir);
      emit_outputs(cfg, recs, out_dir);
      bool all_ok = true;
      for (const auto& r : recs) all_ok &= r.ok;
      out = {{"out_dir", out_dir}, {"n_records", recs.size()}, {"all_ok", all_ok}};
      if (!all_ok) {
        std::cout << out.dump(2) << "\n";
        return 1;
      }
    }
    if (json_out)
      std::cout << out.dump(2) << "\n";
    else
      std::cout << out.dump() << "\n";
    return 0;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "steklov_lab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "steklov_lab: " << e.what() << "\n";
    return 1;
  }
}
