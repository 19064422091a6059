// cpweights: batch CLI over the weight-theory toolkit.
//
// Subcommands: km, tail, certify, whitney, sparse, marcinkiewicz, cf,
// maximal, suite. Exit code 0 on success / all-pass, 1 on acceptance
// failure, 2 on configuration errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cpw/harness.hpp"
#include "cpw/marcinkiewicz.hpp"
#include "cpw/maximal.hpp"
#include "cpw/serde.hpp"
#include "cpw/singular.hpp"
#include "cpw/sparse.hpp"
#include "cpw/weights.hpp"

namespace {

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output path " + out_path);
  out << text;
}

cpw::Weight parse_weight(const std::string& arg) {
  return cpw::weight_from_json(cpw::parse_inline_or_file(arg));
}

cpw::StepFunction1D parse_stepfn(const std::string& arg) {
  return cpw::stepfn_from_json(cpw::parse_inline_or_file(arg));
}

cpw::PsiFunction parse_psi(const std::string& kind, double p) {
  if (kind == "power") return cpw::PsiFunction::power(p);
  if (kind == "phi") return cpw::PsiFunction::phi(p);
  throw std::invalid_argument("psi must be 'power' or 'phi'");
}

cpw::KmRule parse_rule(const std::string& rule, const std::string& h, double p) {
  cpw::KmRule r = cpw::KmRule::geometric_power(p);
  if (rule == "geometric")
    r.ell_kind = cpw::KmRule::EllKind::Geometric;
  else if (rule == "harmonic")
    r.ell_kind = cpw::KmRule::EllKind::Harmonic;
  else
    throw std::invalid_argument("rule must be 'geometric' or 'harmonic' (tables via weight JSON)");
  if (h == "power")
    r.h_kind = cpw::KmRule::HKind::PowerOfEll;
  else if (h == "phi")
    r.h_kind = cpw::KmRule::HKind::PhiOverEll;
  else
    throw std::invalid_argument("h must be 'power' or 'phi'");
  r.validate();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpweights: C_p-weight toolkit (maximal functions, sparse forms, certifiers)"};
  app.require_subcommand(1);

  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 1;
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "json|csv for report-style output")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "seed for randomized menus");

  // km ------------------------------------------------------------------
  auto* km = app.add_subcommand("km", "tabulate a Kahanpaa-Mejlbro weight rule");
  std::string km_rule = "geometric", km_h = "power";
  double km_p = 2.0;
  long long km_kmax = 20;
  km->add_option("--rule", km_rule, "geometric|harmonic");
  km->add_option("--h", km_h, "power|phi");
  km->add_option("--p", km_p, "exponent parameter");
  km->add_option("--kmax", km_kmax, "tabulate |k| <= kmax");

  // tail ----------------------------------------------------------------
  auto* tail = app.add_subcommand("tail", "tail functional and discretized tail of a cube");
  std::string tail_q = "[0,1]", tail_w = R"({"kind":"constant","value":1.0})", tail_psi = "power";
  double tail_p = 2.0;
  tail->add_option("--cube", tail_q, "cube as [lower...,side]");
  tail->add_option("--weight", tail_w, "weight JSON (or @file)");
  tail->add_option("--psi", tail_psi, "power|phi");
  tail->add_option("--p", tail_p, "psi exponent");

  // certify ---------------------------------------------------------------
  auto* cert = app.add_subcommand("certify", "C_psi certifier sweep over a seeded menu");
  std::string cert_w = R"({"kind":"km","km":{"rule":"geometric","h":"power","p":2.0}})";
  std::string cert_psi = "power", cert_mode = "all";
  double cert_p = 2.0, cert_eps = 0.0, cert_gamma = 3.0;
  int cert_count = 12;
  cert->add_option("--weight", cert_w, "weight JSON (or @file)");
  cert->add_option("--psi", cert_psi, "power|phi");
  cert->add_option("--p", cert_p, "psi exponent");
  cert->add_option("--eps", cert_eps, "epsilon (0 = formula default)");
  cert->add_option("--mode", cert_mode, "all|dyadic|dilated");
  cert->add_option("--gamma", cert_gamma, "dilation for mode=dilated");
  cert->add_option("--count", cert_count, "menu size");

  // whitney ---------------------------------------------------------------
  auto* wh = app.add_subcommand("whitney", "Whitney decomposition of an open set");
  std::string wh_in;
  double wh_r = 1.0;
  wh->add_option("--input", wh_in, "OpenSet JSON (or @file)")->required();
  wh->add_option("--R", wh_r, "dilation parameter R >= 1");

  // sparse ----------------------------------------------------------------
  auto* sp = app.add_subcommand("sparse", "CZ sparse collection: build, verify, form-eval");
  std::string sp_f, sp_g;
  double sp_lambda = 2.0, sp_t = 2.0, sp_gamma = 1.0;
  sp->add_option("--f", sp_f, "step function JSON (or @file)")->required();
  sp->add_option("--g", sp_g, "optional second function for the sparse form");
  sp->add_option("--lambda", sp_lambda, "stopping threshold > 1");
  sp->add_option("--t", sp_t, "sparse form exponent t > 1");
  sp->add_option("--gamma-exp", sp_gamma, "sparse form exponent gamma in (0,1]");

  // marcinkiewicz -----------------------------------------------------------
  auto* mk = app.add_subcommand("marcinkiewicz", "level decomposition and M_{k,p,q} integrals");
  std::string mk_f, mk_w = R"({"kind":"constant","value":1.0})";
  double mk_p = 1.0, mk_q = 2.0, mk_R = 1.0;
  int mk_kmin = -8, mk_kmax = 4;
  mk->add_option("--f", mk_f, "step function JSON (or @file)")->required();
  mk->add_option("--weight", mk_w, "weight JSON (or @file)");
  mk->add_option("--p", mk_p, "p exponent");
  mk->add_option("--q", mk_q, "q exponent (> 1)");
  mk->add_option("--kmin", mk_kmin, "lowest level");
  mk->add_option("--kmax", mk_kmax, "highest level");
  mk->add_option("--R", mk_R, "Whitney parameter");

  // cf ---------------------------------------------------------------------
  auto* cf = app.add_subcommand("cf", "Coifman-Fefferman ratio ||Hf|| / ||Mf||");
  std::string cf_f, cf_w = R"({"kind":"constant","value":1.0})";
  double cf_p = 2.0;
  cf->add_option("--f", cf_f, "step function JSON (or @file)")->required();
  cf->add_option("--weight", cf_w, "weight JSON (or @file)");
  cf->add_option("--p", cf_p, "exponent p");

  // maximal ------------------------------------------------------------------
  auto* mx = app.add_subcommand("maximal", "evaluate Mf or M 1_Q on a point list");
  std::string mx_f, mx_q, mx_points;
  mx->add_option("--f", mx_f, "step function JSON (or @file)");
  mx->add_option("--cube", mx_q, "cube [lower...,side] for M 1_Q");
  mx->add_option("--points", mx_points, "comma-separated evaluation points")->required();

  // suite ----------------------------------------------------------------------
  auto* su = app.add_subcommand("suite", "run an experiment battery");
  std::string su_name = "acceptance", su_config;
  su->add_option("--name", su_name, "acceptance|km-divergence|cf-sweep|empty");
  su->add_option("--config", su_config, "config JSON file (overrides --name)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (km->parsed()) {
      cpw::KmRule rule = parse_rule(km_rule, km_h, km_p);
      cpw::Weight w = cpw::km_weight_1d(rule);
      std::string out = "k,ell,h,hole_mass,island_mass\n";
      for (long long k = -km_kmax; k <= km_kmax; ++k) {
        double mass = rule.h(k) * rule.ell(k);
        double island = w.integrate_cube(cpw::km_island_cube(k)).value;
        out += std::to_string(k) + "," + num17(rule.ell(k)) + "," + num17(rule.h(k)) + "," +
               num17(mass) + "," + num17(island) + "\n";
      }
      emit(out, out_path);
    } else if (tail->parsed()) {
      cpw::Cube q = cpw::cube_from_json(cpw::json::parse(tail_q));
      cpw::Weight w = parse_weight(tail_w);
      cpw::PsiFunction psi = parse_psi(tail_psi, tail_p);
      auto t = cpw::tail_functional(q, w, psi);
      cpw::json j;
      j["tail_functional"] = {{"value", t.value}, {"error", t.error}, {"finite", t.finite}};
      if (!t.note.empty()) j["tail_functional"]["note"] = t.note;
      if (tail_psi == "power" && tail_p > 1.0) {
        auto d = cpw::tail_discretized(q, w, tail_p);
        j["tail_discretized"] = {{"value", d.value}, {"error", d.error}, {"finite", d.finite}};
      }
      emit(j.dump(2) + "\n", out_path);
    } else if (cert->parsed()) {
      cpw::Weight w = parse_weight(cert_w);
      cpw::PsiFunction psi = parse_psi(cert_psi, cert_p);
      double eps = cert_eps > 0 ? cert_eps : cpw::default_epsilon(1, cert_p);
      cpw::Rng rng(seed);
      std::vector<cpw::CertifyPair> menu;
      for (int i = 0; i < cert_count; ++i) {
        double side = rng.log_uniform(0.25, 8.0);
        double lo = rng.uniform(-12.0, 12.0);
        menu.push_back({cpw::Cube({lo}, side), cpw::OpenSet::intervals({{lo, lo + side / 2}})});
      }
      cpw::CertifyMode mode = cert_mode == "dyadic"    ? cpw::CertifyMode::Dyadic
                              : cert_mode == "dilated" ? cpw::CertifyMode::Dilated
                                                       : cpw::CertifyMode::All;
      auto res = cpw::cpsi_certify(w, psi, eps, menu, mode, cert_gamma);
      std::string csv = "pair,q_lower,q_side,e_measure,ratio\n";
      for (const auto& row : res.rows)
        csv += std::to_string(row.pair_index) + "," + num17(row.q_lower) + "," + num17(row.q_side) +
               "," + num17(row.e_measure) + "," + num17(row.ratio) + "\n";
      cpw::json summary{{"c_star", res.c_star},
                        {"argmax_pair", res.argmax},
                        {"eps", eps},
                        {"mode", cert_mode},
                        {"seed", seed}};
      if (format == "json") {
        summary["rows_csv"] = csv;
        emit(summary.dump(2) + "\n", out_path);
      } else {
        emit(csv + "# summary: " + summary.dump() + "\n", out_path);
      }
    } else if (wh->parsed()) {
      cpw::OpenSet omega = cpw::openset_from_json(cpw::parse_inline_or_file(wh_in));
      auto cubes = cpw::whitney(omega, wh_r);
      auto rep = cpw::whitney_validate(omega, cubes, wh_r);
      cpw::json j;
      j["cubes"] = cpw::json::array();
      for (const auto& q : cubes) j["cubes"].push_back(cpw::cube_to_json(q));
      j["validator"] = {{"disjoint", rep.disjoint},
                        {"coverage_error_rel", rep.coverage_error_rel},
                        {"ratio_min", rep.ratio_min},
                        {"ratio_max", rep.ratio_max},
                        {"ratio_in_window", rep.ratio_in_window},
                        {"max_overlap", rep.max_overlap},
                        {"overlap_vanishes_outside", rep.overlap_vanishes_outside},
                        {"cube_count", rep.cube_count}};
      emit(j.dump(2) + "\n", out_path);
    } else if (sp->parsed()) {
      auto f = parse_stepfn(sp_f);
      auto hull = f.support_hull();
      if (!hull) throw std::invalid_argument("sparse: f vanishes");
      auto roots = cpw::dyadic_cover(cpw::Cube::interval(hull->first, hull->second));
      auto s = cpw::cz_sparse(f, roots, sp_lambda);
      auto chk = cpw::verify_sparse(s, 1.0 - 1.0 / sp_lambda);
      std::string csv = "cube_lower,cube_side,exceptional_measure,ratio\n";
      for (const auto& e : s.entries) {
        cpw::Cube c = e.cube.cube();
        csv += num17(c.lower[0]) + "," + num17(c.side) + "," + num17(e.exceptional_measure()) +
               "," + num17(e.exceptional_measure() / c.volume()) + "\n";
      }
      cpw::json j{{"gamma", s.gamma},
                  {"verified", chk.ok},
                  {"worst_ratio", chk.worst_ratio},
                  {"disjoint", chk.disjoint},
                  {"cubes", s.entries.size()}};
      if (!sp_g.empty())
        j["sparse_form"] = cpw::sparse_form(s, f, parse_stepfn(sp_g), sp_t, sp_gamma);
      emit(csv + "# summary: " + j.dump() + "\n", out_path);
    } else if (mk->parsed()) {
      auto f = parse_stepfn(mk_f);
      cpw::Weight w = parse_weight(mk_w);
      auto dec = cpw::level_decompose(f, mk_kmin, mk_kmax, mk_R);
      std::string csv = "k,omega_measure,cubes,integral,error\n";
      for (int k = mk_kmin; k <= mk_kmax; ++k) {
        auto v = cpw::mkpq_integral(dec, k, mk_p, mk_q, w);
        csv += std::to_string(k) + "," + num17(dec.omega_at(k).measure()) + "," +
               std::to_string(dec.family_at(k).size()) + "," + num17(v.value) + "," +
               num17(v.error) + "\n";
      }
      auto total = cpw::mpq_integral(dec, mk_p, mk_q, w);
      csv += "# mpq_integral: " + num17(total.value) + " +- " + num17(total.error) +
             (total.note.empty() ? "" : " (" + total.note + ")") + "\n";
      emit(csv, out_path);
    } else if (cf->parsed()) {
      auto f = parse_stepfn(cf_f);
      cpw::Weight w = parse_weight(cf_w);
      auto hn = cpw::hilbert_lp_norm(f, cf_p, w);
      auto mm = cpw::maximal_lp_mass(f, cf_p, w);
      double m_norm = std::pow(mm.value, 1.0 / cf_p);
      std::string csv = "hilbert_norm,maximal_norm,ratio\n";
      csv += num17(hn.value) + "," + num17(m_norm) + "," + num17(hn.value / m_norm) + "\n";
      emit(csv, out_path);
    } else if (mx->parsed()) {
      std::vector<double> points;
      std::stringstream ss(mx_points);
      std::string tok;
      while (std::getline(ss, tok, ',')) points.push_back(std::stod(tok));
      std::string csv = "x,value\n";
      if (!mx_f.empty()) {
        auto f = parse_stepfn(mx_f);
        for (double x : points) csv += num17(x) + "," + num17(cpw::m_stepfn_eval(f, x)) + "\n";
      } else if (!mx_q.empty()) {
        cpw::Cube q = cpw::cube_from_json(cpw::json::parse(mx_q));
        for (double x : points) csv += num17(x) + "," + num17(cpw::m_indicator(q, {x})) + "\n";
      } else {
        throw std::invalid_argument("maximal: provide --f or --cube");
      }
      emit(csv, out_path);
    } else if (su->parsed()) {
      cpw::ExperimentConfig cfg;
      if (!su_config.empty()) {
        std::ifstream in(su_config);
        if (!in) throw std::invalid_argument("cannot open config " + su_config);
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = cpw::ExperimentConfig::from_json(cpw::json::parse(buf.str()));
      } else {
        cfg = cpw::preset(su_name);
      }
      cfg.seed = seed;
      auto rep = cpw::run_suite(cfg);
      std::string text = format == "json" ? cpw::report_to_json(rep) : cpw::report_to_csv(rep);
      if (rep.suite == "acceptance") {
        for (const auto& row : rep.rows)
          std::cerr << (row.pass.value_or(false) ? "PASS  " : "FAIL  ") << row.id << " -- "
                    << row.note << "\n";
      }
      emit(text, out_path);
      if (!rep.overall_pass) return 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
