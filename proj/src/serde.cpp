#include "cpw/serde.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cpw {

json cube_to_json(const Cube& q) {
  json j = json::array();
  for (double v : q.lower) j.push_back(v);
  j.push_back(q.side);
  return j;
}

Cube cube_from_json(const json& j) {
  if (!j.is_array() || j.size() < 2) throw std::invalid_argument("cube: expected [lower..., side]");
  std::vector<double> lo;
  for (std::size_t i = 0; i + 1 < j.size(); ++i) lo.push_back(j[i].get<double>());
  return Cube(std::move(lo), j.back().get<double>());
}

json openset_to_json(const OpenSet& e) {
  json boxes = json::array();
  for (const auto& b : e.boxes()) {
    json row = json::array();
    for (double v : b.lo) row.push_back(v);
    for (std::size_t i = 0; i < b.lo.size(); ++i) row.push_back(b.hi[i] - b.lo[i]);
    boxes.push_back(row);
  }
  return json{{"dim", e.dim()}, {"boxes", boxes}};
}

OpenSet openset_from_json(const json& j) {
  int dim = j.at("dim").get<int>();
  std::vector<Box> boxes;
  for (const auto& row : j.at("boxes")) {
    if (!row.is_array() || static_cast<int>(row.size()) != 2 * dim)
      throw std::invalid_argument("openset: box rows must be [lower..., side...]");
    std::vector<double> lo(static_cast<std::size_t>(dim)), hi(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      lo[i] = row[static_cast<std::size_t>(i)].get<double>();
      hi[i] = lo[i] + row[static_cast<std::size_t>(dim + i)].get<double>();
    }
    boxes.emplace_back(std::move(lo), std::move(hi));
  }
  return OpenSet(dim, std::move(boxes));
}

json stepfn_to_json(const StepFunction1D& f) {
  return json{{"breakpoints", f.breakpoints()},
              {"values", f.values()},
              {"left_tail", f.left_tail()},
              {"right_tail", f.right_tail()}};
}

StepFunction1D stepfn_from_json(const json& j) {
  return StepFunction1D(j.at("breakpoints").get<std::vector<double>>(),
                        j.at("values").get<std::vector<double>>(),
                        j.value("left_tail", 0.0), j.value("right_tail", 0.0));
}

namespace {

KmRule km_rule_from_json(const json& j) {
  std::string rule = j.value("rule", "geometric");
  std::string h = j.value("h", "power");
  double p = j.value("p", 2.0);
  int dim = j.value("dim", 1);
  KmRule r;
  if (rule == "geometric")
    r.ell_kind = KmRule::EllKind::Geometric;
  else if (rule == "harmonic")
    r.ell_kind = KmRule::EllKind::Harmonic;
  else if (rule == "table")
    r.ell_kind = KmRule::EllKind::Table;
  else
    throw std::invalid_argument("km rule: unknown ell rule '" + rule + "'");
  if (h == "power")
    r.h_kind = KmRule::HKind::PowerOfEll;
  else if (h == "phi")
    r.h_kind = KmRule::HKind::PhiOverEll;
  else if (h == "table")
    r.h_kind = KmRule::HKind::Table;
  else
    throw std::invalid_argument("km rule: unknown h rule '" + h + "'");
  r.p = p;
  r.dim = dim;
  if (j.contains("ell_table"))
    for (const auto& [k, v] : j.at("ell_table").items()) r.ell_table[std::stoll(k)] = v.get<double>();
  if (j.contains("h_table"))
    for (const auto& [k, v] : j.at("h_table").items()) r.h_table[std::stoll(k)] = v.get<double>();
  r.validate();
  return r;
}

json km_rule_to_json(const KmRule& r) {
  json j;
  j["rule"] = r.ell_kind == KmRule::EllKind::Geometric   ? "geometric"
              : r.ell_kind == KmRule::EllKind::Harmonic ? "harmonic"
                                                        : "table";
  j["h"] = r.h_kind == KmRule::HKind::PowerOfEll   ? "power"
           : r.h_kind == KmRule::HKind::PhiOverEll ? "phi"
                                                   : "table";
  j["p"] = r.p;
  j["dim"] = r.dim;
  if (!r.ell_table.empty()) {
    json t;
    for (const auto& [k, v] : r.ell_table) t[std::to_string(k)] = v;
    j["ell_table"] = t;
  }
  if (!r.h_table.empty()) {
    json t;
    for (const auto& [k, v] : r.h_table) t[std::to_string(k)] = v;
    j["h_table"] = t;
  }
  if (r.power_scale != 1.0) j["power_scale"] = r.power_scale;
  return j;
}

}  // namespace

json weight_to_json(const Weight& w) {
  switch (w.kind()) {
    case Weight::Kind::Step:
      return json{{"kind", "step"}, {"fn", stepfn_to_json(w.step_fn())}};
    case Weight::Kind::Km1d:
      return json{{"kind", "km"}, {"km", km_rule_to_json(w.km_rule())}};
    case Weight::Kind::KmNd:
      return json{{"kind", "km"}, {"km", km_rule_to_json(w.km_rule())}, {"dim", w.dim()}};
    default:
      throw std::invalid_argument("weight_to_json: kind not serializable");
  }
}

Weight weight_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return Weight::constant(j.value("value", 1.0));
  if (kind == "step") return Weight::step(stepfn_from_json(j.at("fn")));
  if (kind == "km") {
    KmRule rule = km_rule_from_json(j.at("km"));
    int dim = j.value("dim", rule.dim);
    if (rule.power_scale == 1.0 && j.at("km").contains("power_scale"))
      rule.power_scale = j.at("km").at("power_scale").get<double>();
    return dim == 1 ? km_weight_1d(rule) : km_weight_nd(rule, dim);
  }
  throw std::invalid_argument("weight: unknown kind '" + kind + "'");
}

json psi_to_json(const PsiFunction& psi) {
  json j;
  j["kind"] = psi.kind() == PsiFunction::Kind::Power ? "power"
              : psi.kind() == PsiFunction::Kind::PhiP ? "phi"
                                                      : "custom";
  j["p"] = psi.exponent();
  return j;
}

PsiFunction psi_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  double p = j.value("p", 2.0);
  if (kind == "power") return PsiFunction::power(p);
  if (kind == "phi") return PsiFunction::phi(p);
  throw std::invalid_argument("psi: unknown kind '" + kind + "'");
}

json parse_inline_or_file(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw std::invalid_argument("cannot open file: " + arg.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    return json::parse(ss.str());
  }
  return json::parse(arg);
}

}  // namespace cpw
