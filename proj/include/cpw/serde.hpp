#pragma once

#include <string>

#include <json.hpp>

#include "cpw/calculus.hpp"
#include "cpw/geometry.hpp"
#include "cpw/weights.hpp"

namespace cpw {

using json = nlohmann::json;

// Cubes serialize as [lower..., side]; open sets as {"dim": n, "boxes":
// [[lo..., side...]]} (1D boxes are [lower, side]).
json cube_to_json(const Cube& q);
Cube cube_from_json(const json& j);

json openset_to_json(const OpenSet& e);
OpenSet openset_from_json(const json& j);

// {"breakpoints": [...], "values": [...], "left_tail": a, "right_tail": b}
json stepfn_to_json(const StepFunction1D& f);
StepFunction1D stepfn_from_json(const json& j);

// {"kind": "constant"|"step"|"km", ...}; km rules carry
// {"rule": "geometric"|"harmonic"|"table", "h": "power"|"phi"|"table",
//  "p": 2.0, "dim": 1, "ell_table": {...}, "h_table": {...}}
json weight_to_json(const Weight& w);
Weight weight_from_json(const json& j);

// {"kind": "power"|"phi", "p": 2.0}
json psi_to_json(const PsiFunction& psi);
PsiFunction psi_from_json(const json& j);

/// Parses inline JSON or, when the argument starts with '@', the contents of
/// the named file.
json parse_inline_or_file(const std::string& arg);

}  // namespace cpw
