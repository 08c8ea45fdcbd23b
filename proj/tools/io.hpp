#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "orlicz/cech.hpp"
#include "orlicz/forms.hpp"
#include "orlicz/group.hpp"
#include "orlicz/measure.hpp"
#include "orlicz/qi.hpp"
#include "orlicz/simplicial.hpp"
#include "orlicz/young.hpp"

namespace orlicz::io {

using nlohmann::json;

json load_json_file(const std::string& path);
/// Inline JSON, a path to a JSON file, or a shorthand such as "power:2" or "log_damped:2,2".
json parse_phi_argument(const std::string& text);

/// {"kind": "power" | "log_damped" | "tabulated", "params": {...}, "scale": s}
YoungFunction young_from_json(const json& j);
json young_to_json(const YoungFunction& phi);

/// {"atoms": [[id, weight], ...]}; counting measure on n atoms when absent.
MeasureSpace measure_from_json(const json& j, std::size_t n);

/// {"simplices": [[[0], [1]], [[0, 1]]]} per dimension, or {"generator": name, ...}.
SimplicialComplex complex_from_json(const json& j);
json complex_to_json(const SimplicialComplex& X);

/// {"degree": k, "values": [...]} or a bare array (degree taken from the fallback).
Cochain cochain_from_json(const json& j, int fallback_degree);

/// {"map": [...], "quasi_inverse": [...]}
QuasiIsometry qi_from_json(const json& j);

/// {"per_axis": m, "overlap": s} or {"boxes": [{"lo": [...], "hi": [...]}, ...]}
std::vector<CoverBox> cover_from_json(const json& j, const Grid& lattice);

/// {"radius": r, "sharpness": s, "nodes": n}
KernelSpec kernel_from_json(const json& j);
json kernel_to_json(const KernelSpec& spec);

json matrix_to_json(const Eigen::MatrixXd& m);

/// {"domain": "unit_ball", "dim": n, "points": N, "degree": k, "coefficients": [...]};
/// coefficients are point-major, C(n, k) per sample, in the grid's flat order.
DiscreteForm form_from_json(const json& j, const ChartedDomain& domain);
json form_to_json(const DiscreteForm& omega, const std::string& domain_id);

} // namespace orlicz::io
