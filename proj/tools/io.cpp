#include "io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz::io {

json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

json parse_phi_argument(const std::string& text)
{
    if (!text.empty() && text.front() == '{')
        return json::parse(text);
    if (std::filesystem::exists(text))
        return load_json_file(text);
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw InputError("phi must be JSON, a file, or kind:params");
    const std::string kind = text.substr(0, colon);
    std::vector<double> args;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ','))
        args.push_back(std::stod(item));
    if (kind == "power" && args.size() == 1)
        return {{"kind", "power"}, {"params", {{"p", args[0]}}}};
    if (kind == "log_damped" && args.size() == 2)
        return {{"kind", "log_damped"}, {"params", {{"p", args[0]}, {"kappa", args[1]}}}};
    throw InputError("unknown phi shorthand " + text);
}

YoungFunction young_from_json(const json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    const json params = j.value("params", json::object());
    YoungFunction phi = [&] {
        if (kind == "power")
            return YoungFunction::power(params.at("p").get<double>());
        if (kind == "log_damped")
            return YoungFunction::log_damped(params.at("p").get<double>(), params.at("kappa").get<double>());
        if (kind == "tabulated")
            return YoungFunction::tabulated(params.at("knots").get<std::vector<double>>(),
                                            params.at("values").get<std::vector<double>>());
        throw InputError("unknown Young function kind " + kind);
    }();
    if (j.contains("scale"))
        phi = phi.scaled(j.at("scale").get<double>());
    return phi;
}

json young_to_json(const YoungFunction& phi)
{
    json j;
    switch (phi.kind()) {
    case YoungFunction::Kind::Power:
        j = {{"kind", "power"}, {"params", {{"p", phi.exponent()}}}};
        break;
    case YoungFunction::Kind::LogDamped:
        j = {{"kind", "log_damped"}, {"params", {{"p", phi.exponent()}, {"kappa", phi.kappa()}}}};
        break;
    case YoungFunction::Kind::Tabulated:
        j = {{"kind", "tabulated"}, {"params", {{"knots", phi.knots()}, {"values", phi.values()}}}};
        break;
    }
    if (phi.scale() != 1.0)
        j["scale"] = phi.scale();
    return j;
}

MeasureSpace measure_from_json(const json& j, std::size_t n)
{
    if (!j.contains("atoms"))
        return MeasureSpace::counting(n);
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms"))
        atoms.push_back({a.at(0).get<std::int64_t>(), a.at(1).get<double>()});
    if (atoms.size() != n)
        throw InputError("atom count differs from the function length");
    return MeasureSpace(std::move(atoms));
}

SimplicialComplex complex_from_json(const json& j)
{
    if (j.contains("simplices"))
        return SimplicialComplex::from_levels(j.at("simplices").get<std::vector<std::vector<Simplex>>>());
    const std::string g = j.at("generator").get<std::string>();
    if (g == "cycle")
        return complexes::cycle(j.at("n").get<int>());
    if (g == "path")
        return complexes::path(j.at("n").get<int>());
    if (g == "filled_triangle")
        return complexes::filled_triangle();
    if (g == "torus7")
        return complexes::torus7();
    if (g == "torus_grid")
        return complexes::torus_grid(j.at("m").get<int>(), j.at("n").get<int>());
    if (g == "disk_grid")
        return complexes::disk_grid(j.at("m").get<int>(), j.at("n").get<int>());
    if (g == "random_tree")
        return complexes::random_tree(j.at("n").get<int>(), j.value("seed", std::uint64_t{1}));
    if (g == "random_bounded")
        return complexes::random_bounded(j.at("n").get<int>(), j.at("window").get<int>(),
                                         j.value("seed", std::uint64_t{1}));
    throw InputError("unknown complex generator " + g);
}

json complex_to_json(const SimplicialComplex& X)
{
    json levels = json::array();
    for (int k = 0; k <= X.dim(); ++k)
        levels.push_back(X.simplices(k));
    return {{"simplices", levels}};
}

Cochain cochain_from_json(const json& j, int fallback_degree)
{
    if (j.is_array())
        return Cochain{fallback_degree, j.get<std::vector<double>>()};
    return Cochain{j.value("degree", fallback_degree), j.at("values").get<std::vector<double>>()};
}

QuasiIsometry qi_from_json(const json& j)
{
    QuasiIsometry F;
    F.map = j.at("map").get<std::vector<int>>();
    if (j.contains("quasi_inverse"))
        F.quasi_inverse = j.at("quasi_inverse").get<std::vector<int>>();
    return F;
}

std::vector<CoverBox> cover_from_json(const json& j, const Grid& lattice)
{
    if (j.contains("boxes")) {
        std::vector<CoverBox> boxes;
        for (const auto& b : j.at("boxes"))
            boxes.push_back({b.at("lo").get<std::vector<double>>(), b.at("hi").get<std::vector<double>>()});
        return boxes;
    }
    return uniform_cover(lattice, j.value("per_axis", 4), j.value("overlap", 0.25));
}

KernelSpec kernel_from_json(const json& j)
{
    KernelSpec s;
    s.radius = j.value("radius", s.radius);
    s.sharpness = j.value("sharpness", s.sharpness);
    s.nodes = j.value("nodes", s.nodes);
    return s;
}

json kernel_to_json(const KernelSpec& spec)
{
    return {{"radius", spec.radius}, {"sharpness", spec.sharpness}, {"nodes", spec.nodes}};
}

json matrix_to_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(m.cols());
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row[c] = m(r, c);
        rows.push_back(row);
    }
    return rows;
}

DiscreteForm form_from_json(const json& j, const ChartedDomain& domain)
{
    const int k = j.at("degree").get<int>();
    const Grid& grid = domain.grid;
    if (k < 0 || k > grid.dim())
        throw InputError("form degree outside 0..n");
    if (j.contains("dim") && j.at("dim").get<int>() != grid.dim())
        throw InputError("form dimension does not match the domain");
    if (j.contains("points") && j.at("points").get<int>() != grid.points(0))
        throw InputError("form sample count does not match the grid");
    const auto coeffs = j.at("coefficients").get<std::vector<double>>();
    DiscreteForm omega = DiscreteForm::zero(grid, k);
    const std::size_t m = omega.comps.size();
    if (coeffs.size() != m * grid.size())
        throw InputError("form has " + std::to_string(coeffs.size()) + " coefficients, expected " +
                         std::to_string(m * grid.size()));
    for (std::size_t p = 0; p < grid.size(); ++p)
        for (std::size_t c = 0; c < m; ++c)
            omega.comps[c][p] = coeffs[p * m + c];
    return omega;
}

json form_to_json(const DiscreteForm& omega, const std::string& domain_id)
{
    std::vector<double> coeffs;
    coeffs.reserve(omega.comps.size() * omega.grid.size());
    for (std::size_t p = 0; p < omega.grid.size(); ++p)
        for (const auto& comp : omega.comps)
            coeffs.push_back(comp[p]);
    return {{"domain", domain_id}, {"dim", omega.dim()}, {"points", omega.grid.points(0)},
            {"degree", omega.degree}, {"coefficients", coeffs}};
}

} // namespace orlicz::io
