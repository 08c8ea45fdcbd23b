#include <doctest.h>

#include <stdexcept>

#include "io.hpp"
#include "orlicz/errors.hpp"
#include "scenarios.hpp"

using namespace orlicz;
using cli::json;

namespace {

json stripped(json report)
{
    report.erase("wall_time_s");
    return report;
}

} // namespace

TEST_CASE("norm scenario")
{
    const auto r = cli::run_scenario("norm", {{"p", 2.0}, {"f", {3.0, 4.0}}});
    CHECK(r.data["values"]["norm"].get<double>() == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(r.pass());
    CHECK(r.data["scenario"] == "norm");
    CHECK(r.data.contains("wall_time_s"));

    const auto weighted = cli::run_scenario("norm", {{"p", 2.0}, {"f", {1.0, 1.0}}, {"atoms", {{0, 4.0}, {1, 5.0}}}});
    CHECK(weighted.data["values"]["norm"].get<double>() == doctest::Approx(3.0).epsilon(1e-10));

    const auto damped = cli::run_scenario("norm", {{"phi", io::parse_phi_argument("log_damped:2,2")}, {"f", {1.0}}});
    CHECK(damped.pass());
    CHECK_FALSE(damped.data.contains("residuals"));
}

TEST_CASE("every asserted invariant carries a boolean verdict")
{
    const auto r = cli::run_scenario("cohomology", json::object());
    REQUIRE(r.data.contains("invariants"));
    for (const auto& [name, v] : r.data["invariants"].items())
        CHECK(v.is_boolean());
    CHECK(r.data["values"]["dims"] == json({1, 2, 1}));
    CHECK(r.data["values"]["euler_characteristic"] == 0);

    cli::Report failing;
    failing.check("a", true);
    failing.check("b", false);
    CHECK_FALSE(failing.pass());
}

TEST_CASE("bourdon scenario flags")
{
    const auto r = cli::run_scenario("bourdon", {{"p", 2.0}, {"kappa", 2.0}, {"N", 100}, {"pieces", 2000},
                                                 {"cauchy_start", 1000}, {"cauchy_tol", 1e-3}});
    CHECK(r.data["invariants"]["divergent_global"] == true);
    CHECK(r.data["invariants"]["finite_piecewise"] == true);
    CHECK_FALSE(r.csv_rows.empty());
    CHECK(r.csv().rfind("N,modular\n", 0) == 0);
}

TEST_CASE("zigzag scenario on the torus")
{
    const auto r = cli::run_scenario("zigzag", {{"model", "torus"}, {"lattice", 48}});
    CHECK(r.data["values"]["dim_H1"] == 2);
    CHECK(r.data["invariants"]["roundtrip"] == true);
    CHECK(r.pass());
    CHECK_THROWS_AS(cli::run_scenario("zigzag", {{"model", "sphere"}}), InputError);
}

TEST_CASE("reruns are identical apart from wall time")
{
    const json config = {{"seed", 5}, {"complex", {{"generator", "torus_grid"}, {"m", 3}, {"n", 3}}}};
    const auto a = cli::run_scenario("reduced", config);
    const auto b = cli::run_scenario("reduced", config);
    CHECK(stripped(a.data).dump() == stripped(b.data).dump());
    const auto c = cli::run_scenario("reduced", {{"seed", 6}, {"complex", config["complex"]}});
    CHECK(stripped(a.data).dump() != stripped(c.data).dump());
}

TEST_CASE("configuration errors")
{
    CHECK_THROWS_AS(cli::run_scenario("nonsense", json::object()), InputError);
    CHECK_THROWS_AS(cli::run_scenario("reduced", json::object()), InputError);   // seed missing
    CHECK_THROWS_AS(cli::run_scenario("poincare", json::object()), InputError);  // seed missing
    CHECK_THROWS_AS(cli::run_scenario("norm", {{"f", {1.0}}, {"tol", -1.0}}), InputError);
    CHECK_THROWS_AS(cli::run_scenario("convolve", {{"model", "torus"}, {"seed", 1}}), InputError);
    CHECK_THROWS_AS(io::load_json_file("/nonexistent/config.json"), InputError);
    CHECK_THROWS_AS(io::parse_phi_argument("cubic:3"), InputError);
    CHECK_THROWS_AS(cli::run_scenario("cohomology", {{"complex", {{"generator", "klein"}}}}), InputError);
}

TEST_CASE("form files round trip")
{
    const auto dom = ChartedDomain::unit_ball(2, 16);
    const auto omega = DiscreteForm::sample(dom.grid, 1, [](const double* x, double* o) {
        o[0] = x[0] * x[1];
        o[1] = x[0] - x[1];
    });
    const json j = io::form_to_json(omega, "unit_ball");
    const auto back = io::form_from_json(j, dom);
    CHECK(back.comps == omega.comps);
    CHECK_THROWS_AS(io::form_from_json(j, ChartedDomain::unit_ball(2, 17)), InputError);

    const auto r = cli::run_scenario("poincare", {{"form", j}, {"points", 16}, {"tol", 0.5}});
    CHECK(r.data["invariants"].contains("homotopy_degree_1"));
}
