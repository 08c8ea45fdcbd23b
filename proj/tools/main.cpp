#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#define TOML_EXCEPTIONS 1
#include <toml.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "io.hpp"
#include "orlicz/errors.hpp"
#include "scenarios.hpp"

using orlicz::InputError;
using orlicz::cli::json;

namespace {

json load_config(const std::string& path)
{
    if (!std::filesystem::exists(path))
        throw InputError("config file " + path + " does not exist");
    if (std::filesystem::path(path).extension() != ".toml")
        return orlicz::io::load_json_file(path);
    try {
        const toml::table table = toml::parse_file(path);
        std::ostringstream out;
        out << toml::json_formatter{table};
        return json::parse(out.str());
    } catch (const toml::parse_error& e) {
        throw InputError(path + ": " + std::string(e.description()));
    }
}

/// A JSON file, inline JSON, or a generator shorthand such as "torus7" or "cycle:6".
json parse_complex_argument(const std::string& text)
{
    if (!text.empty() && text.front() == '{')
        return json::parse(text);
    if (std::filesystem::exists(text))
        return orlicz::io::load_json_file(text);
    const auto colon = text.find(':');
    json j = {{"generator", text.substr(0, colon)}};
    if (colon == std::string::npos)
        return j;
    std::vector<int> args;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ','))
        args.push_back(std::stoi(item));
    const std::string g = j["generator"];
    if ((g == "torus_grid" || g == "disk_grid") && args.size() == 2) {
        j["m"] = args[0];
        j["n"] = args[1];
    } else if (g == "random_bounded" && args.size() >= 2) {
        j["n"] = args[0];
        j["window"] = args[1];
    } else if (args.size() == 1) {
        j["n"] = args[0];
    } else {
        throw InputError("cannot parse complex " + text);
    }
    return j;
}

json file_or_inline(const std::string& text)
{
    if (!text.empty() && (text.front() == '{' || text.front() == '['))
        return json::parse(text);
    return orlicz::io::load_json_file(text);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Orlicz cohomology scenarios"};
    app.require_subcommand(0, 1);

    std::string config_path, out_path, csv_path;
    std::uint64_t seed = 0;
    double tol = 0, p = 0, kappa = 0, eps = 0;
    int jobs = 0, points = 0, degree = 0, lattice = 0, per_axis = 0, trials = 0, samples = 0, k_max = 0,
        t_nodes = 0, tiles = 0;
    long N = 0, pieces = 0;
    double overlap = 0, radius = 0, horoball = 0;
    std::string phi, complex, theta, model, form;
    std::vector<double> f;

    auto* o_config = app.add_option("--config", config_path, "JSON or TOML scenario config")->check(CLI::ExistingFile);
    auto* o_seed = app.add_option("--seed", seed, "RNG seed (required by randomized scenarios)");
    auto* o_tol = app.add_option("--tol", tol, "main tolerance of the scenario");
    app.add_option("--jobs", jobs, "worker threads for the numerical loops")->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "write the JSON report here instead of stdout");
    app.add_option("--csv", csv_path, "write the scenario's plot series as CSV");

    std::vector<std::pair<CLI::Option*, std::function<void(json&)>>> overrides;
    auto bind = [&](CLI::Option* o, std::function<void(json&)> apply) { overrides.emplace_back(o, std::move(apply)); };
    bind(o_seed, [&](json& c) { c["seed"] = seed; });
    bind(o_tol, [&](json& c) { c["tol"] = tol; });
    bind(app.add_option("--p", p, "exponent of phi"), [&](json& c) {
        c.erase("phi");
        c["p"] = p;
    });
    bind(app.add_option("--kappa", kappa, "log damping of phi"), [&](json& c) {
        c.erase("phi");
        c["kappa"] = kappa;
    });
    bind(app.add_option("--phi", phi, "Young function: JSON, file, power:p or log_damped:p,kappa"),
         [&](json& c) {
             c.erase("p");
             c.erase("kappa");
             c["phi"] = orlicz::io::parse_phi_argument(phi);
         });
    bind(app.add_option("--f", f, "function values, comma separated")->delimiter(','), [&](json& c) { c["f"] = f; });
    bind(app.add_option("--N", N, "truncation length"), [&](json& c) { c["N"] = N; });
    bind(app.add_option("--eps", eps, "neighbourhood width"), [&](json& c) { c["eps"] = eps; });
    bind(app.add_option("--pieces", pieces, "pieces for per-interval norms"), [&](json& c) { c["pieces"] = pieces; });
    bind(app.add_option("--model", model, "flat | half-plane | torus"), [&](json& c) { c["model"] = model; });
    bind(app.add_option("--points,--grid", points, "grid points per axis"), [&](json& c) { c["points"] = points; });
    bind(app.add_option("--degree", degree, "form or cochain degree"), [&](json& c) { c["degree"] = degree; });
    bind(app.add_option("--complex", complex, "complex file, JSON, or generator such as torus7 or cycle:6"),
         [&](json& c) { c["complex"] = parse_complex_argument(complex); });
    bind(app.add_option("--theta", theta, "cochain JSON file"), [&](json& c) { c["theta"] = file_or_inline(theta); });
    bind(app.add_option("--form", form, "form JSON file"), [&](json& c) { c["form"] = file_or_inline(form); });
    bind(app.add_option("--lattice", lattice, "torus lattice points per axis"),
         [&](json& c) { c["lattice"] = lattice; });
    bind(app.add_option("--per-axis", per_axis, "cover boxes per axis"),
         [&](json& c) { c["cover"]["per_axis"] = per_axis; });
    bind(app.add_option("--overlap", overlap, "cover overlap fraction"),
         [&](json& c) { c["cover"]["overlap"] = overlap; });
    bind(app.add_option("--radius", radius, "kernel support half-width"),
         [&](json& c) { c["kernel"]["radius"] = radius; });
    bind(app.add_option("--trials", trials, "random trials"), [&](json& c) { c["trials"] = trials; });
    bind(app.add_option("--samples", samples, "random forms for operator ratios"),
         [&](json& c) { c["samples"] = samples; });
    bind(app.add_option("--k-max", k_max, "top degree for chain maps"), [&](json& c) { c["k_max"] = k_max; });
    bind(app.add_option("--t-nodes", t_nodes, "Gauss nodes along homotopy paths"),
         [&](json& c) { c["t_nodes"] = t_nodes; });
    bind(app.add_option("--tiles", tiles, "tiles per axis for piecewise norms"), [&](json& c) { c["tiles"] = tiles; });
    bind(app.add_option("--horoball", horoball, "horoball threshold for relative preservation"),
         [&](json& c) { c["horoball"] = horoball; });

    for (const auto& name : orlicz::cli::scenario_names())
        app.add_subcommand(name, "run the " + name + " scenario")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
#ifdef _OPENMP
        if (jobs > 0)
            omp_set_num_threads(jobs);
#endif
        json config = o_config->count() ? load_config(config_path) : json::object();
        std::string scenario = config.value("scenario", std::string());
        config.erase("scenario");
        if (!app.get_subcommands().empty())
            scenario = app.get_subcommands().front()->get_name();
        if (scenario.empty())
            throw InputError("name a scenario: " + [] {
                std::string s;
                for (const auto& n : orlicz::cli::scenario_names())
                    s += (s.empty() ? "" : ", ") + n;
                return s;
            }());
        for (auto& [opt, apply] : overrides)
            if (opt->count())
                apply(config);

        const auto report = orlicz::cli::run_scenario(scenario, config);
        const std::string text = report.data.dump(2) + "\n";
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream(out_path) << text;
        }
        if (!csv_path.empty() && !report.csv_header.empty())
            std::ofstream(csv_path) << report.csv();
        if (!report.pass()) {
            for (const auto& [name, ok] : report.data["invariants"].items())
                if (!ok.get<bool>())
                    std::cerr << "invariant failed: " << name << "\n";
            return 1;
        }
        return 0;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 2;
}
