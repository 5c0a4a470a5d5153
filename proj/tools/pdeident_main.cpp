// Command-line front end: eigenanalysis, pair classification, surface
// sampling, explicit constructions, steady-state shooting, simulation, and
// profile-likelihood inference for 1D linear-in-parameters parabolic models.

#include "pdeident/classify.hpp"
#include "pdeident/elliptic.hpp"
#include "pdeident/errors.hpp"
#include "pdeident/infer.hpp"
#include "pdeident/io.hpp"
#include "pdeident/operators.hpp"
#include "pdeident/solve.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pdeident;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check_keys(const json &j, const std::string &ctx,
                std::initializer_list<const char *> allowed) {
    if (!j.is_object())
        throw ConfigError(ctx + " must be a JSON object");
    for (const auto &item : j.items()) {
        bool ok = false;
        for (const char *k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError("unknown key '" + item.key() + "' in " + ctx);
    }
}

const json &require(const json &j, const std::string &ctx, const char *key) {
    if (!j.contains(key))
        throw ConfigError(ctx + " is missing required key '" + key + "'");
    return j.at(key);
}

double get_number(const json &j, const std::string &ctx, const char *key) {
    const json &v = require(j, ctx, key);
    if (!v.is_number())
        throw ConfigError(ctx + "." + key + " must be a number");
    return v.get<double>();
}

double get_number_or(const json &j, const std::string &ctx, const char *key, double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        throw ConfigError(ctx + "." + key + " must be a number");
    return j.at(key).get<double>();
}

int get_int_or(const json &j, const std::string &ctx, const char *key, int fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number_integer())
        throw ConfigError(ctx + "." + key + " must be an integer");
    return j.at(key).get<int>();
}

std::vector<double> get_array(const json &j, const std::string &ctx, const char *key) {
    const json &v = require(j, ctx, key);
    if (!v.is_array() || v.empty())
        throw ConfigError(ctx + "." + key + " must be a nonempty array of numbers");
    std::vector<double> out;
    for (const auto &e : v) {
        if (!e.is_number())
            throw ConfigError(ctx + "." + key + " must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

json load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config root must be a JSON object");
    if (!j.contains("version") || !j.at("version").is_number_integer() ||
        j.at("version").get<int>() != 1)
        throw ConfigError("config must declare \"version\": 1");
    return j;
}

BoundaryCondition parse_bc(const json &cfg) {
    const json &j = require(cfg, "config", "bc");
    check_keys(j, "bc", {"kind", "sigma", "length"});
    const json &kind = require(j, "bc", "kind");
    if (!kind.is_string())
        throw ConfigError("bc.kind must be a string");
    const std::string k = kind.get<std::string>();
    if (k == "periodic") {
        if (j.contains("sigma") || j.contains("length"))
            throw ConfigError("bc: periodic conditions take no sigma or length");
        return BoundaryCondition::periodic();
    }
    const double length = get_number_or(j, "bc", "length", 1.0);
    if (k == "dirichlet") {
        if (j.contains("sigma"))
            throw ConfigError("bc: sigma is only valid for robin conditions");
        return BoundaryCondition::dirichlet(length);
    }
    if (k == "neumann") {
        if (j.contains("sigma"))
            throw ConfigError("bc: sigma is only valid for robin conditions");
        return BoundaryCondition::neumann(length);
    }
    if (k == "robin")
        return BoundaryCondition::robin(get_number(j, "bc", "sigma"), length);
    throw ConfigError("bc.kind must be dirichlet, neumann, robin or periodic");
}

OperatorParams parse_operator(const json &cfg, const char *key, bool need_c = true) {
    const json &j = require(cfg, "config", key);
    check_keys(j, key, {"d", "b", "c"});
    OperatorParams p;
    p.d = get_number(j, key, "d");
    p.b = get_number_or(j, key, "b", 0.0);
    p.c = need_c ? get_number(j, key, "c") : get_number_or(j, key, "c", 0.0);
    return p;
}

struct OutputSink {
    fs::path dir;
    bool force = false;

    std::ofstream open(const std::string &name) const {
        fs::create_directories(dir);
        const fs::path p = dir / name;
        if (fs::exists(p) && !force)
            throw ConfigError("refusing to overwrite " + p.string() + " (use --force)");
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw ConfigError("cannot open output file: " + p.string());
        return out;
    }
};

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

std::vector<double> parse_grid(const json &cfg, const char *key,
                               std::vector<double> fallback) {
    if (!cfg.contains(key))
        return fallback;
    const json &j = cfg.at(key);
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto &e : j) {
            if (!e.is_number())
                throw ConfigError(std::string(key) + " must contain only numbers");
            out.push_back(e.get<double>());
        }
        if (out.empty())
            throw ConfigError(std::string(key) + " must be nonempty");
        return out;
    }
    check_keys(j, key, {"min", "max", "count", "scale"});
    const double lo = get_number(j, key, "min");
    const double hi = get_number(j, key, "max");
    const int n = get_int_or(j, key, "count", 81);
    if (n < 2 || !(hi > lo))
        throw ConfigError(std::string(key) + ": need count >= 2 and max > min");
    std::string scale = "linear";
    if (j.contains("scale")) {
        if (!j.at("scale").is_string())
            throw ConfigError(std::string(key) + ".scale must be a string");
        scale = j.at("scale").get<std::string>();
    }
    if (scale == "linear")
        return linspace(lo, hi, n);
    if (scale == "log") {
        if (!(lo > 0.0))
            throw ConfigError(std::string(key) + ": log scale needs min > 0");
        auto g = linspace(std::log10(lo), std::log10(hi), n);
        for (auto &v : g)
            v = std::pow(10.0, v);
        return g;
    }
    throw ConfigError(std::string(key) + ".scale must be linear or log");
}

int run_eigen(const json &cfg, const OutputSink &sink) {
    check_keys(cfg, "config", {"version", "bc", "operator", "n_max"});
    const BoundaryCondition bc = parse_bc(cfg);
    const OperatorParams p = parse_operator(cfg, "operator", false);
    const int n_max = get_int_or(cfg, "config", "n_max", 8);
    const auto pairs = eigenpairs(p.d, p.b, bc, n_max);
    auto out = sink.open("eigen.csv");
    write_eigen_csv(out, pairs);
    return 0;
}

int run_classify(const json &cfg, const OutputSink &sink) {
    check_keys(cfg, "config", {"version", "bc", "a1", "a2", "n_max"});
    const BoundaryCondition bc = parse_bc(cfg);
    const OperatorParams a1 = parse_operator(cfg, "a1");
    const OperatorParams a2 = parse_operator(cfg, "a2");
    const int n_max = get_int_or(cfg, "config", "n_max", 32);
    const PairClassification cls = classify_pair(a1, a2, bc, n_max);
    auto out = sink.open("classification.json");
    out << classification_json(cls);
    std::cout << "verdict: " << to_string(cls.verdict) << '\n';
    return 0;
}

int run_aset(const json &cfg, const OutputSink &sink) {
    check_keys(cfg, "config", {"version", "bc", "n_max", "d_grid", "b_grid"});
    const BoundaryCondition bc = parse_bc(cfg);
    const int n_max = get_int_or(cfg, "config", "n_max", 4);
    const auto d_grid = get_array(cfg, "config", "d_grid");
    const auto b_grid = get_array(cfg, "config", "b_grid");
    const auto samples = indistinguishable_set(bc, n_max, d_grid, b_grid);
    auto out = sink.open("aset.csv");
    write_aset_csv(out, samples);
    return 0;
}

int run_construct(const json &cfg, const OutputSink &sink) {
    check_keys(cfg, "config", {"version", "bc", "a1", "a2", "c0", "system"});
    const BoundaryCondition bc = parse_bc(cfg);
    const OperatorParams a1 = parse_operator(cfg, "a1");
    const OperatorParams a2 = parse_operator(cfg, "a2");
    const double c0 = get_number_or(cfg, "config", "c0", 1.0);
    const NonIdentifiableSolution sol = construct_nonidentifiable(a1, a2, bc, c0);
    auto out = sink.open("construction.json");
    out << construction_json(sol);
    if (cfg.contains("system")) {
        const json &s = cfg.at("system");
        check_keys(s, "system", {"kappa_u", "kappa_v", "delta1", "delta2"});
        const TwoSpeciesConstruction sys = construct_system_nonidentifiable(
            a1, a2, bc, get_number(s, "system", "kappa_u"), get_number(s, "system", "kappa_v"),
            get_number(s, "system", "delta1"), get_number(s, "system", "delta2"));
        auto sout = sink.open("system.json");
        sout << system_construction_json(sys);
    }
    return 0;
}

int run_elliptic(const json &cfg, const OutputSink &sink) {
    check_keys(cfg, "config", {"version", "bc", "p1", "p2", "shoot_range", "n_scan"});
    const BoundaryCondition bc = parse_bc(cfg);
    const auto parse_np = [&cfg](const char *key) {
        const json &j = require(cfg, "config", key);
        check_keys(j, key, {"d", "a", "b"});
        NonlinearParams p;
        p.d = get_number(j, key, "d");
        p.a = get_number(j, key, "a");
        p.b = get_number(j, key, "b");
        return p;
    };
    const NonlinearParams p1 = parse_np("p1");
    const int n_scan = get_int_or(cfg, "config", "n_scan", 4000);
    std::pair<double, double> range = default_shoot_range(p1);
    if (cfg.contains("shoot_range")) {
        const auto r = get_array(cfg, "config", "shoot_range");
        if (r.size() != 2)
            throw ConfigError("shoot_range must be [lo, hi]");
        range = {r[0], r[1]};
    }
    if (cfg.contains("p2")) {
        const NonlinearParams p2 = parse_np("p2");
        const auto verdict = classify_nonlinear_pair(p1, p2, bc, range, n_scan);
        auto out = sink.open("verdict.json");
        out << nonlinear_verdict_json(verdict);
        std::cout << "identifiable: " << (verdict.identifiable ? "true" : "false") << '\n';
        return 0;
    }
    const auto cls = shoot_count(p1.d, Reaction::logistic(p1.a, p1.b), bc, range, n_scan);
    auto out = sink.open("elliptic.json");
    out << elliptic_json(cls);
    for (size_t k = 0; k < cls.solutions.size(); ++k) {
        auto pout = sink.open("profile_" + std::to_string(k) + ".csv");
        write_elliptic_profile_csv(pout, cls.solutions[k]);
    }
    return 0;
}

int run_simulate(const json &cfg, const OutputSink &sink) {
    check_keys(cfg, "config",
               {"version", "bc", "operator", "solver", "ic_coeffs", "reaction", "t_max", "nt",
                "nx"});
    const BoundaryCondition bc = parse_bc(cfg);
    const OperatorParams p = parse_operator(cfg, "operator");
    const json &solver = require(cfg, "config", "solver");
    if (!solver.is_string())
        throw ConfigError("solver must be a string");
    const std::string mode = solver.get<std::string>();
    const double t_max = get_number_or(cfg, "config", "t_max", 1.0);
    const int nt = get_int_or(cfg, "config", "nt", 21);
    const int nx = get_int_or(cfg, "config", "nx", 101);
    if (nt < 2 || nx < 3 || !(t_max > 0.0))
        throw ConfigError("need nt >= 2, nx >= 3 and t_max > 0");
    const auto coeffs = get_array(cfg, "config", "ic_coeffs");

    EigenExpansionIC ic;
    ic.coeffs = coeffs;
    ic.bc = bc;
    const auto t_grid = linspace(0.0, t_max, nt);
    const auto x_grid = fd_grid(bc, nx);

    Field u;
    if (mode == "spectral") {
        if (cfg.contains("reaction"))
            throw ConfigError("spectral solver does not take a reaction block");
        u = solve_linear_spectral(p, bc, ic, x_grid, t_grid);
    } else if (mode == "fd") {
        Reaction reaction = Reaction::logistic(p.c, 0.0);
        if (cfg.contains("reaction")) {
            const json &r = cfg.at("reaction");
            check_keys(r, "reaction", {"a", "b"});
            reaction = Reaction::logistic(get_number(r, "reaction", "a"),
                                          get_number(r, "reaction", "b"));
        }
        const Field ic_field = solve_linear_spectral(p, bc, ic, x_grid, {t_grid.data(), 1});
        std::vector<double> u0(static_cast<size_t>(nx));
        for (int i = 0; i < nx; ++i)
            u0[static_cast<size_t>(i)] = ic_field.values(i, 0);
        u = solve_nonlinear_fd(p.d, p.b, reaction, bc, u0, t_grid, nx);
    } else {
        throw ConfigError("solver must be spectral or fd");
    }
    auto out = sink.open("field.csv");
    write_field_csv(out, u);
    return 0;
}

int run_profile(const json &cfg, const OutputSink &sink, std::optional<std::uint64_t> seed_flag) {
    check_keys(cfg, "config",
               {"version", "truth", "omega", "n_modes", "noise", "seed", "profile_noise",
                "c_grid", "d_grid", "x_obs", "t_obs"});
    const json &truth_j = require(cfg, "config", "truth");
    check_keys(truth_j, "truth", {"c", "d"});
    OperatorParams truth;
    truth.d = get_number(truth_j, "truth", "d");
    truth.b = 0.0;
    truth.c = get_number(truth_j, "truth", "c");

    const double omega = get_number_or(cfg, "config", "omega", 0.3);
    const int n_modes = get_int_or(cfg, "config", "n_modes", 8);
    NoiseModel noise;
    if (cfg.contains("noise")) {
        const json &nj = cfg.at("noise");
        check_keys(nj, "noise", {"sigma", "eta"});
        noise.sigma = get_number_or(nj, "noise", "sigma", 0.3);
        noise.eta = get_number_or(nj, "noise", "eta", 10.0);
    }
    bool profile_noise = false;
    if (cfg.contains("profile_noise")) {
        if (!cfg.at("profile_noise").is_boolean())
            throw ConfigError("profile_noise must be a boolean");
        profile_noise = cfg.at("profile_noise").get<bool>();
    }
    std::uint64_t seed = 0;
    if (cfg.contains("seed")) {
        if (!cfg.at("seed").is_number_unsigned() && !cfg.at("seed").is_number_integer())
            throw ConfigError("seed must be an integer");
        seed = cfg.at("seed").get<std::uint64_t>();
    }
    if (seed_flag)
        seed = *seed_flag;

    const auto x_obs = parse_grid(cfg, "x_obs", default_x_obs());
    const auto t_obs = parse_grid(cfg, "t_obs", default_t_obs());
    const auto c_grid = parse_grid(cfg, "c_grid", default_c_grid());
    const auto d_grid = parse_grid(cfg, "d_grid", default_d_grid());

    const EigenExpansionIC ic = gaussian_ic_coefficients(omega, n_modes, 1.0);
    const Dataset data = generate_dataset(truth, ic, noise, x_obs, t_obs, seed);
    // The likelihood noise model always needs sigma > 0, even for noiseless data.
    NoiseModel model = noise;
    if (model.sigma == 0.0)
        model.sigma = 0.3;
    const ProfileSurface surf =
        profile_likelihood(data, c_grid, d_grid, model, n_modes, profile_noise);

    {
        auto out = sink.open("dataset.csv");
        write_dataset_csv(out, data);
    }
    {
        auto out = sink.open("profile.csv");
        write_profile_csv(out, surf);
    }
    {
        auto out = sink.open("mle.json");
        out << mle_json(surf);
    }
    std::cout << "mle: c=" << format_double(surf.mle.c) << " d=" << format_double(surf.mle.d)
              << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Structural and practical identifiability toolkit for 1D "
                 "reaction-diffusion models"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    bool force = false;
    std::optional<std::uint64_t> seed_flag;
    std::uint64_t seed_value = 0;

    const auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--force", force, "overwrite existing output files");
        sub->add_option("--seed", seed_value, "override the dataset seed");
    };

    CLI::App *sub_eigen = app.add_subcommand("eigen", "tabulate eigenvalues of the operator");
    CLI::App *sub_classify = app.add_subcommand("classify", "classify a parameter pair");
    CLI::App *sub_aset = app.add_subcommand("aset", "sample the indistinguishable surface");
    CLI::App *sub_construct =
        app.add_subcommand("construct", "build a non-identifiable solution");
    CLI::App *sub_elliptic =
        app.add_subcommand("elliptic", "count steady states by shooting");
    CLI::App *sub_simulate = app.add_subcommand("simulate", "solve an initial value problem");
    CLI::App *sub_profile =
        app.add_subcommand("profile", "profile likelihood on synthetic data");
    for (CLI::App *s :
         {sub_eigen, sub_classify, sub_aset, sub_construct, sub_elliptic, sub_simulate,
          sub_profile})
        add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (sub_profile->count("--seed") > 0)
        seed_flag = seed_value;

    try {
        const json cfg = load_config(config_path);
        const OutputSink sink{fs::path(out_dir), force};
        if (*sub_eigen)
            return run_eigen(cfg, sink);
        if (*sub_classify)
            return run_classify(cfg, sink);
        if (*sub_aset)
            return run_aset(cfg, sink);
        if (*sub_construct)
            return run_construct(cfg, sink);
        if (*sub_elliptic)
            return run_elliptic(cfg, sink);
        if (*sub_simulate)
            return run_simulate(cfg, sink);
        if (*sub_profile)
            return run_profile(cfg, sink, seed_flag);
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidDomain &e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidParameter &e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidSigma &e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidScale &e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const SamePoint &e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const Error &e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
