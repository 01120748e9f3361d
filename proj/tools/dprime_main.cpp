// Batch front end: config-driven evolution snapshots, convergence sweeps,
// bound tabulation and the invariant suite.
//
// Exit codes: 0 ok, 1 failed checks, 2 config errors, 3 quadrature
// diagnostics, 4 inadmissible sweep times.

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "dprime/checks.hpp"
#include "dprime/classical.hpp"
#include "dprime/experiments.hpp"

using nlohmann::json;
using namespace dprime;

namespace {

struct OutputSpec {
    std::string path = "-";
    std::string format = "csv";
};

struct RunConfig {
    ModelParams model;
    PhasePoint initial{};
    RegimeParams regime;
    double grid_x_max = 0.0;  // 0 -> automatic rule
    int grid_n = 4096;
    QuadratureOptions quad;
    std::vector<double> sweep_hbar;
    std::vector<double> sweep_times;
    SweepKind sweep_kind = SweepKind::Dynamics;
    OutputSpec output;
    json resolved;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

double need_number(const json& j, const std::string& path) {
    const json* cur = &j;
    std::string walked;
    std::istringstream keys(path);
    std::string key;
    while (std::getline(keys, key, '.')) {
        walked = walked.empty() ? key : walked + "." + key;
        if (!cur->contains(key)) throw ConfigError(walked + ": missing required field");
        cur = &(*cur)[key];
    }
    if (!cur->is_number()) throw ConfigError(path + ": must be a number");
    return cur->get<double>();
}

double number_or(const json& j, const std::string& section, const std::string& key,
                 double fallback) {
    if (!j.contains(section) || !j[section].contains(key)) return fallback;
    const json& v = j[section][key];
    if (!v.is_number()) throw ConfigError(section + "." + key + ": must be a number");
    return v.get<double>();
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    RunConfig cfg;
    cfg.model.hbar = need_number(j, "model.hbar");
    cfg.model.mass = need_number(j, "model.mass");
    cfg.model.beta = need_number(j, "model.beta");
    cfg.model.sigma0 = need_number(j, "model.sigma0");
    try {
        cfg.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    cfg.initial.q = need_number(j, "initial.q");
    cfg.initial.p = need_number(j, "initial.p");

    cfg.regime.lambda = number_or(j, "regime", "lambda", 0.1);
    cfg.regime.c0 = number_or(j, "regime", "c0", 3.0);
    if (j.contains("regime") && j["regime"].contains("eta_rule")) {
        const json& rule = j["regime"]["eta_rule"];
        if (rule.is_string() && rule.get<std::string>() == "scaling") {
            cfg.regime.eta_rule.scaling = true;
        } else if (rule.is_number()) {
            cfg.regime.eta_rule.scaling = false;
            cfg.regime.eta_rule.fixed_eta = rule.get<double>();
        } else {
            throw ConfigError("regime.eta_rule: must be \"scaling\" or a number in (0,1)");
        }
    }
    try {
        cfg.regime.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("regime: ") + e.what());
    }

    cfg.grid_x_max = number_or(j, "grid", "x_max", 0.0);
    cfg.grid_n = static_cast<int>(number_or(j, "grid", "n", 4096.0));
    if (cfg.grid_n < 2) throw ConfigError("grid.n: must be >= 2");

    cfg.quad.window_sigmas = number_or(j, "quad", "window_sigmas", 12.0);
    cfg.quad.nk_cap = static_cast<long>(number_or(j, "quad", "nk_cap", 1 << 21));
    if (cfg.quad.window_sigmas <= 0.0) throw ConfigError("quad.window_sigmas: must be > 0");
    if (cfg.quad.nk_cap < 16) throw ConfigError("quad.nk_cap: must be >= 16");

    if (j.contains("sweep")) {
        const json& sw = j["sweep"];
        if (sw.contains("hbar_values")) {
            if (!sw["hbar_values"].is_array())
                throw ConfigError("sweep.hbar_values: must be an array of numbers");
            for (const auto& v : sw["hbar_values"]) {
                if (!v.is_number() || v.get<double>() <= 0.0)
                    throw ConfigError("sweep.hbar_values: entries must be positive numbers");
                cfg.sweep_hbar.push_back(v.get<double>());
            }
        }
        if (sw.contains("times")) {
            if (!sw["times"].is_array())
                throw ConfigError("sweep.times: must be an array of numbers");
            for (const auto& v : sw["times"]) {
                if (!v.is_number()) throw ConfigError("sweep.times: entries must be numbers");
                cfg.sweep_times.push_back(v.get<double>());
            }
        }
        if (sw.contains("kind")) {
            if (!sw["kind"].is_string())
                throw ConfigError("sweep.kind: must be a string");
            const auto kind = sweep_kind_from(sw["kind"].get<std::string>());
            if (!kind)
                throw ConfigError(
                    "sweep.kind: must be one of dynamics, waveop+, waveop-, scatter");
            cfg.sweep_kind = *kind;
        }
    }
    if (j.contains("output")) {
        if (j["output"].contains("path")) cfg.output.path = j["output"]["path"].get<std::string>();
        if (j["output"].contains("format"))
            cfg.output.format = j["output"]["format"].get<std::string>();
    }
    if (cfg.output.format != "csv" && cfg.output.format != "json")
        throw ConfigError("output.format: must be csv or json");

    // resolved config snapshot (defaults filled in) for provenance headers
    cfg.resolved = json{
        {"model",
         {{"hbar", cfg.model.hbar},
          {"mass", cfg.model.mass},
          {"beta", cfg.model.beta},
          {"sigma0", cfg.model.sigma0}}},
        {"initial", {{"q", cfg.initial.q}, {"p", cfg.initial.p}}},
        {"regime",
         {{"lambda", cfg.regime.lambda},
          {"c0", cfg.regime.c0},
          {"eta_rule", cfg.regime.eta_rule.scaling
                           ? json("scaling")
                           : json(cfg.regime.eta_rule.fixed_eta)}}},
        {"grid", {{"x_max", cfg.grid_x_max}, {"n", cfg.grid_n}}},
        {"quad", {{"window_sigmas", cfg.quad.window_sigmas}, {"nk_cap", cfg.quad.nk_cap}}},
        {"sweep",
         {{"hbar_values", cfg.sweep_hbar},
          {"times", cfg.sweep_times},
          {"kind", to_string(cfg.sweep_kind)}}},
        {"output", {{"path", cfg.output.path}, {"format", cfg.output.format}}},
    };
    return cfg;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, double>> trailer;
};

void write_output(const RunConfig& cfg, const std::string& command, const Table& table,
                  const std::string& out_override) {
    const std::string path = out_override.empty() ? cfg.output.path : out_override;
    std::ostringstream body;
    if (cfg.output.format == "csv") {
        body << "# dprime " << command << "\n";
        body << "# config: " << cfg.resolved.dump() << "\n";
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            body << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                body << fmt(row[c]) << (c + 1 < row.size() ? "," : "\n");
        }
        if (!table.trailer.empty()) {
            body << "# fit:";
            for (const auto& [k, v] : table.trailer) body << " " << k << "=" << fmt(v);
            body << "\n";
        }
    } else {
        json out;
        out["command"] = command;
        out["config"] = cfg.resolved;
        out["columns"] = table.columns;
        out["data"] = table.rows;
        if (!table.trailer.empty()) {
            json fitj;
            for (const auto& [k, v] : table.trailer) fitj[k] = v;
            out["fit"] = fitj;
        }
        body << out.dump(2) << "\n";
    }
    if (path == "-") {
        std::cout << body.str();
    } else {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file: " + path);
        f << body.str();
    }
}

GridSpec pick_grid(const RunConfig& cfg, double t, SweepKind kind) {
    if (cfg.grid_x_max > 0.0) return GridSpec::symmetric(cfg.grid_x_max, cfg.grid_n);
    const GridSpec automatic = experiment_grid(cfg.model, cfg.initial, t, kind, cfg.quad);
    return GridSpec::symmetric(automatic.x_max, std::max(automatic.n, cfg.grid_n));
}

int cmd_evolve(const RunConfig& cfg, double t, const std::string& out_override) {
    const CoherentState psi = CoherentState::initial(cfg.model, cfg.initial);
    const GridSpec grid = pick_grid(cfg, t, SweepKind::Dynamics);
    const WaveSample exact = evolve_exact(cfg.model, psi, t, grid, cfg.quad);
    const WaveSample semi = semiclassical_dynamics(cfg.model, psi, t, grid);
    Table table;
    table.columns = {"x",           "re_psi_exact", "im_psi_exact", "abs2_exact",
                     "re_psi_semi", "im_psi_semi",  "abs2_semi",    "abs_diff"};
    table.rows.reserve(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const Complex a = exact.values[i], b = semi.values[i];
        table.rows.push_back({grid.node(i), a.real(), a.imag(), std::norm(a), b.real(), b.imag(),
                              std::norm(b), std::abs(a - b)});
    }
    write_output(cfg, "evolve", table, out_override);
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_override) {
    const std::vector<double> hbars =
        cfg.sweep_hbar.empty() ? default_hbar_grid() : cfg.sweep_hbar;
    const auto records = run_sweep(cfg.model, cfg.initial, cfg.regime, hbars, cfg.sweep_times,
                                   cfg.sweep_kind, cfg.quad);
    Table table;
    table.columns = {"hbar", "underline_h", "error_l2", "bound_rhs", "t", "kind", "wall_time"};
    for (const auto& r : records) {
        table.rows.push_back({r.hbar, r.underline_h, r.error_l2, r.bound_rhs, r.t,
                              static_cast<double>(static_cast<int>(r.kind)), r.wall_time});
    }
    const SlopeFit fit = fit_slope(records);
    table.trailer = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
    write_output(cfg, "sweep", table, out_override);
    return 0;
}

int cmd_bound(const RunConfig& cfg, const std::string& out_override) {
    const std::vector<double> hbars =
        cfg.sweep_hbar.empty() ? default_hbar_grid() : cfg.sweep_hbar;
    std::vector<double> times = cfg.sweep_times;
    if (times.empty()) {
        const double tc = collision_time(cfg.initial, cfg.model.mass);
        for (int i = 0; i <= 40; ++i) times.push_back(2.0 * tc * i / 40.0);
    }
    Table table;
    table.columns = {"hbar",          "t",               "eta",
                     "eta_term",      "window_term",     "position_tail",
                     "momentum_tail", "projection_term", "collision_term",
                     "total"};
    for (double hbar : hbars) {
        ModelParams params = cfg.model;
        params.hbar = hbar;
        const double uh = underline_h(params, cfg.initial);
        const double eta = cfg.regime.eta_rule.eta(uh, cfg.regime.lambda);
        for (double t : times) {
            const auto terms = dynamics_bound_terms(params, cfg.initial, t, eta);
            double total = 0.0;
            for (double v : terms) total += v;
            table.rows.push_back({hbar, t, eta, terms[0], terms[1], terms[2], terms[3], terms[4],
                                  terms[5], total});
        }
    }
    write_output(cfg, "bound", table, out_override);
    return 0;
}

int cmd_check(const RunConfig& cfg, const std::string& out_override) {
    const auto results = run_invariant_suite(cfg.model, cfg.initial, cfg.quad);
    int failures = 0;
    std::ostringstream report;
    for (const auto& r : results) {
        report << (r.pass ? "[ok]   " : "[FAIL] ") << r.name << " - " << r.detail << "\n";
        if (!r.pass) ++failures;
    }
    report << (failures == 0 ? "all invariants hold\n"
                             : std::to_string(failures) + " invariant(s) failed\n");
    std::cout << report.str();
    if (!out_override.empty() || cfg.output.path != "-") {
        const std::string path = out_override.empty() ? cfg.output.path : out_override;
        std::ofstream f(path, std::ios::binary);
        f << report.str();
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delta-prime point interaction: exact dynamics vs semiclassical approximants"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string format_override;
    int threads = 0;
    double t_arg = 1.0;

    app.add_option("--config", config_path, "path to the JSON run configuration")->required();
    app.add_option("--out", out_override, "output file (overrides output.path; - for stdout)");
    app.add_option("--format", format_override, "csv or json (overrides output.format)");
    app.add_option("--threads", threads, "worker threads (0 = automatic)");

    CLI::App* evolve = app.add_subcommand("evolve", "exact vs semiclassical state at time t");
    evolve->add_option("--t", t_arg, "evolution time")->required();
    CLI::App* sweep = app.add_subcommand("sweep", "convergence sweep over hbar");
    CLI::App* bound = app.add_subcommand("bound", "tabulate the error-bound bracket terms");
    CLI::App* check = app.add_subcommand("check", "run the invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = parse_config(config_path);
        if (!format_override.empty()) {
            if (format_override != "csv" && format_override != "json")
                throw ConfigError("--format: must be csv or json");
            cfg.output.format = format_override;
            cfg.resolved["output"]["format"] = format_override;
        }
        if (threads > 0) omp_set_num_threads(threads);

        if (evolve->parsed()) return cmd_evolve(cfg, t_arg, out_override);
        if (sweep->parsed()) return cmd_sweep(cfg, out_override);
        if (bound->parsed()) return cmd_bound(cfg, out_override);
        if (check->parsed()) return cmd_check(cfg, out_override);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const AdmissibilityError& e) {
        std::cerr << "admissibility error: " << e.what() << "\n";
        return 4;
    } catch (const QuadratureError& e) {
        std::cerr << "quadrature diagnostic: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
