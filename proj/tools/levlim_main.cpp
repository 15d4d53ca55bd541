// levlim: no-trade bands, leverage multipliers, and the trading-cost
// efficient frontier, with closed forms cross-checked by simulation.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levlim/asymptotics.hpp"
#include "levlim/ergodic.hpp"
#include "levlim/free_boundary.hpp"
#include "levlim/frontier.hpp"
#include "levlim/hjb.hpp"
#include "levlim/io.hpp"
#include "levlim/simulate.hpp"

using namespace levlim;
using nlohmann::json;

namespace {

enum class OutputFormat { Csv, Json, Svg };

struct RunConfig {
    std::string command;
    double mu = 0.08;
    double sigma = 0.16;
    double rate = 0.0;
    double gamma = 1.0;
    std::vector<double> epsilons = {0.01};
    std::vector<double> gammas;       // frontier/converge override
    double sharpe = 0.5;
    std::vector<double> sigmas = {0.10, 0.20, 0.50};
    std::vector<double> table_eps = {1e-4, 1e-3, 1e-2};
    SimConfig sim;
    HjbGridSpec hjb;
    bool force = false;
    std::string output_path;
    std::string format = "json";
    int points_per_decade = 8;
};

OutputFormat parse_format(const std::string& f) {
    if (f == "csv") return OutputFormat::Csv;
    if (f == "json") return OutputFormat::Json;
    if (f == "svg") return OutputFormat::Svg;
    throw DomainError("unknown format: " + f);
}

MarketParams market(const RunConfig& cfg, double eps) {
    return MarketParams(cfg.mu, cfg.sigma, cfg.rate, eps);
}

SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions opts;
    opts.force = cfg.force;
    return opts;
}

std::vector<std::pair<std::string, std::string>> provenance(const RunConfig& cfg,
                                                            double eps) {
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("tool", std::string(kToolName) + " " + kToolVersion);
    meta.emplace_back("command", cfg.command);
    meta.emplace_back("mu", format_double(cfg.mu));
    meta.emplace_back("sigma", format_double(cfg.sigma));
    meta.emplace_back("rate", format_double(cfg.rate));
    meta.emplace_back("epsilon", format_double(eps));
    return meta;
}

void emit(const RunConfig& cfg, const std::string& content) {
    if (cfg.output_path.empty())
        std::cout << content;
    else
        write_text_file(cfg.output_path, content);
}

json band_json(const Band& b) {
    return json{{"zeta_minus", b.zeta_minus}, {"zeta_plus", b.zeta_plus},
                {"pi_minus", b.pi_minus},     {"pi_plus", b.pi_plus},
                {"regime", to_string(b.regime)}};
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

int run_solve(const RunConfig& cfg) {
    MarketParams p = market(cfg, cfg.epsilons.at(0));
    Preference pref(cfg.gamma);
    SolveReport rep = solve_band(p, pref, solve_options(cfg));

    std::printf("band:     pi in [%.10g, %.10g]   zeta in [%.10g, %.10g]   (%s)\n",
                rep.band.pi_minus, rep.band.pi_plus, rep.band.zeta_minus,
                rep.band.zeta_plus, to_string(rep.band.regime));
    std::printf("lambda:   %.10g per year\n", rep.lambda);
    if (!rep.band.is_degenerate()) {
        ErgodicStats st = long_run_stats(rep.band, p, pref);
        std::printf("esr:      %.10g\nm_hat:    %.10g\ns_hat:    %.10g\natc:      %.10g\n",
                    st.esr, st.m_hat, st.s_hat, st.atc);
    }
    std::printf("residual: %.3e   iterations: %d%s%s\n", rep.residual_norm, rep.iterations,
                rep.warning.empty() ? "" : "   note: ", rep.warning.c_str());

    if (!cfg.output_path.empty() || parse_format(cfg.format) == OutputFormat::Json) {
        json out;
        json meta;
        for (auto& [k, v] : provenance(cfg, p.epsilon)) meta[k] = v;
        meta["gamma"] = cfg.gamma;
        meta["residual_norm"] = rep.residual_norm;
        meta["iterations"] = rep.iterations;
        meta["method"] = rep.method == SolveMethod::RiskNeutral ? "risk_neutral" : "risk_averse";
        if (!rep.warning.empty()) meta["note"] = rep.warning;
        out["meta"] = meta;
        out["band"] = band_json(rep.band);
        out["lambda"] = rep.lambda;
        if (!rep.band.is_degenerate()) {
            ErgodicStats st = long_run_stats(rep.band, p, pref);
            out["esr"] = st.esr;
            out["m_hat"] = st.m_hat;
            out["s_hat"] = st.s_hat;
            out["atc"] = st.atc;
        }
        if (!cfg.output_path.empty()) emit(cfg, out.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// frontier
// ---------------------------------------------------------------------------

Table frontier_table(const RunConfig& cfg, const MarketParams& p,
                     const std::vector<FrontierPoint>& pts) {
    Table t;
    t.meta = provenance(cfg, p.epsilon);
    t.columns = {"gamma", "pi_minus", "pi_plus", "s_hat", "m_hat_excess",
                 "esr",   "atc",      "m_multiple", "s_multiple"};
    for (const auto& pt : pts) {
        if (!pt.ok) continue;
        t.rows.push_back({pt.gamma, pt.band.pi_minus, pt.band.pi_plus, pt.s_hat,
                          pt.m_hat_excess, pt.esr, pt.atc, pt.m_multiple, pt.s_multiple});
    }
    return t;
}

int run_frontier(const RunConfig& cfg) {
    OutputFormat fmt = parse_format(cfg.format);
    if (fmt != OutputFormat::Svg && cfg.epsilons.size() != 1)
        throw DomainError("csv/json frontier output takes a single --eps; svg overlays several");

    std::vector<std::vector<FrontierPoint>> curves;
    for (double eps : cfg.epsilons) {
        MarketParams p = market(cfg, eps);
        std::vector<double> gammas =
            cfg.gammas.empty() ? default_gamma_grid(p, cfg.points_per_decade) : cfg.gammas;
        curves.push_back(sweep(p, gammas, solve_options(cfg)));
    }

    size_t solved = 0, failed = 0;
    for (const auto& c : curves)
        for (const auto& pt : c) (pt.ok ? solved : failed)++;
    std::printf("frontier: %zu point(s) solved, %zu failed, %zu curve(s)\n", solved, failed,
                curves.size());

    if (fmt == OutputFormat::Csv) {
        emit(cfg, to_csv(frontier_table(cfg, market(cfg, cfg.epsilons[0]), curves[0])));
    } else if (fmt == OutputFormat::Json) {
        emit(cfg, table_json(frontier_table(cfg, market(cfg, cfg.epsilons[0]), curves[0]))
                      .dump(2) + "\n");
    } else {
        LinePlot plot;
        plot.title = "Efficient frontier with trading costs";
        plot.xlabel = "volatility (multiples of sigma)";
        plot.ylabel = "excess return (multiples of mu)";
        plot.meta = provenance(cfg, cfg.epsilons[0]);
        double smax = 0.0;
        const char* colors[] = {"#1f6fb2", "#c23b22", "#2e8b57", "#8a2be2"};
        for (size_t i = 0; i < curves.size(); ++i) {
            Series s;
            s.name = "eps = " + format_double(cfg.epsilons[i]);
            s.color = colors[i % 4];
            for (const auto& pt : curves[i]) {
                if (!pt.ok) continue;
                s.x.push_back(pt.s_multiple);
                s.y.push_back(pt.m_multiple);
                smax = std::max(smax, pt.s_multiple);
            }
            plot.series.push_back(std::move(s));
        }
        Series frictionless;
        frictionless.name = "frictionless";
        frictionless.color = "#777777";
        frictionless.dashed = true;
        frictionless.x = {0.0, smax};
        frictionless.y = {0.0, smax};
        plot.series.push_back(std::move(frictionless));
        emit(cfg, to_svg(plot));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// table1
// ---------------------------------------------------------------------------

int run_table1(const RunConfig& cfg) {
    std::vector<MultiplierCell> cells =
        multiplier_table(cfg.sharpe, cfg.sigmas, cfg.table_eps, cfg.rate, solve_options(cfg));

    Table t;
    t.meta = {{"tool", std::string(kToolName) + " " + kToolVersion},
              {"command", "table1"},
              {"sharpe", format_double(cfg.sharpe)},
              {"layout", "rows sigma, per-eps exact and approx columns"}};
    t.columns = {"sigma"};
    for (double e : cfg.table_eps) {
        t.columns.push_back("exact_eps_" + format_double(e));
        t.columns.push_back("approx_eps_" + format_double(e));
    }
    size_t idx = 0;
    for (double sigma : cfg.sigmas) {
        std::vector<double> row = {sigma};
        for (size_t j = 0; j < cfg.table_eps.size(); ++j, ++idx) {
            const MultiplierCell& c = cells[idx];
            row.push_back(c.ok ? c.exact : std::nan(""));
            row.push_back(c.ok ? c.approx : std::nan(""));
        }
        t.rows.push_back(std::move(row));
    }

    std::printf("leverage multipliers at Sharpe %.3g (exact / leading approx):\n", cfg.sharpe);
    idx = 0;
    for (double sigma : cfg.sigmas) {
        std::printf("  sigma=%5.2f:", sigma);
        for (size_t j = 0; j < cfg.table_eps.size(); ++j, ++idx)
            std::printf("  %8.2f (%7.2f)", cells[idx].exact, cells[idx].approx);
        std::printf("\n");
    }

    if (parse_format(cfg.format) == OutputFormat::Json)
        emit(cfg, table_json(t).dump(2) + "\n");
    else
        emit(cfg, to_csv(t));
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int run_simulate(const RunConfig& cfg) {
    MarketParams p = market(cfg, cfg.epsilons.at(0));
    Preference pref(cfg.gamma);
    SolveReport rep = solve_band(p, pref, solve_options(cfg));
    if (rep.band.is_degenerate())
        throw DomainError("degenerate band: nothing to simulate");
    ErgodicStats st = long_run_stats(rep.band, p, pref);

    SimConfig sim = cfg.sim;
    if (sim.dt <= 0.0) sim.dt = dt_guard(rep.band, p);
    SimEstimate mc = simulate_band(rep.band, p, pref, sim);

    std::printf("band: pi in [%.8f, %.8f]; %lld paths x %lld steps, dt=%.3e (%.1f years/path)\n",
                rep.band.pi_minus, rep.band.pi_plus,
                static_cast<long long>(sim.n_paths), static_cast<long long>(sim.n_steps),
                sim.dt, mc.years_per_path);
    if (!mc.warning.empty()) std::printf("warning: %s\n", mc.warning.c_str());
    std::printf("              monte carlo          closed form     z\n");
    std::printf("m_hat   %12.8f +- %.2e  %12.8f  %+6.2f\n", mc.m_hat, mc.m_se, st.m_hat,
                (mc.m_hat - st.m_hat) / mc.m_se);
    std::printf("s_hat   %12.8f +- %.2e  %12.8f  %+6.2f\n", mc.s_hat, mc.s_se, st.s_hat,
                (mc.s_hat - st.s_hat) / mc.s_se);
    std::printf("atc     %12.4e +- %.2e  %12.4e  %+6.2f\n", mc.atc, mc.atc_se, st.atc,
                (mc.atc - st.atc) / mc.atc_se);
    std::printf("esr     %12.8f +- %.2e  %12.8f\n", mc.esr, mc.esr_se, st.esr);
    std::printf("generator: %s, seed %llu\n", mc.generator.c_str(),
                static_cast<unsigned long long>(mc.seed));

    if (!cfg.output_path.empty()) {
        json out;
        json meta;
        for (auto& [k, v] : provenance(cfg, p.epsilon)) meta[k] = v;
        meta["gamma"] = cfg.gamma;
        meta["seed"] = mc.seed;
        meta["generator"] = mc.generator;
        meta["dt"] = mc.dt;
        meta["n_steps"] = sim.n_steps;
        meta["n_paths"] = sim.n_paths;
        meta["residual_norm"] = rep.residual_norm;
        out["meta"] = meta;
        out["band"] = band_json(rep.band);
        out["monte_carlo"] = {{"m_hat", mc.m_hat}, {"m_se", mc.m_se},
                              {"s_hat", mc.s_hat}, {"s_se", mc.s_se},
                              {"atc", mc.atc},     {"atc_se", mc.atc_se},
                              {"esr", mc.esr},     {"esr_se", mc.esr_se}};
        out["closed_form"] = {{"m_hat", st.m_hat}, {"s_hat", st.s_hat},
                              {"atc", st.atc},     {"esr", st.esr}};
        out["occupancy"] = {{"edges", mc.hist_edges}, {"mass", mc.hist}};
        emit(cfg, out.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int run_verify(const RunConfig& cfg) {
    MarketParams p = market(cfg, cfg.epsilons.at(0));
    Preference pref(cfg.gamma);
    SolveReport rep = solve_band(p, pref, solve_options(cfg));
    HjbReport h = verify_hjb(rep, p, pref, cfg.hjb);
    std::printf("variational inequality on %zu grid points (tol %.1e):\n", h.grid.size(),
                cfg.hjb.tol);
    std::printf("  min operator residual: %+.3e\n", h.min_operator_residual);
    std::printf("  min V' slack:          %+.3e\n", h.min_gradient_slack_lower);
    std::printf("  min G - V' slack:      %+.3e\n", h.min_gradient_slack_upper);
    std::printf("  max inside residual:   %.3e\n", h.inside_residual_max);
    std::printf("  pasting gaps:          %.3e (value), %.3e (slope)\n", h.pasting_value_gap,
                h.pasting_slope_gap);
    std::printf("  %s (worst point zeta = %.8f)\n", h.pass ? "PASS" : "FAIL", h.worst_zeta);
    return h.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

int run_converge(const RunConfig& cfg) {
    MarketParams p = market(cfg, cfg.epsilons.at(0));
    std::vector<double> gammas =
        cfg.gammas.empty() ? std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4, 1e-5} : cfg.gammas;
    ConvergenceResult res = convergence_check(p, gammas, solve_options(cfg));

    Table t;
    t.meta = provenance(cfg, p.epsilon);
    t.columns = {"gamma", "zeta_minus", "zeta_plus", "esr", "gap_minus", "gap_plus"};
    std::printf("   gamma     zeta_minus      zeta_plus            esr       gap-      gap+\n");
    for (const auto& row : res.rows) {
        double gm = std::fabs(row.zeta_minus - res.limit.zeta_minus);
        double gp = std::fabs(row.zeta_plus - res.limit.zeta_plus);
        t.rows.push_back({row.gamma, row.zeta_minus, row.zeta_plus, row.esr, gm, gp});
        std::printf("%8.1e  %13.9f  %13.9f  %13.9f  %.3e  %.3e\n", row.gamma, row.zeta_minus,
                    row.zeta_plus, row.esr, gm, gp);
    }
    t.rows.push_back({0.0, res.limit.zeta_minus, res.limit.zeta_plus, res.limit.esr, 0.0, 0.0});
    std::printf("%8.1e  %13.9f  %13.9f  %13.9f  (risk-neutral limit)\n", 0.0,
                res.limit.zeta_minus, res.limit.zeta_plus, res.limit.esr);

    if (!cfg.output_path.empty()) {
        if (parse_format(cfg.format) == OutputFormat::Json)
            emit(cfg, table_json(t).dump(2) + "\n");
        else
            emit(cfg, to_csv(t));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// argument plumbing
// ---------------------------------------------------------------------------

// JSON config file: top-level keys mirror the long option names; command-line
// flags override file values.
std::vector<std::string> args_from_config(const std::string& path) {
    json j = json::parse(read_text_file(path));
    std::vector<std::string> args;
    for (auto& [key, value] : j.items()) {
        args.push_back("--" + key);
        if (value.is_array()) {
            std::string list;
            for (auto& v : value) {
                if (!list.empty()) list += ",";
                list += v.is_string() ? v.get<std::string>() : json(v).dump();
            }
            args.back() += "=" + list;
        } else if (value.is_boolean()) {
            if (!value.get<bool>()) args.pop_back();
        } else {
            args.back() += "=" + (value.is_string() ? value.get<std::string>() : json(value).dump());
        }
    }
    return args;
}

int error_exit(const char* type, const std::string& msg, int code) {
    json err{{"error", {{"type", type}, {"message", msg}, {"code", code}}}};
    std::cerr << err.dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    std::string config_path;

    CLI::App app{"long-run portfolio choice with proportional trading costs"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);
    // later occurrences win, so command-line flags override --config values
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    auto add_market = [&](CLI::App* sub, bool with_gamma) {
        sub->add_option("--mu", cfg.mu, "expected excess return per year");
        sub->add_option("--sigma", cfg.sigma, "volatility per year");
        sub->add_option("--rate,-r", cfg.rate, "safe rate per year");
        sub->add_option("--eps", cfg.epsilons, "relative bid-ask spread(s)")->delimiter(',');
        if (with_gamma) sub->add_option("--gamma", cfg.gamma, "risk aversion (0 = risk neutral)");
        sub->add_flag("--force", cfg.force, "lift the eps <= 0.1 validity guard");
        sub->add_option("--output,-o", cfg.output_path, "artifact file path");
        sub->add_option("--format,-f", cfg.format, "csv, json, or svg");
        sub->add_option("--config", config_path, "JSON config file (flags override)");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve the no-trade band");
    add_market(solve, true);

    CLI::App* frontier = app.add_subcommand("frontier", "sweep gamma along the frontier");
    add_market(frontier, false);
    frontier->add_option("--gammas", cfg.gammas, "explicit gamma grid")->delimiter(',');
    frontier->add_option("--points-per-decade", cfg.points_per_decade, "gamma grid density");

    CLI::App* table1 = app.add_subcommand("table1", "leverage multiplier table");
    table1->add_option("--sharpe", cfg.sharpe, "Sharpe ratio mu/sigma");
    table1->add_option("--sigmas", cfg.sigmas, "volatility rows")->delimiter(',');
    table1->add_option("--epsilons", cfg.table_eps, "spread columns")->delimiter(',');
    table1->add_option("--rate,-r", cfg.rate, "safe rate per year");
    table1->add_flag("--force", cfg.force, "lift the eps <= 0.1 validity guard");
    table1->add_option("--output,-o", cfg.output_path, "artifact file path");
    table1->add_option("--format,-f", cfg.format, "csv or json");
    table1->add_option("--config", config_path, "JSON config file (flags override)");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo cross-check of a band");
    add_market(simulate, true);
    simulate->add_option("--dt", cfg.sim.dt, "years per step (default: guard value)");
    simulate->add_option("--steps", cfg.sim.n_steps, "steps per path");
    simulate->add_option("--paths", cfg.sim.n_paths, "number of paths");
    simulate->add_option("--seed", cfg.sim.seed, "RNG seed");
    simulate->add_option("--burn-in", cfg.sim.burn_in, "discarded initial steps (-1 = 10%)");
    simulate->add_option("--threads", cfg.sim.threads, "worker threads (LEVLIM_THREADS caps)");

    CLI::App* verify = app.add_subcommand("verify", "variational-inequality check");
    add_market(verify, true);
    verify->add_option("--tol", cfg.hjb.tol, "slack tolerance");
    verify->add_option("--grid", cfg.hjb.points_per_region, "points per region");

    CLI::App* converge = app.add_subcommand("converge", "band convergence as gamma drops to 0");
    add_market(converge, false);
    converge->add_option("--gammas", cfg.gammas, "gamma sequence")->delimiter(',');

    cfg.sim.dt = 0.0;  // sentinel: pick the guard value unless set

    // Pre-scan for --config so file values act as defaults.
    std::vector<std::string> args(argv + 1, argv + argc);
    for (size_t i = 0; i < args.size(); ++i) {
        std::string a = args[i];
        std::string path;
        if (a.rfind("--config=", 0) == 0) path = a.substr(9);
        else if (a == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (!path.empty()) {
            try {
                std::vector<std::string> injected = args_from_config(path);
                args.insert(args.begin() + 1, injected.begin(), injected.end());
            } catch (const std::exception& e) {
                return error_exit("io", std::string("config: ") + e.what(), 4);
            }
            break;
        }
    }
    std::vector<const char*> cargv = {argv[0]};
    for (const auto& a : args) cargv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (solve->parsed()) { cfg.command = "solve"; return run_solve(cfg); }
        if (frontier->parsed()) { cfg.command = "frontier"; return run_frontier(cfg); }
        if (table1->parsed()) { cfg.command = "table1"; return run_table1(cfg); }
        if (simulate->parsed()) { cfg.command = "simulate"; return run_simulate(cfg); }
        if (verify->parsed()) { cfg.command = "verify"; return run_verify(cfg); }
        if (converge->parsed()) { cfg.command = "converge"; return run_converge(cfg); }
    } catch (const SolverError& e) {
        return error_exit("solver", e.what(), 2);
    } catch (const DomainError& e) {
        return error_exit("domain", e.what(), 3);
    } catch (const IoError& e) {
        return error_exit("io", e.what(), 4);
    } catch (const NumericalError& e) {
        return error_exit("numerical", e.what(), 2);
    } catch (const std::exception& e) {
        return error_exit("internal", e.what(), 1);
    }
    return 0;
}
