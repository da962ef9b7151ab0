// fso: outage analysis for relay-assisted free-space optical links.
//
// Subcommands:
//   link      single-link outage curve (exact + asymptotic)
//   sweep     protocol comparison over a power-margin grid -> CSV
//   optimize  power allocation report + comparison table
//   simulate  Monte Carlo only
//   validate  analytic-vs-MC agreement report

#include <cinttypes>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fso/channel.hpp"
#include "fso/montecarlo.hpp"
#include "fso/power_alloc.hpp"
#include "fso/protocols.hpp"
#include "fso/scenario.hpp"

namespace {

using namespace fso;

struct CommonOpts {
    std::string scenario_path;
    std::string output_path;
    int n_relays = 0;       // 0 = as in scenario file
    std::string protocol;   // empty = as in scenario file
    std::string alloc;      // empty = as in scenario file
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_output) {
    cmd->add_option("-s,--scenario", o.scenario_path, "Scenario file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    auto* out = cmd->add_option("-o,--output", o.output_path, "Output CSV path");
    if (need_output) out->required();
    cmd->add_option("-n,--relays", o.n_relays,
                    "Override relay count (symmetric copies of path 1)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("-p,--protocol", o.protocol,
                    "Restrict to one protocol: all_active|select_max|dssc");
    cmd->add_option("-a,--allocation", o.alloc,
                    "Override allocation: equal|distance_rule|optimal");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&o](std::uint64_t v) { o.seed = v; o.seed_set = true; },
        "Monte Carlo seed override");
}

scenario::Scenario load_with_overrides(const CommonOpts& o) {
    scenario::Scenario s = scenario::load_scenario(o.scenario_path);
    if (o.n_relays > 0)
        scenario::override_relays(s, static_cast<std::size_t>(o.n_relays));
    if (!o.protocol.empty()) {
        protocols::Protocol want;
        if (o.protocol == "all_active") want = protocols::Protocol::all_active;
        else if (o.protocol == "select_max") want = protocols::Protocol::select_max;
        else if (o.protocol == "dssc") want = protocols::Protocol::dssc;
        else throw CLI::ValidationError("--protocol", "unknown protocol '" + o.protocol + "'");
        s.protocols_to_run = {want};
    }
    if (!o.alloc.empty()) {
        if (o.alloc == "equal") s.allocation = power_alloc::Scheme::equal;
        else if (o.alloc == "distance_rule") s.allocation = power_alloc::Scheme::distance_rule;
        else if (o.alloc == "optimal") s.allocation = power_alloc::Scheme::optimal;
        else throw CLI::ValidationError("--allocation", "unknown scheme '" + o.alloc + "'");
    }
    if (o.seed_set) {
        if (!s.mc) s.mc = scenario::McPlan{};
        s.mc->seed = o.seed;
    }
    return s;
}

int cmd_link(const CommonOpts& o) {
    const scenario::Scenario s = load_with_overrides(o);
    const protocols::SystemConfig cfg = s.base_config();
    std::printf("%s", s.provenance().c_str());
    std::printf("p_margin_db,hop,outage_exact,outage_asym\n");
    const int n_points = static_cast<int>(
        (s.sweep.stop_db - s.sweep.start_db) / s.sweep.step_db + 1.5);
    for (int i = 0; i < n_points; ++i) {
        const double db = s.sweep.start_db + i * s.sweep.step_db;
        const double m = scenario::db_to_linear(db);
        for (std::size_t b = 0; b < cfg.n_relays(); ++b) {
            std::printf("%g,sr%zu,%.12g,%.12g\n", db, b + 1,
                        channel::link_outage(cfg.sr[b], m),
                        channel::link_outage_asymptotic(cfg.sr[b], m));
            std::printf("%g,rd%zu,%.12g,%.12g\n", db, b + 1,
                        channel::link_outage(cfg.rd[b], m),
                        channel::link_outage_asymptotic(cfg.rd[b], m));
        }
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o, bool with_mc) {
    scenario::Scenario s = load_with_overrides(o);
    if (!with_mc) s.mc.reset();          // analytic columns only
    if (with_mc && !s.mc) s.mc = scenario::McPlan{};
    const auto rows = scenario::run_sweep(s);
    if (rows.empty()) {
        std::cerr << "fso: sweep produced no rows\n";
        return 1;
    }
    scenario::emit_csv_file(rows, s, o.output_path);
    std::cout << scenario::summarize(rows, s);
    std::cout << "wrote " << rows.size() << " rows to " << o.output_path
              << "\n";
    return 0;
}

int cmd_optimize(const CommonOpts& o) {
    const scenario::Scenario s = load_with_overrides(o);
    const protocols::SystemConfig base = s.base_config();
    std::printf("%s", s.provenance().c_str());

    // Report at the middle of the sweep range.
    const double db = 0.5 * (s.sweep.start_db + s.sweep.stop_db);
    const double margin = scenario::db_to_linear(db);
    std::printf("# power margin for optimization: %g dB\n", db);

    std::printf("protocol,scheme,objective_asym,fractions\n");
    auto report = [&](protocols::Protocol p, const char* pname,
                      const power_alloc::PowerAllocation& alloc,
                      const char* sname) {
        const protocols::SystemConfig cfg =
            power_alloc::with_allocation(base, alloc);
        double obj;
        if (p == protocols::Protocol::all_active) {
            std::vector<double> rho = alloc.rho_sr;
            rho.insert(rho.end(), alloc.rho_rd.begin(), alloc.rho_rd.end());
            obj = power_alloc::all_active_asym_objective(base, rho, margin);
        } else {
            obj = protocols::select_max_outage(cfg, margin,
                                               protocols::Method::asymptotic)
                      .p_out;
        }
        std::string frac;
        for (std::size_t b = 0; b < alloc.rho_sr.size(); ++b) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%s(%.6g|%.6g)", b ? " " : "",
                          alloc.rho_sr[b], alloc.rho_rd[b]);
            frac += buf;
        }
        std::printf("%s,%s,%.12g,%s\n", pname, sname, obj, frac.c_str());
    };

    for (protocols::Protocol p : s.protocols_to_run) {
        if (p == protocols::Protocol::dssc && s.n_relays() < 2) continue;
        const char* pname = p == protocols::Protocol::all_active ? "all_active"
                            : p == protocols::Protocol::select_max
                                ? "select_max"
                                : "dssc";
        report(p, pname, power_alloc::equal_allocation(base, p), "equal");
        report(p, pname, power_alloc::distance_rule(base, p), "distance_rule");
        if (p == protocols::Protocol::all_active) {
            auto [alloc, rep] = power_alloc::optimize_all_active(base, margin);
            report(p, pname, alloc, "optimal");
            std::printf("# all_active GP: %d iterations, KKT residual %.3g\n",
                        rep.iterations, rep.kkt_residual);
        } else {
            report(p, pname, power_alloc::optimize_select_max_all(base, margin),
                   "optimal");
        }
    }
    return 0;
}

int cmd_validate(const CommonOpts& o) {
    scenario::Scenario s = load_with_overrides(o);
    if (!s.mc) s.mc = scenario::McPlan{};
    const auto rows = scenario::run_sweep(s);
    if (rows.empty()) {
        std::cerr << "fso: sweep produced no rows\n";
        return 1;
    }
    std::printf("%s", s.provenance().c_str());
    std::printf(
        "p_margin_db,protocol,exact,mc,ci3,within_ci\n");
    int failures = 0, checked = 0;
    for (const auto& row : rows) {
        for (const auto& c : row.cells) {
            if (!c.mc) continue;
            // Only judge points the MC sample size can resolve on both
            // sides (the binomial CI degenerates at p_hat = 0 or 1).
            const double n = static_cast<double>(s.mc->n_slots);
            const bool resolvable =
                c.exact * n >= 10.0 && (1.0 - c.exact) * n >= 10.0;
            const bool ok =
                std::abs(c.mc->p_hat - c.exact) <= c.mc->ci_halfwidth_3sigma;
            if (resolvable) {
                ++checked;
                if (!ok) ++failures;
            }
            std::printf("%g,%s,%.12g,%.12g,%.12g,%s\n", row.margin_db,
                        scenario::protocol_name(c.protocol).c_str(), c.exact,
                        c.mc->p_hat, c.mc->ci_halfwidth_3sigma,
                        resolvable ? (ok ? "yes" : "NO") : "skip");
        }
    }
    std::printf("# %d/%d resolvable points within 3-sigma\n",
                checked - failures, checked);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relay-assisted FSO outage analysis"};
    app.require_subcommand(1);

    CommonOpts link_o, sweep_o, opt_o, sim_o, val_o;
    auto* link = app.add_subcommand("link", "Per-hop outage curves");
    add_common(link, link_o, false);
    auto* sweep = app.add_subcommand("sweep", "Protocol comparison CSV");
    add_common(sweep, sweep_o, true);
    auto* opt = app.add_subcommand("optimize", "Power allocation comparison");
    add_common(opt, opt_o, false);
    auto* sim = app.add_subcommand("simulate", "Monte Carlo sweep CSV");
    add_common(sim, sim_o, true);
    auto* val = app.add_subcommand("validate", "Analytic-vs-MC report");
    add_common(val, val_o, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (link->parsed()) return cmd_link(link_o);
        if (sweep->parsed()) return cmd_sweep(sweep_o, false);
        if (opt->parsed()) return cmd_optimize(opt_o);
        if (sim->parsed()) return cmd_sweep(sim_o, true);
        if (val->parsed()) return cmd_validate(val_o);
    } catch (const std::exception& e) {
        std::cerr << "fso: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
