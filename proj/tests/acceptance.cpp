// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Each check prints enough measured detail to audit it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fso/montecarlo.hpp"
#include "fso/power_alloc.hpp"
#include "fso/protocols.hpp"
#include "fso/scenario.hpp"

using namespace fso;

namespace {

int g_failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", ok ? "PASS" : "FAIL", id,
                title, detail.c_str());
    if (!ok) ++g_failures;
}

std::string scenario_path(const char* name) {
    return std::string(FSO_SCENARIO_DIR) + "/" + name;
}

struct Deployment {
    std::string label;
    scenario::Scenario s;
};

std::vector<Deployment> shipped_deployments() {
    std::vector<Deployment> out;
    for (int n = 1; n <= 4; ++n) {
        scenario::Scenario s =
            scenario::load_scenario(scenario_path("fig2_sym_2km.json"));
        scenario::override_relays(s, static_cast<std::size_t>(n));
        out.push_back({"sym_2km_N" + std::to_string(n), std::move(s)});
    }
    out.push_back({"asym_config1", scenario::load_scenario(
                                       scenario_path("fig3_config1.json"))});
    out.push_back({"asym_config2", scenario::load_scenario(
                                       scenario_path("fig3_config2.json"))});
    return out;
}

double exact_outage(const protocols::SystemConfig& cfg,
                    protocols::Protocol p, double margin) {
    switch (p) {
        case protocols::Protocol::all_active:
            return protocols::all_active_outage(cfg, margin,
                                                protocols::Method::exact)
                .p_out;
        case protocols::Protocol::select_max:
            return protocols::select_max_outage(cfg, margin,
                                                protocols::Method::exact)
                .p_out;
        case protocols::Protocol::dssc:
            return protocols::dssc_outage(cfg, margin, margin).p_out;
    }
    return 0.0;
}

double asym_outage(const protocols::SystemConfig& cfg, protocols::Protocol p,
                   double margin) {
    switch (p) {
        case protocols::Protocol::all_active:
            return protocols::all_active_outage(cfg, margin,
                                                protocols::Method::asymptotic)
                .p_out;
        case protocols::Protocol::select_max:
            return protocols::select_max_outage(cfg, margin,
                                                protocols::Method::asymptotic)
                .p_out;
        case protocols::Protocol::dssc:
            return protocols::dssc_outage_asymptotic(cfg, margin);
    }
    return 0.0;
}

// Smallest sweep margin (dB) where the exact outage drops into
// [lo, hi]; scans a 0.5 dB grid.
std::vector<double> margins_with_outage_in(const protocols::SystemConfig& cfg,
                                           protocols::Protocol p, double lo,
                                           double hi, int want) {
    std::vector<double> found;
    for (double db = 10.0; db <= 60.0 && (int)found.size() < want;
         db += 0.5) {
        const double m = scenario::db_to_linear(db);
        const double v = exact_outage(cfg, p, m);
        if (v >= lo && v <= hi) found.push_back(db);
    }
    return found;
}

void criterion_1() {
    using clock = std::chrono::steady_clock;
    bool ok = true;
    std::ostringstream detail;
    int points = 0;
    double worst_sigma = 0.0;
    for (const Deployment& d : shipped_deployments()) {
        const auto t0 = clock::now();
        const protocols::SystemConfig cfg = power_alloc::with_allocation(
            d.s.base_config(),
            power_alloc::equal_allocation(d.s.base_config(),
                                          protocols::Protocol::select_max));
        for (protocols::Protocol p :
             {protocols::Protocol::all_active, protocols::Protocol::select_max,
              protocols::Protocol::dssc}) {
            if (p == protocols::Protocol::dssc && cfg.n_relays() < 2) continue;
            const protocols::SystemConfig run_cfg =
                p == protocols::Protocol::all_active
                    ? power_alloc::with_allocation(
                          d.s.base_config(),
                          power_alloc::equal_allocation(
                              d.s.base_config(),
                              protocols::Protocol::all_active))
                    : cfg;
            const std::vector<double> dbs =
                margins_with_outage_in(run_cfg, p, 1e-3, 1e-1, 3);
            if (dbs.size() < 3) {
                ok = false;
                detail << d.label << "/" << scenario::protocol_name(p)
                       << ": <3 probe points; ";
                continue;
            }
            for (double db : dbs) {
                const double margin = scenario::db_to_linear(db);
                const double exact = exact_outage(run_cfg, p, margin);
                montecarlo::SimPlan plan;
                plan.n_slots = 1'000'000;
                plan.seed = 20260823 + points;
                plan.target = p;
                plan.margin = margin;
                plan.threshold_margin = margin;
                const montecarlo::SimEstimate est =
                    montecarlo::simulate_outage(run_cfg, plan);
                const double sigmas =
                    std::fabs(est.p_hat - exact) /
                    (est.ci_halfwidth_3sigma / 3.0);
                worst_sigma = std::max(worst_sigma, sigmas);
                ++points;
                if (std::fabs(est.p_hat - exact) > est.ci_halfwidth_3sigma) {
                    ok = false;
                    detail << d.label << "/" << scenario::protocol_name(p)
                           << "@" << db << "dB: " << sigmas << " sigma; ";
                }
            }
        }
        const double secs =
            std::chrono::duration<double>(clock::now() - t0).count();
        if (secs > 120.0) {
            ok = false;
            detail << d.label << ": " << secs << " s > 120 s budget; ";
        }
    }
    std::ostringstream s;
    s << points << " MC points, worst deviation " << worst_sigma
      << " sigma (limit 3)";
    if (!detail.str().empty()) s << "; " << detail.str();
    report(1, "Monte Carlo within 3-sigma of exact analytics", ok, s.str());
}

void criterion_2() {
    const scenario::Scenario s =
        scenario::load_scenario(scenario_path("fig3_config1.json"));
    const protocols::SystemConfig cfg = power_alloc::with_allocation(
        s.base_config(), power_alloc::equal_allocation(
                             s.base_config(), protocols::Protocol::dssc));
    double worst = 0.0;
    for (int i = 0; i < 31; ++i) {
        const double margin = scenario::db_to_linear(20.0 + i);
        const double dssc = protocols::dssc_outage(cfg, margin, margin).p_out;
        const double select =
            protocols::select_max_outage(cfg, margin, protocols::Method::exact)
                .p_out;
        const double rel =
            std::fabs(dssc - select) / std::max(select, 1e-300);
        worst = std::max(worst, rel);
    }
    std::ostringstream d;
    d << "31-point sweep, worst relative gap " << worst << " (limit 1e-12)";
    report(2, "DSSC with matched threshold equals two-path select-max",
           worst <= 1e-12, d.str());
}

void criterion_3() {
    bool ok = true;
    std::ostringstream detail;
    for (const Deployment& d : shipped_deployments()) {
        for (protocols::Protocol p :
             {protocols::Protocol::all_active, protocols::Protocol::select_max,
              protocols::Protocol::dssc}) {
            if (p == protocols::Protocol::dssc && d.s.n_relays() < 2) continue;
            const protocols::SystemConfig cfg = power_alloc::with_allocation(
                d.s.base_config(),
                power_alloc::equal_allocation(d.s.base_config(), p));
            // Two largest points of a 20-60 dB step-1 sweep of the (cheap,
            // noise-free) asymptotic curve; sub-dominant decoding-set terms
            // still bend the slope by >1% at 50 dB for the 3-relay
            // asymmetric deployment.
            const double m1 = scenario::db_to_linear(59.0);
            const double m2 = scenario::db_to_linear(60.0);
            const double slope = std::log10(asym_outage(cfg, p, m1) /
                                            asym_outage(cfg, p, m2)) /
                                 0.1;  // per decade
            const double gd = protocols::diversity_gain(cfg, p);
            const double rel = std::fabs(slope - gd) / gd;
            if (rel > 0.01) {
                ok = false;
                detail << d.label << "/" << scenario::protocol_name(p)
                       << ": slope " << slope << " vs Gd " << gd << "; ";
            }
        }
    }
    report(3, "asymptotic log-log slope matches the diversity gain", ok,
           ok ? "all protocol/deployment slopes within 1%" : detail.str());
}

void criterion_4() {
    bool ok = true;
    int checked = 0;
    double worst_lo = 1.0, worst_hi = 1.0;
    std::ostringstream detail;
    for (const Deployment& d : shipped_deployments()) {
        for (protocols::Protocol p :
             {protocols::Protocol::all_active, protocols::Protocol::select_max,
              protocols::Protocol::dssc}) {
            if (p == protocols::Protocol::dssc && d.s.n_relays() < 2) continue;
            const protocols::SystemConfig cfg = power_alloc::with_allocation(
                d.s.base_config(),
                power_alloc::equal_allocation(d.s.base_config(), p));
            for (double db = d.s.sweep.start_db; db <= d.s.sweep.stop_db;
                 db += d.s.sweep.step_db) {
                const double margin = scenario::db_to_linear(db);
                const double exact = exact_outage(cfg, p, margin);
                if (!(exact > 0.0) || exact > 1e-5) continue;
                const double ratio = exact / asym_outage(cfg, p, margin);
                ++checked;
                worst_lo = std::min(worst_lo, ratio);
                worst_hi = std::max(worst_hi, ratio);
                if (ratio < 0.9 || ratio > 1.1) ok = false;
            }
        }
    }
    std::ostringstream s;
    s << checked << " sweep points with exact <= 1e-5, ratio range ["
      << worst_lo << ", " << worst_hi << "] (required [0.9, 1.1])";
    if (!ok)
        s << "; the asymptote's per-path relative error is O(1/margin) and "
             "multiplies across paths, so at a product outage of 1e-5 each "
             "path still sits at ~1e-2.5 where its expansion is ~25% off";
    report(4, "exact/asymptotic ratio within 10% below outage 1e-5", ok,
           s.str());
}

void criterion_5() {
    double worst = 0.0;
    for (double d_km : {1.0, 2.0, 3.0}) {
        const channel::TurbulenceParams t = channel::turbulence_params(
            2e-14, 1550e-9, d_km);
        const channel::GammaGamma dist{t.alpha, t.beta};
        for (double x = 1e-4; x <= 10.0; x *= 1.333) {
            worst = std::max(worst, std::fabs(channel::gg_cdf(dist, x) -
                                              channel::gg_cdf_quad(dist, x)));
        }
    }
    std::ostringstream d;
    d << "worst |series - quadrature| = " << worst << " (limit 1e-8)";
    report(5, "fading CDF series agrees with independent quadrature",
           worst <= 1e-8, d.str());
}

void criterion_6() {
    const scenario::Scenario sc =
        scenario::load_scenario(scenario_path("fig3_config2.json"));
    const protocols::SystemConfig cfg = power_alloc::with_allocation(
        sc.base_config(), power_alloc::equal_allocation(
                              sc.base_config(),
                              protocols::Protocol::all_active));
    bool ok = true;
    std::ostringstream detail;

    // Singletons against the direct fading CDF.
    double worst_single = 0.0;
    for (std::size_t m = 0; m < cfg.n_relays(); ++m) {
        const auto& l = cfg.rd[m];
        for (double x : {1e-4, 1e-3, 1e-2, 0.05, 0.2}) {
            const double inv =
                protocols::sum_cdf_exact(cfg, protocols::DecodingSet{1u << m},
                                         x);
            const double direct =
                channel::gg_cdf(l.fading(), x / (l.path_gain * l.rho));
            worst_single = std::max(worst_single, std::fabs(inv - direct));
        }
    }
    if (worst_single > 1e-6) {
        ok = false;
        detail << "singleton gap " << worst_single << " > 1e-6; ";
    }

    // Two- and three-member sums against 1e7-sample empirical CDFs,
    // compared on a fixed quantile grid (KS statistic over the grid).
    for (std::uint32_t bits : {0b011u, 0b111u}) {
        const protocols::DecodingSet set{bits};
        const std::uint64_t n = 10'000'000;
        std::mt19937_64 rng(0xC0FFEE + bits);
        std::vector<double> samples;
        samples.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t m = 0; m < cfg.n_relays(); ++m)
                if (set.contains(m))
                    sum += cfg.rd[m].path_gain * cfg.rd[m].rho *
                           montecarlo::sample_gg(cfg.rd[m].fading(), rng);
            samples.push_back(sum);
        }
        std::sort(samples.begin(), samples.end());
        double ks = 0.0;
        for (int g = 1; g < 200; ++g) {
            const double frac = g / 200.0;
            const double x =
                samples[static_cast<std::size_t>(frac * (n - 1))];
            const double analytic = protocols::sum_cdf_exact(cfg, set, x);
            ks = std::max(ks, std::fabs(analytic - frac));
        }
        // 1% significance Kolmogorov critical value.
        const double limit = 1.628 / std::sqrt(static_cast<double>(n));
        if (ks > limit) {
            ok = false;
            detail << set.count() << "-member KS " << ks << " > " << limit
                   << "; ";
        } else {
            detail << set.count() << "-member KS " << ks << " (limit "
                   << limit << "); ";
        }
    }
    std::ostringstream s;
    s << "singleton gap " << worst_single << " (limit 1e-6); " << detail.str();
    report(6, "sum-CDF inversion verified against fading CDF and sampling",
           ok, s.str());
}

void criterion_7() {
    bool ok = true;
    std::ostringstream detail;

    // 20 randomized two-hop configs vs a 1e-4 brute-force grid.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist_km(0.8, 3.2);
    std::uniform_real_distribution<double> dist_db(25.0, 50.0);
    double worst_gap = 0.0;
    for (int i = 0; i < 20; ++i) {
        protocols::SystemConfig cfg;
        cfg.sr.push_back(channel::make_link({dist_km(rng), 0.2, 0.2, 2.0, 0.1},
                                            2e-14, 1550e-9, 0.5));
        cfg.rd.push_back(channel::make_link({dist_km(rng), 0.2, 0.2, 2.0, 0.1},
                                            2e-14, 1550e-9, 0.5));
        const double margin = scenario::db_to_linear(dist_db(rng));
        const power_alloc::PathSplit s =
            power_alloc::optimize_select_max(cfg, 0, margin);
        double best = 1e308, best_r = 0.0;
        for (double r = 1e-4; r < 1.0; r += 1e-4) {
            const double f =
                power_alloc::select_max_asym_objective(cfg, 0, r, margin);
            if (f < best) {
                best = f;
                best_r = r;
            }
        }
        const double gap = std::fabs(s.rho_sr - best_r);
        worst_gap = std::max(worst_gap, gap);
        if (gap > 1e-4 + 1e-12) {
            ok = false;
            detail << "config " << i << ": argmin gap " << gap << "; ";
        }
    }
    detail << "worst select-max argmin gap " << worst_gap
           << " (limit 1e-4); ";

    // All-active optimum beats every 0.02-step simplex point (N=2, the
    // shipped asymmetric deployment).
    const scenario::Scenario sc =
        scenario::load_scenario(scenario_path("fig3_config1.json"));
    const protocols::SystemConfig base = sc.base_config();
    const double margin = scenario::db_to_linear(40.0);
    const auto [alloc, rep] = power_alloc::optimize_all_active(base, margin);
    double grid_best = 1e308;
    const int steps = 50;  // 0.02 resolution over the 4-simplex
    for (int a = 1; a < steps; ++a)
        for (int b = 1; a + b < steps; ++b)
            for (int c = 1; a + b + c < steps; ++c) {
                const int e = steps - a - b - c;
                const std::vector<double> rho{a / 50.0, b / 50.0, c / 50.0,
                                              e / 50.0};
                grid_best = std::min(
                    grid_best,
                    power_alloc::all_active_asym_objective(base, rho, margin));
            }
    detail << "all-active GP objective " << rep.objective
           << " vs grid best " << grid_best << "; ";
    if (rep.objective > grid_best) ok = false;

    // Both optimized schemes strictly improve on equal allocation for the
    // shipped asymmetric deployments.
    for (const char* name : {"fig3_config1.json", "fig3_config2.json"}) {
        const scenario::Scenario s2 =
            scenario::load_scenario(scenario_path(name));
        const protocols::SystemConfig b2 = s2.base_config();
        const double m2 = scenario::db_to_linear(40.0);

        const auto opt_all = power_alloc::optimize_all_active(b2, m2);
        const power_alloc::PowerAllocation eq_all =
            power_alloc::equal_allocation(b2, protocols::Protocol::all_active);
        std::vector<double> eq_rho = eq_all.rho_sr;
        eq_rho.insert(eq_rho.end(), eq_all.rho_rd.begin(),
                      eq_all.rho_rd.end());
        const double f_eq =
            power_alloc::all_active_asym_objective(b2, eq_rho, m2);
        if (!(opt_all.second.objective < f_eq)) {
            ok = false;
            detail << name << ": all-active optimum not below equal; ";
        }

        const protocols::SystemConfig sel_eq = power_alloc::with_allocation(
            b2,
            power_alloc::equal_allocation(b2,
                                          protocols::Protocol::select_max));
        const protocols::SystemConfig sel_opt = power_alloc::with_allocation(
            b2, power_alloc::optimize_select_max_all(b2, m2));
        const double p_eq = protocols::select_max_outage(
                                sel_eq, m2, protocols::Method::asymptotic)
                                .p_out;
        const double p_opt = protocols::select_max_outage(
                                 sel_opt, m2, protocols::Method::asymptotic)
                                 .p_out;
        if (!(p_opt < p_eq)) {
            ok = false;
            detail << name << ": select-max optimum not below equal; ";
        }
    }
    report(7, "power allocation optimizers beat grids and equal split", ok,
           detail.str());
}

void criterion_8() {
    bool ok = true;
    std::ostringstream detail;
    // Select-max dominates all-active pointwise on the shipped sweeps.
    for (const Deployment& d : shipped_deployments()) {
        if (d.s.n_relays() < 2) continue;  // single path: both coincide
        const protocols::SystemConfig sel = power_alloc::with_allocation(
            d.s.base_config(),
            power_alloc::equal_allocation(d.s.base_config(),
                                          protocols::Protocol::select_max));
        const protocols::SystemConfig all = power_alloc::with_allocation(
            d.s.base_config(),
            power_alloc::equal_allocation(d.s.base_config(),
                                          protocols::Protocol::all_active));
        for (double db = d.s.sweep.start_db; db <= d.s.sweep.stop_db;
             db += d.s.sweep.step_db) {
            const double m = scenario::db_to_linear(db);
            const double p_sel =
                protocols::select_max_outage(sel, m, protocols::Method::exact)
                    .p_out;
            const double p_all =
                protocols::all_active_outage(all, m, protocols::Method::exact)
                    .p_out;
            if (!(p_sel < p_all)) {
                ok = false;
                detail << d.label << "@" << db << "dB: select " << p_sel
                       << " !< all " << p_all << "; ";
            }
        }
    }
    // DSSC ignores the added longer third path.
    const scenario::Scenario c1 =
        scenario::load_scenario(scenario_path("fig3_config1.json"));
    const scenario::Scenario c2 =
        scenario::load_scenario(scenario_path("fig3_config2.json"));
    auto dssc_cfg = [](const scenario::Scenario& s) {
        return power_alloc::with_allocation(
            s.base_config(),
            power_alloc::equal_allocation(s.base_config(),
                                          protocols::Protocol::dssc));
    };
    const protocols::SystemConfig g1 = dssc_cfg(c1);
    const protocols::SystemConfig g2 = dssc_cfg(c2);
    double worst_rel = 0.0;
    for (double db = 20.0; db <= 50.0; db += 1.0) {
        const double m = scenario::db_to_linear(db);
        const double p1 = protocols::dssc_outage(g1, m, m).p_out;
        const double p2 = protocols::dssc_outage(g2, m, m).p_out;
        worst_rel = std::max(
            worst_rel, std::fabs(p1 - p2) / std::max(p1, 1e-300));
    }
    if (worst_rel > 1e-12) {
        ok = false;
        detail << "DSSC changed when N=2 grew to N=3: rel gap " << worst_rel
               << "; ";
    } else {
        detail << "DSSC invariant under the longer third path (rel gap "
               << worst_rel << "); ";
    }
    report(8, "protocol orderings and DSSC pair invariance", ok,
           detail.str());
}

void criterion_9() {
    scenario::Scenario s =
        scenario::load_scenario(scenario_path("fig3_config1.json"));
    s.sweep = {30.0, 38.0, 2.0};
    s.mc = scenario::McPlan{300'000, 424242};
    auto render = [&s] {
        const auto rows = scenario::run_sweep(s);
        std::ostringstream os;
        scenario::emit_csv(rows, s, os);
        return os.str();
    };
    setenv("FSO_THREADS", "1", 1);
    const std::string serial = render();
    setenv("FSO_THREADS", "4", 1);
    const std::string parallel = render();
    const std::string again = render();
    unsetenv("FSO_THREADS");
    const bool ok = serial == parallel && parallel == again;
    std::ostringstream d;
    d << "CSV bytes " << serial.size() << "; 1-thread == 4-thread: "
      << (serial == parallel ? "yes" : "NO") << ", rerun identical: "
      << (parallel == again ? "yes" : "NO");
    report(9, "byte-identical CSV across runs and worker counts", ok,
           d.str());
}

}  // namespace

int main() {
    criterion_5();  // cheapest first: independent CDF routes
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_7();
    criterion_8();
    criterion_6();
    criterion_9();
    criterion_1();  // slowest: full MC oracle sweep
    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return 1;
}
