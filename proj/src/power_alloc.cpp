#include "fso/power_alloc.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fso::power_alloc {

using numerics::ln_gamma;

namespace {

double min_q(const channel::LinkParams& l) {
    return std::min(l.turb.alpha, l.turb.beta);
}

// Leading asymptotic coefficient of one hop's outage with the power
// fraction factored out: Gamma(p-q)/(Gamma(a)Gamma(b)) (ab/(hbar P_M))^q.
double delta_const(const channel::LinkParams& l, double margin) {
    const double a = l.turb.alpha, b = l.turb.beta;
    const double p = std::max(a, b), q = std::min(a, b);
    return std::exp(ln_gamma(p - q) - ln_gamma(a) - ln_gamma(b)) *
           std::pow(a * b / (l.path_gain * margin), q);
}

struct Posynomial {
    std::vector<double> coeff;               // one per decoding set
    std::vector<std::vector<double>> expo;   // exponent of each of 2N fractions
};

Posynomial build_all_active_program(const protocols::SystemConfig& cfg,
                                    double margin) {
    cfg.validate();
    const std::size_t n = cfg.n_relays();
    if (n > protocols::kMaxRelaysExact)
        throw std::invalid_argument("optimize_all_active: N exceeds cap");
    Posynomial gp;
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        std::vector<double> a(2 * n, 0.0);
        double log_c = 0.0;
        double q_total = 0.0, q_decoded = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            if ((bits >> m) & 1u) {
                const auto& l = cfg.rd[m];
                const double q = min_q(l);
                const double p = std::max(l.turb.alpha, l.turb.beta);
                a[n + m] = q;
                q_total += q;
                q_decoded += q;
                log_c += ln_gamma(q) + ln_gamma(p - q) -
                         ln_gamma(l.turb.alpha) - ln_gamma(l.turb.beta) +
                         q * std::log(l.turb.alpha * l.turb.beta / l.path_gain);
            } else {
                const auto& l = cfg.sr[m];
                const double q = min_q(l);
                const double p = std::max(l.turb.alpha, l.turb.beta);
                a[m] = q;
                q_total += q;
                log_c += ln_gamma(p - q) - std::log(q) -
                         ln_gamma(l.turb.alpha) - ln_gamma(l.turb.beta) +
                         q * std::log(l.turb.alpha * l.turb.beta / l.path_gain);
            }
        }
        log_c += -q_total * std::log(margin) - ln_gamma(q_decoded + 1.0);
        gp.coeff.push_back(std::exp(log_c));
        gp.expo.push_back(std::move(a));
    }
    return gp;
}

double gp_term(const Posynomial& gp, std::size_t n_term,
               const std::vector<double>& rho) {
    double t = gp.coeff[n_term];
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double e = gp.expo[n_term][i];
        if (e != 0.0) t *= std::pow(rho[i], -e);
    }
    return t;
}

double gp_value(const Posynomial& gp, const std::vector<double>& rho) {
    double f = 0.0;
    for (std::size_t t = 0; t < gp.coeff.size(); ++t)
        f += gp_term(gp, t, rho);
    return f;
}

}  // namespace

PathSplit optimize_select_max(const protocols::SystemConfig& cfg,
                              std::size_t path, double margin) {
    cfg.validate();
    if (path >= cfg.n_relays())
        throw std::out_of_range("optimize_select_max: path index");
    if (!(margin > 0.0))
        throw std::invalid_argument("optimize_select_max: margin must be > 0");
    const double d_sr = delta_const(cfg.sr[path], margin);
    const double d_rd = delta_const(cfg.rd[path], margin);
    const double q_sr = min_q(cfg.sr[path]);
    const double q_rd = min_q(cfg.rd[path]);
    const double hi = std::min(1.0 / d_sr, 1.0 / d_rd);
    auto sum_constraint = [&](double t) {
        return std::pow(d_sr * t, 1.0 / (q_sr + 1.0)) +
               std::pow(d_rd * t, 1.0 / (q_rd + 1.0)) - 1.0;
    };
    // S(0) = -1 and S(hi) >= 0; strict monotonicity makes the root unique.
    if (!(sum_constraint(0.0) < 0.0) || !(sum_constraint(hi) > 0.0))
        throw std::runtime_error("optimize_select_max: bracket lost its root");
    const double t0 = numerics::bisect_root(sum_constraint, 0.0, hi, 1e-12);
    return {std::pow(d_sr * t0, 1.0 / (q_sr + 1.0)),
            std::pow(d_rd * t0, 1.0 / (q_rd + 1.0))};
}

PowerAllocation optimize_select_max_all(const protocols::SystemConfig& cfg,
                                        double margin) {
    PowerAllocation alloc;
    alloc.scheme = Scheme::optimal;
    for (std::size_t b = 0; b < cfg.n_relays(); ++b) {
        const PathSplit s = optimize_select_max(cfg, b, margin);
        alloc.rho_sr.push_back(s.rho_sr);
        alloc.rho_rd.push_back(s.rho_rd);
    }
    return alloc;
}

double all_active_asym_objective(const protocols::SystemConfig& cfg,
                                 const std::vector<double>& rho,
                                 double margin) {
    const Posynomial gp = build_all_active_program(cfg, margin);
    if (rho.size() != 2 * cfg.n_relays())
        throw std::invalid_argument("all_active_asym_objective: rho size");
    return gp_value(gp, rho);
}

double select_max_asym_objective(const protocols::SystemConfig& cfg,
                                 std::size_t path, double rho_sr,
                                 double margin) {
    const double d_sr = delta_const(cfg.sr[path], margin);
    const double d_rd = delta_const(cfg.rd[path], margin);
    const double q_sr = min_q(cfg.sr[path]);
    const double q_rd = min_q(cfg.rd[path]);
    const double rho_rd = 1.0 - rho_sr;
    return d_sr / q_sr * std::pow(rho_sr, -q_sr) +
           d_rd / q_rd * std::pow(rho_rd, -q_rd);
}

std::pair<PowerAllocation, GpSolveReport> optimize_all_active(
    const protocols::SystemConfig& cfg, double margin) {
    const Posynomial gp = build_all_active_program(cfg, margin);
    const std::size_t dim = 2 * cfg.n_relays();
    std::vector<double> rho(dim, 1.0 / static_cast<double>(dim));
    GpSolveReport report;
    double f = gp_value(gp, rho);
    double step = 1.0;
    constexpr int kMaxIter = 10000;
    constexpr double kKktTol = 1e-8;
    for (report.iterations = 0; report.iterations < kMaxIter;
         ++report.iterations) {
        // KKT weights: w_i = sum_n a_{n,i} t_n; stationary point has
        // w_i / rho_i constant across i, so rho proportional to w.
        std::vector<double> w(dim, 0.0);
        for (std::size_t t = 0; t < gp.coeff.size(); ++t) {
            const double tv = gp_term(gp, t, rho);
            for (std::size_t i = 0; i < dim; ++i) w[i] += gp.expo[t][i] * tv;
        }
        const double w_sum = std::accumulate(w.begin(), w.end(), 0.0);
        double resid = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            resid = std::max(resid, std::fabs(w[i] / rho[i] - w_sum));
        report.kkt_residual = resid / std::max(1.0, std::fabs(w_sum));
        if (report.kkt_residual <= kKktTol) break;
        // Damped multiplicative update in log space with backtracking.
        for (;;) {
            std::vector<double> trial(dim);
            double norm = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                trial[i] = std::exp((1.0 - step) * std::log(rho[i]) +
                                    step * std::log(w[i] / w_sum));
                norm += trial[i];
            }
            for (auto& r : trial) r = std::min(1.0, r / norm);
            const double f_trial = gp_value(gp, trial);
            if (f_trial <= f || step < 1e-6) {
                rho = std::move(trial);
                f = f_trial;
                step = std::min(1.0, step * 2.0);
                break;
            }
            step *= 0.5;
        }
    }
    report.objective = f;
    PowerAllocation alloc;
    alloc.scheme = Scheme::optimal;
    const std::size_t n = cfg.n_relays();
    alloc.rho_sr.assign(rho.begin(), rho.begin() + n);
    alloc.rho_rd.assign(rho.begin() + n, rho.end());
    return {alloc, report};
}

PowerAllocation distance_rule(const protocols::SystemConfig& cfg,
                              protocols::Protocol protocol) {
    cfg.validate();
    PowerAllocation alloc;
    alloc.scheme = Scheme::distance_rule;
    const std::size_t n = cfg.n_relays();
    if (protocol == protocols::Protocol::all_active) {
        double total = 0.0;
        for (std::size_t m = 0; m < n; ++m)
            total += cfg.sr[m].geometry.distance_km +
                     cfg.rd[m].geometry.distance_km;
        for (std::size_t m = 0; m < n; ++m) {
            alloc.rho_sr.push_back(cfg.sr[m].geometry.distance_km / total);
            alloc.rho_rd.push_back(cfg.rd[m].geometry.distance_km / total);
        }
    } else {
        for (std::size_t m = 0; m < n; ++m) {
            const double pair_total = cfg.sr[m].geometry.distance_km +
                                      cfg.rd[m].geometry.distance_km;
            alloc.rho_sr.push_back(cfg.sr[m].geometry.distance_km / pair_total);
            alloc.rho_rd.push_back(cfg.rd[m].geometry.distance_km / pair_total);
        }
    }
    return alloc;
}

PowerAllocation equal_allocation(const protocols::SystemConfig& cfg,
                                 protocols::Protocol protocol) {
    cfg.validate();
    PowerAllocation alloc;
    alloc.scheme = Scheme::equal;
    const std::size_t n = cfg.n_relays();
    const double r = (protocol == protocols::Protocol::all_active)
                         ? 1.0 / (2.0 * static_cast<double>(n))
                         : 0.5;
    alloc.rho_sr.assign(n, r);
    alloc.rho_rd.assign(n, r);
    return alloc;
}

protocols::SystemConfig with_allocation(const protocols::SystemConfig& cfg,
                                        const PowerAllocation& alloc) {
    cfg.validate();
    if (alloc.rho_sr.size() != cfg.n_relays() ||
        alloc.rho_rd.size() != cfg.n_relays())
        throw std::invalid_argument("with_allocation: size mismatch");
    protocols::SystemConfig out = cfg;
    for (std::size_t m = 0; m < cfg.n_relays(); ++m) {
        out.sr[m].rho = alloc.rho_sr[m];
        out.rd[m].rho = alloc.rho_rd[m];
    }
    return out;
}

}  // namespace fso::power_alloc
