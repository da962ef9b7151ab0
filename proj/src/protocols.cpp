#include "fso/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace fso::protocols {

using channel::link_outage;
using channel::link_outage_asymptotic;
using numerics::ln_gamma;

void SystemConfig::validate() const {
    if (sr.empty() || sr.size() != rd.size())
        throw std::invalid_argument(
            "SystemConfig: sr and rd must be non-empty and equally sized");
}

std::size_t DecodingSet::count() const { return std::popcount(bits); }

namespace {

double min_q(const channel::LinkParams& l) {
    return std::min(l.turb.alpha, l.turb.beta);
}

// Per-link constant of the asymptotic sum CDF:
// (alpha beta / (hbar rho))^q * Gamma(q) Gamma(p-q) / (Gamma(alpha) Gamma(beta))
double sum_member_const(const channel::LinkParams& l) {
    const double a = l.turb.alpha, b = l.turb.beta;
    const double p = std::max(a, b), q = std::min(a, b);
    return std::pow(a * b / (l.path_gain * l.rho), q) *
           std::exp(ln_gamma(q) + ln_gamma(p - q) - ln_gamma(a) - ln_gamma(b));
}

}  // namespace

double decoding_set_prob(const SystemConfig& cfg, DecodingSet set,
                         double margin) {
    cfg.validate();
    double p = 1.0;
    for (std::size_t m = 0; m < cfg.n_relays(); ++m) {
        const double po = link_outage(cfg.sr[m], margin);
        p *= set.contains(m) ? (1.0 - po) : po;
    }
    return p;
}

double sum_cdf_exact(const SystemConfig& cfg, DecodingSet set, double x,
                     const numerics::EulerInversionParams& params) {
    cfg.validate();
    if (set.empty())
        throw std::invalid_argument("sum_cdf_exact: set must be non-empty");
    std::vector<std::unique_ptr<channel::GgMgf>> mgfs;
    for (std::size_t m = 0; m < cfg.n_relays(); ++m)
        if (set.contains(m))
            mgfs.push_back(std::make_unique<channel::GgMgf>(
                cfg.rd[m].fading(), cfg.rd[m].path_gain * cfg.rd[m].rho));
    auto product = [&mgfs](std::complex<double> s) {
        std::complex<double> p{1.0, 0.0};
        for (const auto& m : mgfs) p *= (*m)(s);
        return p;
    };
    return numerics::euler_cdf_inversion(product, x, params);
}

double sum_cdf_asymptotic(const SystemConfig& cfg, DecodingSet set, double x) {
    cfg.validate();
    if (set.empty())
        throw std::invalid_argument("sum_cdf_asymptotic: set must be non-empty");
    double num = 1.0;
    double q_sum = 0.0;
    for (std::size_t m = 0; m < cfg.n_relays(); ++m) {
        if (!set.contains(m)) continue;
        num *= sum_member_const(cfg.rd[m]);
        q_sum += min_q(cfg.rd[m]);
    }
    return num * std::pow(x, q_sum) / std::exp(ln_gamma(q_sum + 1.0));
}

OutageResult all_active_outage(const SystemConfig& cfg, double margin,
                               Method mode,
                               const numerics::EulerInversionParams& params) {
    cfg.validate();
    const std::size_t n = cfg.n_relays();
    if (n > kMaxRelaysExact)
        throw std::invalid_argument("all_active_outage: N exceeds 2^N cap");
    double total = 0.0;
    if (mode == Method::exact) {
        // Shared per-link MGF caches across the 2^N sets.
        std::vector<std::unique_ptr<channel::GgMgf>> mgfs;
        for (std::size_t m = 0; m < n; ++m)
            mgfs.push_back(std::make_unique<channel::GgMgf>(
                cfg.rd[m].fading(), cfg.rd[m].path_gain * cfg.rd[m].rho));
        for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
            const DecodingSet set{bits};
            const double pset = decoding_set_prob(cfg, set, margin);
            double cdf = 1.0;  // empty decoding set: outage is certain
            if (!set.empty()) {
                auto product = [&](std::complex<double> s) {
                    std::complex<double> p{1.0, 0.0};
                    for (std::size_t m = 0; m < n; ++m)
                        if (set.contains(m)) p *= (*mgfs[m])(s);
                    return p;
                };
                cdf = numerics::euler_cdf_inversion(product, 1.0 / margin,
                                                    params);
            }
            total += pset * cdf;
        }
        return {std::min(1.0, std::max(0.0, total)), Method::exact, {}};
    }
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        const DecodingSet set{bits};
        double term = 1.0;
        for (std::size_t m = 0; m < n; ++m)
            if (!set.contains(m))
                term *= link_outage_asymptotic(cfg.sr[m], margin);
        if (!set.empty())
            term *= sum_cdf_asymptotic(cfg, set, 1.0 / margin);
        total += term;
    }
    return {total, Method::asymptotic, {}};
}

double min_path_cdf(const SystemConfig& cfg, std::size_t b, double x) {
    cfg.validate();
    if (b >= cfg.n_relays())
        throw std::out_of_range("min_path_cdf: path index");
    const double sr = link_outage(cfg.sr[b], x);
    const double rd = link_outage(cfg.rd[b], x);
    return 1.0 - (1.0 - sr) * (1.0 - rd);
}

OutageResult select_max_outage(const SystemConfig& cfg, double margin,
                               Method mode) {
    cfg.validate();
    double p = 1.0;
    if (mode == Method::exact) {
        for (std::size_t b = 0; b < cfg.n_relays(); ++b)
            p *= min_path_cdf(cfg, b, margin);
        return {p, Method::exact, {}};
    }
    for (std::size_t b = 0; b < cfg.n_relays(); ++b)
        p *= link_outage_asymptotic(cfg.sr[b], margin) +
             link_outage_asymptotic(cfg.rd[b], margin);
    return {p, Method::asymptotic, {}};
}

std::pair<std::size_t, std::size_t> dssc_pair_selection(
    const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.n_relays() < 2)
        throw std::invalid_argument("dssc_pair_selection: needs N >= 2");
    std::vector<std::size_t> idx(cfg.n_relays());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto end_to_end = [&cfg](std::size_t i) {
        return std::max(cfg.sr[i].geometry.distance_km,
                        cfg.rd[i].geometry.distance_km);
    };
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) {
                         return end_to_end(a) < end_to_end(b);
                     });
    return {std::min(idx[0], idx[1]), std::max(idx[0], idx[1])};
}

OutageResult dssc_outage(const SystemConfig& cfg, double margin,
                         double threshold_margin) {
    if (!(threshold_margin > 0.0))
        throw std::invalid_argument("dssc_outage: threshold must be > 0");
    const auto [i1, i2] = dssc_pair_selection(cfg);
    const double f1t = min_path_cdf(cfg, i1, threshold_margin);
    const double f2t = min_path_cdf(cfg, i2, threshold_margin);
    const double f1p = min_path_cdf(cfg, i1, margin);
    const double f2p = min_path_cdf(cfg, i2, margin);
    const double denom = f1t + f2t;
    double p;
    if (threshold_margin <= margin) {
        // Stationary mixture weight f1t*f2t/(f1t+f2t) vanishes with the
        // threshold CDFs; 0/0 at extreme thresholds resolves to 0.
        const double w = denom > 1e-300 ? f1t * f2t / denom : 0.0;
        p = w * (f1p + f2p);
    } else {
        if (denom > 1e-300) {
            p = f1t * f2t / denom * (f1p + f2p - 2.0) +
                (f1p * f2t + f1t * f2p) / denom;
        } else {
            p = 0.5 * (f1p + f2p);  // equal occupancy limit
        }
    }
    return {std::min(1.0, std::max(0.0, p)), Method::exact, {}};
}

double dssc_outage_asymptotic(const SystemConfig& cfg, double margin) {
    const auto [i1, i2] = dssc_pair_selection(cfg);
    SystemConfig pair{{cfg.sr[i1], cfg.sr[i2]}, {cfg.rd[i1], cfg.rd[i2]}};
    return select_max_outage(pair, margin, Method::asymptotic).p_out;
}

double diversity_gain(const SystemConfig& cfg, Protocol protocol) {
    cfg.validate();
    const std::size_t n = cfg.n_relays();
    switch (protocol) {
        case Protocol::all_active: {
            if (n > kMaxRelaysExact)
                throw std::invalid_argument("diversity_gain: N exceeds cap");
            double best = std::numeric_limits<double>::infinity();
            for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
                double g = 0.0;
                for (std::size_t m = 0; m < n; ++m)
                    g += ((bits >> m) & 1u) ? min_q(cfg.rd[m])
                                            : min_q(cfg.sr[m]);
                best = std::min(best, g);
            }
            return best;
        }
        case Protocol::select_max: {
            double g = 0.0;
            for (std::size_t b = 0; b < n; ++b)
                g += std::min(min_q(cfg.sr[b]), min_q(cfg.rd[b]));
            return g;
        }
        case Protocol::dssc: {
            const auto [i1, i2] = dssc_pair_selection(cfg);
            return std::min(min_q(cfg.sr[i1]), min_q(cfg.rd[i1])) +
                   std::min(min_q(cfg.sr[i2]), min_q(cfg.rd[i2]));
        }
    }
    throw std::logic_error("diversity_gain: unknown protocol");
}

}  // namespace fso::protocols
