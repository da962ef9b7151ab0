#include "fso/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace fso::channel {

using numerics::bessel_k;
using numerics::ln_gamma;

namespace {

// Above this value of alpha*beta*x the alternating series loses more than
// ~1e-8 to cancellation in double precision; quadrature takes over.
constexpr double kSeriesArgMax = 25.0;
constexpr double kIntegerGap = 1e-9;
constexpr double kPerturb = 1e-6;

}  // namespace

double path_loss(const LinkGeometry& g) {
    if (!(g.distance_km > 0.0) || !(g.rx_aperture_m > 0.0) ||
        !(g.tx_aperture_m > 0.0) || !(g.divergence_mrad > 0.0) ||
        g.attenuation_per_km < 0.0)
        throw std::invalid_argument("path_loss: invalid link geometry");
    // mrad * km = m, same unit as the apertures.
    const double footprint =
        g.tx_aperture_m + g.divergence_mrad * g.distance_km;
    const double geometric =
        (g.rx_aperture_m / footprint) * (g.rx_aperture_m / footprint);
    return geometric * std::exp(-g.attenuation_per_km * g.distance_km);
}

TurbulenceParams turbulence_params(double cn2, double wavelength_m,
                                   double distance_km) {
    if (!(cn2 > 0.0) || !(wavelength_m > 0.0) || !(distance_km > 0.0))
        throw std::invalid_argument("turbulence_params: inputs must be > 0");
    const double d_m = distance_km * 1000.0;
    const double k = 2.0 * M_PI / wavelength_m;
    const double rytov2 =
        1.23 * cn2 * std::pow(k, 7.0 / 6.0) * std::pow(d_m, 11.0 / 6.0);
    // sigma_R^{12/5} = (sigma_R^2)^{6/5}
    const double s125 = std::pow(rytov2, 6.0 / 5.0);
    double alpha =
        1.0 / std::expm1(0.49 * rytov2 / std::pow(1.0 + 1.11 * s125, 7.0 / 6.0));
    const double beta =
        1.0 / std::expm1(0.51 * rytov2 / std::pow(1.0 + 0.69 * s125, 7.0 / 6.0));
    const double diff = alpha - beta;
    if (std::fabs(diff - std::round(diff)) < kIntegerGap) alpha += kPerturb;
    return {alpha, beta, rytov2};
}

double gg_pdf(const GammaGamma& d, double x) {
    if (!(x > 0.0)) throw std::domain_error("gg_pdf: x must be > 0");
    const double a = d.alpha, b = d.beta;
    const double half_sum = 0.5 * (a + b);
    const double log_pref = std::log(2.0) + half_sum * std::log(a * b) -
                            ln_gamma(a) - ln_gamma(b) +
                            (half_sum - 1.0) * std::log(x);
    const double kv = bessel_k(a - b, 2.0 * std::sqrt(a * b * x));
    const double v = std::exp(log_pref) * kv;
    return std::isfinite(v) ? v : 0.0;  // underflow reported as zero density
}

double gg_cdf_series(const GammaGamma& d, double x,
                     const numerics::SeriesControl& ctl) {
    if (!(x > 0.0)) return 0.0;
    const double a = d.alpha, b = d.beta;
    const double diff = a - b;
    if (std::fabs(diff - std::round(diff)) < kIntegerGap)
        throw std::invalid_argument("gg_cdf_series: alpha - beta is integer");
    const double z = a * b * x;
    const double pref = M_PI / (std::sin(M_PI * diff) *
                                std::exp(ln_gamma(a) + ln_gamma(b)));
    double ta = std::pow(z, b) / (b * numerics::gamma_fn(1.0 - diff));
    double tb = std::pow(z, a) / (a * numerics::gamma_fn(1.0 + diff));
    double sum = 0.0;
    for (int l = 0; l < ctl.max_terms; ++l) {
        const double term = ta - tb;
        sum += term;
        if (l > 0 && std::fabs(term) < ctl.tol * std::fabs(sum)) break;
        ta *= z * (b + l) / ((l + 1.0) * (b + l + 1.0) * (l - diff + 1.0));
        tb *= z * (a + l) / ((l + 1.0) * (a + l + 1.0) * (l + diff + 1.0));
    }
    const double v = pref * sum;
    return std::min(1.0, std::max(0.0, v));
}

double gg_cdf_quad(const GammaGamma& d, double x) {
    if (!(x > 0.0)) return 0.0;
    auto r = numerics::integrate_adaptive(
        [&d](double t) { return gg_pdf(d, t); }, 0.0, x, 1e-11);
    return std::min(1.0, std::max(0.0, r.value));
}

double gg_cdf(const GammaGamma& d, double x,
              const numerics::SeriesControl& ctl) {
    if (!(x > 0.0)) return 0.0;
    if (d.alpha * d.beta * x > kSeriesArgMax) return gg_cdf_quad(d, x);
    return gg_cdf_series(d, x, ctl);
}

std::complex<double> gg_mgf(const GammaGamma& d, double weight,
                            std::complex<double> s) {
    if (s.real() > 0.0)
        throw std::domain_error("gg_mgf: Re(s) must be <= 0");
    if (s == std::complex<double>(0.0, 0.0)) return {1.0, 0.0};
    const std::complex<double> sw = s * weight;
    auto r = numerics::integrate_adaptive_complex(
        [&d, sw](double t) -> std::complex<double> {
            return std::exp(sw * t) * gg_pdf(d, t);
        },
        0.0, std::numeric_limits<double>::infinity(), 1e-12);
    return r.value;
}

std::complex<double> GgMgf::operator()(std::complex<double> s) const {
    const std::pair<double, double> key{s.real(), s.imag()};
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    const std::complex<double> v = gg_mgf(dist_, weight_, s);
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(key, v);
    return v;
}

double power_margin(const OpticalConstants& c, double snr_threshold) {
    if (!(snr_threshold > 0.0))
        throw std::domain_error("power_margin: gamma_th must be > 0");
    return c.responsivity * c.slot_duration * c.total_power /
           std::sqrt(c.noise_psd * snr_threshold);
}

double link_outage(const LinkParams& link, double margin) {
    if (!(margin > 0.0)) return 1.0;
    return gg_cdf(link.fading(), 1.0 / (link.path_gain * link.rho * margin));
}

double link_outage_asymptotic(const LinkParams& link, double margin) {
    const double a = link.turb.alpha, b = link.turb.beta;
    const double p = std::max(a, b), q = std::min(a, b);
    const double arg = a * b / (link.path_gain * link.rho * margin);
    return numerics::gamma_fn(p - q) /
           std::exp(ln_gamma(a) + ln_gamma(b)) * std::pow(arg, q) / q;
}

LinkParams make_link(const LinkGeometry& g, double cn2, double wavelength_m,
                     double rho) {
    if (!(rho > 0.0) || rho > 1.0)
        throw std::invalid_argument("make_link: rho must be in (0, 1]");
    return {g, turbulence_params(cn2, wavelength_m, g.distance_km),
            path_loss(g), rho};
}

}  // namespace fso::channel
