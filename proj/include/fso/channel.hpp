#ifndef FSO_CHANNEL_HPP
#define FSO_CHANNEL_HPP

#include <complex>
#include <map>
#include <mutex>

#include "fso/numerics.hpp"

namespace fso::channel {

/// Transceiver constants of the IM/DD chain. Only power_margin() consumes
/// them; sweeps work directly in power-margin units.
struct OpticalConstants {
    double wavelength;        // m
    double responsivity;      // A/W
    double slot_duration;     // s
    double total_power;       // W
    double noise_psd;         // W^2 s
    double background_power;  // W
};

struct LinkGeometry {
    double distance_km;
    double rx_aperture_m;
    double tx_aperture_m;
    double divergence_mrad;
    double attenuation_per_km;
};

struct TurbulenceParams {
    double alpha;
    double beta;
    double rytov_var;
};

/// Unit-mean turbulence fading distribution.
struct GammaGamma {
    double alpha;
    double beta;
};

struct LinkParams {
    LinkGeometry geometry;
    TurbulenceParams turb;
    double path_gain;  // h-bar, in (0, 1]
    double rho;        // optical power fraction, in (0, 1]

    GammaGamma fading() const { return {turb.alpha, turb.beta}; }
};

/// Geometric spread plus Beer-Lambert attenuation. Distances in km,
/// divergence in mrad, so the beam footprint term is in meters.
double path_loss(const LinkGeometry& g);

/// Rytov variance and Gamma-Gamma shape parameters from the refraction
/// structure parameter. Applies an epsilon perturbation to alpha when
/// alpha - beta lands on an integer, which the series expansion cannot take.
TurbulenceParams turbulence_params(double cn2, double wavelength_m,
                                   double distance_km);

double gg_pdf(const GammaGamma& d, double x);

/// CDF by the double-branch series expansion; valid while alpha*beta*x stays
/// small enough for the alternating terms not to cancel catastrophically.
/// Throws std::invalid_argument for integer alpha - beta.
double gg_cdf_series(const GammaGamma& d, double x,
                     const numerics::SeriesControl& ctl = {});

/// CDF by adaptive quadrature of the pdf (independent route).
double gg_cdf_quad(const GammaGamma& d, double x);

/// CDF: series where it is accurate, quadrature fallback above the
/// cancellation threshold or when the term cap is hit.
double gg_cdf(const GammaGamma& d, double x,
              const numerics::SeriesControl& ctl = {});

/// E[exp(s * weight * X)] by numerical Laplace transform; Re(s) <= 0.
std::complex<double> gg_mgf(const GammaGamma& d, double weight,
                            std::complex<double> s);

/// Memoizing wrapper around gg_mgf for one (distribution, weight) pair.
/// Thread-safe; the Euler inversion re-visits the same s grid per x.
class GgMgf {
  public:
    GgMgf(const GammaGamma& d, double weight) : dist_(d), weight_(weight) {}
    std::complex<double> operator()(std::complex<double> s) const;

  private:
    GammaGamma dist_;
    double weight_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<double, double>, std::complex<double>> cache_;
};

/// P_M = eta T_b P_t / sqrt(N0 gamma_th).
double power_margin(const OpticalConstants& c, double snr_threshold);

/// Pr{ h-tilde < 1 / (h-bar rho P_M) }.
double link_outage(const LinkParams& link, double margin);

/// Leading-order outage for high power margin; slope is -min(alpha, beta).
double link_outage_asymptotic(const LinkParams& link, double margin);

/// Assembles a LinkParams with derived path loss and turbulence statistics.
LinkParams make_link(const LinkGeometry& g, double cn2, double wavelength_m,
                     double rho);

}  // namespace fso::channel

#endif
