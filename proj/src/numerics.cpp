#include "fso/numerics.hpp"

#include <cmath>
#include <limits>

namespace fso::numerics {

double ln_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("ln_gamma: argument must be > 0");
    return std::lgamma(x);
}

double gamma_fn(double x) {
    if (x <= 0.0 && x == std::floor(x))
        throw std::domain_error("gamma_fn: pole at non-positive integer");
    return std::tgamma(x);
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 10000;

// Temme's series for K_mu, K_{mu+1} with |mu| <= 1/2, valid for x <= 2.
void bessel_k_temme(double x, double mu, double& kmu, double& kmu1) {
    const double x2 = 0.5 * x;
    const double pimu = M_PI * mu;
    const double fact = (std::fabs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    const double d = -std::log(x2);
    const double e1 = mu * d;
    const double fact2 = (std::fabs(e1) < kEps) ? 1.0 : std::sinh(e1) / e1;
    const double gampl = 1.0 / std::tgamma(1.0 + mu);
    const double gammi = 1.0 / std::tgamma(1.0 - mu);
    // gam1 -> -EulerGamma as mu -> 0.
    const double gam1 = (std::fabs(mu) < 1e-9)
                            ? -0.5772156649015329
                            : (gammi - gampl) / (2.0 * mu);
    const double gam2 = 0.5 * (gammi + gampl);
    double ff = fact * (gam1 * std::cosh(e1) + gam2 * fact2 * d);
    double sum = ff;
    const double e = std::exp(e1);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    const double d2 = x2 * x2;
    double sum1 = p;
    for (int i = 1; i <= kMaxIter; ++i) {
        ff = (i * ff + p + q) / (i * i - mu * mu);
        c *= d2 / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        sum1 += c * (p - i * ff);
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    kmu = sum;
    kmu1 = sum1 * (2.0 / x);
}

// Steed's continued fraction CF2 for x > 2.
void bessel_k_cf2(double x, double mu, double& kmu, double& kmu1) {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu * mu;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= kMaxIter; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < kEps) break;
    }
    h = a1 * h;
    kmu = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) / s;
    kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

}  // namespace

double bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k: x must be > 0");
    if (nu < 0.0) nu = -nu;  // K_{-nu} = K_{nu}
    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;  // in [-1/2, 1/2]
    double kmu, kmu1;
    if (x <= 2.0)
        bessel_k_temme(x, mu, kmu, kmu1);
    else
        bessel_k_cf2(x, mu, kmu, kmu1);
    for (int i = 1; i <= nl; ++i) {
        const double knext = (mu + i) * (2.0 / x) * kmu1 + kmu;
        kmu = kmu1;
        kmu1 = knext;
    }
    if (!std::isfinite(kmu))
        throw std::overflow_error("bessel_k: overflow (x below underflow floor)");
    return kmu;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("bisect_root: tol must be > 0");
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi))
        throw std::invalid_argument("bisect_root: no sign change on bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

IntegrationResult integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b, double tol) {
    IntegrationResult r;
    if (std::isinf(b)) {
        auto g = detail::half_line(f, a);
        detail::integrate_core(g, 0.0, 1.0, tol, r.value, r.error_estimate,
                               r.converged);
    } else {
        detail::integrate_core(f, a, b, tol, r.value, r.error_estimate,
                               r.converged);
    }
    return r;
}

IntegrationResultC integrate_adaptive_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double tol) {
    IntegrationResultC r;
    if (std::isinf(b)) {
        auto g = detail::half_line(f, a);
        detail::integrate_core(g, 0.0, 1.0, tol, r.value, r.error_estimate,
                               r.converged);
    } else {
        detail::integrate_core(f, a, b, tol, r.value, r.error_estimate,
                               r.converged);
    }
    return r;
}

double euler_cdf_inversion(
    const std::function<std::complex<double>(std::complex<double>)>& mgf_product,
    double x, const EulerInversionParams& params) {
    if (!(x > 0.0))
        throw std::domain_error("euler_cdf_inversion: x must be > 0");
    const double A = params.decay;
    const int K = params.avg_depth;
    const int L = params.trunc;
    if (!(A > 0.0) || K < 1 || L < 1)
        throw std::invalid_argument("euler_cdf_inversion: bad parameters");

    // Partial sums S_0 .. S_{L+K} of the alternating series of
    // Re{ M(-s_l) / s_l }, s_l = (A + j 2 pi l) / (2x).
    const int n_terms = L + K + 1;
    std::vector<double> partial(n_terms);
    double run = 0.0;
    for (int l = 0; l < n_terms; ++l) {
        const std::complex<double> s(A / (2.0 * x), M_PI * l / x);
        double term = std::real(mgf_product(-s) / s);
        if (l == 0) term *= 0.5;
        run += (l % 2 == 0) ? term : -term;
        partial[l] = run;
    }
    // Binomial average of the last K+1 partial sums.
    double binom = 1.0;  // C(K, 0)
    double acc = 0.0;
    for (int k = 0; k <= K; ++k) {
        acc += binom * partial[L + k];
        binom *= static_cast<double>(K - k) / (k + 1);
    }
    const double value =
        std::ldexp(1.0, -K) * std::exp(0.5 * A) / x * acc;
    return std::min(1.0, std::max(0.0, value));
}

}  // namespace fso::numerics
