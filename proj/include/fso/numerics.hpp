#ifndef FSO_NUMERICS_HPP
#define FSO_NUMERICS_HPP

#include <complex>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace fso::numerics {

/// Truncation control for the Gamma-Gamma CDF series expansion.
struct SeriesControl {
    double tol = 1e-12;
    int max_terms = 500;
};

/// Parameters of the Euler-summation Laplace inversion used for sum CDFs.
/// decay (A) trades discretization error e^{-A} against roundoff
/// amplification e^{A/2}; ln(1e8) keeps both near 1e-8 in double precision.
struct EulerInversionParams {
    double decay = 18.420680743952367;  // A = ln(1e8)
    int avg_depth = 20;                 // K
    int trunc = 20;                     // L
};

/// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double ln_gamma(double x);

/// Gamma(x) for any non-pole argument (negative non-integers included).
double gamma_fn(double x);

/// Modified Bessel function of the second kind K_nu(x), nu >= 0, x > 0.
/// Throws std::overflow_error when the result exceeds double range
/// (x below the underflow floor for the requested order).
double bessel_k(double nu, double x);

/// Root of f on [lo, hi] by bisection; requires a sign change.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol);

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
};

struct IntegrationResultC {
    std::complex<double> value{0.0, 0.0};
    double error_estimate = 0.0;
    bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7-15 pair on [-1, 1].
inline constexpr double kK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class F, class V>
void gk15(const F& f, double a, double b, V& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    V gauss{};
    kronrod = V{};
    for (int i = 0; i < 8; ++i) {
        const double dx = h * kK15Nodes[i];
        V fv = (i == 7) ? f(c) : V(f(c - dx) + f(c + dx));
        kronrod += kK15Weights[i] * fv;
        if (i % 2 == 1) gauss += kG7Weights[i / 2] * fv;
    }
    kronrod *= h;
    gauss *= h;
    err = std::abs(kronrod - gauss);
}

// Globally adaptive bisection driven by a worst-interval heap.
template <class F, class V>
void integrate_core(const F& f, double a, double b, double tol, V& value,
                    double& err, bool& converged, int max_intervals = 4000) {
    struct Seg {
        double a, b, err;
        V val;
        bool operator<(const Seg& o) const { return err < o.err; }
    };
    std::priority_queue<Seg> heap;
    Seg s0;
    s0.a = a;
    s0.b = b;
    gk15(f, a, b, s0.val, s0.err);
    heap.push(s0);
    value = s0.val;
    err = s0.err;
    int n = 1;
    while (err > tol * std::max(std::abs(value), 1e-300) && n < max_intervals) {
        Seg top = heap.top();
        heap.pop();
        const double mid = 0.5 * (top.a + top.b);
        Seg l, r;
        l.a = top.a;
        l.b = mid;
        r.a = mid;
        r.b = top.b;
        gk15(f, l.a, l.b, l.val, l.err);
        gk15(f, r.a, r.b, r.val, r.err);
        value += l.val + r.val - top.val;
        err += l.err + r.err - top.err;
        heap.push(l);
        heap.push(r);
        ++n;
    }
    converged = err <= tol * std::max(std::abs(value), 1e-300);
}

// Map (a, inf) onto t in (0, 1) via x = a + t/(1-t).
template <class F>
auto half_line(const F& f, double a) {
    return [f, a](double t) {
        const double u = 1.0 - t;
        return f(a + t / u) / (u * u);
    };
}

}  // namespace detail

/// Adaptive quadrature of f over (a, b); b may be +infinity.
IntegrationResult integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b, double tol);

/// Complex-valued variant (same node set, magnitude error control).
IntegrationResultC integrate_adaptive_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double tol);

/// CDF of a positive random variable at x from the product of component MGFs,
/// by Euler-summation inversion of M(-s)/s along Re(s) = A/(2x).
/// Result is clamped to [0, 1].
double euler_cdf_inversion(
    const std::function<std::complex<double>(std::complex<double>)>& mgf_product,
    double x, const EulerInversionParams& params = {});

}  // namespace fso::numerics

#endif
