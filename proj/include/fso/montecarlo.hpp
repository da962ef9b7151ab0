#ifndef FSO_MONTECARLO_HPP
#define FSO_MONTECARLO_HPP

#include <cstdint>
#include <random>

#include "fso/protocols.hpp"

namespace fso::montecarlo {

struct SimPlan {
    std::uint64_t n_slots = 1'000'000;
    std::uint64_t seed = 0;
    protocols::Protocol target = protocols::Protocol::select_max;
    double margin = 0.0;            // P_M, linear
    double threshold_margin = 0.0;  // T-bar, linear (DSSC only)
};

struct SimEstimate {
    double p_hat;
    double ci_halfwidth_3sigma;
    std::uint64_t n_slots;
    std::uint64_t seed;
};

/// Unit-mean Gamma-Gamma draw: product of independent Gamma(alpha, 1/alpha)
/// and Gamma(beta, 1/beta) variates.
double sample_gg(const channel::GammaGamma& d, std::mt19937_64& rng);

/// Slot-level outage frequency for the planned protocol. Deterministic for
/// a fixed seed regardless of the worker count: slots are partitioned into
/// fixed blocks with per-block derived seeds and integer event counts.
SimEstimate simulate_outage(const protocols::SystemConfig& cfg,
                            const SimPlan& plan);

/// Fraction of counted DSSC slots spent on each relay of the selected pair.
std::pair<double, double> dssc_occupancy(const protocols::SystemConfig& cfg,
                                         const SimPlan& plan);

}  // namespace fso::montecarlo

#endif
