#ifndef FSO_POWER_ALLOC_HPP
#define FSO_POWER_ALLOC_HPP

#include <utility>
#include <vector>

#include "fso/protocols.hpp"

namespace fso::power_alloc {

enum class Scheme { optimal, distance_rule, equal };

/// Power fractions for every hop. All-active: all 2N entries sum to 1.
/// Select-max / DSSC: rho_sr[b] + rho_rd[b] = 1 for each path b.
struct PowerAllocation {
    std::vector<double> rho_sr;
    std::vector<double> rho_rd;
    Scheme scheme = Scheme::equal;
};

struct GpSolveReport {
    int iterations = 0;
    double kkt_residual = 0.0;
    double objective = 0.0;
};

/// Per-path split for one select-max / DSSC path.
struct PathSplit {
    double rho_sr;
    double rho_rd;
};

/// Closed-form Lagrangian optimum of the asymptotic per-path outage:
/// bisects the sum-constraint root and maps it back to the two fractions.
PathSplit optimize_select_max(const protocols::SystemConfig& cfg,
                              std::size_t path, double margin);

/// All paths optimized independently (the select-max objective factorizes).
PowerAllocation optimize_select_max_all(const protocols::SystemConfig& cfg,
                                        double margin);

/// Minimizes the asymptotic all-active posynomial over the 2N-simplex.
std::pair<PowerAllocation, GpSolveReport> optimize_all_active(
    const protocols::SystemConfig& cfg, double margin);

/// Distance-proportional suboptimal rule.
PowerAllocation distance_rule(const protocols::SystemConfig& cfg,
                              protocols::Protocol protocol);

PowerAllocation equal_allocation(const protocols::SystemConfig& cfg,
                                 protocols::Protocol protocol);

/// cfg with the allocation's fractions applied to every hop.
protocols::SystemConfig with_allocation(const protocols::SystemConfig& cfg,
                                        const PowerAllocation& alloc);

/// Asymptotic objective of the all-active geometric program at the given
/// fractions (rho laid out as [sr_0..sr_{N-1}, rd_0..rd_{N-1}]).
double all_active_asym_objective(const protocols::SystemConfig& cfg,
                                 const std::vector<double>& rho, double margin);

/// Asymptotic two-term objective for one select-max path.
double select_max_asym_objective(const protocols::SystemConfig& cfg,
                                 std::size_t path, double rho_sr,
                                 double margin);

}  // namespace fso::power_alloc

#endif
