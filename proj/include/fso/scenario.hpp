#ifndef FSO_SCENARIO_HPP
#define FSO_SCENARIO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fso/montecarlo.hpp"
#include "fso/power_alloc.hpp"
#include "fso/protocols.hpp"

namespace fso::scenario {

struct SweepGrid {
    double start_db;
    double stop_db;
    double step_db;
};

struct McPlan {
    std::uint64_t n_slots = 1'000'000;
    std::uint64_t seed = 0;
};

struct DsscThresholdPolicy {
    bool optimal = true;   // T-bar tracks P_M
    double fixed_db = 0.0; // used when !optimal
};

struct Scenario {
    std::string name;
    std::optional<channel::OpticalConstants> optics;
    double wavelength_m = 0.0;
    double cn2 = 0.0;
    double attenuation_per_km = 0.0;
    double rx_aperture_m = 0.0;
    double tx_aperture_m = 0.0;
    double divergence_mrad = 0.0;
    std::vector<double> d_sr_km;
    std::vector<double> d_rd_km;
    std::vector<protocols::Protocol> protocols_to_run;
    power_alloc::Scheme allocation = power_alloc::Scheme::equal;
    SweepGrid sweep{20.0, 50.0, 1.0};
    std::optional<McPlan> mc;
    DsscThresholdPolicy dssc_threshold;

    std::size_t n_relays() const { return d_sr_km.size(); }

    /// Topology with unit fractions (allocation applied separately).
    protocols::SystemConfig base_config() const;

    /// Topology with this scenario's allocation scheme applied for the
    /// given protocol at the given power margin.
    protocols::SystemConfig config_for(protocols::Protocol p,
                                       double margin) const;

    /// Derived quantities (path loss, alpha, beta per hop) for echoing.
    std::string provenance() const;
};

/// Parses and validates a scenario file (JSON). Throws std::runtime_error
/// with location details on parse failure, std::invalid_argument naming the
/// violated invariant on validation failure.
Scenario load_scenario(const std::string& path);

/// Rebuilds the scenario with n symmetric relays from its first distances.
void override_relays(Scenario& s, std::size_t n);

struct McCell {
    double p_hat;
    double ci_halfwidth_3sigma;
};

struct ProtocolCells {
    protocols::Protocol protocol;
    double exact;
    double asymptotic;
    std::optional<McCell> mc;
};

struct SweepRow {
    double margin_db;
    std::vector<ProtocolCells> cells;
};

std::vector<SweepRow> run_sweep(const Scenario& s);

/// RFC-4180 CSV with stable header naming; linear and log10 columns.
void emit_csv(const std::vector<SweepRow>& rows, const Scenario& s,
              std::ostream& out);
void emit_csv_file(const std::vector<SweepRow>& rows, const Scenario& s,
                   const std::string& path);

/// Diversity gains and the select-max over all-active margin gain at a
/// reference outage level, by log-log interpolation of the exact curves.
std::string summarize(const std::vector<SweepRow>& rows, const Scenario& s,
                      double reference_outage = 1e-4);

std::string protocol_name(protocols::Protocol p);
double db_to_linear(double db);
double linear_to_db(double x);

}  // namespace fso::scenario

#endif
