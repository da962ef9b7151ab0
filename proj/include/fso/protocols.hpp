#ifndef FSO_PROTOCOLS_HPP
#define FSO_PROTOCOLS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fso/channel.hpp"

namespace fso::protocols {

enum class Protocol { all_active, select_max, dssc };
enum class Method { exact, asymptotic, monte_carlo };

/// Source -> relays -> destination topology. sr[i] and rd[i] describe the
/// two hops through relay i.
struct SystemConfig {
    std::vector<channel::LinkParams> sr;
    std::vector<channel::LinkParams> rd;

    std::size_t n_relays() const { return sr.size(); }
    void validate() const;  // throws on size mismatch or empty topology
};

/// Subset of relay indices that decoded the source transmission.
struct DecodingSet {
    std::uint32_t bits = 0;

    bool contains(std::size_t i) const { return (bits >> i) & 1u; }
    bool empty() const { return bits == 0; }
    std::size_t count() const;
};

struct OutageResult {
    double p_out;
    Method method;
    std::string note;
};

// Exact all-active enumeration is Theta(2^N).
inline constexpr std::size_t kMaxRelaysExact = 20;

/// Probability that exactly the relays in `set` decode at the given margin.
double decoding_set_prob(const SystemConfig& cfg, DecodingSet set,
                         double margin);

/// CDF of sum_{m in set} rho_m hbar_m htilde_m at x, by MGF inversion.
double sum_cdf_exact(const SystemConfig& cfg, DecodingSet set, double x,
                     const numerics::EulerInversionParams& params = {});

/// High-margin closed form for the same sum CDF; log-log slope is sum of
/// the member minima of (alpha, beta).
double sum_cdf_asymptotic(const SystemConfig& cfg, DecodingSet set, double x);

OutageResult all_active_outage(const SystemConfig& cfg, double margin,
                               Method mode,
                               const numerics::EulerInversionParams& params = {});

OutageResult select_max_outage(const SystemConfig& cfg, double margin,
                               Method mode);

/// CDF of the min-equivalent channel gain of path b, evaluated at the per-hop
/// thresholds 1/(hbar rho x) with x in power-margin units.
double min_path_cdf(const SystemConfig& cfg, std::size_t b, double x);

/// The two paths minimizing max(d_SR, d_RD); ties broken by lower index.
std::pair<std::size_t, std::size_t> dssc_pair_selection(const SystemConfig& cfg);

/// Two-branch switch-and-stay outage; threshold_margin is T-bar in
/// power-margin units. Requires N >= 2 (pair chosen internally).
OutageResult dssc_outage(const SystemConfig& cfg, double margin,
                         double threshold_margin);

/// Asymptotic outage of DSSC with optimized threshold (select-max over the
/// chosen pair).
double dssc_outage_asymptotic(const SystemConfig& cfg, double margin);

double diversity_gain(const SystemConfig& cfg, Protocol protocol);

}  // namespace fso::protocols

#endif
