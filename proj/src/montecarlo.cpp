#include "fso/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace fso::montecarlo {

namespace {

constexpr std::uint64_t kBlockSlots = 1u << 16;
constexpr std::uint64_t kDsscWarmup = 1000;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(block + 1)));
}

unsigned worker_count() {
    if (const char* env = std::getenv("FSO_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

struct LinkWeights {
    std::vector<double> sr, rd;  // rho * hbar per hop
};

LinkWeights weights_of(const protocols::SystemConfig& cfg) {
    LinkWeights w;
    for (const auto& l : cfg.sr) w.sr.push_back(l.rho * l.path_gain);
    for (const auto& l : cfg.rd) w.rd.push_back(l.rho * l.path_gain);
    return w;
}

// Runs fn(block_index, slots_in_block) over all blocks on a small pool;
// per-block results land in pre-sized slots, so summation order is fixed.
template <class Fn>
void for_each_block(std::uint64_t n_slots, Fn fn) {
    const std::uint64_t n_blocks = (n_slots + kBlockSlots - 1) / kBlockSlots;
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_blocks) break;
            const std::uint64_t slots =
                std::min(kBlockSlots, n_slots - b * kBlockSlots);
            fn(b, slots);
        }
    };
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), n_blocks));
    if (workers <= 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

std::uint64_t count_all_active(const protocols::SystemConfig& cfg,
                               const LinkWeights& w, double margin,
                               std::uint64_t slots, std::mt19937_64& rng) {
    const std::size_t n = cfg.n_relays();
    const double outage_level = 1.0 / margin;
    std::uint64_t events = 0;
    for (std::uint64_t s = 0; s < slots; ++s) {
        double sum = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double h_sr = w.sr[m] * sample_gg(cfg.sr[m].fading(), rng);
            const double h_rd = w.rd[m] * sample_gg(cfg.rd[m].fading(), rng);
            if (h_sr >= outage_level) sum += h_rd;  // relay m decoded
        }
        if (sum < outage_level) ++events;
    }
    return events;
}

std::uint64_t count_select_max(const protocols::SystemConfig& cfg,
                               const LinkWeights& w, double margin,
                               std::uint64_t slots, std::mt19937_64& rng) {
    const std::size_t n = cfg.n_relays();
    const double outage_level = 1.0 / margin;
    std::uint64_t events = 0;
    for (std::uint64_t s = 0; s < slots; ++s) {
        double best = -1.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double h_sr = w.sr[m] * sample_gg(cfg.sr[m].fading(), rng);
            const double h_rd = w.rd[m] * sample_gg(cfg.rd[m].fading(), rng);
            best = std::max(best, std::min(h_sr, h_rd));
        }
        if (best < outage_level) ++events;
    }
    return events;
}

// Two-state switching chain; returns (outage events, slots on first relay).
std::pair<std::uint64_t, std::uint64_t> count_dssc(
    const protocols::SystemConfig& cfg, const LinkWeights& w, double margin,
    double threshold_margin, std::uint64_t slots, std::mt19937_64& rng) {
    const auto [i1, i2] = dssc_pair_selection(cfg);
    const double outage_level = 1.0 / margin;
    const double switch_level = 1.0 / threshold_margin;
    std::uint64_t events = 0, on_first = 0;
    std::size_t prev = i1;
    for (std::uint64_t s = 0; s < kDsscWarmup + slots; ++s) {
        const double g1 = std::min(
            w.sr[i1] * sample_gg(cfg.sr[i1].fading(), rng),
            w.rd[i1] * sample_gg(cfg.rd[i1].fading(), rng));
        const double g2 = std::min(
            w.sr[i2] * sample_gg(cfg.sr[i2].fading(), rng),
            w.rd[i2] * sample_gg(cfg.rd[i2].fading(), rng));
        // Switch away when the previously active path's current min-SNR
        // falls below the threshold.
        const double g_prev = (prev == i1) ? g1 : g2;
        const std::size_t active =
            (g_prev >= switch_level) ? prev : (prev == i1 ? i2 : i1);
        if (s >= kDsscWarmup) {
            const double g_active = (active == i1) ? g1 : g2;
            if (g_active < outage_level) ++events;
            if (active == i1) ++on_first;
        }
        prev = active;
    }
    return {events, on_first};
}

void run_plan(const protocols::SystemConfig& cfg, const SimPlan& plan,
              std::uint64_t& outage_events, std::uint64_t& first_relay_slots) {
    cfg.validate();
    if (plan.n_slots < 1) throw std::invalid_argument("SimPlan: n_slots >= 1");
    if (!(plan.margin > 0.0)) throw std::invalid_argument("SimPlan: margin");
    if (plan.target == protocols::Protocol::dssc &&
        !(plan.threshold_margin > 0.0))
        throw std::invalid_argument("SimPlan: DSSC needs threshold_margin");
    const LinkWeights w = weights_of(cfg);
    const std::uint64_t n_blocks =
        (plan.n_slots + kBlockSlots - 1) / kBlockSlots;
    std::vector<std::uint64_t> events(n_blocks, 0), occupancy(n_blocks, 0);
    for_each_block(plan.n_slots, [&](std::uint64_t b, std::uint64_t slots) {
        std::mt19937_64 rng = block_rng(plan.seed, b);
        switch (plan.target) {
            case protocols::Protocol::all_active:
                events[b] = count_all_active(cfg, w, plan.margin, slots, rng);
                break;
            case protocols::Protocol::select_max:
                events[b] = count_select_max(cfg, w, plan.margin, slots, rng);
                break;
            case protocols::Protocol::dssc: {
                auto [e, occ] = count_dssc(cfg, w, plan.margin,
                                           plan.threshold_margin, slots, rng);
                events[b] = e;
                occupancy[b] = occ;
                break;
            }
        }
    });
    outage_events = 0;
    first_relay_slots = 0;
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
        outage_events += events[b];
        first_relay_slots += occupancy[b];
    }
}

}  // namespace

double sample_gg(const channel::GammaGamma& d, std::mt19937_64& rng) {
    std::gamma_distribution<double> big(d.alpha, 1.0 / d.alpha);
    std::gamma_distribution<double> small(d.beta, 1.0 / d.beta);
    return big(rng) * small(rng);
}

SimEstimate simulate_outage(const protocols::SystemConfig& cfg,
                            const SimPlan& plan) {
    std::uint64_t events = 0, occ = 0;
    run_plan(cfg, plan, events, occ);
    const double n = static_cast<double>(plan.n_slots);
    const double p = static_cast<double>(events) / n;
    return {p, 3.0 * std::sqrt(p * (1.0 - p) / n), plan.n_slots, plan.seed};
}

std::pair<double, double> dssc_occupancy(const protocols::SystemConfig& cfg,
                                         const SimPlan& plan) {
    if (plan.target != protocols::Protocol::dssc)
        throw std::invalid_argument("dssc_occupancy: plan must target DSSC");
    std::uint64_t events = 0, occ = 0;
    run_plan(cfg, plan, events, occ);
    const double f = static_cast<double>(occ) / static_cast<double>(plan.n_slots);
    return {f, 1.0 - f};
}

}  // namespace fso::montecarlo
