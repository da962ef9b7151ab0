#include "fso/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fso::scenario {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

std::string protocol_name(protocols::Protocol p) {
    switch (p) {
        case protocols::Protocol::all_active: return "all_active";
        case protocols::Protocol::select_max: return "select_max";
        case protocols::Protocol::dssc: return "dssc";
    }
    return "?";
}

namespace {

protocols::Protocol protocol_from_name(const std::string& s) {
    if (s == "all_active") return protocols::Protocol::all_active;
    if (s == "select_max") return protocols::Protocol::select_max;
    if (s == "dssc") return protocols::Protocol::dssc;
    throw std::invalid_argument("scenario: unknown protocol '" + s + "'");
}

power_alloc::Scheme scheme_from_name(const std::string& s) {
    if (s == "equal") return power_alloc::Scheme::equal;
    if (s == "distance_rule") return power_alloc::Scheme::distance_rule;
    if (s == "optimal") return power_alloc::Scheme::optimal;
    throw std::invalid_argument("scenario: unknown allocation '" + s + "'");
}

double require_number(const json& j, const char* section, const char* key) {
    if (!j.contains(key))
        throw std::invalid_argument(std::string("scenario: missing required ") +
                                    section + "." + key);
    return j.at(key).get<double>();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_log10(double v) {
    if (v <= 0.0) return "-inf";
    return fmt(std::log10(v));
}

}  // namespace

protocols::SystemConfig Scenario::base_config() const {
    protocols::SystemConfig cfg;
    for (std::size_t i = 0; i < d_sr_km.size(); ++i) {
        channel::LinkGeometry gsr{d_sr_km[i], rx_aperture_m, tx_aperture_m,
                                  divergence_mrad, attenuation_per_km};
        channel::LinkGeometry grd{d_rd_km[i], rx_aperture_m, tx_aperture_m,
                                  divergence_mrad, attenuation_per_km};
        cfg.sr.push_back(channel::make_link(gsr, cn2, wavelength_m, 1.0));
        cfg.rd.push_back(channel::make_link(grd, cn2, wavelength_m, 1.0));
    }
    return cfg;
}

protocols::SystemConfig Scenario::config_for(protocols::Protocol p,
                                             double margin) const {
    const protocols::SystemConfig base = base_config();
    power_alloc::PowerAllocation alloc;
    switch (allocation) {
        case power_alloc::Scheme::equal:
            alloc = power_alloc::equal_allocation(base, p);
            break;
        case power_alloc::Scheme::distance_rule:
            alloc = power_alloc::distance_rule(base, p);
            break;
        case power_alloc::Scheme::optimal:
            if (p == protocols::Protocol::all_active)
                alloc = power_alloc::optimize_all_active(base, margin).first;
            else
                alloc = power_alloc::optimize_select_max_all(base, margin);
            break;
    }
    return power_alloc::with_allocation(base, alloc);
}

std::string Scenario::provenance() const {
    const protocols::SystemConfig cfg = base_config();
    std::ostringstream os;
    os << "# scenario " << name << ": N=" << n_relays() << "\n";
    for (std::size_t i = 0; i < cfg.n_relays(); ++i) {
        const auto& s = cfg.sr[i];
        const auto& r = cfg.rd[i];
        os << "#   path " << i + 1 << ": S->R d=" << fmt(s.geometry.distance_km)
           << " km, h_bar=" << fmt(s.path_gain)
           << ", rytov2=" << fmt(s.turb.rytov_var)
           << ", alpha=" << fmt(s.turb.alpha) << ", beta=" << fmt(s.turb.beta)
           << "; R->D d=" << fmt(r.geometry.distance_km)
           << " km, h_bar=" << fmt(r.path_gain)
           << ", alpha=" << fmt(r.turb.alpha) << ", beta=" << fmt(r.turb.beta)
           << "\n";
    }
    return os.str();
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("scenario: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("scenario: parse error in " + path + ": " +
                                 e.what());
    }

    Scenario s;
    s.name = j.value("name", path);
    const json& weather = j.contains("weather") ? j.at("weather") : json::object();
    s.cn2 = require_number(weather, "weather", "cn2");
    s.attenuation_per_km =
        require_number(weather, "weather", "attenuation_per_km");
    const json& geom = j.contains("geometry") ? j.at("geometry") : json::object();
    s.wavelength_m = require_number(geom, "geometry", "wavelength_nm") * 1e-9;
    s.rx_aperture_m = require_number(geom, "geometry", "rx_aperture_m");
    s.tx_aperture_m = require_number(geom, "geometry", "tx_aperture_m");
    s.divergence_mrad = require_number(geom, "geometry", "divergence_mrad");

    const json& relays = j.contains("relays") ? j.at("relays") : json::object();
    if (!relays.contains("d_sr_km") || !relays.contains("d_rd_km"))
        throw std::invalid_argument(
            "scenario: missing required relays.d_sr_km / relays.d_rd_km");
    s.d_sr_km = relays.at("d_sr_km").get<std::vector<double>>();
    s.d_rd_km = relays.at("d_rd_km").get<std::vector<double>>();
    if (s.d_sr_km.empty() || s.d_sr_km.size() != s.d_rd_km.size())
        throw std::invalid_argument(
            "scenario: d_sr_km and d_rd_km must be non-empty and equal length");
    for (double d : s.d_sr_km)
        if (!(d > 0.0))
            throw std::invalid_argument("scenario: distances must be > 0");
    for (double d : s.d_rd_km)
        if (!(d > 0.0))
            throw std::invalid_argument("scenario: distances must be > 0");

    if (j.contains("protocols"))
        for (const auto& p : j.at("protocols"))
            s.protocols_to_run.push_back(
                protocol_from_name(p.get<std::string>()));
    else
        s.protocols_to_run = {protocols::Protocol::all_active,
                              protocols::Protocol::select_max,
                              protocols::Protocol::dssc};

    s.allocation = scheme_from_name(j.value("allocation", "equal"));

    if (j.contains("sweep")) {
        const json& sw = j.at("sweep");
        s.sweep = {require_number(sw, "sweep", "start_db"),
                   require_number(sw, "sweep", "stop_db"),
                   require_number(sw, "sweep", "step_db")};
    }
    if (!(s.sweep.step_db > 0.0) || s.sweep.stop_db < s.sweep.start_db)
        throw std::invalid_argument("scenario: invalid sweep grid");

    if (j.contains("mc")) {
        const json& m = j.at("mc");
        McPlan plan;
        plan.n_slots = m.value("n_slots", std::uint64_t{1'000'000});
        plan.seed = m.value("seed", std::uint64_t{0});
        if (plan.n_slots < 1)
            throw std::invalid_argument("scenario: mc.n_slots must be >= 1");
        s.mc = plan;
    }

    if (j.contains("dssc_threshold")) {
        const json& t = j.at("dssc_threshold");
        const std::string policy = t.value("policy", "optimal");
        if (policy == "optimal") {
            s.dssc_threshold = {true, 0.0};
        } else if (policy == "fixed") {
            s.dssc_threshold = {
                false, require_number(t, "dssc_threshold", "value_db")};
        } else {
            throw std::invalid_argument(
                "scenario: dssc_threshold.policy must be optimal|fixed");
        }
    }

    if (j.contains("optics")) {
        const json& o = j.at("optics");
        channel::OpticalConstants c{
            s.wavelength_m,
            require_number(o, "optics", "responsivity"),
            require_number(o, "optics", "slot_duration_s"),
            require_number(o, "optics", "total_power_w"),
            require_number(o, "optics", "noise_psd"),
            require_number(o, "optics", "background_power_w")};
        s.optics = c;
    }
    return s;
}

void override_relays(Scenario& s, std::size_t n) {
    if (n < 1) throw std::invalid_argument("override_relays: n must be >= 1");
    const double dsr = s.d_sr_km.front();
    const double drd = s.d_rd_km.front();
    s.d_sr_km.assign(n, dsr);
    s.d_rd_km.assign(n, drd);
}

std::vector<SweepRow> run_sweep(const Scenario& s) {
    std::vector<SweepRow> rows;
    const int n_points = static_cast<int>(
        std::floor((s.sweep.stop_db - s.sweep.start_db) / s.sweep.step_db +
                   0.5)) + 1;
    for (int i = 0; i < n_points; ++i) {
        SweepRow row;
        row.margin_db = s.sweep.start_db + i * s.sweep.step_db;
        const double margin = db_to_linear(row.margin_db);
        for (protocols::Protocol p : s.protocols_to_run) {
            if (p == protocols::Protocol::dssc && s.n_relays() < 2)
                continue;  // DSSC needs a relay pair
            const protocols::SystemConfig cfg = s.config_for(p, margin);
            ProtocolCells cells;
            cells.protocol = p;
            switch (p) {
                case protocols::Protocol::all_active:
                    cells.exact =
                        protocols::all_active_outage(cfg, margin,
                                                     protocols::Method::exact)
                            .p_out;
                    cells.asymptotic =
                        protocols::all_active_outage(
                            cfg, margin, protocols::Method::asymptotic)
                            .p_out;
                    break;
                case protocols::Protocol::select_max:
                    cells.exact =
                        protocols::select_max_outage(cfg, margin,
                                                     protocols::Method::exact)
                            .p_out;
                    cells.asymptotic =
                        protocols::select_max_outage(
                            cfg, margin, protocols::Method::asymptotic)
                            .p_out;
                    break;
                case protocols::Protocol::dssc: {
                    const double threshold =
                        s.dssc_threshold.optimal
                            ? margin
                            : db_to_linear(s.dssc_threshold.fixed_db);
                    cells.exact =
                        protocols::dssc_outage(cfg, margin, threshold).p_out;
                    cells.asymptotic =
                        protocols::dssc_outage_asymptotic(cfg, margin);
                    break;
                }
            }
            if (s.mc) {
                montecarlo::SimPlan plan;
                plan.n_slots = s.mc->n_slots;
                // Distinct stream per grid point and protocol.
                plan.seed = s.mc->seed + 1000003u * i +
                            static_cast<std::uint64_t>(p);
                plan.target = p;
                plan.margin = margin;
                if (p == protocols::Protocol::dssc)
                    plan.threshold_margin =
                        s.dssc_threshold.optimal
                            ? margin
                            : db_to_linear(s.dssc_threshold.fixed_db);
                const montecarlo::SimEstimate est =
                    montecarlo::simulate_outage(cfg, plan);
                cells.mc = McCell{est.p_hat, est.ci_halfwidth_3sigma};
            }
            row.cells.push_back(cells);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void emit_csv(const std::vector<SweepRow>& rows, const Scenario& s,
              std::ostream& out) {
    if (rows.empty())
        throw std::invalid_argument("emit_csv: no sweep rows to write");
    out << "p_margin_db";
    for (const auto& c : rows.front().cells) {
        const std::string p = protocol_name(c.protocol);
        out << "," << p << "_exact," << p << "_exact_log10," << p << "_asym,"
            << p << "_asym_log10";
        if (c.mc) out << "," << p << "_mc," << p << "_mc_ci3";
    }
    out << "\r\n";
    for (const auto& row : rows) {
        out << fmt(row.margin_db);
        for (const auto& c : row.cells) {
            out << "," << fmt(c.exact) << "," << fmt_log10(c.exact) << ","
                << fmt(c.asymptotic) << "," << fmt_log10(c.asymptotic);
            if (c.mc)
                out << "," << fmt(c.mc->p_hat) << ","
                    << fmt(c.mc->ci_halfwidth_3sigma);
        }
        out << "\r\n";
    }
}

void emit_csv_file(const std::vector<SweepRow>& rows, const Scenario& s,
                   const std::string& path) {
    if (rows.empty())
        throw std::invalid_argument("emit_csv: no sweep rows to write");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    emit_csv(rows, s, out);
    if (!out) throw std::runtime_error("emit_csv: write failure on " + path);
}

namespace {

const ProtocolCells* find_cells(const SweepRow& row, protocols::Protocol p) {
    for (const auto& c : row.cells)
        if (c.protocol == p) return &c;
    return nullptr;
}

// Margin (dB) at which the exact curve crosses the target outage,
// log-linearly interpolated between bracketing grid points.
std::optional<double> margin_at_outage(const std::vector<SweepRow>& rows,
                                       protocols::Protocol p, double target) {
    const double lt = std::log10(target);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const ProtocolCells* a = find_cells(rows[i - 1], p);
        const ProtocolCells* b = find_cells(rows[i], p);
        if (!a || !b || a->exact <= 0.0 || b->exact <= 0.0) continue;
        const double la = std::log10(a->exact);
        const double lb = std::log10(b->exact);
        if ((la - lt) * (lb - lt) <= 0.0 && la != lb) {
            const double t = (lt - la) / (lb - la);
            return rows[i - 1].margin_db +
                   t * (rows[i].margin_db - rows[i - 1].margin_db);
        }
    }
    return std::nullopt;
}

}  // namespace

std::string summarize(const std::vector<SweepRow>& rows, const Scenario& s,
                      double reference_outage) {
    if (rows.empty()) throw std::invalid_argument("summarize: no rows");
    std::ostringstream os;
    const protocols::SystemConfig base = s.base_config();
    os << s.provenance();
    os << "# diversity gains:";
    for (protocols::Protocol p : s.protocols_to_run) {
        if (p == protocols::Protocol::dssc && s.n_relays() < 2) continue;
        os << " " << protocol_name(p) << "="
           << fmt(protocols::diversity_gain(base, p));
    }
    os << "\n";
    const auto m_sel = margin_at_outage(rows, protocols::Protocol::select_max,
                                        reference_outage);
    const auto m_all = margin_at_outage(rows, protocols::Protocol::all_active,
                                        reference_outage);
    if (m_sel && m_all) {
        os << "# select_max gain over all_active at P_out=" << fmt(reference_outage)
           << ": " << fmt(*m_all - *m_sel) << " dB\n";
    }
    return os.str();
}

}  // namespace fso::scenario
