#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "sdpsim/scenario.hpp"
#include "sdpsim/study.hpp"

// Experiment harness: result tables with deterministic CSV rendering,
// the figure sweeps, and the end-to-end broker demo walk-through.

namespace sdpsim {

constexpr const char* kToolVersion = "sdp-sim 1.0.0";
constexpr const char* kInfeasibleMarker = "infeasible";

struct ResultTable {
    std::string experiment_id;
    std::vector<std::string> headers;
    std::vector<std::string> units;  // one per column
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    /// Deterministic rendering: metadata comments, header row, unit row,
    /// data rows. Fixed float formatting keeps identical inputs byte-identical.
    std::string to_csv() const {
        std::ostringstream out;
        out << "# experiment=" << experiment_id << "\n";
        out << "# tool=" << kToolVersion << "\n";
        for (const auto& [key, value] : metadata)
            out << "# " << key << "=" << value << "\n";
        out << join(headers) << "\n" << join(units) << "\n";
        for (const auto& row : rows) out << join(row) << "\n";
        return out.str();
    }

private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        return line;
    }
};

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::string format_rate_mbps(std::optional<double> bits_per_second) {
    if (!bits_per_second) return kInfeasibleMarker;
    return format_number(*bits_per_second / kMbps);
}

struct FigureOverrides {
    std::optional<double> theta;       // seconds
    std::optional<std::size_t> domains;
    std::optional<double> delay_from;  // seconds
    std::optional<double> delay_to;
    std::optional<double> delay_step;
    std::optional<double> fig8_delay;
};

namespace detail {

inline ExperimentSpec resolve_experiment(const Scenario& scenario,
                                         const std::string& figure,
                                         const FigureOverrides& overrides) {
    ExperimentSpec spec;
    spec.figure = figure;
    for (const auto& e : scenario.experiments)
        if (e.figure == figure) spec = e;
    if (overrides.theta) spec.theta = *overrides.theta;
    if (overrides.domains) spec.domains = *overrides.domains;
    if (overrides.delay_from) spec.delay_from = *overrides.delay_from;
    if (overrides.delay_to) spec.delay_to = *overrides.delay_to;
    if (overrides.delay_step) spec.delay_step = *overrides.delay_step;
    if (overrides.fig8_delay) spec.fig8_delay = *overrides.fig8_delay;
    if (!(spec.delay_step > 0.0) || spec.delay_to < spec.delay_from || spec.domains == 0)
        throw ScenarioError(ScenarioError::Kind::Validation,
                            "figure sweep parameters out of range");
    return spec;
}

inline std::vector<double> delay_sweep(const ExperimentSpec& spec) {
    std::vector<double> out;
    // integer stepping avoids cumulative float drift in the sweep grid
    long steps = static_cast<long>(std::floor((spec.delay_to - spec.delay_from) /
                                              spec.delay_step + 1e-9));
    for (long i = 0; i <= steps; ++i)
        out.push_back(spec.delay_from + static_cast<double>(i) * spec.delay_step);
    return out;
}

inline const FlowSpec& flow_at(const Scenario& scenario, std::size_t index,
                               const char* figure) {
    if (scenario.flows.size() <= index)
        throw ScenarioError(ScenarioError::Kind::Validation,
                            std::string(figure) + " needs at least " +
                                std::to_string(index + 1) + " flows in the scenario");
    return scenario.flows[index];
}

inline std::vector<LatencyRateProfile> identical_path(std::size_t n, double rate,
                                                      double theta) {
    return std::vector<LatencyRateProfile>(n, LatencyRateProfile{rate, theta});
}

// Rate parameter for the synthetic study paths; the sweeps only depend on
// latencies, so any rate above the computed allocations works.
constexpr double kStudyPathRate = 1e12;

}  // namespace detail

/// Effective end-to-end bandwidth of the first two flows over the delay
/// sweep (figure fig4). theta is per domain.
inline ResultTable run_fig4(const Scenario& scenario, const ExperimentSpec& spec) {
    const auto& f1 = detail::flow_at(scenario, 0, "fig4");
    const auto& f2 = detail::flow_at(scenario, 1, "fig4");
    auto path = detail::identical_path(spec.domains, detail::kStudyPathRate, spec.theta);

    ResultTable table;
    table.experiment_id = "fig4";
    table.headers = {"delay_req", "Re_" + f1.name, "Re_" + f2.name};
    table.units = {"ms", "Mbps", "Mbps"};
    table.metadata = {{"theta_ms", format_number(spec.theta / kMs)},
                      {"domains", std::to_string(spec.domains)}};
    for (double d : detail::delay_sweep(spec)) {
        table.rows.push_back({format_number(d / kMs),
                              format_rate_mbps(end_to_end_allocation(f1.load, path, d)),
                              format_rate_mbps(end_to_end_allocation(f2.load, path, d))});
    }
    return table;
}

/// End-to-end versus per-domain allocation for one flow over the delay
/// sweep (figures 6 and 7). Equal partition, identical per-domain theta.
inline ResultTable run_fig_compare(const Scenario& scenario, const ExperimentSpec& spec,
                                   std::size_t flow_index, const std::string& id) {
    const auto& flow = detail::flow_at(scenario, flow_index, id.c_str());
    auto path = detail::identical_path(spec.domains, detail::kStudyPathRate, spec.theta);
    auto policy = PartitionPolicy::equal();

    ResultTable table;
    table.experiment_id = id;
    table.headers = {"delay_req", "Re_" + flow.name, "Rd_" + flow.name};
    table.units = {"ms", "Mbps", "Mbps"};
    table.metadata = {{"flow", flow.name},
                      {"theta_ms", format_number(spec.theta / kMs)},
                      {"domains", std::to_string(spec.domains)}};
    for (double d : detail::delay_sweep(spec)) {
        auto row = comparison_row(flow.load, path, d, policy);
        // identical latencies and equal split: every domain allocates the same
        table.rows.push_back({format_number(d / kMs),
                              format_rate_mbps(row.e2e_rate),
                              format_rate_mbps(row.per_domain_rates.front())});
    }
    return table;
}

/// Bandwidth ratios of the first two flows against the number of domains
/// partitioning a fixed path (figure 8). Here theta is the total latency
/// of the path, split equally across the n domains, so the same physical
/// path is compared under coarser and finer administrative partitioning.
inline ResultTable run_fig8(const Scenario& scenario, const ExperimentSpec& spec) {
    const auto& f1 = detail::flow_at(scenario, 0, "fig8");
    const auto& f2 = detail::flow_at(scenario, 1, "fig8");
    auto policy = PartitionPolicy::equal();

    ResultTable table;
    table.experiment_id = "fig8";
    table.headers = {"domains", "U_" + f1.name, "U_" + f2.name};
    table.units = {"count", "ratio", "ratio"};
    table.metadata = {{"delay_req_ms", format_number(spec.fig8_delay / kMs)},
                      {"path_theta_ms", format_number(spec.theta / kMs)}};
    for (std::size_t n = 1; n <= spec.domains; ++n) {
        auto path = detail::identical_path(n, detail::kStudyPathRate,
                                           spec.theta / static_cast<double>(n));
        auto u1 = bandwidth_ratio(f1.load, path, spec.fig8_delay, policy);
        auto u2 = bandwidth_ratio(f2.load, path, spec.fig8_delay, policy);
        table.rows.push_back({std::to_string(n),
                              u1 ? format_number(u1->front()) : kInfeasibleMarker,
                              u2 ? format_number(u2->front()) : kInfeasibleMarker});
    }
    return table;
}

inline ResultTable run_figure(const Scenario& scenario, const std::string& figure,
                              const FigureOverrides& overrides = {}) {
    auto spec = detail::resolve_experiment(scenario, figure, overrides);
    if (figure == "fig4") return run_fig4(scenario, spec);
    if (figure == "fig6") return run_fig_compare(scenario, spec, 0, "fig6");
    if (figure == "fig7") return run_fig_compare(scenario, spec, 1, "fig7");
    if (figure == "fig8") {
        if (!overrides.domains) spec.domains = 8;  // n sweep upper bound
        return run_fig8(scenario, spec);
    }
    throw ScenarioError(ScenarioError::Kind::Validation,
                        "unsupported figure '" + figure + "'");
}

/// Walks the publish / request / discover / orchestrate / allocate steps
/// on the scenario and returns one log line per event. Deterministic for
/// a fixed scenario.
inline std::vector<std::string> run_demo(const Scenario& scenario) {
    std::vector<std::string> log;
    ServiceRegistry registry;
    for (const auto& m : scenario.domains) {
        auto version = registry.publish(m);
        log.push_back("publish domain=" + m.domain + " version=" +
                      std::to_string(version) + " links=" +
                      std::to_string(m.entries.size()));
    }
    for (const auto& p : scenario.peering) {
        registry.add_peering(p);
        log.push_back("peering " + p.from.str() + ">" + p.to.str());
    }

    for (const auto& d : scenario.demands) {
        const FlowSpec* flow = scenario.flow(d.flow);
        DemandProfile demand{d.source, d.destination, d.throughput_floor,
                             d.delay_ceiling, flow->load};
        std::string req = "request demand=" + d.name + " flow=" + d.flow;
        if (d.delay_ceiling) req += " delay_ms=" + format_number(*d.delay_ceiling / kMs);
        if (d.throughput_floor)
            req += " throughput_mbps=" + format_number(*d.throughput_floor / kMbps);
        log.push_back(req);

        auto chain = registry.discover_single(demand);
        if (chain) {
            log.push_back("discover demand=" + d.name + " single-domain link=" +
                          chain->hops.front().link_id);
        } else {
            log.push_back("discover demand=" + d.name + " none");
            chain = registry.orchestrate_chain(demand);
            if (chain) {
                std::string hops;
                for (const auto& h : chain->hops) {
                    if (!hops.empty()) hops += "|";
                    hops += h.link_id;
                }
                log.push_back("orchestrate demand=" + d.name + " hops=" + hops +
                              " rate_mbps=" + format_number(chain->composed.rate / kMbps) +
                              " theta_ms=" + format_number(chain->composed.latency / kMs));
            } else {
                log.push_back("orchestrate demand=" + d.name + " none");
            }
        }
        if (!chain) {
            log.push_back("reject demand=" + d.name + " reason=no-feasible-service");
            continue;
        }
        try {
            auto ticket = registry.allocate(*chain, demand);
            log.push_back("allocate demand=" + d.name + " ticket=" +
                          std::to_string(ticket.id) + " rate_mbps=" +
                          format_number(ticket.granted_rate / kMbps));
        } catch (const BrokerError& e) {
            log.push_back("reject demand=" + d.name + " reason=" + e.what());
        }
    }
    return log;
}

}  // namespace sdpsim
