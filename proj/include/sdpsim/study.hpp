#pragma once

#include <numeric>
#include <optional>
#include <vector>

#include "sdpsim/qos.hpp"

// End-to-end versus per-domain effective-bandwidth allocation and the
// bandwidth-utilization ratio U between the two schemes.

namespace sdpsim {

/// How the end-to-end delay ceiling is split into per-domain budgets.
struct PartitionPolicy {
    enum class Kind { Equal, ExplicitBudgets };
    Kind kind = Kind::Equal;
    std::vector<double> explicit_budgets;  // seconds, used by ExplicitBudgets

    static PartitionPolicy equal() { return {}; }
    static PartitionPolicy budgets(std::vector<double> b) {
        return {Kind::ExplicitBudgets, std::move(b)};
    }

    std::vector<double> split(double total_delay, std::size_t n) const {
        if (kind == Kind::Equal)
            return std::vector<double>(n, total_delay / static_cast<double>(n));
        if (explicit_budgets.size() != n)
            throw std::invalid_argument("partition policy needs one budget per domain");
        double sum = std::accumulate(explicit_budgets.begin(), explicit_budgets.end(), 0.0);
        if (std::abs(sum - total_delay) > 1e-9 * std::max(1.0, total_delay))
            throw std::invalid_argument("explicit budgets must sum to the delay ceiling");
        for (double b : explicit_budgets)
            if (!(b > 0.0))
                throw std::invalid_argument("every delay budget must be > 0");
        return explicit_budgets;
    }
};

inline double total_latency(const std::vector<LatencyRateProfile>& profiles) {
    double theta = 0.0;
    for (const auto& p : profiles) theta += p.latency;
    return theta;
}

/// Rate the SDP must allocate on every hop of the composed path to keep
/// the end-to-end delay within the ceiling. nullopt when the ceiling is
/// below the path latency.
inline std::optional<double> end_to_end_allocation(
    const LeakyBucketDescriptor& load, const std::vector<LatencyRateProfile>& profiles,
    double delay_ceiling) {
    if (profiles.empty())
        throw std::invalid_argument("end_to_end_allocation: empty profile list");
    auto eb = effective_bandwidth(load, total_latency(profiles), delay_ceiling);
    if (!eb.feasible()) return std::nullopt;
    return eb.rate;
}

/// Rate each domain allocates on its own when the delay ceiling is
/// partitioned into per-domain budgets. Entry i is nullopt when the
/// budget for domain i is below its latency.
inline std::vector<std::optional<double>> per_domain_allocation(
    const LeakyBucketDescriptor& load, const std::vector<LatencyRateProfile>& profiles,
    double delay_ceiling, const PartitionPolicy& policy) {
    if (profiles.empty())
        throw std::invalid_argument("per_domain_allocation: empty profile list");
    auto budgets = policy.split(delay_ceiling, profiles.size());
    std::vector<std::optional<double>> rates;
    rates.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        auto eb = effective_bandwidth(load, profiles[i].latency, budgets[i]);
        rates.push_back(eb.feasible() ? eb.rate : std::nullopt);
    }
    return rates;
}

/// U_i = R_i / R_e for each domain; nullopt when either scheme is
/// infeasible at this delay ceiling.
inline std::optional<std::vector<double>> bandwidth_ratio(
    const LeakyBucketDescriptor& load, const std::vector<LatencyRateProfile>& profiles,
    double delay_ceiling, const PartitionPolicy& policy) {
    auto r_e = end_to_end_allocation(load, profiles, delay_ceiling);
    if (!r_e) return std::nullopt;
    auto per_domain = per_domain_allocation(load, profiles, delay_ceiling, policy);
    std::vector<double> ratios;
    ratios.reserve(per_domain.size());
    for (const auto& r_i : per_domain) {
        if (!r_i) return std::nullopt;
        ratios.push_back(*r_i / *r_e);
    }
    return ratios;
}

/// Closed form of the equal-partition, identical-latency ratio:
/// U = 1 + (n-1)(d-theta)(p-rho) / ((d-theta)(p-rho) + sigma),
/// with d the per-domain budget. Valid in the interior regime.
inline double equal_partition_ratio_closed_form(const LeakyBucketDescriptor& load,
                                                std::size_t n, double theta,
                                                double per_domain_budget) {
    double x = (per_domain_budget - theta) * (load.peak - load.sustained);
    return 1.0 + static_cast<double>(n - 1) * x / (x + load.burst);
}

struct LooseDelayReport {
    double e2e_max_delay;          // theta_e + sigma/rho
    double per_domain_max_delay;   // theta_i + sigma/rho
    bool e2e_loose;                // delay ceiling above the end-to-end threshold
    bool per_domain_tight;         // every budget at or below its domain threshold
    double e2e_rate;               // bits/second
    std::vector<double> per_domain_rates;
};

/// Reports the loose-delay regime split: the end-to-end scheme already
/// charges only the sustained rate while every per-domain budget still
/// sits in the interior regime. Requires identical latencies and equal
/// partition.
inline LooseDelayReport loose_delay_analysis(const LeakyBucketDescriptor& load,
                                             const std::vector<LatencyRateProfile>& profiles,
                                             double delay_ceiling,
                                             const PartitionPolicy& policy) {
    if (profiles.empty())
        throw std::invalid_argument("loose_delay_analysis: empty profile list");
    if (policy.kind != PartitionPolicy::Kind::Equal)
        throw std::invalid_argument("loose_delay_analysis requires equal partition");
    double theta = profiles.front().latency;
    for (const auto& p : profiles)
        if (p.latency != theta)
            throw std::invalid_argument("loose_delay_analysis requires identical latencies");

    double theta_e = total_latency(profiles);
    double burst_drain = load.burst / load.sustained;
    LooseDelayReport report;
    report.e2e_max_delay = theta_e + burst_drain;
    report.per_domain_max_delay = theta + burst_drain;
    report.e2e_loose = delay_ceiling > report.e2e_max_delay;

    auto r_e = end_to_end_allocation(load, profiles, delay_ceiling);
    report.e2e_rate = r_e.value_or(0.0);
    auto budgets = policy.split(delay_ceiling, profiles.size());
    report.per_domain_tight = true;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        auto eb = effective_bandwidth(load, profiles[i].latency, budgets[i]);
        report.per_domain_rates.push_back(eb.feasible() ? *eb.rate : 0.0);
        if (budgets[i] > report.per_domain_max_delay) report.per_domain_tight = false;
    }
    return report;
}

struct ComparisonRow {
    double delay_ceiling = 0.0;  // seconds
    std::optional<double> e2e_rate;
    std::vector<std::optional<double>> per_domain_rates;
    std::vector<std::optional<double>> ratios;
    std::size_t domains = 0;
};

inline ComparisonRow comparison_row(const LeakyBucketDescriptor& load,
                                    const std::vector<LatencyRateProfile>& profiles,
                                    double delay_ceiling, const PartitionPolicy& policy) {
    ComparisonRow row;
    row.delay_ceiling = delay_ceiling;
    row.domains = profiles.size();
    row.e2e_rate = end_to_end_allocation(load, profiles, delay_ceiling);
    row.per_domain_rates = per_domain_allocation(load, profiles, delay_ceiling, policy);
    for (const auto& r_i : row.per_domain_rates) {
        if (r_i && row.e2e_rate)
            row.ratios.push_back(*r_i / *row.e2e_rate);
        else
            row.ratios.push_back(std::nullopt);
    }
    return row;
}

}  // namespace sdpsim
