#pragma once

#include <algorithm>
#include <optional>
#include <string>

#include "sdpsim/curve.hpp"
#include "sdpsim/domain.hpp"

// QoS math: demand profiles, minimum available bandwidth, delay bounds,
// effective bandwidth with its three regimes, and the minimum-capacity rule.

namespace sdpsim {

// Absolute slack for comparisons at regime boundaries.
constexpr double kBoundarySlack = 1e-12;

/// User request: connectivity, QoS expectation (throughput floor and/or
/// delay ceiling), and a leaky-bucket load descriptor.
struct DemandProfile {
    BorderNodeId source, destination;
    std::optional<double> throughput_floor;  // T_req, bits/second
    std::optional<double> delay_ceiling;     // D_req, seconds
    LeakyBucketDescriptor load;

    DemandProfile(BorderNodeId s, BorderNodeId d, std::optional<double> t_req,
                  std::optional<double> d_req, LeakyBucketDescriptor l)
        : source(std::move(s)), destination(std::move(d)),
          throughput_floor(t_req), delay_ceiling(d_req), load(l) {
        if (!throughput_floor && !delay_ceiling)
            throw std::invalid_argument("demand needs a throughput or delay requirement");
        if (throughput_floor && !(*throughput_floor > 0.0))
            throw std::invalid_argument("throughput requirement must be > 0");
        if (delay_ceiling && !(*delay_ceiling > 0.0))
            throw std::invalid_argument("delay requirement must be > 0");
    }
};

enum class BandwidthRegime { SustainedRate, Interior, Infeasible };

struct EffectiveBandwidthResult {
    BandwidthRegime regime;
    std::optional<double> rate;  // bits/second, absent when infeasible
    double d_min;                // seconds, = theta
    double d_max;                // seconds, = theta + sigma/rho

    bool feasible() const { return regime != BandwidthRegime::Infeasible; }
};

/// Long-run guaranteed rate of a latency-rate profile.
inline double min_available_bandwidth(const LatencyRateProfile& profile) {
    return profile.rate;
}

inline bool throughput_feasible(const LatencyRateProfile& profile, double t_req) {
    if (!(t_req > 0.0))
        throw std::invalid_argument("throughput requirement must be > 0");
    return profile.rate >= t_req;
}

/// Minimum service rate on a latency-rate path with latency theta that
/// keeps the worst-case delay of the leaky-bucket flow within d_req.
inline EffectiveBandwidthResult effective_bandwidth(const LeakyBucketDescriptor& load,
                                                    double theta, double d_req) {
    if (!(d_req > 0.0))
        throw std::invalid_argument("delay requirement must be > 0");
    if (!(theta >= 0.0))
        throw std::invalid_argument("latency must be >= 0");
    double d_min = theta;
    double d_max = theta + load.burst / load.sustained;
    if (d_req < theta - kBoundarySlack)
        return {BandwidthRegime::Infeasible, std::nullopt, d_min, d_max};
    if (load.peak == load.sustained)
        return {BandwidthRegime::SustainedRate, load.sustained, d_min, d_max};
    if (d_req > d_max + kBoundarySlack)
        return {BandwidthRegime::SustainedRate, load.sustained, d_min, d_max};
    double slack = std::max(0.0, d_req - theta);
    double rate = load.peak * load.burst /
                  (slack * (load.peak - load.sustained) + load.burst);
    return {BandwidthRegime::Interior, rate, d_min, d_max};
}

/// Closed-form worst-case delay of a leaky-bucket flow on a latency-rate
/// profile; nullopt when the rate cannot keep up with the sustained rate.
inline std::optional<double> delay_bound_lr(const LeakyBucketDescriptor& load,
                                            const LatencyRateProfile& profile) {
    if (profile.rate < load.sustained) return std::nullopt;
    if (load.peak == load.sustained) return profile.latency;
    double d = profile.latency +
               load.burst * (load.peak - profile.rate) /
                   (profile.rate * (load.peak - load.sustained));
    return std::max(profile.latency, d);
}

/// Minimum capacity that must be available on a path with latency theta
/// to admit the demand: max of the throughput floor and the effective
/// bandwidth of its load. nullopt when the delay ceiling is unreachable.
inline std::optional<double> min_capacity(const DemandProfile& demand, double theta) {
    double c = 0.0;
    if (demand.throughput_floor) c = *demand.throughput_floor;
    if (demand.delay_ceiling) {
        auto eb = effective_bandwidth(demand.load, theta, *demand.delay_ceiling);
        if (!eb.feasible()) return std::nullopt;
        c = std::max(c, *eb.rate);
    }
    return c;
}

}  // namespace sdpsim
