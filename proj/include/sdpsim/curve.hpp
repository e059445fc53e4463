#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

// Min-plus calculus primitives: nondecreasing piecewise-linear curves,
// latency-rate and leaky-bucket profiles, inf-convolution, and the
// horizontal-deviation delay bound. All quantities are in canonical
// units (bits, seconds, bits/second).

namespace sdpsim {

struct Breakpoint {
    double t = 0.0;      // seconds
    double value = 0.0;  // bits
    double slope = 0.0;  // bits/second, applies on [t, next.t)
};

/// Nondecreasing piecewise-linear function of time, defined for all
/// t >= 0 by linear extension of the last segment. Immutable value type.
class Curve {
public:
    static Curve from_breakpoints(std::vector<Breakpoint> bps) {
        if (bps.empty())
            throw std::invalid_argument("curve needs at least one breakpoint");
        if (bps.front().t != 0.0)
            throw std::invalid_argument("first breakpoint must be at t=0");
        for (std::size_t i = 0; i < bps.size(); ++i) {
            const auto& b = bps[i];
            if (!std::isfinite(b.t) || !std::isfinite(b.value) || b.t < 0.0 ||
                b.value < 0.0 || b.slope < 0.0)
                throw std::invalid_argument("breakpoint fields must be finite and nonnegative");
            if (i > 0) {
                const auto& p = bps[i - 1];
                if (b.t <= p.t)
                    throw std::invalid_argument("breakpoint times must be strictly increasing");
                double expected = p.value + p.slope * (b.t - p.t);
                if (std::abs(b.value - expected) > 1e-6 * std::max(1.0, expected))
                    throw std::invalid_argument("breakpoint values inconsistent with slopes");
            }
        }
        return Curve(std::move(bps));
    }

    /// Build from samples on a uniform grid starting at t=0.
    static Curve from_samples(const std::vector<double>& samples, double step) {
        if (samples.empty() || step <= 0.0)
            throw std::invalid_argument("from_samples: bad arguments");
        std::vector<Breakpoint> bps;
        bps.reserve(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double slope = (i + 1 < samples.size())
                               ? (samples[i + 1] - samples[i]) / step
                               : (i > 0 ? bps.back().slope : 0.0);
            bps.push_back({static_cast<double>(i) * step, samples[i], std::max(0.0, slope)});
        }
        return Curve(std::move(bps));
    }

    double value_at(double t) const {
        if (!std::isfinite(t) || t < 0.0)
            throw std::invalid_argument("evaluate: t must be finite and >= 0");
        const Breakpoint& b = *segment_at(t);
        return b.value + b.slope * (t - b.t);
    }

    /// Smallest u >= 0 with value(u) >= level; nullopt if never reached.
    std::optional<double> time_to_reach(double level) const {
        if (level <= segments_.front().value) return 0.0;
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            const auto& b = segments_[i];
            double end_value = (i + 1 < segments_.size())
                                   ? segments_[i + 1].value
                                   : std::numeric_limits<double>::infinity();
            if (b.slope > 0.0 && level <= end_value)
                return b.t + (level - b.value) / b.slope;
            if (level <= end_value) {
                // flat segment cannot reach a level above its value
                if (i + 1 < segments_.size()) return segments_[i + 1].t;
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    double long_run_slope() const { return segments_.back().slope; }
    const std::vector<Breakpoint>& breakpoints() const { return segments_; }

private:
    explicit Curve(std::vector<Breakpoint> bps) : segments_(std::move(bps)) {}

    const Breakpoint* segment_at(double t) const {
        auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                   [](double x, const Breakpoint& b) { return x < b.t; });
        return &*std::prev(it);
    }

    std::vector<Breakpoint> segments_;
};

/// Latency-rate capacity profile beta(r, theta) = max{0, r(t - theta)}.
struct LatencyRateProfile {
    double rate;     // bits/second, > 0
    double latency;  // seconds, >= 0

    LatencyRateProfile(double r, double theta) : rate(r), latency(theta) {
        if (!(r > 0.0) || std::isnan(r))
            throw std::invalid_argument("latency-rate profile requires rate > 0");
        if (!(theta >= 0.0) || !std::isfinite(theta))
            throw std::invalid_argument("latency-rate profile requires latency >= 0");
    }

    Curve to_curve() const {
        if (latency == 0.0)
            return Curve::from_breakpoints({{0.0, 0.0, rate}});
        return Curve::from_breakpoints({{0.0, 0.0, 0.0}, {latency, 0.0, rate}});
    }

    bool operator==(const LatencyRateProfile&) const = default;
};

/// Leaky-bucket load descriptor L(p, rho, sigma) = min{p t, sigma + rho t}.
struct LeakyBucketDescriptor {
    double peak;       // bits/second
    double sustained;  // bits/second
    double burst;      // bits

    LeakyBucketDescriptor(double p, double rho, double sigma)
        : peak(p), sustained(rho), burst(sigma) {
        if (!(rho > 0.0) || !(p >= rho) || !std::isfinite(p))
            throw std::invalid_argument("leaky bucket requires p >= rho > 0");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("leaky bucket requires burst > 0");
    }

    Curve to_curve() const {
        if (peak == sustained)
            return Curve::from_breakpoints({{0.0, 0.0, peak}});
        double knee = burst / (peak - sustained);
        return Curve::from_breakpoints(
            {{0.0, 0.0, peak}, {knee, peak * knee, sustained}});
    }
};

/// Min-plus convolution of two latency-rate profiles:
/// the composed rate is the bottleneck, latencies add.
inline LatencyRateProfile convolve_lr(const LatencyRateProfile& a,
                                      const LatencyRateProfile& b) {
    return {std::min(a.rate, b.rate), a.latency + b.latency};
}

/// Brute-force sampled inf-convolution on the grid {0, step, ..., horizon}.
/// Serves as the numeric oracle for the closed forms.
inline Curve convolve_numeric(const Curve& a, const Curve& b, double horizon,
                              double step) {
    if (!(horizon > 0.0) || !(step > 0.0) || step > horizon)
        throw std::invalid_argument("convolve_numeric: need 0 < step <= horizon");
    const std::size_t n = static_cast<std::size_t>(std::floor(horizon / step + 0.5)) + 1;
    std::vector<double> fa(n), fb(n), out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) * step;
        fa[i] = a.value_at(t);
        fb[i] = b.value_at(t);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j <= i; ++j)
            best = std::min(best, fa[i - j] + fb[j]);
        out[i] = best;
    }
    return Curve::from_samples(out, step);
}

/// Numeric worst-case delay: sup over t of the smallest shift delta with
/// load(t) <= capacity(t + delta). The t-samples are the uniform grid plus
/// the kink points of the induced delay function, so the result is exact
/// for piecewise-linear inputs up to the stated grid tolerance.
/// nullopt means the capacity never catches up (unbounded delay).
inline std::optional<double> horizontal_deviation(const Curve& load,
                                                  const Curve& capacity,
                                                  double horizon, double step) {
    if (!(horizon > 0.0) || !(step > 0.0) || step > horizon)
        throw std::invalid_argument("horizontal_deviation: need 0 < step <= horizon");
    if (capacity.long_run_slope() < load.long_run_slope())
        return std::nullopt;

    std::vector<double> ts;
    const std::size_t n = static_cast<std::size_t>(std::floor(horizon / step + 0.5)) + 1;
    ts.reserve(n + 8);
    for (std::size_t i = 0; i < n; ++i) ts.push_back(static_cast<double>(i) * step);
    for (const auto& b : load.breakpoints())
        if (b.t <= horizon) ts.push_back(b.t);
    for (const auto& b : capacity.breakpoints()) {
        // preimage of the capacity kink under the load
        if (auto t = load.time_to_reach(b.value); t && *t <= horizon) ts.push_back(*t);
    }

    double worst = 0.0;
    for (double t : ts) {
        double level = load.value_at(t);
        auto u = capacity.time_to_reach(level);
        if (!u) return std::nullopt;
        worst = std::max(worst, std::max(0.0, *u - t));
    }
    return worst;
}

/// Busy-period horizon heuristic for the oracle when the service rate
/// exceeds the sustained rate; caller supplies the horizon otherwise.
inline std::optional<double> default_oracle_horizon(const LeakyBucketDescriptor& load,
                                                    const LatencyRateProfile& capacity) {
    if (capacity.rate <= load.sustained) return std::nullopt;
    double crossing = (load.burst + capacity.rate * capacity.latency) /
                      (capacity.rate - load.sustained);
    return 1.2 * std::max(crossing, capacity.latency);
}

constexpr double kDefaultOracleStep = 1e-4;  // 0.1 ms

}  // namespace sdpsim
