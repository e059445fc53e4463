#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdpsim/curve.hpp"

// Per-domain capability matrices over border nodes and composition of
// virtual links into end-to-end latency-rate profiles.

namespace sdpsim {

struct BorderNodeId {
    std::string domain;
    std::string label;

    auto operator<=>(const BorderNodeId&) const = default;

    std::string str() const { return domain + ":" + label; }
};

/// Sparse directed matrix of latency-rate profiles between the border
/// nodes of one domain. An absent entry means no virtual connection.
struct CapabilityMatrix {
    std::string domain;
    std::vector<std::string> node_labels;
    // (from label, to label) -> profile
    std::map<std::pair<std::string, std::string>, LatencyRateProfile> entries;

    BorderNodeId node(const std::string& label) const { return {domain, label}; }

    const LatencyRateProfile* entry(const std::string& from,
                                    const std::string& to) const {
        auto it = entries.find({from, to});
        return it == entries.end() ? nullptr : &it->second;
    }
};

/// Checks all CapabilityMatrix invariants; returns one message per
/// violation (empty means well-formed). Violations are data, not failures.
inline std::vector<std::string> validate_matrix(const CapabilityMatrix& m) {
    std::vector<std::string> out;
    std::map<std::string, int> seen;
    for (const auto& n : m.node_labels)
        if (++seen[n] == 2)
            out.push_back("duplicate node label '" + n + "'");
    for (const auto& [key, profile] : m.entries) {
        const auto& [from, to] = key;
        std::string where = "entry (" + from + "," + to + ")";
        if (from == to) out.push_back(where + ": diagonal entries are not allowed");
        if (!seen.count(from)) out.push_back(where + ": unknown source node '" + from + "'");
        if (!seen.count(to)) out.push_back(where + ": unknown destination node '" + to + "'");
        if (!(profile.rate > 0.0)) out.push_back(where + ": rate must be > 0");
        if (profile.latency < 0.0) out.push_back(where + ": latency must be >= 0");
    }
    return out;
}

struct VirtualLink {
    BorderNodeId from, to;  // same domain
    LatencyRateProfile profile;
    double residual_rate;  // bits/second, in [0, profile.rate]
};

struct PeeringLink {
    BorderNodeId from, to;  // different domains
    LatencyRateProfile profile;
};

/// Peering default: not the bottleneck, no added latency, so chains
/// through it reduce exactly to the per-domain composition.
inline LatencyRateProfile neutral_peering_profile() {
    return {std::numeric_limits<double>::infinity(), 0.0};
}

/// One hop of a service chain: either a virtual link inside a domain or
/// a peering link between domains.
struct ChainHop {
    std::string link_id;
    std::string domain;  // owning domain for virtual links, empty for peering
    BorderNodeId from, to;
    LatencyRateProfile profile;
    bool peering = false;
};

inline std::string virtual_link_id(const std::string& domain,
                                   const std::string& from,
                                   const std::string& to) {
    return domain + ":" + from + ">" + to;
}

inline std::string peering_link_id(const BorderNodeId& from, const BorderNodeId& to) {
    return "peer:" + from.str() + ">" + to.str();
}

/// Fold of convolve_lr over a non-empty list: bottleneck rate, summed latency.
inline LatencyRateProfile compose_chain(const std::vector<LatencyRateProfile>& profiles) {
    if (profiles.empty())
        throw std::invalid_argument("compose_chain: empty profile list");
    LatencyRateProfile acc = profiles.front();
    for (std::size_t i = 1; i < profiles.size(); ++i)
        acc = convolve_lr(acc, profiles[i]);
    return acc;
}

struct ServiceChain {
    std::vector<ChainHop> hops;  // endpoint-contiguous, source to destination
    LatencyRateProfile composed;
    std::uint64_t registry_version = 0;  // snapshot taken at discovery

    static ServiceChain from_hops(std::vector<ChainHop> hops, std::uint64_t version) {
        std::vector<LatencyRateProfile> profiles;
        profiles.reserve(hops.size());
        for (const auto& h : hops) profiles.push_back(h.profile);
        LatencyRateProfile composed = compose_chain(profiles);
        return {std::move(hops), composed, version};
    }
};

}  // namespace sdpsim
