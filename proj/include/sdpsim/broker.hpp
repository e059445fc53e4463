#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sdpsim/domain.hpp"
#include "sdpsim/qos.hpp"

// The logically centralized service delivery platform: registry of
// published capability matrices, single-service discovery, multi-domain
// chain orchestration, and atomic admission/allocation.

namespace sdpsim {

class BrokerError : public std::runtime_error {
public:
    enum class Kind { Validation, InsufficientResidual, StaleChain, UnknownTicket };

    BrokerError(Kind k, std::string message, std::string link = {},
                std::vector<std::string> violations = {})
        : std::runtime_error(std::move(message)), kind(k),
          link_id(std::move(link)), violations(std::move(violations)) {}

    Kind kind;
    std::string link_id;
    std::vector<std::string> violations;
};

struct AllocationTicket {
    std::uint64_t id = 0;
    ServiceChain chain;
    double granted_rate = 0.0;  // bits/second, the same on every hop
    // (domain, link id, rate) per hop
    std::vector<std::tuple<std::string, std::string, double>> grants;
    bool stale = false;  // set when a later publish invalidated a hop
};

struct LinkState {
    double rate = 0.0;      // current profile rate
    double residual = 0.0;  // rate minus outstanding grants
};

class ServiceRegistry {
public:
    /// Workflow step 1: a domain controller publishes (or re-publishes) its
    /// capability matrix. Returns the new registry version. Allocations on
    /// links that disappeared or shrank below their grants are flagged stale.
    std::uint64_t publish(const CapabilityMatrix& matrix) {
        auto violations = validate_matrix(matrix);
        if (!violations.empty())
            throw BrokerError(BrokerError::Kind::Validation,
                              "matrix for domain '" + matrix.domain + "' is invalid",
                              {}, std::move(violations));
        std::lock_guard lock(*mu_);
        matrices_[matrix.domain] = matrix;
        ++version_;

        std::set<std::string> live;
        for (const auto& [key, profile] : matrix.entries)
            live.insert(virtual_link_id(matrix.domain, key.first, key.second));

        // drop state of removed links, flag their tickets
        for (auto it = links_.begin(); it != links_.end();) {
            if (it->first.rfind(matrix.domain + ":", 0) == 0 && !live.count(it->first)) {
                flag_tickets_on(it->first);
                it = links_.erase(it);
            } else {
                ++it;
            }
        }
        for (const auto& [key, profile] : matrix.entries) {
            std::string id = virtual_link_id(matrix.domain, key.first, key.second);
            double granted = outstanding_on(id);
            auto& st = links_[id];
            st.rate = profile.rate;
            st.residual = std::clamp(profile.rate - granted, 0.0, profile.rate);
            if (granted > profile.rate + 1e-9) flag_tickets_on(id);
        }
        return version_;
    }

    void add_peering(const PeeringLink& link) {
        std::lock_guard lock(*mu_);
        peering_.push_back(link);
        auto& st = links_[peering_link_id(link.from, link.to)];
        st.rate = link.profile.rate;
        st.residual = link.profile.rate - outstanding_on(peering_link_id(link.from, link.to));
        ++version_;
    }

    /// Workflow step 3: find a single domain whose matrix carries an (s,d)
    /// entry with enough residual capacity and a feasible latency. Ties go
    /// to the largest residual, then the lexically smallest domain name.
    std::optional<ServiceChain> discover_single(const DemandProfile& demand) const {
        std::lock_guard lock(*mu_);
        std::optional<ServiceChain> best;
        double best_residual = -1.0;
        std::string best_domain;
        for (const auto& [name, matrix] : matrices_) {
            for (const auto& [key, profile] : matrix.entries) {
                BorderNodeId from = matrix.node(key.first);
                BorderNodeId to = matrix.node(key.second);
                if (!endpoint_matches(demand.source, from) ||
                    !endpoint_matches(demand.destination, to))
                    continue;
                auto c_min = min_capacity(demand, profile.latency);
                if (!c_min) continue;
                std::string id = virtual_link_id(name, key.first, key.second);
                double residual = links_.at(id).residual;
                if (residual < *c_min) continue;
                bool better = residual > best_residual ||
                              (residual == best_residual && name < best_domain);
                if (better) {
                    best = ServiceChain::from_hops(
                        {{id, name, from, to, profile, false}}, version_);
                    best_residual = residual;
                    best_domain = name;
                }
            }
        }
        return best;
    }

    /// Workflow step 4: search the inter-domain graph (virtual links plus
    /// peering links) for a feasible s->d chain. Among feasible chains the
    /// result minimizes the number of domains crossed, then maximizes the
    /// bottleneck residual, then takes the lexically smallest hop sequence.
    std::optional<ServiceChain> orchestrate_chain(const DemandProfile& demand) const {
        std::lock_guard lock(*mu_);
        std::vector<ChainHop> edges;
        for (const auto& [name, matrix] : matrices_)
            for (const auto& [key, profile] : matrix.entries)
                edges.push_back({virtual_link_id(name, key.first, key.second), name,
                                 matrix.node(key.first), matrix.node(key.second),
                                 profile, false});
        for (const auto& p : peering_)
            edges.push_back({peering_link_id(p.from, p.to), "", p.from, p.to,
                             p.profile, true});
        std::sort(edges.begin(), edges.end(),
                  [](const ChainHop& a, const ChainHop& b) { return a.link_id < b.link_id; });

        std::optional<ServiceChain> best;
        std::size_t best_domains = 0;
        double best_bottleneck = -1.0;
        std::vector<ChainHop> path;
        std::set<BorderNodeId> visited;

        auto consider = [&](const std::vector<ChainHop>& hops) {
            auto chain = ServiceChain::from_hops(hops, version_);
            auto c_min = min_capacity(demand, chain.composed.latency);
            if (!c_min) return;
            double bottleneck = std::numeric_limits<double>::infinity();
            for (const auto& h : hops) {
                double residual = links_.at(h.link_id).residual;
                if (residual < *c_min) return;
                bottleneck = std::min(bottleneck, residual);
            }
            std::set<std::string> domains;
            for (const auto& h : hops)
                if (!h.peering) domains.insert(h.domain);
            bool better;
            if (!best) {
                better = true;
            } else if (domains.size() != best_domains) {
                better = domains.size() < best_domains;
            } else if (bottleneck != best_bottleneck) {
                better = bottleneck > best_bottleneck;
            } else {
                better = hop_ids(hops) < hop_ids(best->hops);
            }
            if (better) {
                best = std::move(chain);
                best_domains = domains.size();
                best_bottleneck = bottleneck;
            }
        };

        auto dfs = [&](auto&& self, const BorderNodeId& at) -> void {
            if (endpoint_matches(demand.destination, at) && !path.empty()) {
                consider(path);
                return;  // extending past the destination never helps
            }
            if (path.size() >= kMaxChainHops) return;
            for (const auto& e : edges) {
                if (!(e.from == at)) continue;
                if (visited.count(e.to)) continue;
                visited.insert(e.to);
                path.push_back(e);
                self(self, e.to);
                path.pop_back();
                visited.erase(e.to);
            }
        };

        std::set<BorderNodeId> sources;
        for (const auto& e : edges) {
            if (endpoint_matches(demand.source, e.from)) sources.insert(e.from);
            if (endpoint_matches(demand.source, e.to)) sources.insert(e.to);
        }
        for (const auto& s : sources) {
            visited = {s};
            path.clear();
            dfs(dfs, s);
        }
        return best;
    }

    /// Workflow step 5: admit the demand on the chain. Re-checks the chain
    /// against the current registry (stale-chain), then atomically reserves
    /// C_min on every hop; on any failure no residual changes.
    AllocationTicket allocate(const ServiceChain& chain, const DemandProfile& demand) {
        std::lock_guard lock(*mu_);
        for (const auto& h : chain.hops) {
            const LatencyRateProfile* current = current_profile(h);
            if (!current || !(*current == h.profile))
                throw BrokerError(BrokerError::Kind::StaleChain,
                                  "link '" + h.link_id + "' changed since discovery",
                                  h.link_id);
        }
        auto c_min = min_capacity(demand, chain.composed.latency);
        if (!c_min)
            throw BrokerError(BrokerError::Kind::StaleChain,
                              "demand is no longer feasible on this chain");
        for (const auto& h : chain.hops) {
            if (links_.at(h.link_id).residual < *c_min)
                throw BrokerError(BrokerError::Kind::InsufficientResidual,
                                  "insufficient residual on link '" + h.link_id + "'",
                                  h.link_id);
        }
        AllocationTicket ticket{next_ticket_id_++, chain, *c_min, {}, false};
        for (const auto& h : chain.hops) {
            links_.at(h.link_id).residual -= *c_min;
            ticket.grants.emplace_back(h.domain, h.link_id, *c_min);
        }
        tickets_.emplace(ticket.id, ticket);
        return ticket;
    }

    /// Returns the reserved bandwidth of an outstanding ticket to the links.
    /// Residuals are clamped to the current profile rate in case a publish
    /// changed it meanwhile.
    void release(std::uint64_t ticket_id) {
        std::lock_guard lock(*mu_);
        auto it = tickets_.find(ticket_id);
        if (it == tickets_.end())
            throw BrokerError(BrokerError::Kind::UnknownTicket,
                              "unknown or already released ticket");
        for (const auto& [domain, link_id, rate] : it->second.grants) {
            auto ls = links_.find(link_id);
            if (ls == links_.end()) continue;  // link removed meanwhile
            ls->second.residual = std::min(ls->second.rate, ls->second.residual + rate);
        }
        tickets_.erase(it);
    }

    std::uint64_t version() const {
        std::lock_guard lock(*mu_);
        return version_;
    }

    std::map<std::string, LinkState> link_states() const {
        std::lock_guard lock(*mu_);
        return links_;
    }

    std::map<std::uint64_t, AllocationTicket> outstanding_tickets() const {
        std::lock_guard lock(*mu_);
        return tickets_;
    }

    std::map<std::string, CapabilityMatrix> matrices() const {
        std::lock_guard lock(*mu_);
        return matrices_;
    }

    static constexpr std::size_t kMaxChainHops = 16;

private:
    static bool endpoint_matches(const BorderNodeId& wanted, const BorderNodeId& node) {
        // an empty domain in a demand endpoint matches any domain's node
        return wanted.label == node.label &&
               (wanted.domain.empty() || wanted.domain == node.domain);
    }

    static std::vector<std::string> hop_ids(const std::vector<ChainHop>& hops) {
        std::vector<std::string> ids;
        ids.reserve(hops.size());
        for (const auto& h : hops) ids.push_back(h.link_id);
        return ids;
    }

    const LatencyRateProfile* current_profile(const ChainHop& h) const {
        if (h.peering) {
            for (const auto& p : peering_)
                if (peering_link_id(p.from, p.to) == h.link_id) return &p.profile;
            return nullptr;
        }
        auto it = matrices_.find(h.domain);
        if (it == matrices_.end()) return nullptr;
        return it->second.entry(h.from.label, h.to.label);
    }

    double outstanding_on(const std::string& link_id) const {
        double total = 0.0;
        for (const auto& [id, t] : tickets_)
            for (const auto& [domain, lid, rate] : t.grants)
                if (lid == link_id) total += rate;
        return total;
    }

    void flag_tickets_on(const std::string& link_id) {
        for (auto& [id, t] : tickets_)
            for (const auto& [domain, lid, rate] : t.grants)
                if (lid == link_id) t.stale = true;
    }

    mutable std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
    std::map<std::string, CapabilityMatrix> matrices_;
    std::vector<PeeringLink> peering_;
    std::map<std::string, LinkState> links_;
    std::map<std::uint64_t, AllocationTicket> tickets_;
    std::uint64_t version_ = 0;
    std::uint64_t next_ticket_id_ = 1;
};

}  // namespace sdpsim
