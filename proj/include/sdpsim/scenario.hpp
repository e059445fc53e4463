#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdpsim/broker.hpp"
#include "sdpsim/domain.hpp"
#include "sdpsim/qos.hpp"

// Scenario file ingestion. Files are JSON with a `schema: 1` marker;
// rates are in Mbps, delays in ms, bursts in Mbit, and everything is
// converted to canonical units (bits, seconds) on load.

namespace sdpsim {

constexpr double kMbps = 1e6;   // bits/second per Mbps
constexpr double kMs = 1e-3;    // seconds per ms
constexpr double kMbit = 1e6;   // bits per Mbit

class ScenarioError : public std::runtime_error {
public:
    enum class Kind { Io, Parse, Validation };
    ScenarioError(Kind k, const std::string& message)
        : std::runtime_error(message), kind(k) {}
    Kind kind;
};

struct FlowSpec {
    std::string name;
    LeakyBucketDescriptor load;
};

struct DemandSpec {
    std::string name;
    BorderNodeId source, destination;
    std::string flow;
    std::optional<double> throughput_floor;  // bits/second
    std::optional<double> delay_ceiling;     // seconds
};

struct ExperimentSpec {
    std::string figure;           // fig4 | fig6 | fig7 | fig8
    double delay_from = 40e-3;    // seconds
    double delay_to = 200e-3;
    double delay_step = 5e-3;
    double theta = 10e-3;         // seconds (see run_figure for fig8 meaning)
    std::size_t domains = 3;
    double fig8_delay = 60e-3;    // fixed end-to-end ceiling for fig8
};

struct Scenario {
    std::vector<CapabilityMatrix> domains;
    std::vector<PeeringLink> peering;
    std::vector<FlowSpec> flows;
    std::vector<DemandSpec> demands;
    std::vector<ExperimentSpec> experiments;

    const FlowSpec* flow(const std::string& name) const {
        for (const auto& f : flows)
            if (f.name == name) return &f;
        return nullptr;
    }

    bool has_node(const BorderNodeId& id) const {
        for (const auto& m : domains) {
            if (!id.domain.empty() && m.domain != id.domain) continue;
            for (const auto& label : m.node_labels)
                if (label == id.label) return true;
        }
        return false;
    }

    ServiceRegistry make_registry() const {
        ServiceRegistry registry;
        for (const auto& m : domains) registry.publish(m);
        for (const auto& p : peering) registry.add_peering(p);
        return registry;
    }
};

namespace detail {

[[noreturn]] inline void fail_validation(const std::string& message) {
    throw ScenarioError(ScenarioError::Kind::Validation, message);
}

inline double require_positive(double v, const std::string& field) {
    if (!(v > 0.0)) fail_validation(field + " must be > 0");
    return v;
}

/// "domain:label" -> full id; a bare label means "any domain".
inline BorderNodeId parse_node_ref(const std::string& ref) {
    auto pos = ref.find(':');
    if (pos == std::string::npos) return {"", ref};
    return {ref.substr(0, pos), ref.substr(pos + 1)};
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
    using detail::fail_validation;
    using detail::require_positive;

    if (!j.contains("schema") || j.at("schema").get<int>() != 1)
        fail_validation("scenario must declare schema: 1");

    Scenario scenario;
    std::map<std::pair<std::string, std::string>, int> node_ids;

    for (const auto& jd : j.value("domains", nlohmann::json::array())) {
        CapabilityMatrix m;
        m.domain = jd.at("name").get<std::string>();
        for (const auto& n : jd.at("nodes"))
            m.node_labels.push_back(n.get<std::string>());
        for (const auto& label : m.node_labels)
            if (++node_ids[{m.domain, label}] == 2)
                fail_validation("duplicate border node " + m.domain + ":" + label);
        for (const auto& jl : jd.value("links", nlohmann::json::array())) {
            std::string from = jl.at("from").get<std::string>();
            std::string to = jl.at("to").get<std::string>();
            double rate = require_positive(jl.at("rate_mbps").get<double>(),
                                           "link rate_mbps") * kMbps;
            double latency = jl.value("latency_ms", 0.0) * kMs;
            if (latency < 0.0) fail_validation("link latency_ms must be >= 0");
            if (!m.entries.emplace(std::pair{from, to}, LatencyRateProfile{rate, latency}).second)
                fail_validation("duplicate link " + m.domain + ":" + from + ">" + to);
        }
        auto violations = validate_matrix(m);
        if (!violations.empty())
            fail_validation("domain '" + m.domain + "': " + violations.front());
        scenario.domains.push_back(std::move(m));
    }

    auto resolve = [&](const std::string& ref, const std::string& what) {
        BorderNodeId id = detail::parse_node_ref(ref);
        if (!scenario.has_node(id))
            fail_validation(what + " references unknown node '" + ref + "'");
        return id;
    };

    for (const auto& jp : j.value("peering", nlohmann::json::array())) {
        PeeringLink link{resolve(jp.at("from").get<std::string>(), "peering link"),
                         resolve(jp.at("to").get<std::string>(), "peering link"),
                         neutral_peering_profile()};
        if (jp.contains("rate_mbps"))
            link.profile.rate = require_positive(jp.at("rate_mbps").get<double>(),
                                                 "peering rate_mbps") * kMbps;
        link.profile.latency = jp.value("latency_ms", 0.0) * kMs;
        if (link.profile.latency < 0.0) fail_validation("peering latency_ms must be >= 0");
        if (link.from.domain == link.to.domain)
            fail_validation("peering link endpoints must be in different domains");
        scenario.peering.push_back(std::move(link));
    }

    for (const auto& jf : j.value("flows", nlohmann::json::array())) {
        std::string name = jf.at("name").get<std::string>();
        double p = require_positive(jf.at("peak_mbps").get<double>(), "flow peak_mbps") * kMbps;
        double rho = require_positive(jf.at("sustained_mbps").get<double>(),
                                      "flow sustained_mbps") * kMbps;
        double sigma = require_positive(jf.at("burst_mbits").get<double>(),
                                        "flow burst_mbits") * kMbit;
        if (rho > p) fail_validation("flow '" + name + "': sustained rate exceeds peak rate");
        scenario.flows.push_back({name, LeakyBucketDescriptor{p, rho, sigma}});
    }

    for (const auto& jd : j.value("demands", nlohmann::json::array())) {
        DemandSpec d;
        d.name = jd.at("name").get<std::string>();
        d.source = resolve(jd.at("source").get<std::string>(), "demand '" + d.name + "'");
        d.destination = resolve(jd.at("dest").get<std::string>(), "demand '" + d.name + "'");
        d.flow = jd.at("flow").get<std::string>();
        if (!scenario.flow(d.flow))
            fail_validation("demand '" + d.name + "' references unknown flow '" + d.flow + "'");
        if (jd.contains("throughput_mbps"))
            d.throughput_floor = require_positive(jd.at("throughput_mbps").get<double>(),
                                                  "demand throughput_mbps") * kMbps;
        if (jd.contains("delay_ms"))
            d.delay_ceiling = require_positive(jd.at("delay_ms").get<double>(),
                                               "demand delay_ms") * kMs;
        if (!d.throughput_floor && !d.delay_ceiling)
            fail_validation("demand '" + d.name + "' needs delay_ms or throughput_mbps");
        scenario.demands.push_back(std::move(d));
    }

    for (const auto& je : j.value("experiments", nlohmann::json::array())) {
        ExperimentSpec e;
        e.figure = je.at("figure").get<std::string>();
        if (e.figure != "fig4" && e.figure != "fig6" && e.figure != "fig7" &&
            e.figure != "fig8")
            fail_validation("unsupported figure '" + e.figure + "'");
        e.delay_from = je.value("delay_from_ms", 40.0) * kMs;
        e.delay_to = je.value("delay_to_ms", 200.0) * kMs;
        e.delay_step = je.value("delay_step_ms", 5.0) * kMs;
        e.theta = je.value("theta_ms", 10.0) * kMs;
        e.domains = je.value("domains", 3u);
        e.fig8_delay = je.value("fig8_delay_ms", 60.0) * kMs;
        if (!(e.delay_step > 0.0) || e.delay_to < e.delay_from)
            fail_validation("experiment sweep range must be non-empty and ordered");
        if (!(e.theta >= 0.0) || e.domains == 0)
            fail_validation("experiment theta/domains out of range");
        scenario.experiments.push_back(std::move(e));
    }

    return scenario;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError(ScenarioError::Kind::Io, "cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(ScenarioError::Kind::Parse,
                            std::string("scenario parse error: ") + e.what());
    }
    try {
        return parse_scenario(j);
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(ScenarioError::Kind::Parse,
                            std::string("scenario field error: ") + e.what());
    }
}

}  // namespace sdpsim
