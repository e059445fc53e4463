#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sdpsim/broker.hpp"
#include "sdpsim/scenario.hpp"

using namespace sdpsim;

namespace {

const LeakyBucketDescriptor f1{60e6, 1.5e6, 1.04e6};

CapabilityMatrix line_domain(const std::string& name, const std::string& from,
                             const std::string& to, double rate_mbps = 20.0,
                             double latency_ms = 10.0) {
    CapabilityMatrix m;
    m.domain = name;
    m.node_labels = {from, to};
    m.entries.emplace(std::pair{from, to},
                      LatencyRateProfile{rate_mbps * 1e6, latency_ms * 1e-3});
    return m;
}

/// Three domains in a line, joined by neutral peering links.
ServiceRegistry line_registry() {
    ServiceRegistry r;
    r.publish(line_domain("d1", "a", "b"));
    r.publish(line_domain("d2", "b", "c"));
    r.publish(line_domain("d3", "c", "d"));
    r.add_peering({{"d1", "b"}, {"d2", "b"}, neutral_peering_profile()});
    r.add_peering({{"d2", "c"}, {"d3", "c"}, neutral_peering_profile()});
    return r;
}

DemandProfile f1_demand(double delay_ms) {
    return {{"d1", "a"}, {"d3", "d"}, std::nullopt, delay_ms * 1e-3, f1};
}

}  // namespace

TEST_CASE("publish validates and versions matrices") {
    ServiceRegistry r;
    CHECK(r.publish(line_domain("d1", "a", "b")) == 1);
    CHECK(r.publish(line_domain("d1", "a", "b", 25.0)) == 2);

    auto bad = line_domain("dx", "a", "b");
    bad.entries.emplace(std::pair{"a", "a"}, LatencyRateProfile{1e6, 0.0});
    try {
        r.publish(bad);
        FAIL("diagonal entry must be rejected");
    } catch (const BrokerError& e) {
        CHECK(e.kind == BrokerError::Kind::Validation);
        CHECK_FALSE(e.violations.empty());
    }
    CHECK(r.version() == 2);  // rejected publish does not bump the version
}

TEST_CASE("re-publish flags shrunk links carrying allocations as stale") {
    ServiceRegistry r;
    r.publish(line_domain("d1", "a", "b", 20.0, 10.0));
    DemandProfile demand{{"d1", "a"}, {"d1", "b"}, 15e6, std::nullopt, f1};
    auto chain = r.discover_single(demand);
    REQUIRE(chain);
    auto ticket = r.allocate(*chain, demand);
    CHECK_FALSE(ticket.stale);

    r.publish(line_domain("d1", "a", "b", 10.0, 10.0));  // below the 15 Mbps grant
    auto tickets = r.outstanding_tickets();
    REQUIRE(tickets.count(ticket.id));
    CHECK(tickets.at(ticket.id).stale);
    CHECK(r.link_states().at("d1:a>b").residual == 0.0);
}

TEST_CASE("single-domain discovery with residual and delay checks") {
    ServiceRegistry r;
    r.publish(line_domain("d1", "s", "d", 20.0, 10.0));

    DemandProfile ok{{"d1", "s"}, {"d1", "d"}, 10e6, std::nullopt, f1};
    auto chain = r.discover_single(ok);
    REQUIRE(chain);
    CHECK(chain->hops.size() == 1);
    CHECK(chain->hops.front().link_id == "d1:s>d");

    DemandProfile too_big{{"d1", "s"}, {"d1", "d"}, 25e6, std::nullopt, f1};
    CHECK_FALSE(r.discover_single(too_big));

    DemandProfile too_fast{{"d1", "s"}, {"d1", "d"}, std::nullopt, 5e-3, f1};
    CHECK_FALSE(r.discover_single(too_fast));  // entry latency 10 ms
}

TEST_CASE("discovery prefers the larger residual, then the lexical domain") {
    ServiceRegistry r;
    r.publish(line_domain("alpha", "s", "d", 15.0, 10.0));
    r.publish(line_domain("beta", "s", "d", 18.0, 10.0));
    // endpoints without a domain match any domain's nodes
    DemandProfile demand{{"", "s"}, {"", "d"}, 10e6, std::nullopt, f1};
    auto chain = r.discover_single(demand);
    REQUIRE(chain);
    CHECK(chain->hops.front().domain == "beta");

    r.publish(line_domain("beta", "s", "d", 15.0, 10.0));
    chain = r.discover_single(demand);
    REQUIRE(chain);
    CHECK(chain->hops.front().domain == "alpha");  // tie: lexical order
}

TEST_CASE("orchestration composes the three-domain line") {
    auto r = line_registry();
    auto demand = f1_demand(100.0);
    CHECK_FALSE(r.discover_single(demand));

    auto chain = r.orchestrate_chain(demand);
    REQUIRE(chain);
    CHECK(chain->composed.rate == 20e6);
    CHECK(chain->composed.latency == Catch::Approx(30e-3));
    auto c_min = min_capacity(demand, chain->composed.latency);
    REQUIRE(c_min);
    CHECK(*c_min == Catch::Approx(12.152e6).epsilon(1e-4));
}

TEST_CASE("orchestration rejects infeasible latency") {
    auto r = line_registry();
    CHECK_FALSE(r.orchestrate_chain(f1_demand(25.0)));  // theta_e = 30 ms
}

TEST_CASE("orchestration prefers fewer domains") {
    auto r = line_registry();
    // a 2-domain shortcut with the same endpoints
    CapabilityMatrix shortcut;
    shortcut.domain = "dx";
    shortcut.node_labels = {"b", "d"};
    shortcut.entries.emplace(std::pair{"b", "d"},
                             LatencyRateProfile{20e6, 10e-3});
    r.publish(shortcut);
    r.add_peering({{"d1", "b"}, {"dx", "b"}, neutral_peering_profile()});

    // destination by label only, so both the 2- and 3-domain chains qualify
    DemandProfile demand{{"d1", "a"}, {"", "d"}, std::nullopt, 100e-3, f1};
    auto chain = r.orchestrate_chain(demand);
    REQUIRE(chain);
    std::set<std::string> domains;
    for (const auto& h : chain->hops)
        if (!h.peering) domains.insert(h.domain);
    CHECK(domains == std::set<std::string>{"d1", "dx"});
}

TEST_CASE("allocation is all-or-nothing and conserves residuals") {
    auto r = line_registry();
    auto demand = f1_demand(100.0);
    auto chain = r.orchestrate_chain(demand);
    REQUIRE(chain);

    auto ticket = r.allocate(*chain, demand);
    CHECK(ticket.granted_rate == Catch::Approx(12.152e6).epsilon(1e-4));
    for (const auto& [domain, link, rate] : ticket.grants)
        CHECK(rate == ticket.granted_rate);
    auto states = r.link_states();
    CHECK(states.at("d1:a>b").residual == Catch::Approx(20e6 - ticket.granted_rate));

    // second identical demand: residual 7.848 Mbps < 12.152 Mbps
    auto chain2 = r.orchestrate_chain(demand);
    CHECK_FALSE(chain2);
    auto before = r.link_states();
    try {
        r.allocate(*chain, demand);
        FAIL("expected insufficient residual");
    } catch (const BrokerError& e) {
        CHECK(e.kind == BrokerError::Kind::InsufficientResidual);
        CHECK_FALSE(e.link_id.empty());
    }
    auto after = r.link_states();
    for (const auto& [id, st] : before)
        CHECK(after.at(id).residual == st.residual);  // bit-identical

    r.release(ticket.id);
    for (const auto& [id, st] : r.link_states())
        CHECK(st.residual == st.rate);
    // release then re-allocate succeeds
    auto chain3 = r.orchestrate_chain(demand);
    REQUIRE(chain3);
    CHECK_NOTHROW(r.allocate(*chain3, demand));
}

TEST_CASE("release edge cases") {
    auto r = line_registry();
    auto demand = f1_demand(100.0);
    auto chain = r.orchestrate_chain(demand);
    REQUIRE(chain);
    auto ticket = r.allocate(*chain, demand);

    r.release(ticket.id);
    CHECK_THROWS_AS(r.release(ticket.id), BrokerError);  // double release

    // release after a publish that shrank the rate: residual clamps
    auto chain2 = r.orchestrate_chain(demand);
    REQUIRE(chain2);
    auto ticket2 = r.allocate(*chain2, demand);
    r.publish(line_domain("d1", "a", "b", 13.0, 10.0));
    r.release(ticket2.id);
    auto st = r.link_states().at("d1:a>b");
    CHECK(st.residual == st.rate);
}

TEST_CASE("allocate rejects a stale chain after re-publish") {
    auto r = line_registry();
    auto demand = f1_demand(100.0);
    auto chain = r.orchestrate_chain(demand);
    REQUIRE(chain);
    r.publish(line_domain("d2", "b", "c", 20.0, 15.0));  // profile changed
    try {
        r.allocate(*chain, demand);
        FAIL("expected stale chain");
    } catch (const BrokerError& e) {
        CHECK(e.kind == BrokerError::Kind::StaleChain);
    }
}

TEST_CASE("admission soundness: outstanding tickets stay feasible") {
    auto r = line_registry();
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> delay(60.0, 300.0);
    std::vector<std::uint64_t> open;
    for (int i = 0; i < 60; ++i) {
        auto demand = f1_demand(delay(rng));
        if (auto chain = r.orchestrate_chain(demand)) {
            auto t = r.allocate(*chain, demand);
            open.push_back(t.id);
        } else if (!open.empty()) {
            r.release(open.back());
            open.pop_back();
        }
        for (const auto& [id, t] : r.outstanding_tickets()) {
            auto d = delay_bound_lr(f1, {t.granted_rate, t.chain.composed.latency});
            REQUIRE(d);
            // granted exactly C_min, so the bound meets the ceiling
            CHECK(t.granted_rate <= t.chain.composed.rate);
        }
    }
}

TEST_CASE("discovery and orchestration are deterministic") {
    auto build = [] {
        auto r = line_registry();
        r.publish(line_domain("alt2", "a", "m", 22.0, 10.0));
        r.publish(line_domain("alt3", "m", "d", 22.0, 10.0));
        r.add_peering({{"d1", "a"}, {"alt2", "a"}, neutral_peering_profile()});
        r.add_peering({{"alt2", "m"}, {"alt3", "m"}, neutral_peering_profile()});
        r.add_peering({{"alt3", "d"}, {"d3", "d"}, neutral_peering_profile()});
        return r;
    };
    auto demand = f1_demand(100.0);
    auto a = build().orchestrate_chain(demand);
    auto b = build().orchestrate_chain(demand);
    REQUIRE((a && b));
    REQUIRE(a->hops.size() == b->hops.size());
    for (std::size_t i = 0; i < a->hops.size(); ++i)
        CHECK(a->hops[i].link_id == b->hops[i].link_id);
}
