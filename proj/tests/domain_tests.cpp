#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "sdpsim/domain.hpp"
#include "sdpsim/qos.hpp"

using namespace sdpsim;

namespace {

CapabilityMatrix three_node_matrix() {
    CapabilityMatrix m;
    m.domain = "d1";
    m.node_labels = {"a", "b", "c"};
    m.entries.emplace(std::pair{"a", "b"}, LatencyRateProfile{20e6, 10e-3});
    m.entries.emplace(std::pair{"b", "c"}, LatencyRateProfile{15e6, 5e-3});
    m.entries.emplace(std::pair{"a", "c"}, LatencyRateProfile{10e6, 12e-3});
    return m;
}

}  // namespace

TEST_CASE("compose_chain follows the bottleneck/sum rule") {
    std::vector<LatencyRateProfile> profiles{
        {10e6, 5e-3}, {20e6, 15e-3}, {15e6, 10e-3}};
    auto composed = compose_chain(profiles);
    CHECK(composed.rate == 10e6);
    CHECK(composed.latency == Catch::Approx(30e-3));

    auto single = compose_chain({{7e6, 4e-3}});
    CHECK(single.rate == 7e6);
    CHECK(single.latency == 4e-3);

    auto sym = compose_chain({{5e6, 10e-3}, {5e6, 10e-3}, {5e6, 10e-3}});
    CHECK(sym.rate == 5e6);
    CHECK(sym.latency == Catch::Approx(30e-3));

    CHECK_THROWS_AS(compose_chain({}), std::invalid_argument);
}

TEST_CASE("compose_chain is order-insensitive") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> rate(1e6, 50e6), lat(0.0, 20e-3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<LatencyRateProfile> profiles;
        for (int i = 0; i < 5; ++i) profiles.push_back({rate(rng), lat(rng)});
        auto reference = compose_chain(profiles);
        std::shuffle(profiles.begin(), profiles.end(), rng);
        auto shuffled = compose_chain(profiles);
        CHECK(shuffled.rate == reference.rate);
        CHECK(shuffled.latency == Catch::Approx(reference.latency).margin(1e-15));
    }
}

TEST_CASE("validate_matrix reports violations as data") {
    CHECK(validate_matrix(three_node_matrix()).empty());

    auto diagonal = three_node_matrix();
    diagonal.entries.emplace(std::pair{"a", "a"}, LatencyRateProfile{1e6, 0.0});
    auto violations = validate_matrix(diagonal);
    REQUIRE(violations.size() == 1);
    CHECK(violations.front().find("(a,a)") != std::string::npos);

    auto unknown = three_node_matrix();
    unknown.entries.emplace(std::pair{"a", "zz"}, LatencyRateProfile{1e6, 0.0});
    violations = validate_matrix(unknown);
    REQUIRE(violations.size() == 1);
    CHECK(violations.front().find("zz") != std::string::npos);

    auto dup = three_node_matrix();
    dup.node_labels.push_back("a");
    CHECK(validate_matrix(dup).size() == 1);
}

TEST_CASE("service chain composes hop profiles") {
    std::vector<ChainHop> hops{
        {"d1:a>b", "d1", {"d1", "a"}, {"d1", "b"}, {20e6, 10e-3}, false},
        {"peer:d1:b>d2:b", "", {"d1", "b"}, {"d2", "b"}, neutral_peering_profile(), true},
        {"d2:b>c", "d2", {"d2", "b"}, {"d2", "c"}, {12e6, 8e-3}, false},
    };
    auto chain = ServiceChain::from_hops(hops, 3);
    CHECK(chain.composed.rate == 12e6);
    CHECK(chain.composed.latency == Catch::Approx(18e-3));
    CHECK(chain.registry_version == 3);
}

TEST_CASE("neutral peering is algebraically transparent") {
    LatencyRateProfile a{9e6, 7e-3};
    auto with_peering = compose_chain({a, neutral_peering_profile()});
    CHECK(with_peering.rate == a.rate);
    CHECK(with_peering.latency == a.latency);
}

// Composed-path delay never exceeds the sum of hop-by-hop delays when the
// burst is re-served at every hop (pay-bursts-only-once direction).
TEST_CASE("end-to-end bound beats hop-by-hop recomputation") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> rate(4e6, 40e6), lat(1e-3, 15e-3),
        sigma(0.2e6, 2e6);
    for (int trial = 0; trial < 15; ++trial) {
        LeakyBucketDescriptor load{30e6, 2e6, sigma(rng)};
        std::vector<LatencyRateProfile> hops;
        int n = 2 + static_cast<int>(trial % 3);
        for (int i = 0; i < n; ++i) hops.push_back({rate(rng), lat(rng)});

        auto composed = compose_chain(hops);
        double horizon = *default_oracle_horizon(load, composed);
        auto e2e = horizontal_deviation(load.to_curve(), composed.to_curve(),
                                        horizon, 1e-4);
        REQUIRE(e2e);

        double hop_by_hop = 0.0;
        for (const auto& h : hops) {
            auto d = horizontal_deviation(load.to_curve(), h.to_curve(),
                                          *default_oracle_horizon(load, h), 1e-4);
            REQUIRE(d);
            hop_by_hop += *d;
        }
        CHECK(*e2e <= hop_by_hop + 1e-4);
    }
}
