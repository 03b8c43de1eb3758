#include "oracles.hpp"

#include "srpsim/errors.hpp"
#include "srpsim/qos/metric.hpp"
#include "srpsim/qos/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace srpsim;
using qos::GKind;

TEST_CASE("fixed point conversion rounds to the nearest micro unit") {
    CHECK(qos::to_fixed(1.0) == 1000000);
    CHECK(qos::to_fixed(-0.0000005) == -1);
    CHECK(qos::to_fixed(0.1) == 100000);
    CHECK(qos::to_real(2500000) == doctest::Approx(2.5));
    CHECK_THROWS_AS(qos::to_fixed(std::nan("")), InvalidArgument);
}

TEST_CASE("kind names parse with and without the g_ prefix") {
    CHECK(qos::parse_gkind("g_add") == GKind::add);
    CHECK(qos::parse_gkind("max") == GKind::max);
    CHECK(qos::parse_gkind("g_min") == GKind::min);
    CHECK(qos::parse_gkind("mul") == GKind::mul);
    CHECK_THROWS_AS(qos::parse_gkind("sum"), InvalidArgument);
}

TEST_CASE("route metric agrees with the reference for random lists") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> v(0.1, 9.0);
    for (GKind k : {GKind::add, GKind::max, GKind::min, GKind::mul}) {
        for (int trial = 0; trial < 500; ++trial) {
            std::vector<double> links(1 + rng() % 7);
            for (auto& x : links) x = v(rng);
            CHECK(qos::route_metric(k, links) == doctest::Approx(oracle::route_metric(k, links)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(qos::route_metric(GKind::add, std::vector<double>{}), InvalidArgument);
    CHECK_THROWS_AS(qos::route_metric(GKind::mul, std::vector<double>{1.0, 0.0}), InvalidArgument);
}

TEST_CASE("aggregate over the wire matches the real route metric") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> v(0.5, 5.0);
    for (GKind k : {GKind::add, GKind::max, GKind::min, GKind::mul}) {
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> links(1 + rng() % 6);
            std::vector<qos::Metric> wire;
            for (auto& x : links) {
                x = std::round(v(rng) * 100) / 100;
                wire.push_back(qos::to_wire(k, x));
            }
            const double expect = oracle::route_metric(k, links);
            const double got = k == GKind::mul ? std::exp(qos::to_real(qos::aggregate(k, wire)))
                                                : qos::to_real(qos::aggregate(k, wire));
            CHECK(got == doctest::Approx(expect).epsilon(1e-5));
        }
    }
}

TEST_CASE("delta_good matches the reference tolerance") {
    for (GKind k : {GKind::add, GKind::max, GKind::min, GKind::mul}) {
        for (int n = 1; n <= 8; ++n) {
            for (double eps : {0.01, 0.1, 0.5}) {
                for (double dt : {0.0, eps / 2, eps}) {
                    CHECK(qos::delta_good(k, n, eps, dt) == doctest::Approx(oracle::delta_good(k, n, eps, dt)));
                    CHECK(qos::to_real(qos::delta_good_fixed(k, n, qos::to_fixed(eps), qos::to_fixed(dt))) ==
                          doctest::Approx(oracle::delta_good(k, n, eps, dt)));
                }
            }
        }
    }
}

TEST_CASE("sum_bound is the sum of per-hop bounds") {
    for (int n = 2; n <= 12; ++n) {
        for (double eps : {0.01, 0.1}) {
            for (double dt : {0.0, eps / 2}) {
                double total = 0;
                for (int i = 1; i <= n - 1; ++i) {
                    const int near_end = i < n - i ? i : n - i;
                    CHECK(qos::per_hop_bound(i, n, eps, dt) == doctest::Approx(near_end * eps + dt));
                    total += near_end * eps + dt;
                }
                CHECK(qos::sum_bound(n, eps, dt) == doctest::Approx(total));
            }
        }
    }
}

TEST_CASE("consistency check is strict, exact in administrative mode") {
    CHECK(qos::check_metric_consistency(1.0, 1.05, 0.1));
    CHECK_FALSE(qos::check_metric_consistency(qos::Metric{1000000}, qos::Metric{1100000}, qos::Metric{100000}));
    CHECK(qos::check_metric_consistency(qos::Metric{1000000}, qos::Metric{1099999}, qos::Metric{100000}));
    CHECK(qos::check_metric_consistency(qos::Metric{5}, qos::Metric{5}, qos::Metric{0}, true));
    CHECK_FALSE(qos::check_metric_consistency(qos::Metric{5}, qos::Metric{6}, qos::Metric{100}, true));
}

TEST_CASE("measurement noise stays inside delta_tilde and is reproducible") {
    qos::MetricConfig cfg;
    cfg.epsilon = qos::to_fixed(0.1);
    cfg.delta_tilde = qos::to_fixed(0.05);
    const qos::LinkMetricModel m(cfg, 99);
    const qos::LinkMetricModel again(cfg, 99);
    bool some_nonzero = false;
    for (std::uint32_t a = 0; a < 10; ++a) {
        for (std::uint32_t b = a + 1; b < 10; ++b) {
            const sim::Edge e{NodeId{a}, NodeId{b}};
            for (NodeId n : {e.lo, e.hi}) {
                const auto x = m.noise(n, e);
                CHECK(std::llabs(x) <= cfg.delta_tilde);
                CHECK(x == again.noise(n, e));
                some_nonzero |= x != 0;
            }
        }
    }
    CHECK(some_nonzero);
    qos::LinkMetricModel admin_model([&] {
        auto c = cfg;
        c.administrative = true;
        return c;
    }(), 99);
    admin_model.set_actual(sim::Edge{NodeId{0}, NodeId{1}}, 3.0);
    CHECK(admin_model.measure(NodeId{0}, sim::Edge{NodeId{0}, NodeId{1}}) == 3000000);
    CHECK_THROWS_AS(admin_model.measure(NodeId{2}, sim::Edge{NodeId{0}, NodeId{1}}), InvalidArgument);
}

TEST_CASE("node-local quantities are recognised") {
    CHECK(qos::is_node_local_quantity("battery"));
    CHECK(qos::is_node_local_quantity("willingness"));
    CHECK_FALSE(qos::is_node_local_quantity("delay"));
}

TEST_CASE("feasible liar bias sits just inside the upstream check") {
    qos::MetricConfig cfg;
    cfg.epsilon = qos::to_fixed(0.1);
    cfg.delta_tilde = qos::to_fixed(0.05);
    qos::LinkMetricModel m(cfg, 17);
    std::vector<NodeId> route;
    for (std::uint32_t i = 0; i < 6; ++i) route.push_back(NodeId{i});
    for (std::size_t i = 0; i + 1 < route.size(); ++i) m.set_actual(sim::make_edge(route[i], route[i + 1]), 2.0);
    const std::vector<bool> liar{false, true, true, false, true, false};
    for (int sign : {1, -1}) {
        const auto bias = qos::extreme_feasible_biases(m, route, liar, sign);
        for (std::size_t i = 0; i < route.size(); ++i) {
            if (!liar[i]) {
                CHECK(bias[i] == 0);
                continue;
            }
            const auto e = sim::make_edge(route[i - 1], route[i]);
            const qos::Metric upstream_view = m.measure(route[i - 1], e);
            const qos::Metric reported = m.measure_biased(route[i], e, bias[i]);
            CHECK(std::llabs(upstream_view - reported) < cfg.epsilon);
            // One micro unit further and the check fails.
            CHECK(std::llabs(upstream_view - (reported + sign)) >= cfg.epsilon);
        }
    }
}
