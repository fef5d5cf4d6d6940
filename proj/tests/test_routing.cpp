#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "polsr/rng.hpp"
#include "polsr/routing.hpp"
#include "route_oracle.hpp"

using namespace polsr;
using namespace polsr::routing;
using wire::NeighborBlock;
using wire::TcMessage;

namespace {

lq::LinkState link_to(Address n, double phi, double rho, double v = 0.0, double expires = 100.0)
{
    return testing::symmetric_link(n, phi, rho, v, expires);
}

TcMessage tc(Address from, std::uint16_t ansn, std::vector<NeighborBlock> adv, std::uint16_t seq = 0)
{
    return TcMessage{wire::Variant::Original, from, seq, ansn, std::move(adv)};
}

}  // namespace

TEST_CASE("absorbing TC messages")
{
    TopologySet ts;
    CHECK(ts.absorb(tc(5, 10, {{6, 255, 255, 0.0}, {7, 128, 128, 0.0}}), 0.0, 3.0));
    CHECK(ts.entries().size() == 2);
    CHECK(*ts.ansn(5) == 10);

    CHECK_FALSE(ts.absorb(tc(5, 9, {}), 1.0, 3.0));
    CHECK(ts.entries().size() == 2);

    CHECK(ts.absorb(tc(5, 10, {{6, 200, 200, 0.0}}), 1.0, 3.0));
    CHECK(ts.entries().size() == 1);
    CHECK(ts.entries().at({5, 6}).lq == 200);
    CHECK(ts.entries().at({5, 6}).expires_at == 4.0);

    TopologySet wrap;
    wrap.absorb(tc(5, 65535, {{6, 1, 1, 0.0}}), 0.0, 3.0);
    CHECK(wrap.absorb(tc(5, 0, {{7, 1, 1, 0.0}}), 0.5, 3.0));
    CHECK(wrap.entries().count({5, 7}) == 1);
    CHECK(wrap.entries().count({5, 6}) == 0);

    CHECK_FALSE(ts.purge(3.9));
    CHECK(ts.purge(4.0));
    CHECK(ts.entries().empty());
    CHECK(ts.absorb(tc(5, 1, {{6, 1, 1, 0.0}}), 5.0, 3.0));
}

TEST_CASE("duplicate suppression")
{
    DuplicateSet d(30.0);
    CHECK(d.should_forward(tc(5, 1, {}, 7), 0.0));
    CHECK_FALSE(d.should_forward(tc(5, 1, {}, 7), 0.1));
    CHECK(d.should_forward(tc(5, 2, {}, 7), 0.2));
    CHECK(d.should_forward(tc(6, 1, {}, 7), 0.2));
    CHECK(d.should_forward(tc(5, 1, {}, 7), 31.0));
}

TEST_CASE("errorless chain counts hops")
{
    TopologySet ts;
    ts.absorb(tc(2, 0, {{1, 255, 255, 0.0}, {3, 255, 255, 0.0}}), 0.0, 10.0);
    ts.absorb(tc(3, 0, {{2, 255, 255, 0.0}, {4, 255, 255, 0.0}}), 0.0, 10.0);
    const std::vector<lq::LinkState> links{link_to(2, 1.0, 1.0)};
    const auto r = compute_routes(1, links, ts, {}, 1.0);
    CHECK(r.at(3) == Route{2, 2.0, 2});
    CHECK(r.at(4) == Route{2, 3.0, 3});
    CHECK(r.count(1) == 0);
}

TEST_CASE("lossy direct link loses to a clean two-hop path")
{
    TopologySet ts;
    ts.absorb(tc(2, 0, {{3, 255, 255, 0.0}}), 0.0, 10.0);
    const std::vector<lq::LinkState> links{link_to(2, 1.0, 1.0), link_to(3, 0.2, 1.0)};
    const auto r = compute_routes(1, links, ts, {}, 1.0);
    CHECK(r.at(3) == Route{2, 2.0, 2});
}

TEST_CASE("speed weighting steers away from a receding neighbor")
{
    TopologySet ts;
    ts.absorb(tc(2, 0, {{3, 255, 255, 0.0}}), 0.0, 10.0);
    const std::vector<lq::LinkState> links{link_to(2, 1.0, 1.0), link_to(3, 1.0, 1.0, 10.0)};
    lq::LqParams p;
    CHECK(compute_routes(1, links, ts, p, 1.0).at(3).next_hop == 3);
    p.beta = 0.2;
    const auto r = compute_routes(1, links, ts, p, 1.0);
    CHECK(r.at(3).next_hop == 2);
    CHECK(r.at(3).metric == 2.0);
}

TEST_CASE("ties prefer fewer hops, then the lower next hop")
{
    TopologySet ts;
    ts.absorb(tc(2, 0, {{4, 255, 255, 0.0}}), 0.0, 10.0);
    ts.absorb(tc(3, 0, {{4, 255, 255, 0.0}}), 0.0, 10.0);
    const std::vector<lq::LinkState> links{link_to(3, 1.0, 1.0), link_to(2, 1.0, 1.0),
                                           link_to(4, 0.5, 1.0)};
    const auto r = compute_routes(1, links, ts, {}, 1.0);
    CHECK(r.at(4) == Route{4, 2.0, 1});
    const std::vector<lq::LinkState> no_direct{link_to(3, 1.0, 1.0), link_to(2, 1.0, 1.0)};
    CHECK(compute_routes(1, no_direct, ts, {}, 1.0).at(4).next_hop == 2);
}

TEST_CASE("expired and asymmetric links carry no routes")
{
    TopologySet ts;
    ts.absorb(tc(2, 0, {{3, 255, 255, 0.0}}), 0.0, 2.0);
    auto asym = link_to(4, 1.0, 1.0);
    asym.symmetric = false;
    const std::vector<lq::LinkState> links{link_to(2, 1.0, 1.0, 0.0, 5.0), asym};
    CHECK(compute_routes(1, links, ts, {}, 1.0).count(3) == 1);
    CHECK(compute_routes(1, links, ts, {}, 1.0).count(4) == 0);
    CHECK(compute_routes(1, links, ts, {}, 2.0).count(3) == 0);
    CHECK(compute_routes(1, links, ts, {}, 5.0).empty());
    const std::vector<lq::LinkState> dead{link_to(2, 0.0, 1.0)};
    CHECK(compute_routes(1, dead, ts, {}, 1.0).empty());
}

TEST_CASE("routes equal exhaustive path enumeration on random graphs")
{
    Rng rng(2024);
    const lq::LqParams params{0.2, 0.2, 0.04, 0.5};
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(0, 5));
        const auto topo = testing::random_topology(rng, n, trial % 2 == 0, params.beta);
        const auto got = compute_routes(1, topo.links, topo.topology, params, 1.0);
        const auto want = testing::brute_force_routes(1, topo.graph);
        INFO("trial " << trial);
        CHECK(got == want);
    }
}

TEST_CASE("zero speed weight reproduces plain ETX")
{
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<lq::LinkState> links;
        std::vector<lq::LinkState> still;
        TopologySet ts;
        TopologySet ts_still;
        for (Address v = 2; v <= 5; ++v) {
            const double phi = rng.uniform(0.05, 1.0);
            const double rho = rng.uniform(0.05, 1.0);
            links.push_back(link_to(v, phi, rho, rng.uniform(-12, 12)));
            still.push_back(link_to(v, phi, rho, 0.0));
            std::vector<NeighborBlock> blocks;
            std::vector<NeighborBlock> blocks_still;
            for (Address w = 2; w <= 7; ++w) {
                if (w != v && rng.bernoulli(0.5)) {
                    const auto a = static_cast<std::uint8_t>(rng.uniform(1, 256));
                    const auto b = static_cast<std::uint8_t>(rng.uniform(1, 256));
                    blocks.push_back({w, a, b, wire::dequantize_speed(static_cast<std::int16_t>(rng.uniform(-3000, 3000)))});
                    blocks_still.push_back({w, a, b, 0.0});
                }
            }
            ts.absorb(tc(v, 0, blocks), 0.0, 10.0);
            ts_still.absorb(tc(v, 0, blocks_still), 0.0, 10.0);
        }
        lq::LqParams p;
        p.beta = 0.0;
        CHECK(compute_routes(1, links, ts, p, 1.0) == compute_routes(1, still, ts_still, p, 1.0));
    }
}

namespace {

wire::HelloMessage naming(Address from, std::uint16_t seq, Address who)
{
    wire::HelloMessage h;
    h.originator = from;
    h.seq = seq;
    h.neighbors.push_back({who, 255, 255, 0.0});
    return h;
}

}  // namespace

TEST_CASE("node message generation")
{
    const lq::LqParams p{0.2, 0.0, 0.04, 0.5};
    OlsrNode node(1, Protocol::Olsr, p, {1.0, 3.0, 1.5});
    const auto lonely = node.generate_hello(0.0, {});
    CHECK(lonely.neighbors.empty());
    CHECK(wire::encode_hello(lonely).size() == wire::kHelloHeaderOriginal);
    CHECK(lonely.htime == wire::encode_vtime(0.5));

    node.receive_hello(naming(2, 0, 1), {}, 0.1);
    const auto* l = node.link(2);
    REQUIRE(l);
    CHECK(l->symmetric);
    CHECK(node.generate_hello(0.5, {}).neighbors.at(0).lq == wire::quantize_ratio(0.2));

    const auto t1 = node.generate_tc(0.6);
    const auto t2 = node.generate_tc(1.0);
    CHECK(t1.ansn == t2.ansn);
    CHECK(t2.seq == t1.seq + 1);
    node.receive_hello(naming(3, 0, 1), {}, 1.2);
    CHECK(node.generate_tc(1.3).ansn == static_cast<std::uint16_t>(t1.ansn + 1));

    CHECK(node.routes(1.4).count(3) == 1);
    CHECK(node.table_recomputed());
    node.routes(1.45);
    CHECK_FALSE(node.table_recomputed());
    CHECK(node.routes(10.0).empty());
    CHECK(node.link(2) == nullptr);
}

TEST_CASE("received TCs feed the table and are flooded once")
{
    const lq::LqParams p{0.2, 0.0, 0.04, 0.5};
    OlsrNode node(1, Protocol::Olsr, p, {1.0, 3.0, 1.5});
    node.receive_hello(naming(2, 0, 1), {}, 0.0);
    const auto m = tc(2, 4, {{3, 255, 255, 0.0}}, 9);
    CHECK(node.receive_tc(m, 0.1));
    CHECK_FALSE(node.receive_tc(m, 0.2));
    CHECK(node.routes(0.3).at(3).next_hop == 2);
    CHECK_FALSE(node.receive_tc(tc(1, 0, {}), 0.3));
}

TEST_CASE("P-OLSR nodes require a position")
{
    const lq::LqParams p{0.2, 0.2, 0.04, 0.5};
    OlsrNode node(1, Protocol::Polsr, p, {});
    CHECK(node.variant() == wire::Variant::Modified);
    CHECK_THROWS_AS(node.generate_hello(0.0, {}), lq::ProtocolError);
    const auto h = node.generate_hello(0.0, geo::GeoPosition{46.5, 6.5, 75.0});
    CHECK(wire::encode_hello(h).size() == wire::kHelloHeaderModified);
    OlsrNode plain(2, Protocol::Olsr, p, {});
    CHECK(plain.metric_params().beta == 0.0);
}
