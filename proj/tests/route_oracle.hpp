#ifndef POLSR_TESTS_ROUTE_ORACLE_HPP
#define POLSR_TESTS_ROUTE_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "polsr/rng.hpp"
#include "polsr/routing.hpp"

namespace polsr::testing {

struct Edge {
    wire::Address to = 0;
    double w = 0.0;
};

using Graph = std::map<wire::Address, std::vector<Edge>>;

/// Random topology around node 1 as seen through its link set and TCs,
/// plus the same topology as a weighted directed graph.
struct RandomTopology {
    std::vector<lq::LinkState> links;
    routing::TopologySet topology;
    Graph graph;
};

inline lq::LinkState symmetric_link(wire::Address n, double phi, double rho, double v = 0.0,
                                    double expires = 100.0)
{
    lq::LinkState s;
    s.neighbor = n;
    s.phi_reported = phi;
    s.rho_ema = rho;
    s.v_ema = v;
    s.symmetric = true;
    s.expires_at = expires;
    return s;
}

/// Ratios are either 0/1 (many equal-cost paths) or arbitrary bytes.
inline RandomTopology random_topology(Rng& rng, int nodes, bool tie_heavy, double beta)
{
    RandomTopology out;
    const auto ratio_byte = [&] {
        if (tie_heavy) {
            return rng.bernoulli(0.5) ? std::uint8_t{255} : std::uint8_t{0};
        }
        return static_cast<std::uint8_t>(1 + rng.uniform(0, 255));
    };
    const auto speed = [&] {
        return tie_heavy ? 0.0 : wire::dequantize_speed(static_cast<std::int16_t>(rng.uniform(-2560, 2560)));
    };
    std::map<wire::Address, std::vector<wire::NeighborBlock>> adv;
    const auto n = static_cast<wire::Address>(nodes);
    for (wire::Address a = 1; a <= n; ++a) {
        for (wire::Address b = a + 1; b <= n; ++b) {
            if (!rng.bernoulli(0.55)) {
                continue;
            }
            for (const auto& [u, v] : {std::pair{a, b}, std::pair{b, a}}) {
                const auto lqb = tie_heavy ? std::uint8_t{255} : ratio_byte();
                const auto nlqb = ratio_byte();
                const double s = speed();
                const double phi = wire::dequantize_ratio(nlqb);
                const double rho = wire::dequantize_ratio(lqb);
                if (u == 1) {
                    out.links.push_back(symmetric_link(v, phi, rho, s));
                } else {
                    adv[u].push_back({v, lqb, nlqb, s});
                }
                const double w = lq::hop_etx(phi, rho, s, beta);
                if (std::isfinite(w)) {
                    out.graph[u].push_back({v, w});
                }
            }
        }
    }
    for (const auto& [o, blocks] : adv) {
        out.topology.absorb(wire::TcMessage{wire::Variant::Modified, o, 0, 0, blocks}, 0.0, 10.0);
    }
    return out;
}

/// Exhaustive search over simple paths, ordered by (metric, hops, first hop).
inline routing::RoutingTable brute_force_routes(wire::Address self, const Graph& g)
{
    routing::RoutingTable best;
    std::vector<wire::Address> path{self};
    std::function<void(wire::Address, double, wire::Address)> walk = [&](wire::Address u, double metric,
                                                                         wire::Address first) {
        auto it = g.find(u);
        if (it == g.end()) {
            return;
        }
        for (const auto& e : it->second) {
            if (std::find(path.begin(), path.end(), e.to) != path.end()) {
                continue;
            }
            const double m = metric + e.w;
            const wire::Address f = u == self ? e.to : first;
            const routing::Route cand{f, m, static_cast<int>(path.size())};
            auto b = best.find(e.to);
            if (b == best.end() || std::tie(cand.metric, cand.hops, cand.next_hop) <
                                       std::tie(b->second.metric, b->second.hops, b->second.next_hop)) {
                best[e.to] = cand;
            }
            path.push_back(e.to);
            walk(e.to, m, f);
            path.pop_back();
        }
    };
    walk(self, 0.0, 0);
    return best;
}

}  // namespace polsr::testing

#endif  // POLSR_TESTS_ROUTE_ORACLE_HPP
