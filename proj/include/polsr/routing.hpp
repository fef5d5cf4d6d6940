#ifndef POLSR_ROUTING_HPP
#define POLSR_ROUTING_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "polsr/linkmetrics.hpp"
#include "polsr/wire.hpp"

namespace polsr::routing {

using wire::Address;

struct TopologyEntry {
    std::uint8_t lq = 0;
    std::uint8_t nlq = 0;
    double speed = 0.0;
    std::uint16_t ansn = 0;
    double expires_at = 0.0;
};

/// Links learned from TC messages, keyed by (originator, advertised neighbor).
class TopologySet {
public:
    /// Replaces the originator's links when the ANSN is not older than the
    /// stored one. Returns false for stale messages.
    bool absorb(const wire::TcMessage& tc, double t, double validity);

    /// Drops expired entries; returns true if anything was removed.
    bool purge(double t);

    const std::map<std::pair<Address, Address>, TopologyEntry>& entries() const { return entries_; }
    std::optional<std::uint16_t> ansn(Address originator) const;

    /// Earliest expiry among stored entries, or +inf.
    double next_expiry() const;

private:
    struct OriginatorRecord {
        std::uint16_t ansn = 0;
        double expires_at = 0.0;
    };
    std::map<std::pair<Address, Address>, TopologyEntry> entries_;
    std::map<Address, OriginatorRecord> originators_;
};

/// Duplicate suppression for flooded TC messages.
class DuplicateSet {
public:
    explicit DuplicateSet(double hold = 30.0) : hold_(hold) {}

    /// True exactly once per (originator, ansn, seq) until the record ages out.
    bool should_forward(const wire::TcMessage& tc, double t);

    std::size_t size() const { return seen_.size(); }

private:
    using Key = std::tuple<Address, std::uint16_t, std::uint16_t>;
    double hold_;
    std::map<Key, double> seen_;
    double next_purge_ = 0.0;
};

struct Route {
    Address next_hop = 0;
    double metric = 0.0;
    int hops = 0;

    bool operator==(const Route&) const = default;
};

using RoutingTable = std::map<Address, Route>;

/// Minimum-metric routes from `self`. Local edges come from non-expired
/// symmetric links at full precision; remote edges from non-expired TC
/// entries using the advertised (quantized) values. Ties are broken by hop
/// count, then by next-hop address.
RoutingTable compute_routes(Address self, std::span<const lq::LinkState> links,
                            const TopologySet& ts, const lq::LqParams& p, double t);

void write_routes_csv(std::ostream& os, double t, Address node, const RoutingTable& table);

/// Protocol state of one node: link sensing, topology, message generation.
class OlsrNode {
public:
    struct Timing {
        double tc_interval = 1.0;
        double tc_validity = 3.0;
        double neighbor_hold = 1.5;
    };

    OlsrNode(Address address, Protocol protocol, const lq::LqParams& params, const Timing& timing);

    Address address() const { return address_; }
    Protocol protocol() const { return protocol_; }
    wire::Variant variant() const;

    /// Parameters used for metric computation (beta forced to 0 for OLSR).
    const lq::LqParams& metric_params() const { return metric_params_; }

    wire::HelloMessage generate_hello(double t, const std::optional<geo::GeoPosition>& gps);
    wire::TcMessage generate_tc(double t);

    void receive_hello(const wire::HelloMessage& hello,
                       const std::optional<geo::GeoPosition>& my_gps, double t);

    /// Absorbs a TC; returns true if it should be re-flooded.
    bool receive_tc(const wire::TcMessage& tc, double t);

    /// Silence-driven miss detection and expiry of links and topology.
    void tick(double t);

    /// Routing table at time t, recomputed when state changed.
    const RoutingTable& routes(double t);

    /// Set when the last routes() call recomputed the table.
    bool table_recomputed() const { return recomputed_; }

    std::vector<lq::LinkState> links() const;
    const lq::LinkState* link(Address neighbor) const;
    const TopologySet& topology() const { return topology_; }
    std::uint16_t ansn() const { return ansn_; }

private:
    std::vector<wire::NeighborBlock> link_blocks(bool symmetric_only) const;
    void mark_dirty() { dirty_ = true; }

    Address address_;
    Protocol protocol_;
    lq::LqParams params_;
    lq::LqParams metric_params_;
    Timing timing_;

    std::map<Address, lq::LinkState> links_;
    TopologySet topology_;
    DuplicateSet duplicates_;

    std::uint16_t hello_seq_ = 0;
    std::uint16_t tc_seq_ = 0;
    std::uint16_t ansn_ = 0;
    std::optional<std::set<Address>> advertised_;

    RoutingTable table_;
    bool dirty_ = true;
    bool recomputed_ = false;
    double valid_until_ = 0.0;
};

}  // namespace polsr::routing

#endif  // POLSR_ROUTING_HPP
