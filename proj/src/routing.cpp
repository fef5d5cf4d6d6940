#include "polsr/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace polsr::routing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Label {
    double metric = kInf;
    int hops = 0;
    Address first = 0;

    auto key() const { return std::tie(metric, hops, first); }
    bool operator<(const Label& o) const { return key() < o.key(); }
};

}  // namespace

bool TopologySet::absorb(const wire::TcMessage& tc, double t, double validity)
{
    const Address o = tc.originator;
    if (auto it = originators_.find(o); it != originators_.end() && it->second.expires_at > t) {
        if (wire::seq_newer(it->second.ansn, tc.ansn)) {
            return false;
        }
    }
    auto first = entries_.lower_bound({o, 0});
    auto last = entries_.upper_bound({o, std::numeric_limits<Address>::max()});
    entries_.erase(first, last);
    const double expires = t + validity;
    for (const auto& b : tc.advertised) {
        if (b.addr == o) {
            continue;
        }
        entries_[{o, b.addr}] = TopologyEntry{b.lq, b.nlq, b.speed, tc.ansn, expires};
    }
    originators_[o] = OriginatorRecord{tc.ansn, expires};
    return true;
}

bool TopologySet::purge(double t)
{
    const auto before = entries_.size();
    std::erase_if(entries_, [t](const auto& kv) { return kv.second.expires_at <= t; });
    std::erase_if(originators_, [t](const auto& kv) { return kv.second.expires_at <= t; });
    return entries_.size() != before;
}

std::optional<std::uint16_t> TopologySet::ansn(Address originator) const
{
    if (auto it = originators_.find(originator); it != originators_.end()) {
        return it->second.ansn;
    }
    return std::nullopt;
}

double TopologySet::next_expiry() const
{
    double next = kInf;
    for (const auto& [key, e] : entries_) {
        next = std::min(next, e.expires_at);
    }
    return next;
}

bool DuplicateSet::should_forward(const wire::TcMessage& tc, double t)
{
    if (t >= next_purge_) {
        std::erase_if(seen_, [t](const auto& kv) { return kv.second <= t; });
        next_purge_ = t + hold_;
    }
    auto [it, inserted] = seen_.try_emplace(Key{tc.originator, tc.ansn, tc.seq}, t + hold_);
    if (inserted) {
        return true;
    }
    if (it->second <= t) {
        it->second = t + hold_;
        return true;
    }
    return false;
}

RoutingTable compute_routes(Address self, std::span<const lq::LinkState> links,
                            const TopologySet& ts, const lq::LqParams& p, double t)
{
    std::vector<Address> nodes{self};
    for (const auto& l : links) {
        nodes.push_back(l.neighbor);
    }
    for (const auto& [key, e] : ts.entries()) {
        nodes.push_back(key.first);
        nodes.push_back(key.second);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    const auto index = [&nodes](Address a) {
        return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), a) - nodes.begin());
    };

    std::vector<std::vector<std::pair<std::size_t, double>>> adj(nodes.size());
    const std::size_t src = index(self);
    for (const auto& l : links) {
        if (l.expired(t) || !l.symmetric || l.neighbor == self) {
            continue;
        }
        const double w = lq::hop_etx(l.phi_reported, l.rho_ema, l.v_ema, p.beta);
        if (std::isfinite(w)) {
            adj[src].emplace_back(index(l.neighbor), w);
        }
    }
    for (const auto& [key, e] : ts.entries()) {
        const auto [from, to] = key;
        if (from == self || from == to || e.expires_at <= t) {
            continue;
        }
        const double w = lq::hop_etx(wire::dequantize_ratio(e.nlq), wire::dequantize_ratio(e.lq),
                                     e.speed, p.beta);
        if (std::isfinite(w)) {
            adj[index(from)].emplace_back(index(to), w);
        }
    }

    std::vector<Label> best(nodes.size());
    std::vector<bool> done(nodes.size(), false);
    using Item = std::pair<Label, std::size_t>;
    const auto later = [](const Item& a, const Item& b) {
        return b.first < a.first || (!(a.first < b.first) && a.second > b.second);
    };
    std::priority_queue<Item, std::vector<Item>, decltype(later)> queue(later);
    best[src] = Label{0.0, 0, self};
    queue.emplace(best[src], src);
    while (!queue.empty()) {
        const auto [label, u] = queue.top();
        queue.pop();
        if (done[u] || best[u] < label) {
            continue;
        }
        done[u] = true;
        for (const auto& [v, w] : adj[u]) {
            if (done[v]) {
                continue;
            }
            Label cand{label.metric + w, label.hops + 1, u == src ? nodes[v] : label.first};
            if (cand < best[v]) {
                best[v] = cand;
                queue.emplace(cand, v);
            }
        }
    }

    RoutingTable table;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i != src && done[i] && std::isfinite(best[i].metric)) {
            table[nodes[i]] = Route{best[i].first, best[i].metric, best[i].hops};
        }
    }
    return table;
}

void write_routes_csv(std::ostream& os, double t, Address node, const RoutingTable& table)
{
    for (const auto& [dest, r] : table) {
        os << t << ',' << node << ',' << dest << ',' << r.next_hop << ',' << r.metric << '\n';
    }
}

OlsrNode::OlsrNode(Address address, Protocol protocol, const lq::LqParams& params,
                   const Timing& timing)
    : address_(address), protocol_(protocol), params_(params), metric_params_(params), timing_(timing)
{
    params_.validate();
    if (protocol_ == Protocol::Olsr) {
        metric_params_.beta = 0.0;
    }
}

wire::Variant OlsrNode::variant() const
{
    return protocol_ == Protocol::Polsr ? wire::Variant::Modified : wire::Variant::Original;
}

std::vector<wire::NeighborBlock> OlsrNode::link_blocks(bool symmetric_only) const
{
    std::vector<wire::NeighborBlock> blocks;
    for (const auto& [addr, l] : links_) {
        if (symmetric_only && !l.symmetric) {
            continue;
        }
        wire::NeighborBlock b;
        b.addr = addr;
        b.lq = wire::quantize_ratio(std::clamp(l.rho_ema, 0.0, 1.0));
        b.nlq = wire::quantize_ratio(std::clamp(l.phi_reported, 0.0, 1.0));
        if (protocol_ == Protocol::Polsr) {
            b.speed = std::clamp(l.v_ema, -wire::kMaxSpeed, wire::kMaxSpeed);
        }
        blocks.push_back(b);
    }
    return blocks;
}

wire::HelloMessage OlsrNode::generate_hello(double t, const std::optional<geo::GeoPosition>& gps)
{
    tick(t);
    wire::HelloMessage m;
    m.variant = variant();
    m.originator = address_;
    m.seq = hello_seq_++;
    m.htime = wire::encode_vtime(params_.hello_interval);
    if (m.variant == wire::Variant::Modified) {
        if (!gps) {
            throw lq::ProtocolError("P-OLSR Hello needs a GPS position");
        }
        m.position = gps;
    }
    m.neighbors = link_blocks(false);
    return m;
}

wire::TcMessage OlsrNode::generate_tc(double t)
{
    tick(t);
    wire::TcMessage m;
    m.variant = variant();
    m.originator = address_;
    m.seq = tc_seq_++;
    m.advertised = link_blocks(true);
    std::set<Address> set;
    for (const auto& b : m.advertised) {
        set.insert(b.addr);
    }
    if (advertised_ && *advertised_ != set) {
        ++ansn_;
    }
    advertised_ = std::move(set);
    m.ansn = ansn_;
    return m;
}

void OlsrNode::receive_hello(const wire::HelloMessage& hello,
                             const std::optional<geo::GeoPosition>& my_gps, double t)
{
    if (hello.originator == address_) {
        return;
    }
    auto it = links_.find(hello.originator);
    if (it == links_.end() || it->second.expired(t)) {
        lq::LinkState fresh;
        fresh.neighbor = hello.originator;
        it = links_.insert_or_assign(hello.originator, fresh).first;
    }
    it->second = lq::on_hello(std::move(it->second), hello, address_, my_gps, t, params_, protocol_,
                              timing_.neighbor_hold);
    mark_dirty();
}

bool OlsrNode::receive_tc(const wire::TcMessage& tc, double t)
{
    if (tc.originator == address_ || !duplicates_.should_forward(tc, t)) {
        return false;
    }
    if (topology_.absorb(tc, t, timing_.tc_validity)) {
        mark_dirty();
    }
    return true;
}

void OlsrNode::tick(double t)
{
    for (auto it = links_.begin(); it != links_.end();) {
        if (it->second.expired(t)) {
            it = links_.erase(it);
            mark_dirty();
            continue;
        }
        const int before = it->second.injected_misses;
        it->second = lq::on_silence(std::move(it->second), t, params_);
        if (it->second.injected_misses != before) {
            mark_dirty();
        }
        ++it;
    }
    if (topology_.purge(t)) {
        mark_dirty();
    }
}

const RoutingTable& OlsrNode::routes(double t)
{
    recomputed_ = false;
    if (t >= valid_until_) {
        tick(t);
    }
    if (dirty_ || t >= valid_until_) {
        const auto ls = links();
        table_ = compute_routes(address_, ls, topology_, metric_params_, t);
        valid_until_ = topology_.next_expiry();
        for (const auto& l : ls) {
            if (!l.expired(t)) {
                valid_until_ = std::min(valid_until_, l.expires_at);
            }
        }
        dirty_ = false;
        recomputed_ = true;
    }
    return table_;
}

std::vector<lq::LinkState> OlsrNode::links() const
{
    std::vector<lq::LinkState> out;
    out.reserve(links_.size());
    for (const auto& [addr, l] : links_) {
        out.push_back(l);
    }
    return out;
}

const lq::LinkState* OlsrNode::link(Address neighbor) const
{
    auto it = links_.find(neighbor);
    return it == links_.end() ? nullptr : &it->second;
}

}  // namespace polsr::routing
