#include "polsr/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <thread>
#include <variant>

#include "polsr/channel.hpp"
#include "polsr/routing.hpp"
#include "polsr/rng.hpp"

namespace polsr::engine {

namespace {

using wire::Address;
using wire::Bytes;

// RNG substream purposes; keyed together with (seed, node, peer).
enum Purpose : std::uint64_t {
    kHelloRx = 1,
    kTcRx = 2,
    kDataRx = 3,
    kJitter = 4,
    kGps = 5,
    kPhase = 6,
};
constexpr int kLinkPurposes = 3;

struct Datagram {
    std::uint64_t index = 0;
    double emitted = 0.0;
    int hops = 0;
};

struct HelloTimer {
    int node;
};
struct TcTimer {
    int node;
};
struct Emit {
    std::uint64_t index;
};
struct HelloRx {
    int node;
    int from;
    std::shared_ptr<const Bytes> bytes;
};
struct TcRx {
    int node;
    Address origin;
    std::uint16_t seq;
    std::shared_ptr<const Bytes> bytes;
};
struct DataRx {
    int node;
    Datagram datagram;
};

struct Event {
    double t;
    std::uint64_t order;
    std::variant<HelloTimer, TcTimer, Emit, HelloRx, TcRx, DataRx> what;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const
    {
        return a.t != b.t ? a.t > b.t : a.order > b.order;
    }
};

struct GpsState {
    mobility::GpsErrorModel model;
    Rng rng;
    double last_t = 0.0;
    bool started = false;
    geo::GeoPosition reading;
};

class Simulation {
public:
    Simulation(const Scenario& sc, std::uint64_t seed) : sc_(sc), seed_(seed)
    {
        validate(sc_);
        const int n = static_cast<int>(sc_.nodes.size());
        routing::OlsrNode::Timing timing{sc_.effective_tc_interval(), sc_.tc_validity(),
                                         sc_.neighbor_hold()};
        trajectories_ = realized_trajectories(sc_, seed_);
        for (int i = 0; i < n; ++i) {
            const auto& spec = sc_.nodes[static_cast<std::size_t>(i)];
            nodes_.emplace_back(spec.address, sc_.protocol, sc_.params, timing);
            index_of_[spec.address] = i;
            ids_.push_back(spec.id);
            jitter_.push_back(Rng::substream(seed_, {static_cast<std::uint64_t>(spec.id), 0, kJitter}));
            gps_.push_back(GpsState{
                mobility::GpsErrorModel(sc_.gps.tau, sc_.gps.sigma_h, sc_.gps.sigma_v),
                Rng::substream(seed_, {static_cast<std::uint64_t>(spec.id), 0, kGps}), 0.0, false, {}});
            if (spec.id == sc_.traffic.source) {
                source_ = i;
            }
            if (spec.id == sc_.traffic.destination) {
                destination_ = i;
            }
        }
        link_rng_.resize(static_cast<std::size_t>(n * n * kLinkPurposes));
        prev_next_hop_.resize(static_cast<std::size_t>(n));

        const auto& tr = sc_.traffic;
        total_datagrams_ = static_cast<std::uint64_t>(std::llround(tr.datagrams_per_second * sc_.duration));
        bins_ = static_cast<std::size_t>(std::ceil(sc_.duration - 1e-9));
        offered_.assign(bins_, 0);
        delivered_.assign(bins_, 0);
        hops_.assign(bins_, 0);
        dist_.assign(bins_, 0.0);
        end_time_ = sc_.warmup + sc_.duration + tr.delay_loss_threshold + 1.0;
    }

    RunResult run()
    {
        const double hi = sc_.params.hello_interval;
        const double tci = sc_.effective_tc_interval();
        for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
            auto& j = jitter_[static_cast<std::size_t>(i)];
            push(j.uniform(0.0, hi), HelloTimer{i});
            push(j.uniform(0.0, tci), TcTimer{i});
        }
        if (total_datagrams_ > 0) {
            push(emission_time(0), Emit{0});
        }

        while (!queue_.empty()) {
            std::pop_heap(queue_.begin(), queue_.end(), Later{});
            Event ev = std::move(queue_.back());
            queue_.pop_back();
            now_ = ev.t;
            std::visit([this](auto& e) { handle(e); }, ev.what);
        }
        return finish();
    }

private:
    template <typename E>
    void push(double t, E&& e)
    {
        queue_.push_back(Event{t, order_++, std::forward<E>(e)});
        std::push_heap(queue_.begin(), queue_.end(), Later{});
    }

    double emission_time(std::uint64_t i) const
    {
        return sc_.warmup + static_cast<double>(i) / sc_.traffic.datagrams_per_second;
    }

    double mobility_time(int node, double t) const
    {
        double tm = engine::mobility_time(sc_, t);
        if (auto span = trajectories_[static_cast<std::size_t>(node)].span()) {
            tm = std::clamp(tm, span->first, span->second);
        }
        return tm;
    }

    geo::GeoPosition true_position(int node, double t) const
    {
        return trajectories_[static_cast<std::size_t>(node)].position(mobility_time(node, t));
    }

    std::optional<geo::GeoPosition> gps_position(int node, double t)
    {
        if (sc_.protocol != Protocol::Polsr) {
            return std::nullopt;
        }
        const auto truth = true_position(node, t);
        if (!sc_.gps.enabled) {
            return truth;
        }
        auto& g = gps_[static_cast<std::size_t>(node)];
        if (!g.started || t > g.last_t) {
            g.reading = g.model.perturb(truth, g.started ? t - g.last_t : 1.0, g.rng);
            g.last_t = t;
            g.started = true;
        }
        return g.reading;
    }

    Rng& link_rng(int from, int to, Purpose purpose)
    {
        const auto n = nodes_.size();
        const auto slot = (static_cast<std::size_t>(from) * n + static_cast<std::size_t>(to)) * kLinkPurposes +
                          (purpose - 1);
        auto& r = link_rng_[slot];
        if (!r) {
            r = Rng::substream(seed_, {static_cast<std::uint64_t>(ids_[static_cast<std::size_t>(from)]),
                                       static_cast<std::uint64_t>(ids_[static_cast<std::size_t>(to)]), purpose});
        }
        return *r;
    }

    template <typename MakeEvent>
    void broadcast(int from, int frame_bytes, Purpose purpose, MakeEvent make)
    {
        const auto n = static_cast<int>(nodes_.size());
        const auto here = true_position(from, now_);
        for (int v = 0; v < n; ++v) {
            if (v == from) {
                continue;
            }
            const double d = geo::distance(here, true_position(v, now_));
            const auto out = channel::attempt_delivery(sc_.channel, d, frame_bytes,
                                                       link_rng(from, v, purpose), channel::Mode::Broadcast);
            if (out.delivered) {
                push(now_ + out.latency, make(v));
            }
        }
    }

    void handle(const HelloTimer& e)
    {
        auto& node = nodes_[static_cast<std::size_t>(e.node)];
        const auto msg = node.generate_hello(now_, gps_position(e.node, now_));
        auto bytes = std::make_shared<const Bytes>(wire::encode_hello(msg));
        ++hellos_sent_;
        hello_bytes_ += bytes->size();
        const int frame = static_cast<int>(bytes->size()) + kOlsrHeaderBytes + kUdpIpOverhead;
        broadcast(e.node, frame, kHelloRx, [&](int v) { return HelloRx{v, e.node, bytes}; });
        const double next = now_ + sc_.params.hello_interval *
                                       (1.0 + jitter_[static_cast<std::size_t>(e.node)].uniform(-0.05, 0.05));
        if (next < end_time_) {
            push(next, HelloTimer{e.node});
        }
    }

    void handle(const TcTimer& e)
    {
        auto& node = nodes_[static_cast<std::size_t>(e.node)];
        const auto msg = node.generate_tc(now_);
        auto bytes = std::make_shared<const Bytes>(wire::encode_tc(msg));
        flood(e.node, msg.originator, msg.seq, bytes);
        const double next = now_ + sc_.effective_tc_interval() *
                                       (1.0 + jitter_[static_cast<std::size_t>(e.node)].uniform(-0.05, 0.05));
        if (next < end_time_) {
            push(next, TcTimer{e.node});
        }
    }

    void flood(int from, Address origin, std::uint16_t seq, const std::shared_ptr<const Bytes>& bytes)
    {
        ++tcs_sent_;
        tc_bytes_ += bytes->size();
        const int frame = static_cast<int>(bytes->size()) + kOlsrHeaderBytes + kUdpIpOverhead;
        broadcast(from, frame, kTcRx, [&](int v) { return TcRx{v, origin, seq, bytes}; });
    }

    void handle(const HelloRx& e)
    {
        auto& node = nodes_[static_cast<std::size_t>(e.node)];
        const auto& sender = nodes_[static_cast<std::size_t>(e.from)];
        const auto msg = wire::decode_hello(*e.bytes, node.variant(), sender.address());
        node.receive_hello(msg, gps_position(e.node, now_), now_);
    }

    void handle(const TcRx& e)
    {
        auto& node = nodes_[static_cast<std::size_t>(e.node)];
        const auto msg = wire::decode_tc(*e.bytes, node.variant(), e.origin, e.seq);
        if (node.receive_tc(msg, now_)) {
            flood(e.node, e.origin, e.seq, e.bytes);
        }
    }

    std::size_t bin_of(std::uint64_t index) const
    {
        const auto b = static_cast<std::size_t>(
            std::floor(static_cast<double>(index) / sc_.traffic.datagrams_per_second + 1e-9));
        return std::min(b, bins_ - 1);
    }

    void handle(const Emit& e)
    {
        const auto bin = bin_of(e.index);
        ++offered_[bin];
        ++counters_.offered;
        dist_[bin] += geo::distance(true_position(source_, now_), true_position(destination_, now_));
        forward(source_, Datagram{e.index, now_, 0});
        if (e.index + 1 < total_datagrams_) {
            push(emission_time(e.index + 1), Emit{e.index + 1});
        }
    }

    void handle(const DataRx& e)
    {
        forward(e.node, e.datagram);
    }

    void log_route_change(int node, const routing::RoutingTable& table)
    {
        const auto dest_addr = nodes_[static_cast<std::size_t>(destination_)].address();
        std::optional<int> next;
        if (auto it = table.find(dest_addr); it != table.end()) {
            next = ids_[static_cast<std::size_t>(index_of_.at(it->second.next_hop))];
        }
        auto& prev = prev_next_hop_[static_cast<std::size_t>(node)];
        if (prev.has_value() && *prev == next) {
            return;
        }
        if (prev.has_value() || next.has_value()) {
            route_changes_.push_back(RouteChange{now_, ids_[static_cast<std::size_t>(node)],
                                                 sc_.traffic.destination,
                                                 prev.has_value() ? *prev : std::nullopt, next});
        }
        prev = next;
    }

    void forward(int at, Datagram d)
    {
        const auto bin = bin_of(d.index);
        if (at == destination_) {
            if (now_ - d.emitted > sc_.traffic.delay_loss_threshold) {
                ++counters_.lost_late;
            } else {
                ++counters_.delivered;
                ++delivered_[bin];
                hops_[bin] += static_cast<std::uint64_t>(d.hops);
            }
            return;
        }
        if (d.hops >= kMaxHops) {
            ++counters_.lost_ttl;
            return;
        }
        auto& node = nodes_[static_cast<std::size_t>(at)];
        const auto& table = node.routes(now_);
        if (node.table_recomputed()) {
            log_route_change(at, table);
        }
        const auto it = table.find(nodes_[static_cast<std::size_t>(destination_)].address());
        if (it == table.end()) {
            ++counters_.lost_no_route;
            return;
        }
        const int next = index_of_.at(it->second.next_hop);
        const double dist = geo::distance(true_position(at, now_), true_position(next, now_));
        const int frame = sc_.traffic.datagram_bytes + kUdpIpOverhead;
        const auto out = channel::attempt_delivery(sc_.channel, dist, frame, link_rng(at, next, kDataRx),
                                                   channel::Mode::Unicast);
        if (!out.delivered) {
            ++counters_.lost_channel;
            return;
        }
        push(now_ + out.latency, DataRx{next, Datagram{d.index, d.emitted, d.hops + 1}});
    }

    RunResult finish()
    {
        RunResult r;
        r.seed = seed_;
        r.counters = counters_;
        r.route_changes = std::move(route_changes_);
        r.hellos_sent = hellos_sent_;
        r.hello_bytes = hello_bytes_;
        r.tcs_sent = tcs_sent_;
        r.tc_bytes = tc_bytes_;
        for (std::size_t b = 0; b < bins_; ++b) {
            const double offered = static_cast<double>(offered_[b]);
            r.dlr_series.push_back(offered > 0 ? (offered - static_cast<double>(delivered_[b])) / offered : 0.0);
            r.mean_hops.push_back(delivered_[b] > 0 ? static_cast<double>(hops_[b]) / static_cast<double>(delivered_[b])
                                                    : 0.0);
            r.distance.push_back(offered > 0 ? dist_[b] / offered : 0.0);
        }
        const auto gp = goodput(delivered_, sc_.traffic.datagram_bytes);
        r.goodput_series = gp.series;
        r.mean_goodput = gp.mean;
        r.outage_time = outage_time(r.dlr_series);
        return r;
    }

    const Scenario& sc_;
    std::uint64_t seed_;
    std::vector<mobility::Trajectory> trajectories_;
    std::vector<routing::OlsrNode> nodes_;
    std::map<Address, int> index_of_;
    std::vector<int> ids_;
    std::vector<Rng> jitter_;
    std::vector<GpsState> gps_;
    std::vector<std::optional<Rng>> link_rng_;
    std::vector<std::optional<std::optional<int>>> prev_next_hop_;
    int source_ = 0;
    int destination_ = 0;

    std::vector<Event> queue_;
    std::uint64_t order_ = 0;
    double now_ = 0.0;
    double end_time_ = 0.0;

    std::uint64_t total_datagrams_ = 0;
    std::size_t bins_ = 0;
    std::vector<std::uint64_t> offered_;
    std::vector<std::uint64_t> delivered_;
    std::vector<std::uint64_t> hops_;
    std::vector<double> dist_;
    Counters counters_;
    std::vector<RouteChange> route_changes_;
    std::uint64_t hellos_sent_ = 0;
    std::uint64_t hello_bytes_ = 0;
    std::uint64_t tcs_sent_ = 0;
    std::uint64_t tc_bytes_ = 0;
};

}  // namespace

std::vector<mobility::Trajectory> realized_trajectories(const Scenario& sc, std::uint64_t seed)
{
    std::vector<mobility::Trajectory> out;
    for (const auto& spec : sc.nodes) {
        auto traj = spec.trajectory;
        if (spec.random_phase) {
            if (const auto* c = std::get_if<mobility::Circular>(&traj.spec())) {
                auto rng = Rng::substream(seed, {static_cast<std::uint64_t>(spec.id), 0, kPhase});
                auto circ = *c;
                circ.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                traj = mobility::Trajectory(circ);
            }
        }
        out.push_back(std::move(traj));
    }
    return out;
}

RunResult run(const Scenario& sc, std::uint64_t seed)
{
    return Simulation(sc, seed).run();
}

double outage_time(std::span<const double> dlr_series, double threshold)
{
    return static_cast<double>(
        std::count_if(dlr_series.begin(), dlr_series.end(), [threshold](double d) { return d > threshold; }));
}

Goodput goodput(std::span<const std::uint64_t> delivered_per_bin, int datagram_bytes)
{
    Goodput g;
    double sum = 0.0;
    for (auto n : delivered_per_bin) {
        const double bits = static_cast<double>(n) * datagram_bytes * 8.0;
        g.series.push_back(bits);
        sum += bits;
    }
    g.mean = g.series.empty() ? 0.0 : sum / static_cast<double>(g.series.size());
    return g;
}

CampaignResult aggregate(std::vector<RunResult> runs)
{
    CampaignResult c;
    c.runs = std::move(runs);
    if (c.runs.empty()) {
        return c;
    }
    for (const auto& r : c.runs) {
        c.mean_outage += r.outage_time;
        c.mean_goodput += r.mean_goodput;
    }
    c.mean_outage /= static_cast<double>(c.runs.size());
    c.mean_goodput /= static_cast<double>(c.runs.size());
    return c;
}

CampaignResult run_campaign(const Scenario& sc, int repetitions, std::uint64_t base_seed, int workers)
{
    if (repetitions < 1) {
        throw std::invalid_argument("repetitions must be at least 1");
    }
    validate(sc);
    std::vector<RunResult> runs(static_cast<std::size_t>(repetitions));
    workers = std::clamp(workers, 1, repetitions);
    if (workers == 1) {
        for (int i = 0; i < repetitions; ++i) {
            runs[static_cast<std::size_t>(i)] = run(sc, base_seed + static_cast<std::uint64_t>(i));
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int i = next++; i < repetitions; i = next++) {
                        runs[static_cast<std::size_t>(i)] = run(sc, base_seed + static_cast<std::uint64_t>(i));
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    return aggregate(std::move(runs));
}

void write_series_csv(std::ostream& os, const RunResult& r)
{
    os << "second,dlr,goodput_bits\n";
    for (std::size_t i = 0; i < r.dlr_series.size(); ++i) {
        os << i << ',' << r.dlr_series[i] << ',' << r.goodput_series[i] << '\n';
    }
}

void write_route_changes_csv(std::ostream& os, const RunResult& r)
{
    os << "time,node,destination,old_next_hop,new_next_hop\n";
    for (const auto& c : r.route_changes) {
        os << c.time << ',' << c.node << ',' << c.destination << ',';
        if (c.old_next_hop) {
            os << *c.old_next_hop;
        }
        os << ',';
        if (c.new_next_hop) {
            os << *c.new_next_hop;
        }
        os << '\n';
    }
}

}  // namespace polsr::engine
