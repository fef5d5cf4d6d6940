#ifndef POLSR_ENGINE_HPP
#define POLSR_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "polsr/scenario.hpp"

namespace polsr::engine {

/// Every emitted datagram ends up in exactly one bucket.
struct Counters {
    std::uint64_t offered = 0;
    std::uint64_t delivered = 0;
    std::uint64_t lost_channel = 0;
    std::uint64_t lost_no_route = 0;
    std::uint64_t lost_late = 0;
    std::uint64_t lost_ttl = 0;

    std::uint64_t lost() const { return lost_channel + lost_no_route + lost_late + lost_ttl; }
    bool operator==(const Counters&) const = default;
};

struct RouteChange {
    double time = 0.0;
    int node = 0;
    int destination = 0;
    std::optional<int> old_next_hop;
    std::optional<int> new_next_hop;

    bool operator==(const RouteChange&) const = default;
};

struct RunResult {
    std::uint64_t seed = 0;
    std::vector<double> dlr_series;      // per emission second
    std::vector<double> goodput_series;  // delivered payload bits per second
    std::vector<double> mean_hops;       // hop count of delivered datagrams (0 if none)
    std::vector<double> distance;        // mean source-destination distance, m
    double outage_time = 0.0;
    double mean_goodput = 0.0;
    std::vector<RouteChange> route_changes;
    Counters counters;
    std::uint64_t hellos_sent = 0;
    std::uint64_t hello_bytes = 0;
    std::uint64_t tcs_sent = 0;  // originated and forwarded
    std::uint64_t tc_bytes = 0;

    bool operator==(const RunResult&) const = default;
};

inline constexpr int kMaxHops = 16;
inline constexpr double kOutageThreshold = 0.2;
inline constexpr int kUdpIpOverhead = 28;
inline constexpr int kOlsrHeaderBytes = 16;  // packet + message header

/// Node trajectories as flown in the run with this seed (random loiter
/// phases resolved), in scenario node order.
std::vector<mobility::Trajectory> realized_trajectories(const Scenario& sc, std::uint64_t seed);

/// Mobility-clock time of simulation time t.
inline double mobility_time(const Scenario& sc, double t) { return t - sc.warmup; }

/// Simulates the scenario with the given seed. Deterministic.
RunResult run(const Scenario& sc, std::uint64_t seed);

/// Seconds whose DLR is strictly above the threshold.
double outage_time(std::span<const double> dlr_series, double threshold = kOutageThreshold);

struct Goodput {
    std::vector<double> series;  // bits per bin
    double mean = 0.0;
};

/// Delivered payload bits per one-second bin and their mean.
Goodput goodput(std::span<const std::uint64_t> delivered_per_bin, int datagram_bytes);

struct CampaignResult {
    std::vector<RunResult> runs;
    double mean_outage = 0.0;
    double mean_goodput = 0.0;
};

/// Runs seeds base, base+1, ... base+repetitions-1, optionally on worker
/// threads. Results are ordered by seed.
CampaignResult run_campaign(const Scenario& sc, int repetitions, std::uint64_t base_seed,
                            int workers = 1);

/// Means over an arbitrary set of runs.
CampaignResult aggregate(std::vector<RunResult> runs);

void write_series_csv(std::ostream& os, const RunResult& r);
void write_route_changes_csv(std::ostream& os, const RunResult& r);

}  // namespace polsr::engine

#endif  // POLSR_ENGINE_HPP
