#ifndef POLSR_ANALYSIS_HPP
#define POLSR_ANALYSIS_HPP

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polsr/engine.hpp"
#include "polsr/linkmetrics.hpp"

namespace polsr::analysis {

struct Sample {
    double distance = 0.0;  // m
    double dlr = 0.0;
};

struct FitResult {
    double p1 = 0.0;
    double p2 = 0.0;
    double residual = 0.0;  // sum of squared errors
    int iterations = 0;
    bool converged = false;
    bool identifiable = true;  // false for degenerate data
};

/// Least-squares fit of loss(d) = 1 / (1 + exp(p1 - p2 d)) by
/// Levenberg-Marquardt, started at p1 = 8, p2 = 0.02.
FitResult fit_logistic(std::span<const Sample> points);

/// Cost after each accepted step of the last fit_logistic call on this thread.
const std::vector<double>& last_fit_costs();

struct DistanceBin {
    double center = 0.0;
    double mean_dlr = 0.0;
    std::size_t count = 0;
};

/// Left-closed bins [k w, (k+1) w) anchored at 0; empty bins are omitted.
std::vector<DistanceBin> bin_dlr_by_distance(std::span<const Sample> samples, double bin_width = 20.0);

/// (distance, dlr) pairs of a run, one per second.
std::vector<Sample> samples_of(const engine::RunResult& r);

struct SweepConfig {
    Protocol protocol = Protocol::Olsr;
    double hello_interval = 0.5;
    double alpha = 0.2;
    double beta = 0.0;
    double gamma = 0.0;
};

struct SweepRow {
    SweepConfig config;
    double mean_outage = 0.0;
    double mean_goodput = 0.0;
    int repetitions = 0;
    std::optional<double> outage_reduction;  // 1 - outage / matched OLSR outage
};

class MissingBaseline : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One row per campaign. Relative columns compare against the OLSR row with
/// the same HI and alpha; a P-OLSR row without one throws MissingBaseline.
std::vector<SweepRow> sweep_table(
    const std::vector<std::pair<SweepConfig, engine::CampaignResult>>& campaigns);

/// Reduction of `outage` relative to `baseline`; 0 when both are zero.
double outage_reduction(double outage, double baseline);

/// Oracle path choice between a direct hop and a single relay: per emission
/// second, 1 if the direct hop has the higher expected datagram delivery
/// over the scenario's channel (ties go to the direct hop), else 2.
std::vector<int> oracle_hops(const Scenario& sc, std::uint64_t seed, int relay);

struct SwitchEvent {
    std::size_t second = 0;  // first bin of the new topology
    int from_hops = 0;
    int to_hops = 0;
};

/// Changes of a per-second topology series that then persist for at least
/// `min_dwell` seconds.
std::vector<SwitchEvent> topology_switches(std::span<const int> hops, std::size_t min_dwell = 5);

/// Whether some bin within +-window seconds of `second` has DLR >= level.
bool peak_near(std::span<const double> dlr, std::size_t second, std::size_t window, double level);

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);
void write_bins_csv(std::ostream& os, std::span<const DistanceBin> bins);

}  // namespace polsr::analysis

#endif  // POLSR_ANALYSIS_HPP
