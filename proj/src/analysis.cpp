#include "polsr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "polsr/channel.hpp"
#include "polsr/geo.hpp"

namespace polsr::analysis {

namespace {

thread_local std::vector<double> fit_costs;

double model(double p1, double p2, double d)
{
    return 1.0 / (1.0 + std::exp(p1 - p2 * d));
}

double cost(std::span<const Sample> pts, double p1, double p2)
{
    double c = 0.0;
    for (const auto& s : pts) {
        const double r = model(p1, p2, s.distance) - s.dlr;
        c += r * r;
    }
    return c;
}

}  // namespace

const std::vector<double>& last_fit_costs()
{
    return fit_costs;
}

FitResult fit_logistic(std::span<const Sample> points)
{
    constexpr int kMaxIterations = 200;
    constexpr double kRelTol = 1e-9;

    fit_costs.clear();
    FitResult out;
    out.p1 = 8.0;
    out.p2 = 0.02;

    bool distinct = false;
    for (const auto& s : points) {
        if (!(s.dlr >= 0.0 && s.dlr <= 1.0) || !std::isfinite(s.distance)) {
            throw std::invalid_argument("fit samples need finite distance and dlr in [0,1]");
        }
        distinct = distinct || s.distance != points.front().distance;
    }
    if (points.size() < 2 || !distinct) {
        out.identifiable = false;
        out.residual = points.empty() ? 0.0 : cost(points, out.p1, out.p2);
        return out;
    }

    double lambda = 1e-3;
    double c = cost(points, out.p1, out.p2);
    fit_costs.push_back(c);
    for (int it = 1; it <= kMaxIterations; ++it) {
        out.iterations = it;
        // Normal equations J^T J and J^T r for the two parameters.
        double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
        for (const auto& s : points) {
            const double f = model(out.p1, out.p2, s.distance);
            const double df = f * (1.0 - f);
            const double j1 = -df;
            const double j2 = df * s.distance;
            const double r = f - s.dlr;
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            g1 += j1 * r;
            g2 += j2 * r;
        }
        bool accepted = false;
        double next_cost = c;
        while (lambda < 1e12) {
            const double b11 = a11 * (1.0 + lambda);
            const double b22 = a22 * (1.0 + lambda);
            const double det = b11 * b22 - a12 * a12;
            if (det > 0.0 && std::isfinite(det)) {
                const double s1 = -(b22 * g1 - a12 * g2) / det;
                const double s2 = -(b11 * g2 - a12 * g1) / det;
                const double trial = cost(points, out.p1 + s1, out.p2 + s2);
                if (trial <= c) {
                    out.p1 += s1;
                    out.p2 += s2;
                    next_cost = trial;
                    accepted = true;
                    lambda = std::max(lambda / 10.0, 1e-12);
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            out.converged = true;
            break;
        }
        fit_costs.push_back(next_cost);
        const double change = c - next_cost;
        c = next_cost;
        if (change <= kRelTol * std::max(c, std::numeric_limits<double>::min()) || c == 0.0) {
            out.converged = true;
            break;
        }
    }
    out.residual = c;

    // A curve that never rises within the data cannot pin down p1.
    const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                              [](const Sample& a, const Sample& b) { return a.distance < b.distance; });
    const bool flat = std::all_of(points.begin(), points.end(), [&](const Sample& s) { return s.dlr == points.front().dlr; });
    if (flat || model(out.p1, out.p2, hi->distance) - model(out.p1, out.p2, lo->distance) < 1e-6) {
        out.identifiable = false;
        out.converged = false;
    }
    return out;
}

std::vector<DistanceBin> bin_dlr_by_distance(std::span<const Sample> samples, double bin_width)
{
    if (!(bin_width > 0.0)) {
        throw std::invalid_argument("bin width must be positive");
    }
    std::map<long long, std::pair<double, std::size_t>> acc;
    for (const auto& s : samples) {
        auto& a = acc[static_cast<long long>(std::floor(s.distance / bin_width))];
        a.first += s.dlr;
        ++a.second;
    }
    std::vector<DistanceBin> out;
    for (const auto& [k, a] : acc) {
        out.push_back({(static_cast<double>(k) + 0.5) * bin_width, a.first / static_cast<double>(a.second), a.second});
    }
    return out;
}

std::vector<Sample> samples_of(const engine::RunResult& r)
{
    std::vector<Sample> out;
    out.reserve(r.dlr_series.size());
    for (std::size_t i = 0; i < r.dlr_series.size(); ++i) {
        out.push_back({r.distance[i], r.dlr_series[i]});
    }
    return out;
}

double outage_reduction(double outage, double baseline)
{
    if (baseline == 0.0) {
        return outage == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    return 1.0 - outage / baseline;
}

std::vector<SweepRow> sweep_table(
    const std::vector<std::pair<SweepConfig, engine::CampaignResult>>& campaigns)
{
    std::map<std::pair<double, double>, double> baselines;
    for (const auto& [cfg, res] : campaigns) {
        if (cfg.protocol == Protocol::Olsr) {
            baselines.emplace(std::pair{cfg.hello_interval, cfg.alpha}, res.mean_outage);
        }
    }
    std::vector<SweepRow> rows;
    for (const auto& [cfg, res] : campaigns) {
        SweepRow row{cfg, res.mean_outage, res.mean_goodput, static_cast<int>(res.runs.size()), std::nullopt};
        if (cfg.protocol == Protocol::Polsr) {
            auto it = baselines.find({cfg.hello_interval, cfg.alpha});
            if (it == baselines.end()) {
                throw MissingBaseline("no OLSR campaign with HI=" + std::to_string(cfg.hello_interval) +
                                      " alpha=" + std::to_string(cfg.alpha));
            }
            row.outage_reduction = outage_reduction(res.mean_outage, it->second);
        } else {
            row.outage_reduction = 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<int> oracle_hops(const Scenario& sc, std::uint64_t seed, int relay)
{
    const auto trajectories = engine::realized_trajectories(sc, seed);
    const auto at = [&](int id, double t) {
        for (std::size_t i = 0; i < sc.nodes.size(); ++i) {
            if (sc.nodes[i].id == id) {
                return trajectories[i].position(t);
            }
        }
        throw std::out_of_range("no node with id " + std::to_string(id));
    };
    const int frame = sc.traffic.datagram_bytes + engine::kUdpIpOverhead;
    const auto deliver = [&](const geo::GeoPosition& a, const geo::GeoPosition& b) {
        return 1.0 - channel::frame_loss_prob(sc.channel, geo::distance(a, b), 0.0, frame);
    };
    const auto bins = static_cast<std::size_t>(std::ceil(sc.duration - 1e-9));
    std::vector<int> out;
    out.reserve(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        const double t = static_cast<double>(i) + 0.5;
        const auto s = at(sc.traffic.source, t);
        const auto d = at(sc.traffic.destination, t);
        const auto r = at(relay, t);
        out.push_back(deliver(s, d) >= deliver(s, r) * deliver(r, d) ? 1 : 2);
    }
    return out;
}

std::vector<SwitchEvent> topology_switches(std::span<const int> hops, std::size_t min_dwell)
{
    std::vector<SwitchEvent> out;
    if (hops.empty()) {
        return out;
    }
    int current = hops[0];
    std::size_t i = 1;
    while (i < hops.size()) {
        if (hops[i] == current) {
            ++i;
            continue;
        }
        std::size_t run = i;
        while (run < hops.size() && hops[run] == hops[i]) {
            ++run;
        }
        if (run - i >= min_dwell) {
            out.push_back({i, current, hops[i]});
            current = hops[i];
        }
        i = run;
    }
    return out;
}

bool peak_near(std::span<const double> dlr, std::size_t second, std::size_t window, double level)
{
    const std::size_t lo = second >= window ? second - window : 0;
    const std::size_t hi = std::min(dlr.size(), second + window + 1);
    for (std::size_t i = lo; i < hi; ++i) {
        if (dlr[i] >= level) {
            return true;
        }
    }
    return false;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows)
{
    os << "protocol,hello_interval,alpha,beta,gamma,repetitions,mean_outage_s,mean_goodput_bps,outage_reduction\n";
    for (const auto& r : rows) {
        os << to_string(r.config.protocol) << ',' << r.config.hello_interval << ',' << r.config.alpha << ','
           << r.config.beta << ',' << r.config.gamma << ',' << r.repetitions << ',' << r.mean_outage << ','
           << r.mean_goodput << ',';
        if (r.outage_reduction) {
            os << *r.outage_reduction;
        }
        os << '\n';
    }
}

void write_bins_csv(std::ostream& os, std::span<const DistanceBin> bins)
{
    os << "distance_m,mean_dlr,count\n";
    for (const auto& b : bins) {
        os << b.center << ',' << b.mean_dlr << ',' << b.count << '\n';
    }
}

}  // namespace polsr::analysis
