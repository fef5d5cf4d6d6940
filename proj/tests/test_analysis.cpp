#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "polsr/analysis.hpp"
#include "polsr/rng.hpp"

using namespace polsr;
using namespace polsr::analysis;

namespace {

double loss(double p1, double p2, double d)
{
    return 1.0 / (1.0 + std::exp(p1 - p2 * d));
}

engine::CampaignResult campaign(double outage, double goodput)
{
    engine::CampaignResult c;
    c.mean_outage = outage;
    c.mean_goodput = goodput;
    c.runs.resize(10);
    return c;
}

}  // namespace

TEST_CASE("fit recovers noiseless parameters")
{
    std::vector<Sample> pts;
    for (double d = 0.0; d <= 600.0; d += 5.0) {
        pts.push_back({d, loss(8.9, 0.025, d)});
    }
    const auto f = fit_logistic(pts);
    CHECK(f.converged);
    CHECK(f.identifiable);
    CHECK(f.p1 == doctest::Approx(8.9).epsilon(1e-6));
    CHECK(f.p2 == doctest::Approx(0.025).epsilon(1e-6));
    CHECK(f.residual < 1e-12);
    const auto& costs = last_fit_costs();
    for (std::size_t i = 1; i < costs.size(); ++i) {
        CHECK(costs[i] <= costs[i - 1]);
    }
}

TEST_CASE("fit recovers parameters from binomial samples")
{
    int good = 0;
    const int seeds = 100;
    for (int seed = 0; seed < seeds; ++seed) {
        Rng rng(static_cast<std::uint64_t>(seed));
        std::vector<Sample> pts;
        for (int i = 0; i < 750; ++i) {
            const double d = rng.uniform(0.0, 600.0);
            int lost = 0;
            for (int k = 0; k < 85; ++k) {
                lost += rng.bernoulli(loss(8.9, 0.025, d));
            }
            pts.push_back({d, lost / 85.0});
        }
        const auto f = fit_logistic(pts);
        good += f.converged && std::abs(f.p1 - 8.9) <= 0.5 && std::abs(f.p2 - 0.025) <= 0.003;
        const auto& costs = last_fit_costs();
        for (std::size_t i = 1; i < costs.size(); ++i) {
            CHECK(costs[i] <= costs[i - 1]);
        }
    }
    CHECK(good >= 0.9 * seeds);
}

TEST_CASE("degenerate data is flagged")
{
    const std::vector<Sample> one_distance(20, Sample{100.0, 0.3});
    CHECK_FALSE(fit_logistic(one_distance).identifiable);
    std::vector<Sample> flat;
    for (double d = 0; d < 300; d += 10) {
        flat.push_back({d, 0.0});
    }
    const auto f = fit_logistic(flat);
    CHECK_FALSE(f.identifiable);
    CHECK_FALSE(f.converged);
    const std::vector<Sample> bad{{0.0, 1.5}, {10.0, 0.1}};
    CHECK_THROWS_AS(fit_logistic(bad), std::invalid_argument);
}

TEST_CASE("distance binning")
{
    const std::vector<Sample> s{{0.0, 0.0}, {19.9, 0.2}, {20.0, 1.0}, {65.0, 0.5}};
    const auto bins = bin_dlr_by_distance(s, 20.0);
    REQUIRE(bins.size() == 3);
    CHECK(bins[0].center == 10.0);
    CHECK(bins[0].mean_dlr == doctest::Approx(0.1));
    CHECK(bins[0].count == 2);
    CHECK(bins[1].center == 30.0);
    CHECK(bins[2].center == 70.0);
    CHECK_THROWS(bin_dlr_by_distance(s, 0.0));

    Rng rng(3);
    std::vector<Sample> many;
    double total = 0.0;
    for (int i = 0; i < 1000; ++i) {
        many.push_back({rng.uniform(0, 700), rng.uniform()});
        total += many.back().dlr;
    }
    std::size_t n = 0;
    double weighted = 0.0;
    for (const auto& b : bin_dlr_by_distance(many, 25.0)) {
        n += b.count;
        weighted += b.mean_dlr * static_cast<double>(b.count);
    }
    CHECK(n == many.size());
    CHECK(weighted == doctest::Approx(total));
}

TEST_CASE("sweep table")
{
    CHECK(outage_reduction(1.0, 20.0) == doctest::Approx(0.95));
    CHECK(outage_reduction(0.0, 0.0) == 0.0);
    CHECK(outage_reduction(20.0, 20.0) == 0.0);

    const SweepConfig olsr{Protocol::Olsr, 0.5, 0.2, 0.0, 0.08};
    const SweepConfig polsr{Protocol::Polsr, 0.5, 0.2, 0.2, 0.08};
    const auto rows = sweep_table({{olsr, campaign(20.0, 8e5)}, {polsr, campaign(1.0, 9e5)}});
    REQUIRE(rows.size() == 2);
    CHECK(*rows[0].outage_reduction == 0.0);
    CHECK(*rows[1].outage_reduction == doctest::Approx(0.95));
    CHECK(rows[1].repetitions == 10);

    const SweepConfig orphan{Protocol::Polsr, 2.0, 0.2, 0.2, 0.08};
    CHECK_THROWS_AS(sweep_table({{olsr, campaign(20.0, 8e5)}, {orphan, campaign(1.0, 9e5)}}), MissingBaseline);

    const auto single = sweep_table({{olsr, campaign(3.0, 1.0)}});
    CHECK(single.size() == 1);
    std::ostringstream os;
    write_sweep_csv(os, single);
    CHECK(os.str().find("repetitions") != std::string::npos);
}

TEST_CASE("topology switches and peaks")
{
    const std::vector<int> hops{1, 1, 1, 2, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1};
    const auto ev = topology_switches(hops, 5);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].second == 10);
    CHECK(ev[0].from_hops == 1);
    CHECK(ev[0].to_hops == 2);
    CHECK(ev[1].second == 16);
    CHECK(ev[1].to_hops == 1);

    std::vector<double> dlr(40, 0.0);
    dlr[25] = 0.6;
    CHECK(peak_near(dlr, 20, 10, 0.5));
    CHECK_FALSE(peak_near(dlr, 10, 10, 0.5));
    CHECK(peak_near(dlr, 35, 10, 0.5));
    CHECK_FALSE(peak_near(dlr, 20, 10, 0.7));
    CHECK(peak_near(dlr, 2, 30, 0.5));
}
