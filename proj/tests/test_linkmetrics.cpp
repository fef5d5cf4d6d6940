#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "polsr/linkmetrics.hpp"
#include "polsr/rng.hpp"

using namespace polsr;
using namespace polsr::lq;

namespace {

wire::HelloMessage hello_from(wire::Address from, std::uint16_t seq)
{
    wire::HelloMessage h;
    h.originator = from;
    h.seq = seq;
    return h;
}

}  // namespace

TEST_CASE("ratio recurrence")
{
    LqParams p;
    LinkState s;
    s = update_ratio(s, true, p);
    CHECK(s.rho_ema == doctest::Approx(0.2));
    s = update_ratio(s, true, p);
    CHECK(s.rho_ema == doctest::Approx(0.36));

    double prev = 1.0;
    s.rho_ema = 1.0;
    for (int i = 0; i < 100; ++i) {
        s = update_ratio(s, false, p);
        CHECK(s.rho_ema <= prev);
        CHECK(s.rho_ema >= 0.0);
        prev = s.rho_ema;
    }
    CHECK(prev < 1e-9);
}

TEST_CASE("Bernoulli stream settles near its mean")
{
    // stationary spread of the recurrence: alpha / (2 - alpha) * p (1 - p)
    LqParams p;
    p.alpha = 0.05;
    const double sd = std::sqrt(p.alpha / (2.0 - p.alpha) * 0.8 * 0.2);
    const double within = std::erf(0.05 / (sd * std::sqrt(2.0)));
    const int seeds = 1000;
    int close = 0;
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        Rng rng(seed);
        LinkState s;
        for (int i = 0; i < 500; ++i) {
            s = update_ratio(s, rng.bernoulli(0.8), p);
        }
        close += std::abs(s.rho_ema - 0.8) <= 0.05;
        sum += s.rho_ema;
        sum2 += s.rho_ema * s.rho_ema;
    }
    const double mean = sum / seeds;
    CHECK(mean == doctest::Approx(0.8).epsilon(0.01));
    CHECK(std::sqrt(sum2 / seeds - mean * mean) == doctest::Approx(sd).epsilon(0.1));
    CHECK(static_cast<double>(close) / seeds == doctest::Approx(within).epsilon(0.08));
}

TEST_CASE("speed smoothing")
{
    LqParams p;
    p.gamma = 1.0;
    LinkState s;
    s = update_speed(s, 100.0, 0.0, p);
    CHECK(s.v_ema == 0.0);
    s = update_speed(s, 106.0, 0.5, p);
    CHECK(s.v_ema == doctest::Approx(12.0));

    p.gamma = 0.04;
    LinkState c;
    c = update_speed(c, 1000.0, 0.0, p);
    for (int k = 1; k <= 50; ++k) {
        c = update_speed(c, 1000.0 - 6.0 * k, 0.5 * k, p);
        CHECK(c.v_ema == doctest::Approx(-12.0 * (1.0 - std::pow(0.96, k))).epsilon(1e-12));
    }

    LinkState still;
    for (int k = 0; k < 20; ++k) {
        still = update_speed(still, 250.0, k * 0.5, p);
    }
    CHECK(still.v_ema == 0.0);
    CHECK_THROWS_AS(update_speed(still, 250.0, 9.5, p), std::invalid_argument);
}

TEST_CASE("hop metric values")
{
    CHECK(hop_etx(1.0, 1.0, 0.0, 0.2) == 1.0);
    CHECK(hop_etx(0.5, 0.5, 0.0, 0.2) == 4.0);
    CHECK(hop_etx(1.0, 1.0, 5.0, 0.2) == doctest::Approx(std::exp(1.0)));
    CHECK(std::isinf(hop_etx(0.0, 1.0, 0.0, 0.0)));
    CHECK(std::isinf(hop_etx(0.7, 0.0, 3.0, 0.2)));
    CHECK(hop_etx(1.0, 1.0, 1e6, 1.0) == doctest::Approx(std::exp(kMaxSpeedExponent)));
}

TEST_CASE("hop metric monotonicity over a grid")
{
    std::vector<double> ratios;
    std::vector<double> speeds;
    for (int i = 1; i <= 10; ++i) {
        ratios.push_back(i / 10.0);
        speeds.push_back(-15.0 + 3.0 * i);
    }
    for (double v : speeds) {
        for (double phi : ratios) {
            for (double rho : ratios) {
                const double m = hop_etx(phi, rho, v, 0.2);
                if (phi < 1.0) {
                    CHECK(hop_etx(phi + 0.1, rho, v, 0.2) < m);
                }
                if (rho < 1.0) {
                    CHECK(hop_etx(phi, rho + 0.1, v, 0.2) < m);
                }
                CHECK(hop_etx(phi, rho, v + 3.0, 0.2) > m);
                CHECK(hop_etx(phi, rho, v, 0.0) == 1.0 / (phi * rho));
            }
        }
    }
}

TEST_CASE("route metric")
{
    const std::vector<double> three{1.0, 1.0, 1.0};
    CHECK(route_etx(three) == 3.0);
    const std::vector<double> one{2.5};
    CHECK(route_etx(one) == 2.5);
    const std::vector<double> two{1.2, 2.5};
    CHECK(route_etx(two) == doctest::Approx(3.7));
    const std::vector<double> broken{1.0, INFINITY};
    CHECK(std::isinf(route_etx(broken)));
    CHECK_THROWS_AS(route_etx({}), std::invalid_argument);

    Rng rng(1);
    for (int n = 1; n <= 20; ++n) {
        std::vector<double> hops;
        for (int i = 0; i < n; ++i) {
            hops.push_back(hop_etx(1.0, 1.0, rng.uniform(-10, 10), 0.0));
        }
        CHECK(route_etx(hops) == static_cast<double>(n));
    }
}

TEST_CASE("Hello reception")
{
    LqParams p;
    const double hold = 1.5;
    LinkState s;
    s.neighbor = 9;
    s = on_hello(s, hello_from(9, 100), 1, {}, 0.0, p, Protocol::Olsr, hold);
    CHECK(s.rho_ema == doctest::Approx(0.2));
    CHECK(s.v_ema == 0.0);
    CHECK(s.phi_reported == 0.0);
    CHECK_FALSE(s.symmetric);
    CHECK(s.expires_at == 1.5);

    s.rho_ema = 1.0;
    s = on_hello(s, hello_from(9, 103), 1, {}, 1.5, p, Protocol::Olsr, hold);
    CHECK(s.rho_ema == doctest::Approx(0.712));

    auto named = hello_from(9, 104);
    named.neighbors.push_back({1, 128, 0, 0.0});
    s = on_hello(s, named, 1, {}, 2.0, p, Protocol::Olsr, hold);
    CHECK(s.phi_reported == doctest::Approx(128.0 / 255.0));
    CHECK(s.symmetric);
    const double phi = s.phi_reported;
    s = on_hello(s, hello_from(9, 105), 1, {}, 2.5, p, Protocol::Olsr, hold);
    CHECK(s.phi_reported == phi);

    const auto dup = on_hello(s, hello_from(9, 105), 1, {}, 2.6, p, Protocol::Olsr, hold);
    CHECK(dup.rho_ema == s.rho_ema);

    CHECK_THROWS_AS(on_hello(s, hello_from(9, 106), 1, {}, 3.0, p, Protocol::Polsr, hold), ProtocolError);
    CHECK_THROWS_AS(on_hello(s, hello_from(8, 106), 1, {}, 3.0, p, Protocol::Olsr, hold), std::invalid_argument);
}

TEST_CASE("sequence gap across wraparound")
{
    LqParams p;
    LinkState s;
    s.neighbor = 2;
    s = on_hello(s, hello_from(2, 65534), 1, {}, 0.0, p, Protocol::Olsr, 1.5);
    s.rho_ema = 1.0;
    s = on_hello(s, hello_from(2, 1), 1, {}, 1.5, p, Protocol::Olsr, 1.5);
    CHECK(s.rho_ema == doctest::Approx(0.712));
}

TEST_CASE("silence injects misses that the next Hello does not repeat")
{
    LqParams p;
    LinkState s;
    s.neighbor = 2;
    s = on_hello(s, hello_from(2, 10), 1, {}, 0.0, p, Protocol::Olsr, 1.5);
    s.rho_ema = 1.0;
    CHECK(on_silence(s, 0.75, p).rho_ema == 1.0);
    s = on_silence(s, 0.8, p);
    CHECK(s.rho_ema == doctest::Approx(0.8));
    s = on_silence(s, 1.3, p);
    CHECK(s.rho_ema == doctest::Approx(0.64));
    CHECK(s.injected_misses == 2);
    s = on_hello(s, hello_from(2, 13), 1, {}, 1.5, p, Protocol::Olsr, 1.5);
    CHECK(s.rho_ema == doctest::Approx(0.712));
    CHECK(s.injected_misses == 0);
}

TEST_CASE("position-bearing Hello feeds the speed estimate")
{
    LqParams p;
    p.gamma = 1.0;
    const geo::GeoPosition me{46.5, 6.5, 75.0};
    LinkState s;
    s.neighbor = 2;
    auto h = hello_from(2, 1);
    h.variant = wire::Variant::Modified;
    h.position = geo::GeoPosition{46.5, 6.5, 175.0};
    s = on_hello(s, h, 1, me, 0.0, p, Protocol::Polsr, 1.5);
    CHECK(s.v_ema == 0.0);
    h.seq = 2;
    h.position->alt = 181.0;
    s = on_hello(s, h, 1, me, 0.5, p, Protocol::Polsr, 1.5);
    CHECK(s.v_ema == doctest::Approx(12.0));
}

TEST_CASE("parameter validation")
{
    LqParams p;
    CHECK_NOTHROW(p.validate());
    p.alpha = 1.5;
    CHECK_THROWS(p.validate());
    p = {};
    p.beta = -1.0;
    CHECK_THROWS(p.validate());
    p = {};
    p.hello_interval = 0.0;
    CHECK_THROWS(p.validate());
    CHECK(protocol_from_string("P-OLSR") == Protocol::Polsr);
    CHECK_THROWS(protocol_from_string("aodv"));
}
