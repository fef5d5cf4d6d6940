#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polsr/rng.hpp"

using polsr::Rng;

TEST_CASE("substreams are deterministic and key-sensitive")
{
    auto a = Rng::substream(1, {2, 3, 4});
    auto b = Rng::substream(1, {2, 3, 4});
    auto c = Rng::substream(1, {2, 4, 3});
    auto d = Rng::substream(2, {2, 3, 4});
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    CHECK(x != d.next());
}

TEST_CASE("uniform stays in the unit interval")
{
    Rng r(5);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal moments")
{
    Rng r(9);
    double s = 0.0;
    double s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal(2.0, 3.0);
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.01));
    CHECK(std::sqrt(s2 / n - mean * mean) == doctest::Approx(3.0).epsilon(0.01));
}
