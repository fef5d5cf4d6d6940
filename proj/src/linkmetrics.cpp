#include "polsr/linkmetrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace polsr {

const char* to_string(Protocol p)
{
    return p == Protocol::Polsr ? "polsr" : "olsr";
}

Protocol protocol_from_string(const std::string& s)
{
    if (s == "olsr" || s == "OLSR") {
        return Protocol::Olsr;
    }
    if (s == "polsr" || s == "P-OLSR" || s == "p-olsr") {
        return Protocol::Polsr;
    }
    throw std::invalid_argument("unknown protocol '" + s + "' (expected olsr or polsr)");
}

}  // namespace polsr

namespace polsr::lq {

void LqParams::validate() const
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("alpha must lie in [0, 1]");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("beta must be non-negative");
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("gamma must lie in [0, 1]");
    }
    if (!(hello_interval > 0.0) || !std::isfinite(hello_interval)) {
        throw std::invalid_argument("hello_interval must be positive");
    }
}

LinkState update_ratio(LinkState s, bool received, const LqParams& p)
{
    const double h = received ? 1.0 : 0.0;
    s.rho_ema = p.alpha * h + (1.0 - p.alpha) * s.rho_ema;
    return s;
}

LinkState update_speed(LinkState s, double d_now, double t_now, const LqParams& p)
{
    if (s.last_hello_time) {
        const double dt = t_now - *s.last_hello_time;
        if (!(dt > 0.0)) {
            throw std::invalid_argument("speed sample timestamps must increase");
        }
        const double v = (d_now - *s.last_distance) / dt;
        s.v_ema = p.gamma * v + (1.0 - p.gamma) * s.v_ema;
    }
    s.last_distance = d_now;
    s.last_hello_time = t_now;
    return s;
}

double hop_etx(double phi, double rho, double v, double beta)
{
    const double q = phi * rho;
    if (!(q > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    if (beta == 0.0 || v == 0.0) {
        return 1.0 / q;
    }
    return std::exp(std::min(v * beta, kMaxSpeedExponent)) / q;
}

double route_etx(std::span<const double> hops)
{
    if (hops.empty()) {
        throw std::invalid_argument("route has no hops");
    }
    double total = 0.0;
    for (double h : hops) {
        if (!std::isfinite(h)) {
            return std::numeric_limits<double>::infinity();
        }
        total += h;
    }
    return total;
}

LinkState on_hello(LinkState s, const wire::HelloMessage& hello, Address self,
                   const std::optional<geo::GeoPosition>& my_pos, double t, const LqParams& p,
                   Protocol protocol, double hold)
{
    if (hello.originator != s.neighbor) {
        throw std::invalid_argument("Hello originator does not match the link");
    }
    if (protocol == Protocol::Polsr && (!hello.position || !my_pos)) {
        throw ProtocolError("P-OLSR requires positions on both ends of a Hello");
    }

    if (s.last_seq) {
        const auto gap = static_cast<std::uint16_t>(hello.seq - *s.last_seq);
        if (gap == 0 || gap >= 0x8000) {
            return s;  // duplicate or reordered
        }
        const int missed = std::max(0, static_cast<int>(gap) - 1 - s.injected_misses);
        for (int i = 0; i < missed; ++i) {
            s = update_ratio(std::move(s), false, p);
        }
    }
    s = update_ratio(std::move(s), true, p);
    s.last_seq = hello.seq;
    s.last_heard = t;
    s.injected_misses = 0;

    if (hello.variant == wire::Variant::Modified && hello.position && my_pos) {
        s = update_speed(std::move(s), geo::distance(*my_pos, *hello.position), t, p);
    }

    if (const auto* block = hello.find(self)) {
        s.phi_reported = wire::dequantize_ratio(block->lq);
        s.symmetric = true;
    }
    s.expires_at = t + hold;
    return s;
}

LinkState on_silence(LinkState s, double t, const LqParams& p)
{
    if (!s.last_heard) {
        return s;
    }
    const double silence = t - *s.last_heard;
    if (silence <= 1.5 * p.hello_interval) {
        return s;
    }
    const int due = static_cast<int>(std::floor((silence - 0.5 * p.hello_interval) / p.hello_interval));
    while (s.injected_misses < due) {
        s = update_ratio(std::move(s), false, p);
        ++s.injected_misses;
    }
    return s;
}

}  // namespace polsr::lq
