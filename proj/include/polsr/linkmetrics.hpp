#ifndef POLSR_LINKMETRICS_HPP
#define POLSR_LINKMETRICS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "polsr/geo.hpp"
#include "polsr/wire.hpp"

namespace polsr {

enum class Protocol { Olsr, Polsr };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

}  // namespace polsr

namespace polsr::lq {

using wire::Address;

/// Link-quality and speed-weighting parameters shared by every node.
struct LqParams {
    double alpha = 0.2;           // link-quality aging
    double beta = 0.0;            // speed weight, s/m
    double gamma = 0.04;          // speed aging
    double hello_interval = 0.5;  // seconds

    void validate() const;
};

/// What a node knows about one neighbor.
struct LinkState {
    Address neighbor = 0;
    double rho_ema = 0.0;       // own receive ratio of the neighbor's Hellos
    double phi_reported = 0.0;  // our forward ratio, as the neighbor reports it
    bool symmetric = false;     // the neighbor has named us in a Hello
    std::optional<std::uint16_t> last_seq;
    std::optional<double> last_heard;  // arrival time of the latest Hello
    int injected_misses = 0;           // silence misses since last_heard

    std::optional<double> last_distance;
    std::optional<double> last_hello_time;  // time of last_distance
    double v_ema = 0.0;

    double expires_at = 0.0;

    bool expired(double t) const { return t >= expires_at; }
};

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One EMA step of the receive ratio; h is 1 for a received Hello.
LinkState update_ratio(LinkState s, bool received, const LqParams& p);

/// Records a distance sample and smooths the instantaneous relative speed.
/// The first sample only stores (d, t).
LinkState update_speed(LinkState s, double d_now, double t_now, const LqParams& p);

/// Speed-weighted ETX of one hop. Returns +inf when phi * rho == 0.
double hop_etx(double phi, double rho, double v, double beta);

inline constexpr double kMaxSpeedExponent = 20.0;

/// Sum of hop metrics. Any non-finite hop makes the route non-finite.
double route_etx(std::span<const double> hops);

/// Full Hello reception: sequence-gap miss detection, one hit update,
/// speed sampling (P-OLSR), refreshed forward ratio, extended validity.
/// `hold` is the neighbor validity time (normally 3 * hello_interval).
LinkState on_hello(LinkState s, const wire::HelloMessage& hello, Address self,
                   const std::optional<geo::GeoPosition>& my_pos, double t, const LqParams& p,
                   Protocol protocol, double hold);

/// Injects one miss per elapsed Hello interval once the neighbor has been
/// silent for more than 1.5 intervals.
LinkState on_silence(LinkState s, double t, const LqParams& p);

}  // namespace polsr::lq

#endif  // POLSR_LINKMETRICS_HPP
