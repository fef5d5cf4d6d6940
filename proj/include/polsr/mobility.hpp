#ifndef POLSR_MOBILITY_HPP
#define POLSR_MOBILITY_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polsr/geo.hpp"
#include "polsr/rng.hpp"

namespace polsr::mobility {

using geo::GeoPosition;
using geo::LocalPosition;

struct Fixed {
    GeoPosition position;
};

/// Counter-clockwise loiter; phase 0 puts the aircraft due east of center.
struct Circular {
    GeoPosition center;  // altitude of the orbit
    double radius = 30.0;
    double speed = 12.0;
    double phase = 0.0;  // radians
};

/// Constant-speed out-and-back along a bearing, instantaneous turnaround.
struct Shuttle {
    GeoPosition start;
    double bearing_deg = 270.0;  // clockwise from north
    double leg = 600.0;
    double speed = 12.0;
};

/// Boustrophedon sweep of a width (east) x height (north) rectangle whose
/// south-west corner is `corner`. Lanes run east-west. After the last lane
/// the path is retraced backwards.
struct LawnmowerScan {
    GeoPosition corner;
    double width = 1000.0;
    double height = 560.0;
    int lanes = 4;
    double speed = 12.0;
};

/// Piecewise-linear replay of logged samples.
struct LogReplay {
    GeoPosition origin;
    std::vector<double> times;
    std::vector<LocalPosition> points;
};

enum class Kind { Fixed, Circular, Shuttle, LawnmowerScan, LogReplay };

class Trajectory {
public:
    using Spec = std::variant<Fixed, Circular, Shuttle, LawnmowerScan, LogReplay>;

    Trajectory() : spec_(Fixed{}) {}
    Trajectory(Spec spec);  // validates

    Kind kind() const { return static_cast<Kind>(spec_.index()); }
    const Spec& spec() const { return spec_; }

    /// Position at time t. Periodic kinds accept any t; the scan holds its
    /// start before t = 0; LogReplay throws outside the logged span.
    GeoPosition position(double t) const;

    /// Period for Circular/Shuttle (seconds), full path time for the scan.
    std::optional<double> period() const;

    /// [first, last] sample time for LogReplay.
    std::optional<std::pair<double, double>> span() const;

private:
    Spec spec_;
};

const char* to_string(Kind k);

/// Total path length of a scan.
double scan_length(const LawnmowerScan& s);

/// Reads `t,node,lat,lon,alt` CSV. With no node given the file must hold a
/// single node.
Trajectory load_position_log(const std::filesystem::path& path, std::optional<int> node = {});

/// First-order Gauss-Markov GPS error, independent per local axis.
class GpsErrorModel {
public:
    GpsErrorModel(double tau = 30.0, double sigma_h = 3.0, double sigma_v = 5.0, bool clamp = false);

    /// Advances the error by dt and returns the perturbed position. The first
    /// call draws the error from its stationary distribution.
    GeoPosition perturb(const GeoPosition& true_pos, double dt, Rng& rng);

    const LocalPosition& error() const { return error_; }
    double tau() const { return tau_; }
    double sigma_h() const { return sigma_h_; }
    double sigma_v() const { return sigma_v_; }

private:
    double step(double e, double sigma, double decay, double innovation, Rng& rng) const;

    double tau_;
    double sigma_h_;
    double sigma_v_;
    bool clamp_;
    bool started_ = false;
    LocalPosition error_;
};

}  // namespace polsr::mobility

#endif  // POLSR_MOBILITY_HPP
