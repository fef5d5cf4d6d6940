#include "polsr/geo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace polsr::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

double LocalPosition::norm() const
{
    return std::sqrt(east * east + north * north + up * up);
}

bool is_valid(const GeoPosition& p)
{
    return std::isfinite(p.lat) && std::isfinite(p.lon) && std::isfinite(p.alt) &&
           p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0 &&
           p.alt >= -32768.0 && p.alt <= 32767.0;
}

void validate(const GeoPosition& p)
{
    if (!is_valid(p)) {
        throw std::invalid_argument("invalid position (lat=" + std::to_string(p.lat) +
                                    ", lon=" + std::to_string(p.lon) +
                                    ", alt=" + std::to_string(p.alt) + ")");
    }
}

double distance(const GeoPosition& a, const GeoPosition& b)
{
    const double mean_lat = 0.5 * (a.lat + b.lat) * kDegToRad;
    const double dnorth = (b.lat - a.lat) * kDegToRad * kEarthRadius;
    const double deast = (b.lon - a.lon) * kDegToRad * kEarthRadius * std::cos(mean_lat);
    const double dup = b.alt - a.alt;
    return std::sqrt(dnorth * dnorth + deast * deast + dup * dup);
}

LocalPosition to_local(const GeoPosition& origin, const GeoPosition& p)
{
    const double cos_lat = std::cos(origin.lat * kDegToRad);
    LocalPosition l{(p.lon - origin.lon) * kDegToRad * kEarthRadius * cos_lat,
                    (p.lat - origin.lat) * kDegToRad * kEarthRadius,
                    p.alt - origin.alt};
    if (std::hypot(l.east, l.north) > kMaxLocalRange) {
        throw std::out_of_range("position is more than 50 km from the projection origin");
    }
    return l;
}

GeoPosition from_local(const GeoPosition& origin, const LocalPosition& l)
{
    const double cos_lat = std::cos(origin.lat * kDegToRad);
    return {origin.lat + l.north / kEarthRadius / kDegToRad,
            origin.lon + l.east / (kEarthRadius * cos_lat) / kDegToRad,
            origin.alt + l.up};
}

}  // namespace polsr::geo
