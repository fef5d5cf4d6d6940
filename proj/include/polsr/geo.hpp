#ifndef POLSR_GEO_HPP
#define POLSR_GEO_HPP

namespace polsr::geo {

inline constexpr double kEarthRadius = 6371000.0;  // mean radius, meters

/// WGS-84 latitude/longitude in degrees, altitude in meters.
struct GeoPosition {
    double lat = 0.0;
    double lon = 0.0;
    double alt = 0.0;

    bool operator==(const GeoPosition&) const = default;
};

/// Planar east/north/up offsets in meters relative to some origin.
struct LocalPosition {
    double east = 0.0;
    double north = 0.0;
    double up = 0.0;

    bool operator==(const LocalPosition&) const = default;

    double norm() const;
    LocalPosition operator+(const LocalPosition& o) const { return {east + o.east, north + o.north, up + o.up}; }
    LocalPosition operator-(const LocalPosition& o) const { return {east - o.east, north - o.north, up - o.up}; }
    LocalPosition operator*(double k) const { return {east * k, north * k, up * k}; }
};

bool is_valid(const GeoPosition& p);

/// Throws std::invalid_argument if p violates the lat/lon/alt ranges.
void validate(const GeoPosition& p);

/// Equirectangular distance on a sphere, with altitude difference added
/// in quadrature. Symmetric; horizontal scale uses cos of mean latitude.
double distance(const GeoPosition& a, const GeoPosition& b);

/// Projects p onto the tangent plane at origin. Rejects points more than
/// kMaxLocalRange meters away.
LocalPosition to_local(const GeoPosition& origin, const GeoPosition& p);

/// Exact inverse of to_local.
GeoPosition from_local(const GeoPosition& origin, const LocalPosition& l);

inline constexpr double kMaxLocalRange = 50000.0;

}  // namespace polsr::geo

#endif  // POLSR_GEO_HPP
