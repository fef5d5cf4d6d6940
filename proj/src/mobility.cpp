#include "polsr/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace polsr::mobility {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Validator {
    void operator()(const Fixed& f) const { geo::validate(f.position); }
    void operator()(const Circular& c) const
    {
        geo::validate(c.center);
        if (!(c.radius >= 30.0)) {
            throw std::invalid_argument("circular radius must be at least 30 m");
        }
        if (!(c.speed > 0.0 && c.speed <= 20.0)) {
            throw std::invalid_argument("circular speed must lie in (0, 20] m/s");
        }
        if (!std::isfinite(c.phase)) {
            throw std::invalid_argument("circular phase must be finite");
        }
    }
    void operator()(const Shuttle& s) const
    {
        geo::validate(s.start);
        if (!(s.leg > 0.0) || !(s.speed > 0.0) || !std::isfinite(s.bearing_deg)) {
            throw std::invalid_argument("shuttle needs positive leg and speed");
        }
    }
    void operator()(const LawnmowerScan& s) const
    {
        geo::validate(s.corner);
        if (!(s.width > 0.0) || !(s.height >= 0.0) || s.lanes < 1 || !(s.speed > 0.0)) {
            throw std::invalid_argument("scan needs positive width, lanes and speed");
        }
        if (s.lanes == 1 && s.height != 0.0) {
            throw std::invalid_argument("a single-lane scan has zero height");
        }
    }
    void operator()(const LogReplay& l) const
    {
        if (l.times.empty() || l.times.size() != l.points.size()) {
            throw std::invalid_argument("position log is empty");
        }
        for (std::size_t i = 1; i < l.times.size(); ++i) {
            if (!(l.times[i] > l.times[i - 1])) {
                throw std::invalid_argument("position log timestamps must strictly increase");
            }
        }
    }
};

LocalPosition scan_point(const LawnmowerScan& s, double dist)
{
    const double spacing = s.lanes > 1 ? s.height / (s.lanes - 1) : 0.0;
    double rem = dist;
    for (int lane = 0; lane < s.lanes; ++lane) {
        const double y = lane * spacing;
        if (rem <= s.width || lane == s.lanes - 1) {
            const double along = std::min(rem, s.width);
            const double x = (lane % 2 == 0) ? along : s.width - along;
            return {x, y, 0.0};
        }
        rem -= s.width;
        if (rem <= spacing) {
            const double x = (lane % 2 == 0) ? s.width : 0.0;
            return {x, y + rem, 0.0};
        }
        rem -= spacing;
    }
    return {};
}

struct Positioner {
    double t;

    GeoPosition operator()(const Fixed& f) const { return f.position; }
    GeoPosition operator()(const Circular& c) const
    {
        const double angle = c.phase + c.speed / c.radius * t;
        return geo::from_local(c.center, {c.radius * std::cos(angle), c.radius * std::sin(angle), 0.0});
    }
    GeoPosition operator()(const Shuttle& s) const
    {
        const double cycle = 2.0 * s.leg;
        double along = std::fmod(s.speed * t, cycle);
        if (along < 0.0) {
            along += cycle;
        }
        if (along > s.leg) {
            along = cycle - along;
        }
        const double b = s.bearing_deg * std::numbers::pi / 180.0;
        return geo::from_local(s.start, {along * std::sin(b), along * std::cos(b), 0.0});
    }
    GeoPosition operator()(const LawnmowerScan& s) const
    {
        const double total = scan_length(s);
        double along = std::max(0.0, s.speed * t);
        along = std::fmod(along, 2.0 * total);
        if (along > total) {
            along = 2.0 * total - along;
        }
        return geo::from_local(s.corner, scan_point(s, along));
    }
    GeoPosition operator()(const LogReplay& l) const
    {
        if (t < l.times.front() || t > l.times.back()) {
            throw std::out_of_range("time " + std::to_string(t) + " outside the position log span");
        }
        const auto it = std::lower_bound(l.times.begin(), l.times.end(), t);
        const auto i = static_cast<std::size_t>(it - l.times.begin());
        if (l.times[i] == t) {
            return geo::from_local(l.origin, l.points[i]);
        }
        const double w = (t - l.times[i - 1]) / (l.times[i] - l.times[i - 1]);
        return geo::from_local(l.origin, l.points[i - 1] + (l.points[i] - l.points[i - 1]) * w);
    }
};

}  // namespace

Trajectory::Trajectory(Spec spec) : spec_(std::move(spec))
{
    std::visit(Validator{}, spec_);
}

GeoPosition Trajectory::position(double t) const
{
    return std::visit(Positioner{t}, spec_);
}

std::optional<double> Trajectory::period() const
{
    if (const auto* c = std::get_if<Circular>(&spec_)) {
        return kTwoPi * c->radius / c->speed;
    }
    if (const auto* s = std::get_if<Shuttle>(&spec_)) {
        return 2.0 * s->leg / s->speed;
    }
    if (const auto* s = std::get_if<LawnmowerScan>(&spec_)) {
        return scan_length(*s) / s->speed;
    }
    return std::nullopt;
}

std::optional<std::pair<double, double>> Trajectory::span() const
{
    if (const auto* l = std::get_if<LogReplay>(&spec_)) {
        return std::pair{l->times.front(), l->times.back()};
    }
    return std::nullopt;
}

const char* to_string(Kind k)
{
    switch (k) {
    case Kind::Fixed: return "fixed";
    case Kind::Circular: return "circular";
    case Kind::Shuttle: return "shuttle";
    case Kind::LawnmowerScan: return "scan";
    case Kind::LogReplay: return "log";
    }
    return "?";
}

double scan_length(const LawnmowerScan& s)
{
    return s.lanes * s.width + s.height;
}

Trajectory load_position_log(const std::filesystem::path& path, std::optional<int> node)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open position log " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("position log " + path.string() + " is empty");
    }
    line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
    if (line != "t,node,lat,lon,alt") {
        throw std::invalid_argument("position log header must be t,node,lat,lon,alt");
    }

    std::map<int, std::vector<std::pair<double, GeoPosition>>> by_node;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::stringstream ss(line);
        std::vector<std::string> fields;
        std::string f;
        while (std::getline(ss, f, ',')) {
            fields.push_back(f);
        }
        if (fields.size() != 5) {
            throw std::invalid_argument("position log line " + std::to_string(lineno) +
                                        ": expected 5 fields");
        }
        try {
            const double t = std::stod(fields[0]);
            const int id = std::stoi(fields[1]);
            GeoPosition p{std::stod(fields[2]), std::stod(fields[3]), std::stod(fields[4])};
            geo::validate(p);
            by_node[id].emplace_back(t, p);
        } catch (const std::logic_error& e) {
            throw std::invalid_argument("position log line " + std::to_string(lineno) + ": " +
                                        e.what());
        }
    }
    if (by_node.empty()) {
        throw std::invalid_argument("position log " + path.string() + " has no samples");
    }
    int id = by_node.begin()->first;
    if (node) {
        id = *node;
    } else if (by_node.size() > 1) {
        throw std::invalid_argument("position log holds several nodes; pick one");
    }
    auto it = by_node.find(id);
    if (it == by_node.end()) {
        throw std::invalid_argument("position log has no samples for node " + std::to_string(id));
    }
    LogReplay log;
    log.origin = it->second.front().second;
    for (const auto& [t, p] : it->second) {
        log.times.push_back(t);
        log.points.push_back(geo::to_local(log.origin, p));
    }
    return Trajectory(std::move(log));
}

GpsErrorModel::GpsErrorModel(double tau, double sigma_h, double sigma_v, bool clamp)
    : tau_(tau), sigma_h_(sigma_h), sigma_v_(sigma_v), clamp_(clamp)
{
    if (!(tau > 0.0) || !(sigma_h >= 0.0) || !(sigma_v >= 0.0)) {
        throw std::invalid_argument("GPS model needs tau > 0 and non-negative sigmas");
    }
}

double GpsErrorModel::step(double e, double sigma, double decay, double innovation, Rng& rng) const
{
    if (sigma == 0.0) {
        return 0.0;
    }
    e = e * decay + sigma * innovation * rng.normal();
    if (clamp_) {
        e = std::clamp(e, -6.0 * sigma, 6.0 * sigma);
    }
    return e;
}

GeoPosition GpsErrorModel::perturb(const GeoPosition& true_pos, double dt, Rng& rng)
{
    if (!started_) {
        started_ = true;
        error_ = {step(0.0, sigma_h_, 0.0, 1.0, rng), step(0.0, sigma_h_, 0.0, 1.0, rng),
                  step(0.0, sigma_v_, 0.0, 1.0, rng)};
    } else {
        if (!(dt > 0.0)) {
            throw std::invalid_argument("GPS update needs dt > 0");
        }
        const double decay = std::exp(-dt / tau_);
        const double innovation = std::sqrt(1.0 - std::exp(-2.0 * dt / tau_));
        error_ = {step(error_.east, sigma_h_, decay, innovation, rng),
                  step(error_.north, sigma_h_, decay, innovation, rng),
                  step(error_.up, sigma_v_, decay, innovation, rng)};
    }
    if (error_ == LocalPosition{}) {
        return true_pos;
    }
    return geo::from_local(true_pos, error_);
}

}  // namespace polsr::mobility
