#include "polsr/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace polsr::presets {

namespace {

using mobility::Circular;
using mobility::Fixed;
using mobility::LawnmowerScan;
using mobility::Shuttle;
using mobility::Trajectory;

constexpr double kCruiseAlt = 75.0;
constexpr double kCruiseSpeed = 12.0;
constexpr double kLoiterRadius = 30.0;

// Row-major by column: kGridIds[column][row].
constexpr int kGridIds[kGridColumns][kGridRows] = {
    {1, 3, 4}, {5, 7, 6}, {8, 10, 12}, {13, 15, 11}, {9, 14, 16}, {17, 18, 19},
};

const geo::GeoPosition kBase{kBaseLat, kBaseLon, 0.0};

geo::GeoPosition at(double east, double north, double alt)
{
    auto p = geo::from_local(kBase, {east, north, 0.0});
    p.alt = alt;
    return p;
}

NodeSpec node(int id, std::string role, Trajectory traj, bool random_phase = false)
{
    NodeSpec n;
    n.id = id;
    n.address = default_address(id);
    n.role = std::move(role);
    n.trajectory = std::move(traj);
    n.random_phase = random_phase;
    return n;
}

}  // namespace

std::vector<std::string> names()
{
    return {"shuttle2", "threenode", "grid19"};
}

bool exists(const std::string& name)
{
    for (const auto& n : names()) {
        if (n == name) {
            return true;
        }
    }
    return false;
}

Scenario make(const std::string& name, Protocol protocol)
{
    if (name == "shuttle2") {
        return shuttle2(protocol);
    }
    if (name == "threenode") {
        return threenode(protocol);
    }
    if (name == "grid19") {
        return grid19(protocol);
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

std::optional<std::array<int, 2>> grid_slot(int id)
{
    for (int c = 0; c < kGridColumns; ++c) {
        for (int r = 0; r < kGridRows; ++r) {
            if (kGridIds[c][r] == id) {
                return std::array<int, 2>{c, r};
            }
        }
    }
    return std::nullopt;
}

geo::LocalPosition grid_center(int column, int row)
{
    const double dx = kGridSpacing * std::sqrt(3.0) / 2.0;
    const double shift = (column % 2 == 1) ? kGridSpacing / 2.0 : 0.0;
    return {column * dx, row * kGridSpacing + shift, 0.0};
}

Scenario shuttle2(Protocol protocol)
{
    Scenario sc;
    sc.name = "shuttle2";
    sc.protocol = protocol;
    sc.params = {0.2, protocol == Protocol::Polsr ? 0.2 : 0.0, 0.04, 0.5};
    sc.channel.kind = channel::Kind::LogisticDlr;
    sc.traffic.source = 2;
    sc.traffic.destination = 1;
    const double leg = 450.0;
    sc.duration = 10 * 2.0 * leg / kCruiseSpeed;
    sc.repetitions = 1;
    sc.nodes.push_back(node(1, "ground", Trajectory(Fixed{at(0.0, 0.0, 0.0)})));
    sc.nodes.push_back(
        node(2, "source", Trajectory(Shuttle{at(0.0, 0.0, kCruiseAlt), 270.0, leg, kCruiseSpeed})));
    return sc;
}

Scenario threenode(Protocol protocol)
{
    Scenario sc;
    sc.name = "threenode";
    sc.protocol = protocol;
    if (protocol == Protocol::Polsr) {
        sc.params = {0.05, 0.2, 0.04, 0.5};
    } else {
        sc.params = {0.2, 0.0, 0.04, 0.5};
    }
    sc.channel.kind = channel::Kind::LogisticDlr;
    sc.traffic.source = 2;
    sc.traffic.destination = 1;
    sc.duration = 1000.0;
    sc.repetitions = 10;
    sc.nodes.push_back(node(1, "ground", Trajectory(Fixed{at(0.0, 0.0, 10.0)})));
    sc.nodes.push_back(
        node(2, "source", Trajectory(Shuttle{at(0.0, 0.0, kCruiseAlt), 270.0, 600.0, kCruiseSpeed})));
    sc.nodes.push_back(node(3, "relay",
                            Trajectory(Circular{at(-250.0, 0.0, kCruiseAlt), kLoiterRadius, kCruiseSpeed, 0.0}),
                            true));
    return sc;
}

Scenario grid19(Protocol protocol)
{
    Scenario sc;
    sc.name = "grid19";
    sc.protocol = protocol;
    sc.params = {0.2, protocol == Protocol::Polsr ? 0.2 : 0.0, 0.08, 0.5};
    sc.channel.kind = channel::Kind::TwoSlope;
    sc.channel.per_reference_bytes = 64;
    sc.gps.enabled = true;
    sc.traffic.source = 2;
    sc.traffic.destination = 1;
    sc.repetitions = 10;

    LawnmowerScan scan;
    scan.width = 1000.0;
    scan.height = 560.0;
    scan.lanes = 4;
    scan.speed = kCruiseSpeed;
    const auto far = grid_center(kGridColumns - 1, kGridRows - 1);
    const double extent_east = far.east;
    const double extent_north = (kGridRows - 1) * kGridSpacing + kGridSpacing / 2.0;
    scan.corner = at((extent_east - scan.width) / 2.0, (extent_north - scan.height) / 2.0, kCruiseAlt);
    sc.duration = mobility::scan_length(scan) / scan.speed;

    for (int id = 1; id <= kGridColumns * kGridRows + 1; ++id) {
        if (id == 2) {
            sc.nodes.push_back(node(2, "scanner", Trajectory(scan)));
            continue;
        }
        const auto slot = *grid_slot(id);
        const auto c = grid_center(slot[0], slot[1]);
        sc.nodes.push_back(node(id, id == 1 ? "destination" : "relay",
                                Trajectory(Circular{at(c.east, c.north, kCruiseAlt), kLoiterRadius,
                                                    kCruiseSpeed, 0.0}),
                                true));
    }
    return sc;
}

}  // namespace polsr::presets
