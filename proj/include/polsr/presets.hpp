#ifndef POLSR_PRESETS_HPP
#define POLSR_PRESETS_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "polsr/scenario.hpp"

namespace polsr::presets {

/// Ground station of the field tests.
inline constexpr double kBaseLat = 46.51843;
inline constexpr double kBaseLon = 6.561591;

inline constexpr double kGridSpacing = 250.0;
inline constexpr int kGridColumns = 6;
inline constexpr int kGridRows = 3;

std::vector<std::string> names();
bool exists(const std::string& name);

/// Fully populated scenario. Throws std::invalid_argument for unknown names.
Scenario make(const std::string& name, Protocol protocol);

/// Lattice slot (column, row) of a grid19 relay, or nullopt for the scanner.
std::optional<std::array<int, 2>> grid_slot(int id);

/// Loiter center of a grid19 relay in local coordinates around the base.
geo::LocalPosition grid_center(int column, int row);

Scenario shuttle2(Protocol protocol = Protocol::Olsr);
Scenario threenode(Protocol protocol);
Scenario grid19(Protocol protocol);

}  // namespace polsr::presets

#endif  // POLSR_PRESETS_HPP
