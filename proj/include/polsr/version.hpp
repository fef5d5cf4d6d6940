#ifndef POLSR_VERSION_HPP
#define POLSR_VERSION_HPP

namespace polsr {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace polsr

#endif  // POLSR_VERSION_HPP
