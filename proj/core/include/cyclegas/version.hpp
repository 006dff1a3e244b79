#ifndef CYCLEGAS_VERSION_HPP
#define CYCLEGAS_VERSION_HPP

namespace cyclegas {

// Keep in sync with the CMake project version.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace cyclegas

#endif
