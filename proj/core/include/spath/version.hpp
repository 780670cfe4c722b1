#ifndef SPATH_VERSION_HPP
#define SPATH_VERSION_HPP

namespace spath {

inline constexpr const char* kVersion = "spath 0.1.0";

}  // namespace spath

#endif
