#ifndef QLIMIT_VERSION_HPP
#define QLIMIT_VERSION_HPP

namespace qlimit {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
