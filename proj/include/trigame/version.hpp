#ifndef TRIGAME_VERSION_HPP
#define TRIGAME_VERSION_HPP

namespace trigame {
inline constexpr const char* kVersion = "1.0.0";
}

#endif
