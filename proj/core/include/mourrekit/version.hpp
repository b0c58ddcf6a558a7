#ifndef MOURREKIT_VERSION_HPP
#define MOURREKIT_VERSION_HPP

namespace mourre {

inline constexpr const char* kVersion = "0.1.0";

}

#endif
