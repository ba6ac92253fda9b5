#ifndef DSIG_IO_HPP
#define DSIG_IO_HPP

#include <cstdio>
#include <string>

namespace dsig::io {

/// Round-trippable decimal form (17 significant digits).
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace dsig::io

#endif
