#include "sfa/rng.hpp"

#include <cstdio>

namespace sfa {

std::string fnv1a64_hex(std::string_view s) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(s)));
    return std::string(buf);
}

}  // namespace sfa
