#pragma once

#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cife {

using Shape = std::vector<int>;

inline int64_t numel(const Shape& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ")";
    return os.str();
}

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

struct FreezeViolation : Error {
    explicit FreezeViolation(const std::string& msg) : Error(msg) {}
};

#define CIFE_CHECK(cond, msg)                                 \
    do {                                                      \
        if (!(cond)) {                                        \
            std::ostringstream os_;                           \
            os_ << msg;                                       \
            throw ::cife::ShapeError(os_.str());              \
        }                                                     \
    } while (0)

// NaN/Inf validation after public tensor ops. Off by default in release
// builds; tests and training entry points flip it on to fail fast on
// divergence.
bool debug_validate_enabled();
void set_debug_validate(bool on);

}  // namespace cife
