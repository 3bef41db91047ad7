#pragma once

#include <stdexcept>
#include <string>

namespace aqc {

/// Raised for contract violations: bad shapes, oversized registers, invalid configs.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string &message) {
    if (!condition) {
        throw Error(message);
    }
}

} // namespace aqc
