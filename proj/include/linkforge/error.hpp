#pragma once

#include <stdexcept>
#include <string>

namespace linkforge {

/// All recoverable failures (I/O, validation, schema mismatch) throw this.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace linkforge
