#pragma once

#include <stdexcept>
#include <string>

namespace liftrom {

/// Base error for all liftrom failures. Message carries the offending
/// quantity (cell index, eigenvalue, patch name, ...) where one exists.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace liftrom
