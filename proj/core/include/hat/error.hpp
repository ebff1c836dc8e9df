#pragma once

#include <stdexcept>
#include <string>

namespace hat {

// Shape or index disagreement between caller and callee.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Non-finite values or ill-formed distributions fed into numeric kernels.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Config files, CLI arguments, and other user-supplied settings.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Registry and message-passing misuse (unknown endpoints, duplicate ids).
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hat
