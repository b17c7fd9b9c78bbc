#pragma once

#include <stdexcept>
#include <string>

namespace udsp {

// Invalid parameters or inputs rejected by a constructor or precondition.
// The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
};

// A weighted norm, tail integral or convolution failed to converge.
// The CLI maps this to exit code 2.
class DivergenceError : public std::runtime_error {
public:
  explicit DivergenceError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace udsp
