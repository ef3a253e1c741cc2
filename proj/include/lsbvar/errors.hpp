#ifndef LSBVAR_ERRORS_HPP
#define LSBVAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lsbvar {

// Error taxonomy mirrors the CLI exit codes: usage/config (1), data (2),
// sampler (3).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SamplerError : std::runtime_error {
  explicit SamplerError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lsbvar

#endif
