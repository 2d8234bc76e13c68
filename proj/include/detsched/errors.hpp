#ifndef DETSCHED_ERRORS_HPP
#define DETSCHED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace detsched {

// invalid-argument conditions reuse std::invalid_argument.

struct KernelError : std::runtime_error {
  explicit KernelError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PalmUndefined : std::runtime_error {
  explicit PalmUndefined(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericFailure : std::runtime_error {
  explicit NumericFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct DivergingIntegral : std::runtime_error {
  explicit DivergingIntegral(const std::string& msg) : std::runtime_error(msg) {}
};

struct SizeLimit : std::runtime_error {
  explicit SizeLimit(const std::string& msg) : std::runtime_error(msg) {}
};

struct InfeasibleStart : std::runtime_error {
  explicit InfeasibleStart(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace detsched

#endif
