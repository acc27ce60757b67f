#ifndef HJACOBI_ERROR_HPP
#define HJACOBI_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hjacobi {

/// Failure categories. Values are mirrored one-to-one by hj_status in the C API.
enum class ErrorCode {
  invalid_argument = 1,
  invalid_problem = 2,
  invalid_config = 3,
  singular_system = 4,
  numerical_failure = 5,
  size_limit = 6,
  io_error = 7,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace hjacobi

#endif
