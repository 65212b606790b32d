#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nlcl {

/// Base error carrying a short machine-readable code such as
/// "cfl-violation" or "invalid-interval".
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(detail.empty() ? code : code + ": " + detail),
        code_(std::move(code)),
        detail_(detail) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  std::string code_;
  std::string detail_;
};

/// Raised for bad parameters detected before any computation starts.
class ValidationError : public Error {
public:
  using Error::Error;
};

}  // namespace nlcl
