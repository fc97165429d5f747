#pragma once

#include <stdexcept>
#include <string>

namespace gorenet {

// Domain failure carrying a stable, machine-readable code such as
// "not-enabled" or "unknown-id".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace gorenet
