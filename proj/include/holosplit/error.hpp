#pragma once

#include <stdexcept>
#include <string>

namespace holosplit {

// Every failure carries a machine-readable kind (kebab-case) plus a message
// naming the offending quantity. Kinds are stable strings used by the CLI's
// error reports and by tests.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool ok, const std::string& kind, const std::string& message) {
  if (!ok) fail(kind, message);
}

}  // namespace holosplit
