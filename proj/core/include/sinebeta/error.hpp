#pragma once

#include <stdexcept>
#include <string>

namespace sinebeta {

enum class ErrorKind {
  Domain,         // argument outside a function's domain
  InvalidConfig,  // inconsistent simulation or estimator configuration
  Numerical,      // an algorithm failed to produce a trustworthy value
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_domain(const std::string& what) {
  throw Error(ErrorKind::Domain, what);
}

[[noreturn]] inline void throw_config(const std::string& what) {
  throw Error(ErrorKind::InvalidConfig, what);
}

[[noreturn]] inline void throw_numerical(const std::string& what) {
  throw Error(ErrorKind::Numerical, what);
}

}  // namespace sinebeta
