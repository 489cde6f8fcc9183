#pragma once

#include <stdexcept>
#include <string>

namespace gmlm {

// Error taxonomy mirrored by CLI exit codes:
//   Validation -> 2, Capacity -> 3, Numeric and CheckFailed -> 1.
enum class ErrKind { Validation, Capacity, Numeric, CheckFailed };

class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrKind kind() const { return kind_; }

 private:
  ErrKind kind_;
};

[[noreturn]] inline void fail_validation(const std::string& msg) { throw Error(ErrKind::Validation, msg); }
[[noreturn]] inline void fail_capacity(const std::string& msg) { throw Error(ErrKind::Capacity, msg); }
[[noreturn]] inline void fail_numeric(const std::string& msg) { throw Error(ErrKind::Numeric, msg); }

inline void require(bool cond, ErrKind kind, const std::string& msg) {
  if (!cond) throw Error(kind, msg);
}

}  // namespace gmlm
