#pragma once

#include <stdexcept>
#include <string>

namespace subspace_glr {

enum class ErrorKind {
  invalid_dimension,
  invalid_argument,
  rank_deficient,
  degenerate_channel,
  not_positive_definite,
  degenerate_sample,
  invalid_initialization,
  non_finite,
  io,
};

const char* to_string(ErrorKind kind);

/// Base exception for everything thrown by the library. The kind is kept
/// so callers (the CLI in particular) can map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Numerical failures are the ones a Monte Carlo run may tolerate at a
  /// small rate; everything else is a caller error.
  bool is_numerical() const noexcept {
    switch (kind_) {
      case ErrorKind::not_positive_definite:
      case ErrorKind::degenerate_sample:
      case ErrorKind::invalid_initialization:
      case ErrorKind::non_finite:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace subspace_glr
