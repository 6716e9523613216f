#include "subspace_glr/errors.hpp"

namespace subspace_glr {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::rank_deficient: return "rank-deficient";
    case ErrorKind::degenerate_channel: return "degenerate-channel";
    case ErrorKind::not_positive_definite: return "not-positive-definite";
    case ErrorKind::degenerate_sample: return "degenerate-sample";
    case ErrorKind::invalid_initialization: return "invalid-initialization";
    case ErrorKind::non_finite: return "non-finite";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace subspace_glr
