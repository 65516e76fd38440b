#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace rgo {

// Failure categories carried by every rgo::Error. The C API maps these
// one-to-one onto rgo_status codes.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDegenerateConfiguration,  // rank-deficient DLT design matrix
  kNoPhysicalSolution,       // homography decomposition has no usable candidate
  kDegenerateMotion,         // zero baseline / undetermined epipole
  kEpipoleCoincidesWithPoint,
  kSizeMismatch,
  kMaskMismatch,
  kInsufficientData,
  kDimensionMismatch,
  kEmptyGroundTruth,
  kMissingFile,
  kMalformedRow,
  kCountMismatch,
  kInsufficientMotion,
  kIoFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// Sub-pixel image location, u = column (x), v = row (y).
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;

  PixelPoint() = default;
  PixelPoint(double u_, double v_) : u(u_), v(v_) {}

  bool finite() const { return std::isfinite(u) && std::isfinite(v); }
};

inline double distance(const PixelPoint& a, const PixelPoint& b) {
  return std::hypot(a.u - b.u, a.v - b.v);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// FNV-1a, used for config hashes embedded in output artifacts.
inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v);

}  // namespace rgo
