#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cplxtorsor {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using IVector = Eigen::Matrix<long, Eigen::Dynamic, 1>;
using IMatrix = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>;

enum class ErrorCode {
  DegenerateLattice,
  TorusMismatch,
  ResolutionTooCoarse,
  IndexOutOfRange,
  NotHermitian,
  NonIntegralE,
  SemicharacterInconsistent,
  NotLatticeVector,
  LatticeNotPreserved,
  ShapeMismatch,
  BaseMismatch,
  ConfigInvalid,
  CheckCrashed,
  IoError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateLattice: return "DegenerateLattice";
    case ErrorCode::TorusMismatch: return "TorusMismatch";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NonIntegralE: return "NonIntegralE";
    case ErrorCode::SemicharacterInconsistent: return "SemicharacterInconsistent";
    case ErrorCode::NotLatticeVector: return "NotLatticeVector";
    case ErrorCode::LatticeNotPreserved: return "LatticeNotPreserved";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::CheckCrashed: return "CheckCrashed";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// message is prefixed with the code name so diagnostics stay greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <typename Scalar>
constexpr Scalar pi() {
  return Scalar(3.141592653589793238462643383279502884L);
}

}  // namespace cplxtorsor
