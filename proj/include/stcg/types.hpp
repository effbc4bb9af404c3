#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace stcg {

using Real = double;
using Complex = std::complex<double>;
using Index = std::ptrdiff_t;

/// Row-compressed real matrix (M_x, A_x, M_t, B_t).
using SparseRealMatrix = Eigen::SparseMatrix<Real, Eigen::RowMajor, int>;
using DenseComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or inconsistent dimensions.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A dense decomposition (LU, Schur, eigen) could not be computed.
class DecompositionError : public Error {
public:
  using Error::Error;
};

/// The temporal core has no well-conditioned eigenvector basis.
/// Retrying with the Bartels-Stewart variant is the expected recovery.
class NotDiagonalizableError : public DecompositionError {
public:
  using DecompositionError::DecompositionError;
};

/// Sparse factorization of M_x + lambda A_x collapsed on a pivot.
class FactorizationError : public Error {
public:
  FactorizationError(const std::string& what, Complex shift)
      : Error(what), shift_(shift) {}
  Complex shift() const noexcept { return shift_; }

private:
  Complex shift_;
};

} // namespace stcg
