#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace irsfd {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

/// Raised when inputs violate a dimensional or structural contract.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a trustworthy result
/// (singular "positive definite" argument, bisection stall, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;

/// (A + A^H) / 2
Mat hermitian_part(const Mat& a);

/// Max-abs entry of A - A^H relative to max(1, max-abs of A).
double hermitian_defect(const Mat& a);

bool is_hermitian(const Mat& a, double tol = kHermitianTol);

/// Smallest eigenvalue of the Hermitian part of A.
double min_eigenvalue(const Mat& a);
double max_eigenvalue(const Mat& a);

/// Hermitian and with eigenvalues >= -tol (scaled by max(1, ||A||)).
bool is_psd(const Mat& a, double tol = kPsdTol);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-tol, 0) are clamped to zero; anything more negative throws.
Mat psd_sqrt(const Mat& a, double tol = kPsdTol);

/// ln det(A) for Hermitian positive definite A, via Cholesky.
double log_det_hpd(const Mat& a);

/// Solves A X = B for Hermitian positive definite A.
Mat solve_hpd(const Mat& a, const Mat& b);

/// Inverse of a Hermitian positive definite matrix (symmetrized result).
Mat inverse_hpd(const Mat& a);

/// diag(d) * A without materializing diag(d).
Mat scale_rows(const Vec& d, const Mat& a);

/// A * diag(d) without materializing diag(d).
Mat scale_cols(const Mat& a, const Vec& d);

/// Frobenius norm of (a - b) divided by Frobenius norm of b.
double relative_error(const Mat& a, const Mat& b);

void require_shape(const Mat& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what);

}  // namespace irsfd
