#include "irsfd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace irsfd {

Mat hermitian_part(const Mat& a) {
  return (a + a.adjoint()) * 0.5;
}

double hermitian_defect(const Mat& a) {
  if (a.rows() != a.cols()) return INFINITY;
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const Mat& a, double tol) {
  return hermitian_defect(a) <= tol;
}

double min_eigenvalue(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

bool is_psd(const Mat& a, double tol) {
  if (!is_hermitian(a, std::max(tol, kHermitianTol))) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return min_eigenvalue(a) >= -tol * scale;
}

Mat psd_sqrt(const Mat& a, double tol) {
  if (a.rows() != a.cols()) throw ConfigError("psd_sqrt: matrix is not square");
  if (a.size() == 0) return a;
  if (!is_hermitian(a, std::max(tol, kHermitianTol))) {
    throw ConfigError("psd_sqrt: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  RealVec ev = es.eigenvalues();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -tol * scale) {
    std::ostringstream os;
    os << "psd_sqrt: matrix is not PSD (min eigenvalue " << ev.minCoeff() << ")";
    throw ConfigError(os.str());
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  const Mat& q = es.eigenvectors();
  return q * ev.cast<cplx>().asDiagonal() * q.adjoint();
}

double log_det_hpd(const Mat& a) {
  Eigen::LLT<Mat> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("log_det_hpd: argument is not positive definite");
  }
  const auto& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
  return 2.0 * acc;
}

Mat solve_hpd(const Mat& a, const Mat& b) {
  Eigen::LLT<Mat> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("solve_hpd: argument is not positive definite");
  }
  return llt.solve(b);
}

Mat inverse_hpd(const Mat& a) {
  return hermitian_part(solve_hpd(a, Mat::Identity(a.rows(), a.cols())));
}

Mat scale_rows(const Vec& d, const Mat& a) {
  if (d.size() != a.rows()) throw ConfigError("scale_rows: dimension mismatch");
  return d.asDiagonal() * a;
}

Mat scale_cols(const Mat& a, const Vec& d) {
  if (d.size() != a.cols()) throw ConfigError("scale_cols: dimension mismatch");
  return a * d.asDiagonal();
}

double relative_error(const Mat& a, const Mat& b) {
  const double denom = b.norm();
  const double num = (a - b).norm();
  if (denom == 0.0) return num;
  return num / denom;
}

void require_shape(const Mat& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << what << ": expected " << rows << "x" << cols << ", got " << m.rows()
       << "x" << m.cols();
    throw ConfigError(os.str());
  }
}

}  // namespace irsfd
