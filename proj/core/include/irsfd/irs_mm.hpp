#pragma once

#include "irsfd/system_model.hpp"

#include <vector>

namespace irsfd {

/// Theta-independent matrices of the weighted expected-MSE objective
///   Tr(Theta^H Z Theta T) + Tr(Theta^H S^H) + Tr(Theta S) + c.
/// All are RC x RC.
struct StzMatrices {
  Mat s_mat;
  Mat t_mat;  ///< Hermitian PSD
  Mat z_mat;  ///< Hermitian PSD
};

/// Assembled from the current combiners, weights and precoders. Z collects
/// everything seen from the IRS towards the receivers (weighted by
/// F^H W F), T everything from the transmitters towards the IRS.
StzMatrices build_stz(const ChannelEstimates& est, const ErrorCovariances& err,
                      const BeamformingState& state, const SystemConfig& cfg);

/// Quadratic form over the phase vector.
struct MmProblem {
  Mat big_sigma;   ///< Z (.) T^T
  Vec s_vec;       ///< diag(S)
  double lambda_max = 0.0;
  double offset = 0.0;  ///< theta-independent constant, for reporting only
};

MmProblem build_mm_problem(const Mat& s_mat, const Mat& t_mat, const Mat& z_mat);

/// theta^H Sigma theta + 2 Re(s^T theta) + offset.
double mm_objective(const MmProblem& prob, const Vec& theta);

/// One majorize-minimize update theta <- exp(i arg q),
/// q = (lambda_max I - Sigma) theta - conj(s). Entries with q(i) == 0 keep
/// their previous phase.
IrsPhase mm_step(const MmProblem& prob, const IrsPhase& theta);

struct MmOptions {
  double inner_tol = 1e-8;
  int max_inner_iters = 200;
  /// Also run the loop from the phases minimizing the linear term alone and
  /// from the phases of the least-energy eigenvector of Sigma, keeping
  /// whichever fixed point is lowest. The result is never worse than the
  /// single run from theta_init.
  bool extra_starts = true;
};

struct MmResult {
  IrsPhase theta;
  std::vector<double> objective;  ///< objective at the winning start, then after each step
  int iterations = 0;             ///< steps of the winning run
  int start = 0;                  ///< 0 = theta_init, 1 = linear term, 2 = eigenvector
};

/// Iterates mm_step until the relative objective change drops below
/// inner_tol or max_inner_iters is reached, from each start in
/// MmOptions::extra_starts.
MmResult run_algorithm1(const MmProblem& prob, const IrsPhase& theta_init, const MmOptions& opts);

}  // namespace irsfd
