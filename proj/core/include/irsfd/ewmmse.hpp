#pragma once

#include "irsfd/irs_mm.hpp"
#include "irsfd/kron_expectation.hpp"
#include "irsfd/system_model.hpp"

#include <cstdint>
#include <vector>

namespace irsfd {

enum class InitPolicy { svd_estimate, scaled_identity, random };

/// Block order inside one outer sweep.
///  per_user: F_k, W_k, U, then F_j, W_j, V, then theta.
///  joint:    F_k, F_j, W_k, W_j, U, V, then theta.
enum class UpdateOrder { per_user, joint };

struct SolverOptions {
  double outer_tol = 1e-4;
  int max_outer_iters = 200;
  /// Power-constraint tolerance as a fraction of the budget. Bisection also
  /// drives lambda * |power - budget| below the same bound.
  double bisection_tol = 1e-9;
  int max_bisection_iters = 300;
  MmOptions inner_irs;
  InitPolicy init_policy = InitPolicy::svd_estimate;
  std::uint64_t init_seed = 0;  ///< InitPolicy::random only
  UpdateOrder order = UpdateOrder::per_user;
  bool optimize_irs = true;
  /// An inactive side keeps a zero precoder and is never updated.
  bool ul_active = true;
  bool dl_active = true;
};

void require_valid(const SolverOptions& opts);

struct ExpectedMse {
  Mat e_k;  ///< uk x uk
  Mat e_j;  ///< vj x vj
};

struct CombinerPair {
  Mat f_k;
  Mat f_j;
};

struct WeightPair {
  Mat w_k;
  Mat w_j;
};

struct XMatrices {
  Mat x_k;    ///< mk x mk
  Mat x_j;    ///< m0 x m0
  Mat rhs_k;  ///< mk x uk
  Mat rhs_j;  ///< m0 x vj
};

/// MMSE combiners for the current precoders and phases of `state`.
CombinerPair update_combiners(const ChannelEstimates& est, const ErrorCovariances& err,
                              const BeamformingState& state, const SystemConfig& cfg);

/// Expected MSE matrices at the combiners and precoders held in `state`.
ExpectedMse expected_mse(const ChannelEstimates& est, const ErrorCovariances& err,
                         const BeamformingState& state, const SystemConfig& cfg);

/// W = (w / ln 2) E^{-1}. Throws NumericalError if E is not positive definite.
WeightPair update_weights(const ExpectedMse& mse, const SystemConfig& cfg);

/// Quadratic and linear coefficients of the precoder subproblems.
XMatrices build_x_matrices(const ChannelEstimates& est, const ErrorCovariances& err,
                           const BeamformingState& state, const SystemConfig& cfg);

struct PrecoderSolution {
  Mat u;
  double lambda = 0.0;
  double power = 0.0;
  int bisection_iters = 0;
  /// Relative difference between the eigen-form and direct-solve precoders.
  double form_mismatch = 0.0;
};

/// Tr(U U^H) for U = (X + lambda I)^{-1} rhs, by direct solve.
double precoder_power(const Mat& x, const Mat& rhs, double lambda);

/// min Tr(U^H X U) - 2 Re Tr(U^H rhs) s.t. Tr(U U^H) <= budget.
PrecoderSolution solve_precoder(const Mat& x, const Mat& rhs, double budget,
                                const SolverOptions& opts);

struct PrecoderUpdate {
  PrecoderSolution ul;
  PrecoderSolution dl;
};

PrecoderUpdate update_precoders(const ChannelEstimates& est, const ErrorCovariances& err,
                                const BeamformingState& state, const SystemConfig& cfg,
                                const SolverOptions& opts);

/// Weighted expected-MSE sum Tr(W_k E_k) + Tr(W_j E_j) at `state`.
double weighted_mse_sum(const ChannelEstimates& est, const ErrorCovariances& err,
                        const BeamformingState& state, const SystemConfig& cfg);

/// Precoders per init_policy, theta = ones, and matching combiners/weights.
BeamformingState initial_state(const ChannelEstimates& est, const ErrorCovariances& err,
                               const SystemConfig& cfg, const SolverOptions& opts);

/// One outer sweep in opts.order.
BeamformingState ewmmse_sweep(const ChannelEstimates& est, const ErrorCovariances& err,
                              const BeamformingState& state, const SystemConfig& cfg,
                              const SolverOptions& opts);

struct IterationRecord {
  int iteration = 0;
  double wsr_lb = 0.0;
  double power_ul = 0.0;
  double power_dl = 0.0;
  double lambda_k = 0.0;
  double lambda_0 = 0.0;
};

struct SolveResult {
  BeamformingState state;
  std::vector<double> trace;  ///< lower bound at init, then after each sweep
  std::vector<IterationRecord> records;
  bool converged = false;
  int iterations = 0;
  /// Worst relative budget excess and complementarity residual over all
  /// precoder solves of the run.
  double max_power_excess = 0.0;
  double max_complementarity = 0.0;
};

SolveResult run_algorithm2(const ChannelEstimates& est, const ErrorCovariances& err,
                           const SystemConfig& cfg, const SolverOptions& opts);

/// Textbook WMMSE sweep on the estimated channels treated as exact, written
/// directly in terms of the effective channels. Used to cross-check the
/// zero-error behaviour of ewmmse_sweep.
BeamformingState reference_wmmse_sweep(const ChannelEstimates& est, const BeamformingState& state,
                                       const SystemConfig& cfg, const SolverOptions& opts);

}  // namespace irsfd
