#pragma once

#include "irsfd/channel_gen.hpp"
#include "irsfd/kron_expectation.hpp"
#include "irsfd/system_model.hpp"

namespace irsfd {

enum class RateKind { analytical_lower_bound, instantaneous, monte_carlo };

/// Weighted rates in bits/s/Hz.
struct RateReport {
  double wsr_total = 0.0;
  double r_ul = 0.0;  ///< w_k * R_k
  double r_dl = 0.0;  ///< w_j * R_j
  RateKind kind = RateKind::instantaneous;
  int n_samples = 0;       ///< monte_carlo only
  double std_error = 0.0;  ///< monte_carlo only: standard error of the mean
};

/// log2 det(I + (H U)^H R^{-1} (H U)) for Hermitian PD R.
double log2_det_rate(const Mat& hu, const Mat& r);

/// Ergodic WSR lower bound: estimate-only effective channels, with all
/// error energy and interference collected in the Sigma covariances.
RateReport ergodic_wsr_lb(const ChannelEstimates& est, const ErrorCovariances& err,
                          const BeamformingState& state, const SystemConfig& cfg);

/// Perfect-receiver-CSI rate of a single realization with interference
/// treated as Gaussian noise.
RateReport instantaneous_wsr(const ChannelSet& true_ch, const BeamformingState& state,
                             const SystemConfig& cfg);

/// Sample mean of instantaneous_wsr over n_samples error draws.
RateReport monte_carlo_wsr(const ChannelEstimates& est, const ErrorCovariances& err,
                           const BeamformingState& state, const SystemConfig& cfg,
                           int n_samples, Rng& rng);

}  // namespace irsfd
