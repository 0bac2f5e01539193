#include "irsfd/rate.hpp"

#include <cmath>
#include <numbers>

namespace irsfd {

double log2_det_rate(const Mat& hu, const Mat& r) {
  Eigen::LLT<Mat> llt(hermitian_part(r));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("log2_det_rate: covariance is not positive definite");
  }
  const Mat m = llt.matrixL().solve(hu);
  const Mat g = Mat::Identity(hu.cols(), hu.cols()) + m.adjoint() * m;
  return log_det_hpd(g) / std::numbers::ln2;
}

RateReport ergodic_wsr_lb(const ChannelEstimates& est, const ErrorCovariances& err,
                          const BeamformingState& state, const SystemConfig& cfg) {
  const Mat u_cov = state.u_cov();
  const Mat v_cov = state.v_cov();
  const SigmaPair sigma = build_sigma(est, err, state.theta, u_cov, v_cov, cfg);
  const Vec& t = state.theta.vec();
  const Mat hk = estimate_channel(ul_view(est, err), t);
  const Mat hj = estimate_channel(dl_view(est, err), t);

  RateReport r;
  r.kind = RateKind::analytical_lower_bound;
  r.r_ul = cfg.wk * log2_det_rate(hk * state.u_k, sigma.sigma_ul);
  r.r_dl = cfg.wj * log2_det_rate(hj * state.v_j, sigma.sigma_dl);
  r.wsr_total = r.r_ul + r.r_dl;
  return r;
}

RateReport instantaneous_wsr(const ChannelSet& true_ch, const BeamformingState& state,
                             const SystemConfig& cfg) {
  const EffectiveChannels h = compose_effective_channels(true_ch, state.theta);
  const Mat si = h.h_bar_0 * state.v_j;
  const Mat cross = h.h_bar_jk * state.u_k;
  const Mat r_k = si * si.adjoint() + cfg.sigma0_sq * Mat::Identity(cfg.n0, cfg.n0);
  const Mat r_j = cross * cross.adjoint() + cfg.sigmaj_sq * Mat::Identity(cfg.nj, cfg.nj);

  RateReport r;
  r.kind = RateKind::instantaneous;
  r.r_ul = cfg.wk * log2_det_rate(h.h_bar_k * state.u_k, r_k);
  r.r_dl = cfg.wj * log2_det_rate(h.h_bar_j * state.v_j, r_j);
  r.wsr_total = r.r_ul + r.r_dl;
  return r;
}

RateReport monte_carlo_wsr(const ChannelEstimates& est, const ErrorCovariances& err,
                           const BeamformingState& state, const SystemConfig& cfg,
                           int n_samples, Rng& rng) {
  if (n_samples < 2) throw ConfigError("monte_carlo_wsr: n_samples must be >= 2");
  const ErrorSampler sampler(err);

  // Shifted accumulation: identical samples give exactly the first sample
  // as mean and exactly zero spread.
  double shift_total = 0.0, shift_ul = 0.0, shift_dl = 0.0;
  double sum = 0.0, sum_sq = 0.0, sum_ul = 0.0, sum_dl = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const RateReport s = instantaneous_wsr(sampler.sample(est, rng), state, cfg);
    if (i == 0) {
      shift_total = s.wsr_total;
      shift_ul = s.r_ul;
      shift_dl = s.r_dl;
    }
    const double d = s.wsr_total - shift_total;
    sum += d;
    sum_sq += d * d;
    sum_ul += s.r_ul - shift_ul;
    sum_dl += s.r_dl - shift_dl;
  }
  const double n = n_samples;
  const double mean_d = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean_d * mean_d) / (n - 1.0));

  RateReport r;
  r.kind = RateKind::monte_carlo;
  r.n_samples = n_samples;
  r.wsr_total = shift_total + mean_d;
  r.r_ul = shift_ul + sum_ul / n;
  r.r_dl = shift_dl + sum_dl / n;
  r.std_error = std::sqrt(var / n);
  return r;
}

}  // namespace irsfd
