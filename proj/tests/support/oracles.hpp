#pragma once

#include "irsfd/ewmmse.hpp"
#include "irsfd/irs_mm.hpp"
#include "irsfd/rng.hpp"
#include "irsfd/validation.hpp"

#include <vector>

namespace irsfd::testing {

/// Draws vec(dH) = L g with L the Cholesky factor of J (x) K, formed
/// explicitly. Slow, but shares nothing with the library sampler.
class KroneckerDraw {
 public:
  KroneckerDraw(const Mat& j_cov, const Mat& k_cov);
  Mat operator()(Rng& rng) const;

 private:
  Eigen::Index rows_, cols_;
  Mat factor_;
  bool zero_ = false;
};

/// Sample mean of H X H^H (inner = false) or H^H X H (inner = true).
Mat mc_expect(const Mat& est, const Mat& j_cov, const Mat& k_cov, const Mat& x, bool inner,
              int draws, Rng& rng);

/// Monte-Carlo interference-plus-noise covariances: mean received
/// covariance minus the estimate-channel signal part.
struct McSigma {
  Mat ul;
  Mat dl;
};
McSigma mc_sigma(const RandomInstance& inst, int draws, Rng& rng);

/// Tr(Theta^H Z Theta T) + Tr(Theta^H S^H) + Tr(Theta S) with a dense
/// Theta = diag(theta).
double trace_objective(const StzMatrices& m, const Vec& theta);

/// Brute-force minimum of trace_objective for RC = 2: 720 x 720 grid (0.5
/// degree), then pattern-search refinement.
double grid_min_rc2(const StzMatrices& m);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Reduced array sizes used for the runtime-bounded sweeps.
SystemConfig desk_config();

}  // namespace irsfd::testing
