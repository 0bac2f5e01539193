#pragma once

#include "irsfd/ewmmse.hpp"
#include "irsfd/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace irsfd {

struct OracleResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<OracleResult> results;
  double seconds = 0.0;
  bool all_passed() const;
};

struct ValidationOptions {
  std::uint64_t seed = 1;
  int mc_draws = 100000;
  /// Test hook: negate this UL term of the interference covariance before
  /// comparing it against Monte Carlo. -1 leaves it intact.
  int flip_sigma_ul_term = -1;
};

/// Random problem with general (non-identity) Kronecker factors, for
/// oracle checks at small sizes.
struct RandomInstance {
  SystemConfig cfg;
  ChannelEstimates est;
  ErrorCovariances err;
  BeamformingState state;  ///< random precoders, combiners, weights and phases
};

SystemConfig small_config();  ///< n0=2, m0=3, mk=2, nj=2, RC=3, one stream each

/// Random Hermitian PSD n x n matrix scaled to trace `scale * n`.
Mat random_psd(int n, double scale, Rng& rng);

RandomInstance random_instance(const SystemConfig& cfg, double error_scale, Rng& rng);

/// Sigma (UL, DL) with an optional sign flip on one UL term.
SigmaPair sigma_with_flip(const RandomInstance& inst, int flip_ul_term);

/// Runs every Monte-Carlo, grid, perturbation and stationarity oracle at
/// small sizes, writing one line per oracle to `log` if given.
ValidationReport run_validation_suite(const ValidationOptions& opts, std::ostream* log = nullptr);

}  // namespace irsfd
