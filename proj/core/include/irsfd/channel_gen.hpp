#pragma once

#include "irsfd/rng.hpp"
#include "irsfd/system_model.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace irsfd {

using Point3 = Eigen::Vector3d;

/// Deployment geometry and large-scale fading parameters.
///
/// Link gain in dB is pathloss_ref_db - 10 * exponent * log10(d / 1 m).
/// With normalize_to_reference set, every gain is expressed relative to the
/// direct-link gain at the BS -> UL-circle-center distance, so the transmit
/// SNR axis is also (approximately) the received SNR of the direct links.
/// The normalization is split evenly over the two hops of every reflected
/// cascade, which keeps the cascade/direct power ratio physical.
struct GeometryConfig {
  Point3 bs{0.0, 0.0, 0.0};
  Point3 irs{20.0, 10.0, 0.0};
  Point3 ul_center{20.0, 0.0, 30.0};
  Point3 dl_center{30.0, 0.0, 20.0};
  double user_radius = 8.0;
  double rician_k_direct = 1.0;
  double rician_k_si = 1.0;
  double pathloss_ref_db = -30.0;
  double pathloss_exp_direct = 3.5;
  double pathloss_exp_irs = 2.2;
  /// Separation of the BS transmit and receive arrays.
  double si_distance_m = 1.0;
  /// Passive isolation plus analog cancellation applied on top of the SI
  /// path loss.
  double si_isolation_db = 60.0;
  bool normalize_to_reference = true;
  std::uint64_t seed = 1;
};

/// Throws ConfigError listing violated invariants.
void require_valid(const GeometryConfig& geo);

struct UserPositions {
  Point3 ul;
  Point3 dl;
};

/// Uniform draw inside each user's horizontal disk.
UserPositions draw_user_positions(const GeometryConfig& geo, Rng& rng);

/// Linear large-scale power gain of every link for the given user positions.
std::array<double, kLinkCount> large_scale_gains(const GeometryConfig& geo,
                                                 const UserPositions& pos);

/// Unit-norm half-wavelength ULA response along the x axis for a plane wave
/// travelling along `direction` (need not be normalized).
Vec ula_steering(int n, const Point3& direction);

struct Scenario {
  UserPositions positions;
  ChannelEstimates estimates;
};

/// Draws user positions and all eight channel estimates.
/// Direct, cross and SI links are Rician, IRS hops are Rayleigh.
Scenario generate_scenario(const SystemConfig& cfg, const GeometryConfig& geo, Rng& rng);

ChannelEstimates generate_estimates(const SystemConfig& cfg, const GeometryConfig& geo, Rng& rng);

enum class ErrorStructure { iid_identity, custom };

struct CsiErrorPolicy {
  double rho = 0.4;
  double alpha_decay = 0.6;
  ErrorStructure structure = ErrorStructure::iid_identity;
  std::optional<ErrorCovariances> custom;
};

void require_valid(const CsiErrorPolicy& policy);

/// rho / snr^alpha
double csi_error_variance(const CsiErrorPolicy& policy, double snr_linear);

/// iid_identity: J = I, K = (rho / snr^alpha) I on every link. custom: the
/// stored matrices after shape/PSD validation.
ErrorCovariances error_covariances(const CsiErrorPolicy& policy, double snr_linear,
                                   const SystemConfig& cfg);

/// One draw of dH ~ CN(0, J (x) K) for an m x r channel:
/// dH = K^{1/2} G (J^T)^{1/2}.
Mat sample_error(const Mat& j_cov, const Mat& k_cov, Rng& rng);

/// Precomputed square-root factors for repeated error draws.
class ErrorSampler {
 public:
  explicit ErrorSampler(const ErrorCovariances& err);

  /// Estimate + independent error on every link. Every link consumes the
  /// same amount of randomness whether or not its covariance is zero, so
  /// schemes that zero some links still see common draws on the others.
  TrueChannels sample(const ChannelEstimates& est, Rng& rng) const;

 private:
  struct Factor {
    Mat k_sqrt;
    Mat jt_sqrt;
    bool zero = true;
  };
  std::array<Factor, kLinkCount> factors_;
};

TrueChannels sample_true_channels(const ChannelEstimates& est, const ErrorCovariances& err,
                                  Rng& rng);

}  // namespace irsfd
