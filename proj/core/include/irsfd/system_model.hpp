#pragma once

#include "irsfd/linalg.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace irsfd {

/// Scenario scalars for one FD base station serving one uplink user k and
/// one downlink user j through an R x C reflecting surface.
struct SystemConfig {
  int m0 = 15;  ///< BS transmit antennas
  int n0 = 8;   ///< BS receive antennas
  int mk = 5;   ///< UL user transmit antennas
  int nj = 5;   ///< DL user receive antennas
  int uk = 2;   ///< UL streams
  int vj = 2;   ///< DL streams
  int irs_rows = 10;
  int irs_cols = 10;
  double alpha0 = 1.0;  ///< BS sum-power budget
  double alphak = 1.0;  ///< UL user sum-power budget
  double sigma0_sq = 1.0;
  double sigmaj_sq = 1.0;
  double wk = 1.0;
  double wj = 1.0;

  int rc() const { return irs_rows * irs_cols; }
};

/// Every violated invariant, one message each. Empty means valid.
std::vector<std::string> validate_config(const SystemConfig& cfg);

/// Throws ConfigError listing all violations, if any.
void require_valid(const SystemConfig& cfg);

/// The eight channel matrices of the model. The naming follows the
/// receiver-first convention: h_0theta is IRS -> BS receive array.
enum class Link : std::size_t {
  ul_direct = 0,  ///< h_k:      UL user -> BS rx         (n0 x mk)
  dl_direct,      ///< h_j:      BS tx -> DL user         (nj x m0)
  self_interf,    ///< h_0:      BS tx -> BS rx           (n0 x m0)
  cross,          ///< h_jk:     UL user -> DL user       (nj x mk)
  bs_to_irs,      ///< h_theta0: BS tx -> IRS             (RC x m0)
  irs_to_bs,      ///< h_0theta: IRS -> BS rx             (n0 x RC)
  irs_to_dl,      ///< h_jtheta: IRS -> DL user           (nj x RC)
  ul_to_irs,      ///< h_thetak: UL user -> IRS           (RC x mk)
};

inline constexpr std::size_t kLinkCount = 8;
inline constexpr std::array<Link, kLinkCount> kAllLinks = {
    Link::ul_direct, Link::dl_direct, Link::self_interf, Link::cross,
    Link::bs_to_irs, Link::irs_to_bs, Link::irs_to_dl,   Link::ul_to_irs};
inline constexpr std::array<Link, 4> kIrsLinks = {
    Link::bs_to_irs, Link::irs_to_bs, Link::irs_to_dl, Link::ul_to_irs};

std::string_view link_name(Link link);

struct LinkShape {
  int rows;  ///< receive dimension (K side)
  int cols;  ///< transmit dimension (J side)
};

LinkShape link_shape(const SystemConfig& cfg, Link link);

struct ChannelSet {
  Mat h_k, h_j, h_0, h_jk, h_theta0, h_0theta, h_jtheta, h_thetak;

  Mat& operator[](Link link);
  const Mat& operator[](Link link) const;

  static ChannelSet zeros(const SystemConfig& cfg);
};

/// Channel estimates known at design time.
struct ChannelEstimates : ChannelSet {
  ChannelEstimates() = default;
  explicit ChannelEstimates(ChannelSet s) : ChannelSet(std::move(s)) {}
};

/// A realization estimate + error.
struct TrueChannels : ChannelSet {
  TrueChannels() = default;
  explicit TrueChannels(ChannelSet s) : ChannelSet(std::move(s)) {}
};

/// Throws ConfigError unless every matrix matches cfg and is finite.
void require_consistent(const SystemConfig& cfg, const ChannelSet& ch);

/// Kronecker error statistics for one link: vec(dH) ~ CN(0, J (x) K), with J
/// over the transmit (column) dimension and K over the receive (row)
/// dimension.
struct LinkCovariance {
  Mat j_cov;
  Mat k_cov;
};

struct ErrorCovariances {
  std::array<LinkCovariance, kLinkCount> links;

  LinkCovariance& operator[](Link link) { return links[static_cast<std::size_t>(link)]; }
  const LinkCovariance& operator[](Link link) const {
    return links[static_cast<std::size_t>(link)];
  }

  /// J = 0, K = 0 everywhere: perfect CSI.
  static ErrorCovariances zeros(const SystemConfig& cfg);
};

/// Throws ConfigError on wrong shape, non-Hermitian or non-PSD entries.
void require_consistent(const SystemConfig& cfg, const ErrorCovariances& err);

/// Unit-modulus IRS reflection vector.
class IrsPhase {
 public:
  static constexpr double kModulusTol = 1e-12;

  IrsPhase() = default;
  /// Throws ConfigError if any |theta(i)| deviates from 1 by more than kModulusTol.
  explicit IrsPhase(Vec theta);

  static IrsPhase ones(int n);
  static IrsPhase from_angles(const RealVec& angles);

  const Vec& vec() const { return theta_; }
  Eigen::Index size() const { return theta_.size(); }
  cplx operator()(Eigen::Index i) const { return theta_(i); }

  /// e^{i phi} * theta
  IrsPhase rotated(double phi) const;

 private:
  Vec theta_;
};

struct EffectiveChannels {
  Mat h_bar_k;   ///< n0 x mk
  Mat h_bar_0;   ///< n0 x m0
  Mat h_bar_j;   ///< nj x m0
  Mat h_bar_jk;  ///< nj x mk
};

/// Direct path plus reflected cascade for the four end-to-end links.
/// Works on estimates as well as on true realizations.
EffectiveChannels compose_effective_channels(const ChannelSet& ch, const IrsPhase& theta);

/// A + B diag(theta) C
Mat cascade(const Mat& direct, const Mat& out_hop, const Vec& theta, const Mat& in_hop);

struct BeamformingState {
  Mat u_k;  ///< mk x uk
  Mat v_j;  ///< m0 x vj
  Mat f_k;  ///< uk x n0
  Mat f_j;  ///< vj x nj
  Mat w_k;  ///< uk x uk
  Mat w_j;  ///< vj x vj
  IrsPhase theta;
  double lambda_k = 0.0;
  double lambda_0 = 0.0;

  /// Zero precoders/combiners, identity weights, theta = ones.
  static BeamformingState zeros(const SystemConfig& cfg);

  Mat u_cov() const { return u_k * u_k.adjoint(); }
  Mat v_cov() const { return v_j * v_j.adjoint(); }
  double power_ul() const { return u_k.squaredNorm(); }
  double power_dl() const { return v_j.squaredNorm(); }
};

}  // namespace irsfd
