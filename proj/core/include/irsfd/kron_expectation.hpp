#pragma once

#include "irsfd/system_model.hpp"

#include <string>
#include <vector>

namespace irsfd {

/// Tr(X J^T) without forming the transpose.
cplx trace_xjt(const Mat& x, const Mat& j_cov);

/// E[H X H^H] = H^ X H^^H + Tr(X J^T) K for H ~ CN(H^, J (x) K).
Mat expect_hxh(const Mat& est, const Mat& j_cov, const Mat& k_cov, const Mat& x);

/// E[H^H X H] = H^^H X H^ + Tr(K X) J^T.
Mat expect_hhx(const Mat& est, const Mat& j_cov, const Mat& k_cov, const Mat& x);

/// theta-conjugation diag(theta) Y diag(theta)^H, computed entrywise.
Mat conj_by_phase(const Vec& theta, const Mat& y);

/// An effective link direct + out_hop diag(theta) in_hop with mutually
/// independent Kronecker errors on each of the three factors.
struct CascadeView {
  const Mat& direct;
  const LinkCovariance& direct_err;
  const Mat& out_hop;
  const LinkCovariance& out_err;
  const Mat& in_hop;
  const LinkCovariance& in_err;
};

CascadeView ul_view(const ChannelSet& est, const ErrorCovariances& err);   ///< h_bar_k
CascadeView si_view(const ChannelSet& est, const ErrorCovariances& err);   ///< h_bar_0
CascadeView dl_view(const ChannelSet& est, const ErrorCovariances& err);   ///< h_bar_j
CascadeView cross_view(const ChannelSet& est, const ErrorCovariances& err);///< h_bar_jk

/// Estimate-only effective channel direct + out diag(theta) in.
Mat estimate_channel(const CascadeView& v, const Vec& theta);

/// E[Hbar X Hbar^H] over all three error terms.
Mat expect_cascade_outer(const CascadeView& v, const Vec& theta, const Mat& x);

/// E[Hbar^H P Hbar] over all three error terms.
Mat expect_cascade_inner(const CascadeView& v, const Vec& theta, const Mat& p);

/// Expected received covariances of the four effective links.
struct AuxExpectations {
  Mat q_k;   ///< E[Hbar_k  U~ Hbar_k^H]   n0 x n0
  Mat t_j;   ///< E[Hbar_j  V~ Hbar_j^H]   nj x nj
  Mat t_0;   ///< E[Hbar_0  V~ Hbar_0^H]   n0 x n0
  Mat q_jk;  ///< E[Hbar_jk U~ Hbar_jk^H]  nj x nj
};

AuxExpectations build_aux(const ChannelEstimates& est, const ErrorCovariances& err,
                          const IrsPhase& theta, const Mat& u_cov, const Mat& v_cov);

/// Interference-plus-noise covariances of the ergodic lower bound, with the
/// error energy of each user's own signal charged to its noise.
struct SigmaPair {
  Mat sigma_ul;  ///< n0 x n0
  Mat sigma_dl;  ///< nj x nj
};

struct SigmaTerm {
  std::string name;
  Mat value;
};

/// The individual additive contributions to sigma_ul / sigma_dl (noise
/// included), in a fixed order. build_sigma is their sum.
struct SigmaTerms {
  std::vector<SigmaTerm> ul;
  std::vector<SigmaTerm> dl;
};

SigmaTerms build_sigma_terms(const ChannelEstimates& est, const ErrorCovariances& err,
                             const IrsPhase& theta, const Mat& u_cov, const Mat& v_cov,
                             const SystemConfig& cfg);

SigmaPair build_sigma(const ChannelEstimates& est, const ErrorCovariances& err,
                      const IrsPhase& theta, const Mat& u_cov, const Mat& v_cov,
                      const SystemConfig& cfg);

SigmaPair sum_terms(const SigmaTerms& terms);

}  // namespace irsfd
