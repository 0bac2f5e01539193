#include "irsfd/system_model.hpp"

#include <cmath>
#include <sstream>

namespace irsfd {

std::vector<std::string> validate_config(const SystemConfig& cfg) {
  std::vector<std::string> errors;
  auto count = [&](int v, const char* name) {
    if (v < 1) errors.push_back(std::string(name) + " must be >= 1");
  };
  count(cfg.m0, "m0");
  count(cfg.n0, "n0");
  count(cfg.mk, "mk");
  count(cfg.nj, "nj");
  count(cfg.uk, "uk");
  count(cfg.vj, "vj");
  count(cfg.irs_rows, "irs_rows");
  count(cfg.irs_cols, "irs_cols");
  if (cfg.uk > std::min(cfg.mk, cfg.n0)) {
    errors.push_back("uk: stream count exceeds min antenna dim (min(mk, n0))");
  }
  if (cfg.vj > std::min(cfg.m0, cfg.nj)) {
    errors.push_back("vj: stream count exceeds min antenna dim (min(m0, nj))");
  }
  auto positive = [&](double v, const char* name, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) errors.push_back(std::string(name) + ": " + what);
  };
  positive(cfg.alpha0, "alpha0", "power budget must be positive");
  positive(cfg.alphak, "alphak", "power budget must be positive");
  positive(cfg.sigma0_sq, "sigma0_sq", "noise variance must be positive");
  positive(cfg.sigmaj_sq, "sigmaj_sq", "noise variance must be positive");
  if (!(cfg.wk >= 0.0) || !std::isfinite(cfg.wk)) errors.push_back("wk: weight must be nonnegative");
  if (!(cfg.wj >= 0.0) || !std::isfinite(cfg.wj)) errors.push_back("wj: weight must be nonnegative");
  return errors;
}

void require_valid(const SystemConfig& cfg) {
  const auto errors = validate_config(cfg);
  if (errors.empty()) return;
  std::ostringstream os;
  os << "invalid SystemConfig:";
  for (const auto& e : errors) os << "\n  " << e;
  throw ConfigError(os.str());
}

std::string_view link_name(Link link) {
  switch (link) {
    case Link::ul_direct: return "h_k";
    case Link::dl_direct: return "h_j";
    case Link::self_interf: return "h_0";
    case Link::cross: return "h_jk";
    case Link::bs_to_irs: return "h_theta0";
    case Link::irs_to_bs: return "h_0theta";
    case Link::irs_to_dl: return "h_jtheta";
    case Link::ul_to_irs: return "h_thetak";
  }
  return "?";
}

LinkShape link_shape(const SystemConfig& cfg, Link link) {
  const int rc = cfg.rc();
  switch (link) {
    case Link::ul_direct: return {cfg.n0, cfg.mk};
    case Link::dl_direct: return {cfg.nj, cfg.m0};
    case Link::self_interf: return {cfg.n0, cfg.m0};
    case Link::cross: return {cfg.nj, cfg.mk};
    case Link::bs_to_irs: return {rc, cfg.m0};
    case Link::irs_to_bs: return {cfg.n0, rc};
    case Link::irs_to_dl: return {cfg.nj, rc};
    case Link::ul_to_irs: return {rc, cfg.mk};
  }
  throw ConfigError("link_shape: unknown link");
}

Mat& ChannelSet::operator[](Link link) {
  return const_cast<Mat&>(static_cast<const ChannelSet&>(*this)[link]);
}

const Mat& ChannelSet::operator[](Link link) const {
  switch (link) {
    case Link::ul_direct: return h_k;
    case Link::dl_direct: return h_j;
    case Link::self_interf: return h_0;
    case Link::cross: return h_jk;
    case Link::bs_to_irs: return h_theta0;
    case Link::irs_to_bs: return h_0theta;
    case Link::irs_to_dl: return h_jtheta;
    case Link::ul_to_irs: return h_thetak;
  }
  throw ConfigError("ChannelSet: unknown link");
}

ChannelSet ChannelSet::zeros(const SystemConfig& cfg) {
  ChannelSet s;
  for (Link l : kAllLinks) {
    const auto sh = link_shape(cfg, l);
    s[l] = Mat::Zero(sh.rows, sh.cols);
  }
  return s;
}

void require_consistent(const SystemConfig& cfg, const ChannelSet& ch) {
  for (Link l : kAllLinks) {
    const auto sh = link_shape(cfg, l);
    require_shape(ch[l], sh.rows, sh.cols, std::string(link_name(l)));
    if (!ch[l].allFinite()) {
      throw ConfigError(std::string(link_name(l)) + ": non-finite entry");
    }
  }
}

ErrorCovariances ErrorCovariances::zeros(const SystemConfig& cfg) {
  ErrorCovariances e;
  for (Link l : kAllLinks) {
    const auto sh = link_shape(cfg, l);
    e[l] = {Mat::Zero(sh.cols, sh.cols), Mat::Zero(sh.rows, sh.rows)};
  }
  return e;
}

void require_consistent(const SystemConfig& cfg, const ErrorCovariances& err) {
  for (Link l : kAllLinks) {
    const auto sh = link_shape(cfg, l);
    const std::string name(link_name(l));
    require_shape(err[l].j_cov, sh.cols, sh.cols, name + ".j_cov");
    require_shape(err[l].k_cov, sh.rows, sh.rows, name + ".k_cov");
    if (!is_psd(err[l].j_cov)) throw ConfigError(name + ".j_cov is not Hermitian PSD");
    if (!is_psd(err[l].k_cov)) throw ConfigError(name + ".k_cov is not Hermitian PSD");
  }
}

IrsPhase::IrsPhase(Vec theta) : theta_(std::move(theta)) {
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    if (std::abs(std::abs(theta_(i)) - 1.0) > kModulusTol) {
      std::ostringstream os;
      os << "IrsPhase: |theta(" << i << ")| = " << std::abs(theta_(i)) << " is not unit";
      throw ConfigError(os.str());
    }
  }
}

IrsPhase IrsPhase::ones(int n) { return IrsPhase(Vec::Ones(n)); }

IrsPhase IrsPhase::from_angles(const RealVec& angles) {
  Vec t(angles.size());
  for (Eigen::Index i = 0; i < angles.size(); ++i) t(i) = std::polar(1.0, angles(i));
  return IrsPhase(std::move(t));
}

IrsPhase IrsPhase::rotated(double phi) const {
  const cplx r = std::polar(1.0, phi);
  Vec t = theta_ * r;
  // Renormalize so repeated rotations never drift off the unit circle.
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) /= std::abs(t(i));
  return IrsPhase(std::move(t));
}

Mat cascade(const Mat& direct, const Mat& out_hop, const Vec& theta, const Mat& in_hop) {
  if (out_hop.cols() != theta.size() || in_hop.rows() != theta.size() ||
      direct.rows() != out_hop.rows() || direct.cols() != in_hop.cols()) {
    throw ConfigError("cascade: dimension mismatch");
  }
  return direct + out_hop * scale_rows(theta, in_hop);
}

EffectiveChannels compose_effective_channels(const ChannelSet& ch, const IrsPhase& theta) {
  const Vec& t = theta.vec();
  return {
      cascade(ch.h_k, ch.h_0theta, t, ch.h_thetak),
      cascade(ch.h_0, ch.h_0theta, t, ch.h_theta0),
      cascade(ch.h_j, ch.h_jtheta, t, ch.h_theta0),
      cascade(ch.h_jk, ch.h_jtheta, t, ch.h_thetak),
  };
}

BeamformingState BeamformingState::zeros(const SystemConfig& cfg) {
  BeamformingState s;
  s.u_k = Mat::Zero(cfg.mk, cfg.uk);
  s.v_j = Mat::Zero(cfg.m0, cfg.vj);
  s.f_k = Mat::Zero(cfg.uk, cfg.n0);
  s.f_j = Mat::Zero(cfg.vj, cfg.nj);
  s.w_k = Mat::Identity(cfg.uk, cfg.uk);
  s.w_j = Mat::Identity(cfg.vj, cfg.vj);
  s.theta = IrsPhase::ones(cfg.rc());
  return s;
}

}  // namespace irsfd
