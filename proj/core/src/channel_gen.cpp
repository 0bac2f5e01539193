#include "irsfd/channel_gen.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace irsfd {

namespace {

double pathloss_gain(double pathloss_ref_db, double exponent, double distance) {
  const double d = std::max(distance, 1e-3);
  const double gain_db = pathloss_ref_db - 10.0 * exponent * std::log10(d);
  return std::pow(10.0, gain_db / 10.0);
}

/// sqrt(Nr Nt) a_r a_t^H: unit-modulus entries, rank one.
Mat los_component(int rows, int cols, const Point3& tx, const Point3& rx) {
  const Point3 dir = rx - tx;
  const Vec a_t = ula_steering(cols, dir);
  const Vec a_r = ula_steering(rows, -dir);
  return std::sqrt(static_cast<double>(rows) * cols) * a_r * a_t.adjoint();
}

Mat rician(int rows, int cols, double k_factor, const Mat& los, Rng& rng) {
  Mat nlos = rng.complex_normal(rows, cols);
  const double w_los = std::sqrt(k_factor / (k_factor + 1.0));
  const double w_nlos = std::sqrt(1.0 / (k_factor + 1.0));
  return w_los * los + w_nlos * nlos;
}

}  // namespace

void require_valid(const GeometryConfig& geo) {
  std::vector<std::string> errors;
  if (!(geo.user_radius >= 0.0)) errors.emplace_back("user_radius must be >= 0");
  if (!(geo.pathloss_exp_direct > 0.0)) errors.emplace_back("pathloss_exp_direct must be > 0");
  if (!(geo.pathloss_exp_irs > 0.0)) errors.emplace_back("pathloss_exp_irs must be > 0");
  if (!(geo.rician_k_direct >= 0.0)) errors.emplace_back("rician_k_direct must be >= 0");
  if (!(geo.rician_k_si >= 0.0)) errors.emplace_back("rician_k_si must be >= 0");
  if (!(geo.si_distance_m > 0.0)) errors.emplace_back("si_distance_m must be > 0");
  if (errors.empty()) return;
  std::ostringstream os;
  os << "invalid GeometryConfig:";
  for (const auto& e : errors) os << "\n  " << e;
  throw ConfigError(os.str());
}

UserPositions draw_user_positions(const GeometryConfig& geo, Rng& rng) {
  auto draw = [&](const Point3& center) {
    const double r = geo.user_radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    return Point3(center.x() + r * std::cos(phi), center.y() + r * std::sin(phi), center.z());
  };
  UserPositions p;
  p.ul = draw(geo.ul_center);
  p.dl = draw(geo.dl_center);
  return p;
}

std::array<double, kLinkCount> large_scale_gains(const GeometryConfig& geo,
                                                 const UserPositions& pos) {
  const double ref = geo.pathloss_ref_db;
  auto direct = [&](const Point3& a, const Point3& b) {
    return pathloss_gain(ref, geo.pathloss_exp_direct, (a - b).norm());
  };
  auto hop = [&](const Point3& a, const Point3& b) {
    return pathloss_gain(ref, geo.pathloss_exp_irs, (a - b).norm());
  };

  double direct_norm = 1.0;
  double hop_norm = 1.0;
  if (geo.normalize_to_reference) {
    direct_norm = direct(geo.bs, geo.ul_center);
    hop_norm = std::sqrt(direct_norm);
  }

  std::array<double, kLinkCount> g{};
  auto at = [&](Link l) -> double& { return g[static_cast<std::size_t>(l)]; };
  at(Link::ul_direct) = direct(pos.ul, geo.bs) / direct_norm;
  at(Link::dl_direct) = direct(geo.bs, pos.dl) / direct_norm;
  at(Link::cross) = direct(pos.ul, pos.dl) / direct_norm;
  at(Link::self_interf) = pathloss_gain(ref, geo.pathloss_exp_direct, geo.si_distance_m) *
                          std::pow(10.0, -geo.si_isolation_db / 10.0) / direct_norm;
  at(Link::bs_to_irs) = hop(geo.bs, geo.irs) / hop_norm;
  at(Link::irs_to_bs) = hop(geo.irs, geo.bs) / hop_norm;
  at(Link::irs_to_dl) = hop(geo.irs, pos.dl) / hop_norm;
  at(Link::ul_to_irs) = hop(pos.ul, geo.irs) / hop_norm;
  return g;
}

Vec ula_steering(int n, const Point3& direction) {
  const double norm = direction.norm();
  const double cos_axis = norm > 0.0 ? direction.x() / norm : 0.0;
  Vec a(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) a(i) = std::polar(scale, std::numbers::pi * i * cos_axis);
  return a;
}

Scenario generate_scenario(const SystemConfig& cfg, const GeometryConfig& geo, Rng& rng) {
  require_valid(cfg);
  require_valid(geo);
  Scenario sc;
  sc.positions = draw_user_positions(geo, rng);
  const auto gains = large_scale_gains(geo, sc.positions);
  const auto& pos = sc.positions;
  // BS rx array sits si_distance_m from the tx array, broadside to the
  // array axis.
  const Point3 bs_rx = geo.bs + Point3(0.0, geo.si_distance_m, 0.0);

  ChannelSet ch;
  for (Link l : kAllLinks) {
    const auto sh = link_shape(cfg, l);
    Mat fading;
    switch (l) {
      case Link::ul_direct:
        fading = rician(sh.rows, sh.cols, geo.rician_k_direct,
                        los_component(sh.rows, sh.cols, pos.ul, geo.bs), rng);
        break;
      case Link::dl_direct:
        fading = rician(sh.rows, sh.cols, geo.rician_k_direct,
                        los_component(sh.rows, sh.cols, geo.bs, pos.dl), rng);
        break;
      case Link::cross:
        fading = rician(sh.rows, sh.cols, geo.rician_k_direct,
                        los_component(sh.rows, sh.cols, pos.ul, pos.dl), rng);
        break;
      case Link::self_interf:
        fading = rician(sh.rows, sh.cols, geo.rician_k_si,
                        los_component(sh.rows, sh.cols, geo.bs, bs_rx), rng);
        break;
      default:
        fading = rng.complex_normal(sh.rows, sh.cols);
        break;
    }
    ch[l] = std::sqrt(gains[static_cast<std::size_t>(l)]) * fading;
  }
  sc.estimates = ChannelEstimates(std::move(ch));
  return sc;
}

ChannelEstimates generate_estimates(const SystemConfig& cfg, const GeometryConfig& geo, Rng& rng) {
  return generate_scenario(cfg, geo, rng).estimates;
}

void require_valid(const CsiErrorPolicy& policy) {
  if (!(policy.rho >= 0.0)) throw ConfigError("CsiErrorPolicy: rho must be >= 0");
  if (!(policy.alpha_decay >= 0.0 && policy.alpha_decay <= 1.0)) {
    throw ConfigError("CsiErrorPolicy: alpha_decay must lie in [0, 1]");
  }
  if (policy.structure == ErrorStructure::custom && !policy.custom) {
    throw ConfigError("CsiErrorPolicy: custom structure without matrices");
  }
}

double csi_error_variance(const CsiErrorPolicy& policy, double snr_linear) {
  return policy.rho / std::pow(snr_linear, policy.alpha_decay);
}

ErrorCovariances error_covariances(const CsiErrorPolicy& policy, double snr_linear,
                                   const SystemConfig& cfg) {
  require_valid(policy);
  if (!(snr_linear > 0.0)) throw ConfigError("error_covariances: snr must be positive");
  if (policy.structure == ErrorStructure::custom) {
    require_consistent(cfg, *policy.custom);
    return *policy.custom;
  }
  const double var = csi_error_variance(policy, snr_linear);
  ErrorCovariances e;
  for (Link l : kAllLinks) {
    const auto sh = link_shape(cfg, l);
    e[l] = {Mat::Identity(sh.cols, sh.cols), var * Mat::Identity(sh.rows, sh.rows)};
  }
  return e;
}

Mat sample_error(const Mat& j_cov, const Mat& k_cov, Rng& rng) {
  const Mat k_sqrt = psd_sqrt(k_cov);
  const Mat jt_sqrt = psd_sqrt(j_cov.transpose());
  return k_sqrt * rng.complex_normal(k_cov.rows(), j_cov.rows()) * jt_sqrt;
}

ErrorSampler::ErrorSampler(const ErrorCovariances& err) {
  for (Link l : kAllLinks) {
    auto& f = factors_[static_cast<std::size_t>(l)];
    f.k_sqrt = psd_sqrt(err[l].k_cov);
    f.jt_sqrt = psd_sqrt(err[l].j_cov.transpose());
    f.zero = f.k_sqrt.isZero(0.0) || f.jt_sqrt.isZero(0.0);
  }
}

TrueChannels ErrorSampler::sample(const ChannelEstimates& est, Rng& rng) const {
  ChannelSet out = est;
  for (Link l : kAllLinks) {
    const auto& f = factors_[static_cast<std::size_t>(l)];
    Mat g = rng.complex_normal(est[l].rows(), est[l].cols());
    if (!f.zero) out[l] += f.k_sqrt * g * f.jt_sqrt;
  }
  return TrueChannels(std::move(out));
}

TrueChannels sample_true_channels(const ChannelEstimates& est, const ErrorCovariances& err,
                                  Rng& rng) {
  return ErrorSampler(err).sample(est, rng);
}

}  // namespace irsfd
