#include "irsfd/kron_expectation.hpp"

namespace irsfd {

namespace {

void require_square(const Mat& m, Eigen::Index n, const char* what) {
  require_shape(m, n, n, what);
}

}  // namespace

cplx trace_xjt(const Mat& x, const Mat& j_cov) {
  // Tr(X J^T) = sum_ab X_ab J_ab
  return x.cwiseProduct(j_cov).sum();
}

Mat expect_hxh(const Mat& est, const Mat& j_cov, const Mat& k_cov, const Mat& x) {
  require_square(x, est.cols(), "expect_hxh: X");
  require_square(j_cov, est.cols(), "expect_hxh: J");
  require_square(k_cov, est.rows(), "expect_hxh: K");
  return est * x * est.adjoint() + trace_xjt(x, j_cov) * k_cov;
}

Mat expect_hhx(const Mat& est, const Mat& j_cov, const Mat& k_cov, const Mat& x) {
  require_square(x, est.rows(), "expect_hhx: X");
  require_square(j_cov, est.cols(), "expect_hhx: J");
  require_square(k_cov, est.rows(), "expect_hhx: K");
  // Tr(K X) = sum_ab K^T_ab X_ab
  const cplx tr = k_cov.transpose().cwiseProduct(x).sum();
  return est.adjoint() * x * est + tr * j_cov.transpose();
}

Mat conj_by_phase(const Vec& theta, const Mat& y) {
  return (theta * theta.adjoint()).cwiseProduct(y);
}

CascadeView ul_view(const ChannelSet& est, const ErrorCovariances& err) {
  return {est.h_k,      err[Link::ul_direct], est.h_0theta, err[Link::irs_to_bs],
          est.h_thetak, err[Link::ul_to_irs]};
}

CascadeView si_view(const ChannelSet& est, const ErrorCovariances& err) {
  return {est.h_0,      err[Link::self_interf], est.h_0theta, err[Link::irs_to_bs],
          est.h_theta0, err[Link::bs_to_irs]};
}

CascadeView dl_view(const ChannelSet& est, const ErrorCovariances& err) {
  return {est.h_j,      err[Link::dl_direct], est.h_jtheta, err[Link::irs_to_dl],
          est.h_theta0, err[Link::bs_to_irs]};
}

CascadeView cross_view(const ChannelSet& est, const ErrorCovariances& err) {
  return {est.h_jk,     err[Link::cross],     est.h_jtheta, err[Link::irs_to_dl],
          est.h_thetak, err[Link::ul_to_irs]};
}

Mat estimate_channel(const CascadeView& v, const Vec& theta) {
  return cascade(v.direct, v.out_hop, theta, v.in_hop);
}

Mat expect_cascade_outer(const CascadeView& v, const Vec& theta, const Mat& x) {
  // Cross terms between independent zero-mean errors vanish; what is left is
  // the direct term, the estimate cross term (plus its adjoint) and the
  // nested expectation over the two reflected hops.
  const Mat direct = expect_hxh(v.direct, v.direct_err.j_cov, v.direct_err.k_cov, x);
  const Mat cross =
      v.direct * x * v.in_hop.adjoint() * theta.conjugate().asDiagonal() * v.out_hop.adjoint();
  const Mat inner = expect_hxh(v.in_hop, v.in_err.j_cov, v.in_err.k_cov, x);
  const Mat reflected =
      expect_hxh(v.out_hop, v.out_err.j_cov, v.out_err.k_cov, conj_by_phase(theta, inner));
  return direct + cross + cross.adjoint() + reflected;
}

Mat expect_cascade_inner(const CascadeView& v, const Vec& theta, const Mat& p) {
  const Mat direct = expect_hhx(v.direct, v.direct_err.j_cov, v.direct_err.k_cov, p);
  const Mat cross = v.direct.adjoint() * p * v.out_hop * scale_rows(theta, v.in_hop);
  const Mat z = expect_hhx(v.out_hop, v.out_err.j_cov, v.out_err.k_cov, p);
  const Vec theta_c = theta.conjugate();
  const Mat reflected =
      expect_hhx(v.in_hop, v.in_err.j_cov, v.in_err.k_cov, conj_by_phase(theta_c, z));
  return direct + cross + cross.adjoint() + reflected;
}

AuxExpectations build_aux(const ChannelEstimates& est, const ErrorCovariances& err,
                          const IrsPhase& theta, const Mat& u_cov, const Mat& v_cov) {
  const Vec& t = theta.vec();
  AuxExpectations a;
  a.q_k = hermitian_part(expect_cascade_outer(ul_view(est, err), t, u_cov));
  a.t_j = hermitian_part(expect_cascade_outer(dl_view(est, err), t, v_cov));
  a.t_0 = hermitian_part(expect_cascade_outer(si_view(est, err), t, v_cov));
  a.q_jk = hermitian_part(expect_cascade_outer(cross_view(est, err), t, u_cov));
  return a;
}

SigmaTerms build_sigma_terms(const ChannelEstimates& est, const ErrorCovariances& err,
                             const IrsPhase& theta, const Mat& u_cov, const Mat& v_cov,
                             const SystemConfig& cfg) {
  require_consistent(cfg, static_cast<const ChannelSet&>(est));
  require_square(u_cov, cfg.mk, "build_sigma: u_cov");
  require_square(v_cov, cfg.m0, "build_sigma: v_cov");
  if (theta.size() != cfg.rc()) throw ConfigError("build_sigma: theta length != RC");

  const Vec& t = theta.vec();
  const auto& e_k = err[Link::ul_direct];
  const auto& e_j = err[Link::dl_direct];
  const auto& e_0 = err[Link::self_interf];
  const auto& e_jk = err[Link::cross];
  const auto& e_t0 = err[Link::bs_to_irs];
  const auto& e_0t = err[Link::irs_to_bs];
  const auto& e_jt = err[Link::irs_to_dl];
  const auto& e_tk = err[Link::ul_to_irs];

  // Theta-weighted reflected-hop products, shared between both sides.
  const Mat th_tk = scale_rows(t, est.h_thetak);  // Theta H_thetak
  const Mat th_t0 = scale_rows(t, est.h_theta0);  // Theta H_theta0
  const Mat th_ktk = conj_by_phase(t, e_tk.k_cov);  // Theta K_thetak Theta^H
  const Mat th_kt0 = conj_by_phase(t, e_t0.k_cov);  // Theta K_theta0 Theta^H
  const cplx tr_u_jk = trace_xjt(u_cov, e_k.j_cov);
  const cplx tr_u_jtk = trace_xjt(u_cov, e_tk.j_cov);
  const cplx tr_v_jt0 = trace_xjt(v_cov, e_t0.j_cov);
  const cplx tr_v_j0 = trace_xjt(v_cov, e_0.j_cov);
  const cplx tr_v_jj = trace_xjt(v_cov, e_j.j_cov);
  const cplx tr_u_jjk = trace_xjt(u_cov, e_jk.j_cov);

  SigmaTerms s;
  auto& ul = s.ul;
  // Own-signal error energy.
  ul.push_back({"tr(U J_k^T) K_k", tr_u_jk * e_k.k_cov});
  ul.push_back({"H_0t T tr(U J_tk^T) K_tk T^H H_0t^H",
                est.h_0theta * (tr_u_jtk * th_ktk) * est.h_0theta.adjoint()});
  ul.push_back({"tr(T H_tk U H_tk^H T^H J_0t^T) K_0t",
                trace_xjt(th_tk * u_cov * th_tk.adjoint(), e_0t.j_cov) * e_0t.k_cov});
  ul.push_back({"tr(U J_tk^T) tr(T K_tk T^H J_0t^T) K_0t",
                tr_u_jtk * trace_xjt(th_ktk, e_0t.j_cov) * e_0t.k_cov});
  // Self-interference through the direct and reflected SI paths.
  const Mat h0_v = est.h_0 * v_cov;
  const Mat refl_si = est.h_0theta * th_t0;  // H_0t T H_t0
  ul.push_back({"H_0 V H_0^H", h0_v * est.h_0.adjoint()});
  ul.push_back({"H_0 V H_t0^H T^H H_0t^H", h0_v * refl_si.adjoint()});
  ul.push_back({"tr(V J_0^T) K_0", tr_v_j0 * e_0.k_cov});
  ul.push_back({"H_0t T H_t0 V H_0^H", refl_si * h0_v.adjoint()});
  ul.push_back({"H_0t T H_t0 V H_t0^H T^H H_0t^H", refl_si * v_cov * refl_si.adjoint()});
  ul.push_back({"H_0t T tr(V J_t0^T) K_t0 T^H H_0t^H",
                est.h_0theta * (tr_v_jt0 * th_kt0) * est.h_0theta.adjoint()});
  ul.push_back({"tr(T H_t0 V H_t0^H T^H J_0t^T) K_0t",
                trace_xjt(th_t0 * v_cov * th_t0.adjoint(), e_0t.j_cov) * e_0t.k_cov});
  ul.push_back({"tr(V J_t0^T) tr(T K_t0 T^H J_0t^T) K_0t",
                tr_v_jt0 * trace_xjt(th_kt0, e_0t.j_cov) * e_0t.k_cov});
  ul.push_back({"sigma_0^2 I", cfg.sigma0_sq * Mat::Identity(cfg.n0, cfg.n0)});

  auto& dl = s.dl;
  dl.push_back({"tr(V J_j^T) K_j", tr_v_jj * e_j.k_cov});
  dl.push_back({"H_jt T tr(V J_t0^T) K_t0 T^H H_jt^H",
                est.h_jtheta * (tr_v_jt0 * th_kt0) * est.h_jtheta.adjoint()});
  dl.push_back({"tr(T H_t0 V H_t0^H T^H J_jt^T) K_jt",
                trace_xjt(th_t0 * v_cov * th_t0.adjoint(), e_jt.j_cov) * e_jt.k_cov});
  dl.push_back({"tr(V J_t0^T) tr(T K_t0 T^H J_jt^T) K_jt",
                tr_v_jt0 * trace_xjt(th_kt0, e_jt.j_cov) * e_jt.k_cov});
  // Cross interference from the UL user through direct and reflected paths.
  const Mat hjk_u = est.h_jk * u_cov;
  const Mat refl_cross = est.h_jtheta * th_tk;  // H_jt T H_tk
  dl.push_back({"H_jk U H_jk^H", hjk_u * est.h_jk.adjoint()});
  dl.push_back({"H_jk U H_tk^H T^H H_jt^H", hjk_u * refl_cross.adjoint()});
  dl.push_back({"tr(U J_jk^T) K_jk", tr_u_jjk * e_jk.k_cov});
  dl.push_back({"H_jt T H_tk U H_jk^H", refl_cross * hjk_u.adjoint()});
  dl.push_back({"H_jt T H_tk U H_tk^H T^H H_jt^H", refl_cross * u_cov * refl_cross.adjoint()});
  dl.push_back({"H_jt T tr(U J_tk^T) K_tk T^H H_jt^H",
                est.h_jtheta * (tr_u_jtk * th_ktk) * est.h_jtheta.adjoint()});
  dl.push_back({"tr(T H_tk U H_tk^H T^H J_jt^T) K_jt",
                trace_xjt(th_tk * u_cov * th_tk.adjoint(), e_jt.j_cov) * e_jt.k_cov});
  dl.push_back({"tr(U J_tk^T) tr(T K_tk T^H J_jt^T) K_jt",
                tr_u_jtk * trace_xjt(th_ktk, e_jt.j_cov) * e_jt.k_cov});
  dl.push_back({"sigma_j^2 I", cfg.sigmaj_sq * Mat::Identity(cfg.nj, cfg.nj)});
  return s;
}

SigmaPair sum_terms(const SigmaTerms& terms) {
  SigmaPair p;
  p.sigma_ul = terms.ul.front().value;
  for (std::size_t i = 1; i < terms.ul.size(); ++i) p.sigma_ul += terms.ul[i].value;
  p.sigma_dl = terms.dl.front().value;
  for (std::size_t i = 1; i < terms.dl.size(); ++i) p.sigma_dl += terms.dl[i].value;
  p.sigma_ul = hermitian_part(p.sigma_ul);
  p.sigma_dl = hermitian_part(p.sigma_dl);
  return p;
}

SigmaPair build_sigma(const ChannelEstimates& est, const ErrorCovariances& err,
                      const IrsPhase& theta, const Mat& u_cov, const Mat& v_cov,
                      const SystemConfig& cfg) {
  return sum_terms(build_sigma_terms(est, err, theta, u_cov, v_cov, cfg));
}

}  // namespace irsfd
