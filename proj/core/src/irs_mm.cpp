#include "irsfd/irs_mm.hpp"

#include "irsfd/kron_expectation.hpp"

#include <cmath>

namespace irsfd {

StzMatrices build_stz(const ChannelEstimates& est, const ErrorCovariances& err,
                      const BeamformingState& state, const SystemConfig& cfg) {
  require_consistent(cfg, static_cast<const ChannelSet&>(est));
  const Mat a_k = state.f_k.adjoint() * state.w_k * state.f_k;  // n0 x n0
  const Mat a_j = state.f_j.adjoint() * state.w_j * state.f_j;  // nj x nj
  const Mat u_cov = state.u_cov();
  const Mat v_cov = state.v_cov();

  const auto& e_0t = err[Link::irs_to_bs];
  const auto& e_jt = err[Link::irs_to_dl];
  const auto& e_tk = err[Link::ul_to_irs];
  const auto& e_t0 = err[Link::bs_to_irs];

  StzMatrices m;
  m.z_mat = expect_hhx(est.h_0theta, e_0t.j_cov, e_0t.k_cov, a_k) +
            expect_hhx(est.h_jtheta, e_jt.j_cov, e_jt.k_cov, a_j);
  m.t_mat = expect_hxh(est.h_thetak, e_tk.j_cov, e_tk.k_cov, u_cov) +
            expect_hxh(est.h_theta0, e_t0.j_cov, e_t0.k_cov, v_cov);
  m.z_mat = hermitian_part(m.z_mat);
  m.t_mat = hermitian_part(m.t_mat);

  // Linear terms: estimate cross products between direct and reflected
  // paths, minus the useful-signal correlation of each receiver.
  const Mat bs_side = a_k * est.h_0theta;    // n0 x RC
  const Mat dl_side = a_j * est.h_jtheta;    // nj x RC
  m.s_mat = est.h_thetak * u_cov * est.h_k.adjoint() * bs_side +
            est.h_theta0 * v_cov * est.h_0.adjoint() * bs_side -
            est.h_thetak * state.u_k * state.w_k * state.f_k * est.h_0theta +
            est.h_theta0 * v_cov * est.h_j.adjoint() * dl_side +
            est.h_thetak * u_cov * est.h_jk.adjoint() * dl_side -
            est.h_theta0 * state.v_j * state.w_j * state.f_j * est.h_jtheta;
  return m;
}

MmProblem build_mm_problem(const Mat& s_mat, const Mat& t_mat, const Mat& z_mat) {
  if (s_mat.rows() != s_mat.cols() || t_mat.rows() != s_mat.rows() ||
      t_mat.cols() != s_mat.cols() || z_mat.rows() != s_mat.rows() ||
      z_mat.cols() != s_mat.cols()) {
    throw ConfigError("build_mm_problem: S, T, Z must be square and of equal size");
  }
  MmProblem p;
  p.big_sigma = hermitian_part(z_mat.cwiseProduct(t_mat.transpose()));
  p.s_vec = s_mat.diagonal();
  p.lambda_max = p.big_sigma.size() ? max_eigenvalue(p.big_sigma) : 0.0;
  return p;
}

double mm_objective(const MmProblem& prob, const Vec& theta) {
  const double quad = theta.dot(prob.big_sigma * theta).real();
  const double lin = 2.0 * (prob.s_vec.transpose() * theta).value().real();
  return quad + lin + prob.offset;
}

IrsPhase mm_step(const MmProblem& prob, const IrsPhase& theta) {
  const Vec& t = theta.vec();
  const Vec q = prob.lambda_max * t - prob.big_sigma * t - prob.s_vec.conjugate();
  Vec next = t;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double mag = std::abs(q(i));
    if (mag > 0.0) next(i) = q(i) / mag;
  }
  return IrsPhase(std::move(next));
}

namespace {

MmResult descend(const MmProblem& prob, const IrsPhase& start, const MmOptions& opts) {
  MmResult r;
  r.theta = start;
  r.objective.push_back(mm_objective(prob, start.vec()));
  for (int n = 0; n < opts.max_inner_iters; ++n) {
    r.theta = mm_step(prob, r.theta);
    r.objective.push_back(mm_objective(prob, r.theta.vec()));
    ++r.iterations;
    const double prev = r.objective[r.objective.size() - 2];
    const double cur = r.objective.back();
    if (std::abs(cur - prev) <= opts.inner_tol * std::abs(cur)) break;
  }
  return r;
}

IrsPhase unit_phases(const Vec& v, const IrsPhase& fallback) {
  Vec t = fallback.vec();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > 0.0) t(i) = v(i) / mag;
  }
  return IrsPhase(std::move(t));
}

}  // namespace

MmResult run_algorithm1(const MmProblem& prob, const IrsPhase& theta_init, const MmOptions& opts) {
  if (!(opts.inner_tol > 0.0) || opts.max_inner_iters < 1) {
    throw ConfigError("run_algorithm1: inner_tol must be > 0 and max_inner_iters >= 1");
  }
  MmResult best = descend(prob, theta_init, opts);
  if (!opts.extra_starts || theta_init.size() == 0) return best;

  // 2 Re(s^T theta) is smallest at theta = -conj(s) / |s|.
  const IrsPhase linear = unit_phases(-prob.s_vec.conjugate(), theta_init);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(prob.big_sigma));
  const IrsPhase eigen = unit_phases(es.eigenvectors().col(0), theta_init);
  int idx = 1;
  for (const IrsPhase& start : {linear, eigen}) {
    MmResult r = descend(prob, start, opts);
    if (r.objective.back() < best.objective.back()) {
      r.start = idx;
      best = std::move(r);
    }
    ++idx;
  }
  return best;
}

}  // namespace irsfd
