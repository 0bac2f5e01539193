#include "irsfd/ewmmse.hpp"

#include "irsfd/rate.hpp"
#include "irsfd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace irsfd {

void require_valid(const SolverOptions& opts) {
  std::vector<std::string> bad;
  if (!(opts.outer_tol > 0.0)) bad.push_back("outer_tol must be > 0");
  if (opts.max_outer_iters < 1) bad.push_back("max_outer_iters must be >= 1");
  if (!(opts.bisection_tol > 0.0)) bad.push_back("bisection_tol must be > 0");
  if (opts.max_bisection_iters < 1) bad.push_back("max_bisection_iters must be >= 1");
  if (!(opts.inner_irs.inner_tol > 0.0)) bad.push_back("inner_irs.inner_tol must be > 0");
  if (opts.inner_irs.max_inner_iters < 1) bad.push_back("inner_irs.max_inner_iters must be >= 1");
  if (bad.empty()) return;
  std::string msg = "invalid solver options:";
  for (const auto& b : bad) msg += " " + b + ";";
  throw ConfigError(msg);
}

namespace {

Mat identity(Eigen::Index n) { return Mat::Identity(n, n); }

Mat ul_channel(const ChannelEstimates& est, const ErrorCovariances& err, const Vec& t) {
  return estimate_channel(ul_view(est, err), t);
}

Mat dl_channel(const ChannelEstimates& est, const ErrorCovariances& err, const Vec& t) {
  return estimate_channel(dl_view(est, err), t);
}

Mat ul_rx_cov(const AuxExpectations& aux, const SystemConfig& cfg) {
  return aux.q_k + aux.t_0 + cfg.sigma0_sq * identity(cfg.n0);
}

Mat dl_rx_cov(const AuxExpectations& aux, const SystemConfig& cfg) {
  return aux.t_j + aux.q_jk + cfg.sigmaj_sq * identity(cfg.nj);
}

// F = P^H H^H R^{-1}
Mat mmse_combiner(const Mat& h, const Mat& p, const Mat& r) {
  return solve_hpd(r, h * p).adjoint();
}

// E = F R F^H - F H P - (F H P)^H + I, where R already holds the noise.
Mat mse_matrix(const Mat& f, const Mat& h, const Mat& p, const Mat& r) {
  const Mat fhp = f * h * p;
  return hermitian_part(f * r * f.adjoint() - fhp - fhp.adjoint() + identity(p.cols()));
}

Mat mse_weight(const Mat& e, double w) {
  Eigen::LLT<Mat> llt(hermitian_part(e));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("update_weights: expected MSE matrix is not positive definite");
  }
  return hermitian_part((w / std::numbers::ln2) * llt.solve(identity(e.rows())));
}

AuxExpectations aux_of(const ChannelEstimates& est, const ErrorCovariances& err,
                       const BeamformingState& s) {
  return build_aux(est, err, s.theta, s.u_cov(), s.v_cov());
}

void update_ul_combiner_and_weight(const ChannelEstimates& est, const ErrorCovariances& err,
                                   BeamformingState& s, const SystemConfig& cfg) {
  const AuxExpectations aux = aux_of(est, err, s);
  const Mat r = ul_rx_cov(aux, cfg);
  const Mat h = ul_channel(est, err, s.theta.vec());
  s.f_k = mmse_combiner(h, s.u_k, r);
  s.w_k = mse_weight(mse_matrix(s.f_k, h, s.u_k, r), cfg.wk);
}

void update_dl_combiner_and_weight(const ChannelEstimates& est, const ErrorCovariances& err,
                                   BeamformingState& s, const SystemConfig& cfg) {
  const AuxExpectations aux = aux_of(est, err, s);
  const Mat r = dl_rx_cov(aux, cfg);
  const Mat h = dl_channel(est, err, s.theta.vec());
  s.f_j = mmse_combiner(h, s.v_j, r);
  s.w_j = mse_weight(mse_matrix(s.f_j, h, s.v_j, r), cfg.wj);
}

struct SweepStats {
  PrecoderSolution ul;
  PrecoderSolution dl;
};

void track(SolveResult& r, const PrecoderSolution& p, double budget) {
  r.max_power_excess = std::max(r.max_power_excess, (p.power - budget) / budget);
  r.max_complementarity =
      std::max(r.max_complementarity, std::abs(p.lambda * (p.power - budget)) / budget);
}

void theta_step(const ChannelEstimates& est, const ErrorCovariances& err, BeamformingState& s,
                const SystemConfig& cfg, const SolverOptions& opts) {
  if (!opts.optimize_irs || cfg.rc() == 0) return;
  const StzMatrices m = build_stz(est, err, s, cfg);
  MmProblem prob = build_mm_problem(m.s_mat, m.t_mat, m.z_mat);
  prob.offset = weighted_mse_sum(est, err, s, cfg) - mm_objective(prob, s.theta.vec());
  s.theta = run_algorithm1(prob, s.theta, opts.inner_irs).theta;
}

SweepStats sweep_impl(const ChannelEstimates& est, const ErrorCovariances& err,
                      BeamformingState& s, const SystemConfig& cfg, const SolverOptions& opts) {
  SweepStats st;
  auto solve_ul = [&] {
    if (!opts.ul_active) return;
    const XMatrices x = build_x_matrices(est, err, s, cfg);
    st.ul = solve_precoder(x.x_k, x.rhs_k, cfg.alphak, opts);
    s.u_k = st.ul.u;
    s.lambda_k = st.ul.lambda;
  };
  auto solve_dl = [&] {
    if (!opts.dl_active) return;
    const XMatrices x = build_x_matrices(est, err, s, cfg);
    st.dl = solve_precoder(x.x_j, x.rhs_j, cfg.alpha0, opts);
    s.v_j = st.dl.u;
    s.lambda_0 = st.dl.lambda;
  };

  if (opts.order == UpdateOrder::per_user) {
    update_ul_combiner_and_weight(est, err, s, cfg);
    solve_ul();
    update_dl_combiner_and_weight(est, err, s, cfg);
    solve_dl();
  } else {
    const CombinerPair f = update_combiners(est, err, s, cfg);
    s.f_k = f.f_k;
    s.f_j = f.f_j;
    const WeightPair w = update_weights(expected_mse(est, err, s, cfg), cfg);
    s.w_k = w.w_k;
    s.w_j = w.w_j;
    const XMatrices x = build_x_matrices(est, err, s, cfg);
    if (opts.ul_active) {
      st.ul = solve_precoder(x.x_k, x.rhs_k, cfg.alphak, opts);
      s.u_k = st.ul.u;
      s.lambda_k = st.ul.lambda;
    }
    if (opts.dl_active) {
      st.dl = solve_precoder(x.x_j, x.rhs_j, cfg.alpha0, opts);
      s.v_j = st.dl.u;
      s.lambda_0 = st.dl.lambda;
    }
  }
  theta_step(est, err, s, cfg, opts);
  return st;
}

Mat scaled_to_power(Mat p, double budget) {
  const double n = p.squaredNorm();
  if (n > 0.0) p *= std::sqrt(budget / n);
  return p;
}

Mat svd_precoder(const Mat& h, int streams, double budget) {
  Eigen::JacobiSVD<Mat> svd(h, Eigen::ComputeFullV);
  return std::sqrt(budget / streams) * svd.matrixV().leftCols(streams);
}

}  // namespace

CombinerPair update_combiners(const ChannelEstimates& est, const ErrorCovariances& err,
                              const BeamformingState& state, const SystemConfig& cfg) {
  const AuxExpectations aux = aux_of(est, err, state);
  const Vec& t = state.theta.vec();
  return {mmse_combiner(ul_channel(est, err, t), state.u_k, ul_rx_cov(aux, cfg)),
          mmse_combiner(dl_channel(est, err, t), state.v_j, dl_rx_cov(aux, cfg))};
}

ExpectedMse expected_mse(const ChannelEstimates& est, const ErrorCovariances& err,
                         const BeamformingState& state, const SystemConfig& cfg) {
  const AuxExpectations aux = aux_of(est, err, state);
  const Vec& t = state.theta.vec();
  return {mse_matrix(state.f_k, ul_channel(est, err, t), state.u_k, ul_rx_cov(aux, cfg)),
          mse_matrix(state.f_j, dl_channel(est, err, t), state.v_j, dl_rx_cov(aux, cfg))};
}

WeightPair update_weights(const ExpectedMse& mse, const SystemConfig& cfg) {
  return {mse_weight(mse.e_k, cfg.wk), mse_weight(mse.e_j, cfg.wj)};
}

XMatrices build_x_matrices(const ChannelEstimates& est, const ErrorCovariances& err,
                           const BeamformingState& state, const SystemConfig& cfg) {
  require_shape(state.f_k, cfg.uk, cfg.n0, "build_x_matrices: f_k");
  require_shape(state.f_j, cfg.vj, cfg.nj, "build_x_matrices: f_j");
  require_shape(state.w_k, cfg.uk, cfg.uk, "build_x_matrices: w_k");
  require_shape(state.w_j, cfg.vj, cfg.vj, "build_x_matrices: w_j");
  const Vec& t = state.theta.vec();
  const Mat a_k = state.f_k.adjoint() * state.w_k * state.f_k;
  const Mat a_j = state.f_j.adjoint() * state.w_j * state.f_j;
  XMatrices x;
  x.x_k = hermitian_part(expect_cascade_inner(ul_view(est, err), t, a_k) +
                         expect_cascade_inner(cross_view(est, err), t, a_j));
  x.x_j = hermitian_part(expect_cascade_inner(dl_view(est, err), t, a_j) +
                         expect_cascade_inner(si_view(est, err), t, a_k));
  x.rhs_k = ul_channel(est, err, t).adjoint() * state.f_k.adjoint() * state.w_k;
  x.rhs_j = dl_channel(est, err, t).adjoint() * state.f_j.adjoint() * state.w_j;
  return x;
}

double precoder_power(const Mat& x, const Mat& rhs, double lambda) {
  return solve_hpd(x + lambda * identity(x.rows()), rhs).squaredNorm();
}

PrecoderSolution solve_precoder(const Mat& x, const Mat& rhs, double budget,
                                const SolverOptions& opts) {
  if (x.rows() != x.cols() || rhs.rows() != x.rows()) {
    throw ConfigError("solve_precoder: X must be square with as many rows as rhs");
  }
  if (!(budget > 0.0)) throw ConfigError("solve_precoder: budget must be positive");

  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(x));
  const RealVec lam = es.eigenvalues().cwiseMax(0.0);
  const Mat& q = es.eigenvectors();
  const Mat c = q.adjoint() * rhs;
  const RealVec c_norm = c.rowwise().squaredNorm();
  const double lam_max = lam.size() ? lam.maxCoeff() : 0.0;
  const double rank_tol = 1e-10 * std::max(lam_max, std::numeric_limits<double>::min());
  const double c_tol = 1e-16 * std::max(c_norm.sum(), std::numeric_limits<double>::min());

  auto power = [&](double l) {
    double p = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double d = l + lam(i);
      if (l == 0.0 && lam(i) <= rank_tol) {
        if (c_norm(i) > c_tol) return std::numeric_limits<double>::infinity();
        continue;
      }
      p += c_norm(i) / (d * d);
    }
    return p;
  };
  auto eigen_form = [&](double l) {
    RealVec inv(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      inv(i) = (l == 0.0 && lam(i) <= rank_tol) ? 0.0 : 1.0 / (l + lam(i));
    }
    return Mat(q * inv.cast<cplx>().asDiagonal() * c);
  };

  PrecoderSolution sol;
  const double tol = opts.bisection_tol * budget;
  if (power(0.0) <= budget) {
    sol.lambda = 0.0;
    const Mat u_eig = eigen_form(0.0);
    Eigen::LLT<Mat> llt(hermitian_part(x));
    const bool pd = llt.info() == Eigen::Success && lam.size() && lam.minCoeff() > rank_tol;
    sol.u = pd ? Mat(llt.solve(rhs)) : u_eig;
    sol.form_mismatch = relative_error(sol.u, u_eig);
  } else {
    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (power(hi) > budget) {
      lo = hi;
      hi *= 2.0;
      if (++doublings > 2000) throw NumericalError("solve_precoder: cannot bracket multiplier");
    }
    double mid = hi;
    bool done = false;
    for (int it = 0; it < opts.max_bisection_iters; ++it) {
      mid = 0.5 * (lo + hi);
      const double p = power(mid);
      ++sol.bisection_iters;
      // Large multipliers amplify the power gap in lambda * (p - budget), so
      // the complementarity residual gets the same tolerance.
      const double gap = std::abs(p - budget);
      if (gap <= tol && mid * gap <= tol) {
        done = true;
        break;
      }
      if (gap <= tol && hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
        done = true;
        break;
      }
      (p > budget ? lo : hi) = mid;
    }
    if (!done) {
      std::ostringstream os;
      os << "solve_precoder: bisection did not converge after " << opts.max_bisection_iters
         << " iterations (bracket [" << lo << ", " << hi << "], power " << power(mid)
         << ", budget " << budget << ")";
      throw NumericalError(os.str());
    }
    sol.lambda = mid;
    sol.u = solve_hpd(x + mid * identity(x.rows()), rhs);
    sol.form_mismatch = relative_error(sol.u, eigen_form(mid));
  }
  sol.power = sol.u.squaredNorm();
  return sol;
}

PrecoderUpdate update_precoders(const ChannelEstimates& est, const ErrorCovariances& err,
                                const BeamformingState& state, const SystemConfig& cfg,
                                const SolverOptions& opts) {
  const XMatrices x = build_x_matrices(est, err, state, cfg);
  PrecoderUpdate up;
  up.ul = solve_precoder(x.x_k, x.rhs_k, cfg.alphak, opts);
  up.dl = solve_precoder(x.x_j, x.rhs_j, cfg.alpha0, opts);
  return up;
}

double weighted_mse_sum(const ChannelEstimates& est, const ErrorCovariances& err,
                        const BeamformingState& state, const SystemConfig& cfg) {
  const ExpectedMse e = expected_mse(est, err, state, cfg);
  return (state.w_k * e.e_k).trace().real() + (state.w_j * e.e_j).trace().real();
}

BeamformingState initial_state(const ChannelEstimates& est, const ErrorCovariances& err,
                               const SystemConfig& cfg, const SolverOptions& opts) {
  require_valid(cfg);
  require_valid(opts);
  require_consistent(cfg, static_cast<const ChannelSet&>(est));
  require_consistent(cfg, err);

  BeamformingState s = BeamformingState::zeros(cfg);
  const Vec& t = s.theta.vec();
  switch (opts.init_policy) {
    case InitPolicy::svd_estimate:
      s.u_k = svd_precoder(ul_channel(est, err, t), cfg.uk, cfg.alphak);
      s.v_j = svd_precoder(dl_channel(est, err, t), cfg.vj, cfg.alpha0);
      break;
    case InitPolicy::scaled_identity:
      s.u_k = std::sqrt(cfg.alphak / cfg.uk) * Mat::Identity(cfg.mk, cfg.uk);
      s.v_j = std::sqrt(cfg.alpha0 / cfg.vj) * Mat::Identity(cfg.m0, cfg.vj);
      break;
    case InitPolicy::random: {
      Rng rng(opts.init_seed);
      s.u_k = scaled_to_power(rng.complex_normal(cfg.mk, cfg.uk), cfg.alphak);
      s.v_j = scaled_to_power(rng.complex_normal(cfg.m0, cfg.vj), cfg.alpha0);
      break;
    }
  }
  if (!opts.ul_active) s.u_k.setZero();
  if (!opts.dl_active) s.v_j.setZero();
  const CombinerPair f = update_combiners(est, err, s, cfg);
  s.f_k = f.f_k;
  s.f_j = f.f_j;
  const WeightPair w = update_weights(expected_mse(est, err, s, cfg), cfg);
  s.w_k = w.w_k;
  s.w_j = w.w_j;
  return s;
}

BeamformingState ewmmse_sweep(const ChannelEstimates& est, const ErrorCovariances& err,
                              const BeamformingState& state, const SystemConfig& cfg,
                              const SolverOptions& opts) {
  BeamformingState s = state;
  sweep_impl(est, err, s, cfg, opts);
  return s;
}

SolveResult run_algorithm2(const ChannelEstimates& est, const ErrorCovariances& err,
                           const SystemConfig& cfg, const SolverOptions& opts) {
  SolveResult r;
  r.state = initial_state(est, err, cfg, opts);
  auto record = [&](int it) {
    const double lb = ergodic_wsr_lb(est, err, r.state, cfg).wsr_total;
    r.trace.push_back(lb);
    r.records.push_back({it, lb, r.state.power_ul(), r.state.power_dl(), r.state.lambda_k,
                         r.state.lambda_0});
  };
  record(0);
  for (int it = 1; it <= opts.max_outer_iters; ++it) {
    const SweepStats st = sweep_impl(est, err, r.state, cfg, opts);
    if (opts.ul_active) track(r, st.ul, cfg.alphak);
    if (opts.dl_active) track(r, st.dl, cfg.alpha0);
    record(it);
    r.iterations = it;
    const double cur = r.trace.back();
    const double prev = r.trace[r.trace.size() - 2];
    if (std::abs(cur - prev) <= opts.outer_tol * std::abs(cur)) {
      r.converged = true;
      break;
    }
  }
  // Leave combiners and weights matched to the final precoders and phases.
  const CombinerPair f = update_combiners(est, err, r.state, cfg);
  r.state.f_k = f.f_k;
  r.state.f_j = f.f_j;
  const WeightPair w = update_weights(expected_mse(est, err, r.state, cfg), cfg);
  r.state.w_k = w.w_k;
  r.state.w_j = w.w_j;
  return r;
}

namespace {

// diag(N M) without the full product.
Vec diag_of_product(const Mat& n, const Mat& m) {
  return n.cwiseProduct(m.transpose()).rowwise().sum();
}

}  // namespace

BeamformingState reference_wmmse_sweep(const ChannelEstimates& est, const BeamformingState& state,
                                       const SystemConfig& cfg, const SolverOptions& opts) {
  BeamformingState s = state;
  const Mat i_n0 = identity(cfg.n0);
  const Mat i_nj = identity(cfg.nj);

  auto channels = [&] { return compose_effective_channels(est, s.theta); };
  auto ul_fw = [&] {
    const EffectiveChannels h = channels();
    const Mat sig = h.h_bar_k * s.u_k;
    const Mat si = h.h_bar_0 * s.v_j;
    const Mat r = sig * sig.adjoint() + si * si.adjoint() + cfg.sigma0_sq * i_n0;
    s.f_k = sig.adjoint() * r.inverse();
    const Mat d = identity(cfg.uk) - s.f_k * sig;
    const Mat e = d * d.adjoint() + s.f_k * (si * si.adjoint() + cfg.sigma0_sq * i_n0) *
                                        s.f_k.adjoint();
    s.w_k = (cfg.wk / std::numbers::ln2) * e.inverse();
  };
  auto dl_fw = [&] {
    const EffectiveChannels h = channels();
    const Mat sig = h.h_bar_j * s.v_j;
    const Mat cr = h.h_bar_jk * s.u_k;
    const Mat r = sig * sig.adjoint() + cr * cr.adjoint() + cfg.sigmaj_sq * i_nj;
    s.f_j = sig.adjoint() * r.inverse();
    const Mat d = identity(cfg.vj) - s.f_j * sig;
    const Mat e = d * d.adjoint() + s.f_j * (cr * cr.adjoint() + cfg.sigmaj_sq * i_nj) *
                                        s.f_j.adjoint();
    s.w_j = (cfg.wj / std::numbers::ln2) * e.inverse();
  };
  auto ul_p = [&] {
    if (!opts.ul_active) return;
    const EffectiveChannels h = channels();
    const Mat a_k = s.f_k.adjoint() * s.w_k * s.f_k;
    const Mat a_j = s.f_j.adjoint() * s.w_j * s.f_j;
    const Mat x = h.h_bar_k.adjoint() * a_k * h.h_bar_k + h.h_bar_jk.adjoint() * a_j * h.h_bar_jk;
    const Mat rhs = h.h_bar_k.adjoint() * s.f_k.adjoint() * s.w_k;
    const PrecoderSolution p = solve_precoder(x, rhs, cfg.alphak, opts);
    s.u_k = p.u;
    s.lambda_k = p.lambda;
  };
  auto dl_p = [&] {
    if (!opts.dl_active) return;
    const EffectiveChannels h = channels();
    const Mat a_k = s.f_k.adjoint() * s.w_k * s.f_k;
    const Mat a_j = s.f_j.adjoint() * s.w_j * s.f_j;
    const Mat x = h.h_bar_j.adjoint() * a_j * h.h_bar_j + h.h_bar_0.adjoint() * a_k * h.h_bar_0;
    const Mat rhs = h.h_bar_j.adjoint() * s.f_j.adjoint() * s.w_j;
    const PrecoderSolution p = solve_precoder(x, rhs, cfg.alpha0, opts);
    s.v_j = p.u;
    s.lambda_0 = p.lambda;
  };

  if (opts.order == UpdateOrder::per_user) {
    ul_fw();
    ul_p();
    dl_fw();
    dl_p();
  } else {
    ul_fw();
    dl_fw();
    ul_p();
    dl_p();
  }

  if (opts.optimize_irs && cfg.rc() > 0) {
    // Every theta-dependent part of Tr(W_k E_k) + Tr(W_j E_j) with exact
    // channels: each receiver sees the reflected path out diag(theta) in.
    const Mat a_k = s.f_k.adjoint() * s.w_k * s.f_k;
    const Mat a_j = s.f_j.adjoint() * s.w_j * s.f_j;
    const Mat u_cov = s.u_cov();
    const Mat v_cov = s.v_cov();
    const Mat z = est.h_0theta.adjoint() * a_k * est.h_0theta +
                  est.h_jtheta.adjoint() * a_j * est.h_jtheta;
    const Mat t = est.h_thetak * u_cov * est.h_thetak.adjoint() +
                  est.h_theta0 * v_cov * est.h_theta0.adjoint();
    // Linear coefficient of Re Tr(M diag(theta) N) is diag(N M).
    Vec lin = diag_of_product(est.h_thetak * u_cov * est.h_k.adjoint(), a_k * est.h_0theta) +
              diag_of_product(est.h_theta0 * v_cov * est.h_0.adjoint(), a_k * est.h_0theta) -
              diag_of_product(est.h_thetak * s.u_k, s.w_k * s.f_k * est.h_0theta) +
              diag_of_product(est.h_theta0 * v_cov * est.h_j.adjoint(), a_j * est.h_jtheta) +
              diag_of_product(est.h_thetak * u_cov * est.h_jk.adjoint(), a_j * est.h_jtheta) -
              diag_of_product(est.h_theta0 * s.v_j, s.w_j * s.f_j * est.h_jtheta);
    MmProblem prob;
    prob.big_sigma = hermitian_part(z.cwiseProduct(t.transpose()));
    prob.s_vec = lin;
    prob.lambda_max = max_eigenvalue(prob.big_sigma);
    const ErrorCovariances zero = ErrorCovariances::zeros(cfg);
    prob.offset = weighted_mse_sum(est, zero, s, cfg) - mm_objective(prob, s.theta.vec());
    s.theta = run_algorithm1(prob, s.theta, opts.inner_irs).theta;
  }
  return s;
}

}  // namespace irsfd
