#include "irsfd/validation.hpp"

#include "irsfd/channel_gen.hpp"
#include "irsfd/rate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

namespace irsfd {

bool ValidationReport::all_passed() const {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return !results.empty();
}

SystemConfig small_config() {
  SystemConfig c;
  c.m0 = 3;
  c.n0 = 2;
  c.mk = 2;
  c.nj = 2;
  c.uk = 2;
  c.vj = 2;
  c.irs_rows = 1;
  c.irs_cols = 3;
  c.alpha0 = 2.0;
  c.alphak = 2.0;
  return c;
}

Mat random_psd(int n, double scale, Rng& rng) {
  const Mat a = rng.complex_normal(n, n);
  Mat p = a * a.adjoint();
  const double tr = p.trace().real();
  if (tr > 0.0) p *= scale * n / tr;
  return hermitian_part(p);
}

RandomInstance random_instance(const SystemConfig& cfg, double error_scale, Rng& rng) {
  RandomInstance inst;
  inst.cfg = cfg;
  ChannelSet ch;
  for (Link l : kAllLinks) {
    const LinkShape sh = link_shape(cfg, l);
    ch[l] = rng.complex_normal(sh.rows, sh.cols);
    inst.err[l] = {random_psd(sh.cols, 1.0, rng), random_psd(sh.rows, error_scale, rng)};
  }
  inst.est = ChannelEstimates(std::move(ch));

  BeamformingState& s = inst.state;
  s = BeamformingState::zeros(cfg);
  s.u_k = rng.complex_normal(cfg.mk, cfg.uk);
  s.u_k *= std::sqrt(cfg.alphak / s.u_k.squaredNorm());
  s.v_j = rng.complex_normal(cfg.m0, cfg.vj);
  s.v_j *= std::sqrt(cfg.alpha0 / s.v_j.squaredNorm());
  s.f_k = rng.complex_normal(cfg.uk, cfg.n0);
  s.f_j = rng.complex_normal(cfg.vj, cfg.nj);
  s.w_k = random_psd(cfg.uk, 1.0, rng) + 0.1 * Mat::Identity(cfg.uk, cfg.uk);
  s.w_j = random_psd(cfg.vj, 1.0, rng) + 0.1 * Mat::Identity(cfg.vj, cfg.vj);
  RealVec angles(cfg.rc());
  for (int i = 0; i < cfg.rc(); ++i) angles(i) = 2.0 * std::numbers::pi * rng.uniform();
  s.theta = IrsPhase::from_angles(angles);
  return inst;
}

SigmaPair sigma_with_flip(const RandomInstance& inst, int flip_ul_term) {
  SigmaTerms terms = build_sigma_terms(inst.est, inst.err, inst.state.theta, inst.state.u_cov(),
                                       inst.state.v_cov(), inst.cfg);
  if (flip_ul_term >= 0 && flip_ul_term < static_cast<int>(terms.ul.size())) {
    terms.ul[static_cast<std::size_t>(flip_ul_term)].value *= -1.0;
  }
  return sum_terms(terms);
}

namespace {

OracleResult make(std::string name, double measured, double tol, std::string detail = {}) {
  return {std::move(name), measured, tol, measured <= tol, std::move(detail)};
}

// Worst relative error of expect_hxh / expect_hhx over random 3x2 instances.
OracleResult kron_oracle(bool inner, int draws, Rng& rng) {
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const Mat h = rng.complex_normal(3, 2);
    const Mat j = random_psd(2, 1.0, rng);
    const Mat k = random_psd(3, 0.5, rng);
    const Mat x = random_psd(inner ? 3 : 2, 1.0, rng);
    const Mat ks = psd_sqrt(k), jts = psd_sqrt(j.transpose());
    Mat acc = Mat::Zero(inner ? 2 : 3, inner ? 2 : 3);
    for (int n = 0; n < draws; ++n) {
      const Mat hh = h + ks * rng.complex_normal(3, 2) * jts;
      acc += inner ? Mat(hh.adjoint() * x * hh) : Mat(hh * x * hh.adjoint());
    }
    acc /= static_cast<double>(draws);
    const Mat exact = inner ? expect_hhx(h, j, k, x) : expect_hxh(h, j, k, x);
    worst = std::max(worst, relative_error(acc, exact));
  }
  return make(inner ? "kron_identity_hhx_mc" : "kron_identity_hxh_mc", worst, 0.02);
}

struct SampledCovariances {
  Mat sigma_ul, sigma_dl;
  Mat mse_k, mse_j;
};

SampledCovariances sample_covariances(const RandomInstance& inst, int draws, Rng& rng) {
  const SystemConfig& c = inst.cfg;
  const BeamformingState& s = inst.state;
  const ErrorSampler sampler(inst.err);
  const Mat u_cov = s.u_cov(), v_cov = s.v_cov();
  SampledCovariances out{Mat::Zero(c.n0, c.n0), Mat::Zero(c.nj, c.nj), Mat::Zero(c.uk, c.uk),
                         Mat::Zero(c.vj, c.vj)};
  const Mat i_k = Mat::Identity(c.uk, c.uk), i_j = Mat::Identity(c.vj, c.vj);
  for (int n = 0; n < draws; ++n) {
    const TrueChannels tc = sampler.sample(inst.est, rng);
    const EffectiveChannels h = compose_effective_channels(tc, s.theta);
    const Mat si = h.h_bar_0 * s.v_j, cr = h.h_bar_jk * s.u_k;
    const Mat rk = h.h_bar_k * u_cov * h.h_bar_k.adjoint() + si * si.adjoint();
    const Mat rj = h.h_bar_j * v_cov * h.h_bar_j.adjoint() + cr * cr.adjoint();
    out.sigma_ul += rk;
    out.sigma_dl += rj;
    const Mat ek = s.f_k * h.h_bar_k * s.u_k - i_k;
    const Mat ej = s.f_j * h.h_bar_j * s.v_j - i_j;
    out.mse_k += ek * ek.adjoint() + s.f_k * (si * si.adjoint()) * s.f_k.adjoint();
    out.mse_j += ej * ej.adjoint() + s.f_j * (cr * cr.adjoint()) * s.f_j.adjoint();
  }
  const double inv = 1.0 / draws;
  const Mat hk = compose_effective_channels(inst.est, s.theta).h_bar_k;
  const Mat hj = compose_effective_channels(inst.est, s.theta).h_bar_j;
  out.sigma_ul = out.sigma_ul * inv - hk * u_cov * hk.adjoint() +
                 c.sigma0_sq * Mat::Identity(c.n0, c.n0);
  out.sigma_dl = out.sigma_dl * inv - hj * v_cov * hj.adjoint() +
                 c.sigmaj_sq * Mat::Identity(c.nj, c.nj);
  out.mse_k = out.mse_k * inv + c.sigma0_sq * s.f_k * s.f_k.adjoint();
  out.mse_j = out.mse_j * inv + c.sigmaj_sq * s.f_j * s.f_j.adjoint();
  return out;
}

double mm_grid_gap(Rng& rng) {
  // RC = 2 quadratic with random PSD Z, T and random S, brute force over a
  // phase grid refined around the best cell.
  const Mat z = random_psd(2, 1.0, rng), t = random_psd(2, 1.0, rng);
  const Mat s = rng.complex_normal(2, 2);
  const MmProblem prob = build_mm_problem(s, t, z);
  MmOptions mo;
  mo.inner_tol = 1e-14;
  mo.max_inner_iters = 5000;
  const MmResult r = run_algorithm1(prob, IrsPhase::ones(2), mo);
  const double mm_val = mm_objective(prob, r.theta.vec());

  auto eval = [&](double a, double b) {
    RealVec ang(2);
    ang << a, b;
    return mm_objective(prob, IrsPhase::from_angles(ang).vec());
  };
  const int n = 360;
  const double step = 2.0 * std::numbers::pi / n;
  double best = INFINITY, ba = 0.0, bb = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double v = eval(i * step, k * step);
      if (v < best) {
        best = v;
        ba = i * step;
        bb = k * step;
      }
    }
  }
  double h = step;
  for (int it = 0; it < 60; ++it) {
    bool moved = false;
    for (int da = -1; da <= 1; ++da) {
      for (int db = -1; db <= 1; ++db) {
        const double v = eval(ba + da * h, bb + db * h);
        if (v < best - 1e-15) {
          best = v;
          ba += da * h;
          bb += db * h;
          moved = true;
        }
      }
    }
    if (!moved) h *= 0.5;
  }
  return mm_val - best;
}

}  // namespace

ValidationReport run_validation_suite(const ValidationOptions& opts, std::ostream* log) {
  const auto t0 = std::chrono::steady_clock::now();
  ValidationReport rep;
  auto add = [&](OracleResult r) {
    if (log) {
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%-34s %s  measured %.3e  tol %.1e", r.name.c_str(),
                    r.passed ? "PASS" : "FAIL", r.measured, r.tolerance);
      *log << buf;
      if (!r.detail.empty()) *log << "  (" << r.detail << ")";
      *log << "\n";
    }
    rep.results.push_back(std::move(r));
  };
  Rng rng = Rng::substream(opts.seed, {0});

  add(kron_oracle(false, opts.mc_draws, rng));
  add(kron_oracle(true, opts.mc_draws, rng));

  // Interference covariance and expected MSE against joint error draws.
  {
    double worst_sigma = 0.0, worst_mse = 0.0;
    for (int t = 0; t < 3; ++t) {
      const RandomInstance inst = random_instance(small_config(), 0.3, rng);
      const SampledCovariances mc = sample_covariances(inst, opts.mc_draws, rng);
      const SigmaPair sig = sigma_with_flip(inst, opts.flip_sigma_ul_term);
      worst_sigma = std::max({worst_sigma, relative_error(mc.sigma_ul, sig.sigma_ul),
                              relative_error(mc.sigma_dl, sig.sigma_dl)});
      const ExpectedMse e = expected_mse(inst.est, inst.err, inst.state, inst.cfg);
      worst_mse = std::max({worst_mse, relative_error(mc.mse_k, e.e_k), relative_error(mc.mse_j, e.e_j)});
    }
    add(make("sigma_covariance_mc", worst_sigma, 0.02));
    add(make("expected_mse_mc", worst_mse, 0.02));
  }

  // Combiner optimality under random perturbations.
  {
    double worst = -INFINITY;
    for (int t = 0; t < 3; ++t) {
      RandomInstance inst = random_instance(small_config(), 0.3, rng);
      const CombinerPair f = update_combiners(inst.est, inst.err, inst.state, inst.cfg);
      inst.state.f_k = f.f_k;
      inst.state.f_j = f.f_j;
      const ExpectedMse e0 = expected_mse(inst.est, inst.err, inst.state, inst.cfg);
      const double base = e0.e_k.trace().real() + e0.e_j.trace().real();
      for (int p = 0; p < 50; ++p) {
        BeamformingState s = inst.state;
        s.f_k += 1e-3 * rng.complex_normal(s.f_k.rows(), s.f_k.cols());
        s.f_j += 1e-3 * rng.complex_normal(s.f_j.rows(), s.f_j.cols());
        const ExpectedMse e = expected_mse(inst.est, inst.err, s, inst.cfg);
        worst = std::max(worst, base - (e.e_k.trace().real() + e.e_j.trace().real()));
      }
    }
    add(make("combiner_perturbation", std::max(worst, 0.0), 1e-12,
             "largest decrease of Tr E under perturbation"));
  }

  // Precoder stationarity, complementarity and eigen/direct agreement.
  {
    double stat = 0.0, comp = 0.0, mismatch = 0.0, excess = 0.0;
    SolverOptions so;
    for (int t = 0; t < 5; ++t) {
      RandomInstance inst = random_instance(small_config(), 0.3, rng);
      const XMatrices x = build_x_matrices(inst.est, inst.err, inst.state, inst.cfg);
      for (double budget : {1e-6, inst.cfg.alphak, 1e9}) {
        const PrecoderSolution p = solve_precoder(x.x_k, x.rhs_k, budget, so);
        const Mat r = (x.x_k + p.lambda * Mat::Identity(x.x_k.rows(), x.x_k.cols())) * p.u - x.rhs_k;
        stat = std::max(stat, r.norm() / std::max(1.0, x.rhs_k.norm()));
        comp = std::max(comp, std::abs(p.lambda * (p.power - budget)) / budget);
        excess = std::max(excess, (p.power - budget) / budget);
        mismatch = std::max(mismatch, p.form_mismatch);
      }
    }
    add(make("precoder_stationarity", stat, 1e-8));
    add(make("precoder_complementarity", comp, 1e-6));
    add(make("precoder_power_excess", std::max(excess, 0.0), 1e-6));
    add(make("precoder_eigen_vs_direct", mismatch, 1e-8));
  }

  // The theta quadratic reproduces differences of the weighted MSE sum.
  {
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      RandomInstance inst = random_instance(small_config(), 0.3, rng);
      const StzMatrices m = build_stz(inst.est, inst.err, inst.state, inst.cfg);
      const MmProblem prob = build_mm_problem(m.s_mat, m.t_mat, m.z_mat);
      BeamformingState other = inst.state;
      RealVec ang(inst.cfg.rc());
      for (int i = 0; i < ang.size(); ++i) ang(i) = 2.0 * std::numbers::pi * rng.uniform();
      other.theta = IrsPhase::from_angles(ang);
      const double d_true = weighted_mse_sum(inst.est, inst.err, inst.state, inst.cfg) -
                            weighted_mse_sum(inst.est, inst.err, other, inst.cfg);
      const double d_quad =
          mm_objective(prob, inst.state.theta.vec()) - mm_objective(prob, other.theta.vec());
      worst = std::max(worst, std::abs(d_true - d_quad) / std::max(1.0, std::abs(d_true)));
    }
    add(make("theta_quadratic_consistency", worst, 1e-9));
  }

  // MM: unit modulus, descent and agreement with a grid search at RC = 2.
  {
    double modulus = 0.0, ascent = 0.0;
    for (int t = 0; t < 5; ++t) {
      RandomInstance inst = random_instance(small_config(), 0.3, rng);
      const StzMatrices m = build_stz(inst.est, inst.err, inst.state, inst.cfg);
      const MmProblem prob = build_mm_problem(m.s_mat, m.t_mat, m.z_mat);
      IrsPhase th = inst.state.theta;
      double prev = mm_objective(prob, th.vec());
      for (int it = 0; it < 50; ++it) {
        th = mm_step(prob, th);
        modulus = std::max(modulus, (th.vec().cwiseAbs().array() - 1.0).abs().maxCoeff());
        const double cur = mm_objective(prob, th.vec());
        ascent = std::max(ascent, cur - prev);
        prev = cur;
      }
    }
    add(make("mm_unit_modulus", modulus, 1e-12));
    add(make("mm_descent", std::max(ascent, 0.0), 1e-10));
    double gap = 0.0;
    for (int t = 0; t < 5; ++t) gap = std::max(gap, mm_grid_gap(rng));
    add(make("mm_grid_search_rc2", std::max(gap, 0.0), 1e-3));
  }

  // Jensen direction of the lower bound.
  {
    double worst = -INFINITY;
    for (int t = 0; t < 5; ++t) {
      RandomInstance inst = random_instance(small_config(), 0.3, rng);
      const RateReport lb = ergodic_wsr_lb(inst.est, inst.err, inst.state, inst.cfg);
      const RateReport mc = monte_carlo_wsr(inst.est, inst.err, inst.state, inst.cfg, 2000, rng);
      worst = std::max(worst, lb.wsr_total - (mc.wsr_total + 2.0 * mc.std_error));
    }
    add(make("lower_bound_below_mc", std::max(worst, 0.0), 0.0, "lb - (mc + 2 stderr)"));
  }

  // Zero-error sweep against the textbook WMMSE path.
  {
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      RandomInstance inst = random_instance(small_config(), 0.0, rng);
      const ErrorCovariances zero = ErrorCovariances::zeros(inst.cfg);
      SolverOptions so;
      const BeamformingState init = initial_state(inst.est, zero, inst.cfg, so);
      const BeamformingState a = ewmmse_sweep(inst.est, zero, init, inst.cfg, so);
      const BeamformingState b = reference_wmmse_sweep(inst.est, init, inst.cfg, so);
      for (const auto& [x, y] : {std::pair{&a.u_k, &b.u_k}, {&a.v_j, &b.v_j}, {&a.f_k, &b.f_k},
                                 {&a.f_j, &b.f_j}, {&a.w_k, &b.w_k}, {&a.w_j, &b.w_j}}) {
        worst = std::max(worst, relative_error(*x, *y));
      }
      worst = std::max(worst, (a.theta.vec() - b.theta.vec()).norm());
    }
    add(make("perfect_csi_reduction", worst, 1e-9));
  }

  // Outer-loop monotonicity on a few small instances.
  {
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      RandomInstance inst = random_instance(small_config(), 0.1, rng);
      SolverOptions so;
      so.max_outer_iters = 50;
      const SolveResult r = run_algorithm2(inst.est, inst.err, inst.cfg, so);
      for (std::size_t i = 1; i < r.trace.size(); ++i) {
        worst = std::max(worst, (r.trace[i - 1] - r.trace[i]) / std::abs(r.trace[i - 1]));
      }
    }
    add(make("outer_loop_monotone", worst, 1e-6, "largest relative drop of the bound"));
  }

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace irsfd
