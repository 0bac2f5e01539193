// Acceptance run: one PASS/FAIL line per criterion, exit code 1 if any fails.
//
//   irsfd_acceptance            all criteria
//   irsfd_acceptance 1 8 10     a subset

#include "irsfd/baselines.hpp"
#include "irsfd/channel_gen.hpp"
#include "irsfd/experiment.hpp"
#include "irsfd/irs_mm.hpp"
#include "irsfd/kron_expectation.hpp"
#include "irsfd/validation.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace irsfd;
using irsfd::testing::KroneckerDraw;

constexpr std::uint64_t kSeed = 20240611;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const Series& series(const SweepResult& r, const std::string& label) {
  for (const Series& s : r.series) {
    if (s.label == label) return s;
  }
  throw std::runtime_error("missing series " + label);
}

std::size_t point_index(const Series& s, double x) {
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (std::abs(s.points[i].x - x) <= 1e-12 * std::max(1.0, std::abs(x))) return i;
  }
  throw std::runtime_error("missing point");
}

// Mean and standard error of the per-scenario difference a - b.
std::pair<double, double> paired(const SeriesPoint& a, const SeriesPoint& b) {
  const std::size_t n = a.per_scenario.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a.per_scenario[i] - b.per_scenario[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.per_scenario[i] - b.per_scenario[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

// Shared sweeps, computed on first use.
struct Sweeps {
  std::optional<SweepResult> rho_sweep;       // full desk preset, threads = 1
  std::optional<std::string> rho_csv_parallel;  // same spec, threads = 4
  std::optional<SweepResult> snr_sweep;
  std::optional<SolverDiagnostics> monotone_diag;

  static ExperimentSpec desk_rho() {
    ExperimentSpec s = preset("desk");
    s.master_seed = kSeed;
    s.write_traces = false;
    s.threads = 1;
    return s;
  }

  const SweepResult& rho() {
    if (!rho_sweep) rho_sweep = run_experiment(desk_rho());
    return *rho_sweep;
  }

  const std::string& rho_parallel_csv() {
    if (!rho_csv_parallel) {
      ExperimentSpec s = desk_rho();
      s.threads = 4;
      rho_csv_parallel = results_csv(run_experiment(s));
    }
    return *rho_csv_parallel;
  }

  const SweepResult& snr() {
    if (!snr_sweep) {
      ExperimentSpec s = preset("desk");
      s.master_seed = kSeed;
      s.write_traces = false;
      s.sweep = SweepKind::snr;
      s.rho = 0.4;
      s.snr_db_list = {0.0, 10.0, 20.0, 30.0};
      s.schemes = {*parse_scheme("FD-IRS-RB"), *parse_scheme("FD-IRS-Non-RB")};
      s.analytical = false;
      snr_sweep = run_experiment(s);
    }
    return *snr_sweep;
  }
};

Sweeps g_sweeps;

Verdict criterion1() {
  Rng rng = Rng::substream(kSeed, {1});
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const int rows = 1 + static_cast<int>(rng.uniform() * 4.0);
    const int cols = 1 + static_cast<int>(rng.uniform() * 4.0);
    const Mat h = rng.complex_normal(rows, cols);
    const Mat j = random_psd(cols, 1.0, rng);
    const Mat k = random_psd(rows, 0.25 + rng.uniform(), rng);
    const Mat x = random_psd(cols, 1.0, rng);
    const Mat mc = irsfd::testing::mc_expect(h, j, k, x, false, 100000, rng);
    worst = std::max(worst, relative_error(mc, expect_hxh(h, j, k, x)));
  }
  return {worst <= 0.02, "worst Frobenius-relative error " + fmt("%.3e", worst) + " (tol 2e-2)"};
}

Verdict criterion2() {
  Rng rng = Rng::substream(kSeed, {2});
  double worst = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const RandomInstance ri = random_instance(small_config(), 0.3, rng);
    const SigmaPair s = build_sigma(ri.est, ri.err, ri.state.theta, ri.state.u_cov(),
                                    ri.state.v_cov(), ri.cfg);
    const irsfd::testing::McSigma mc = irsfd::testing::mc_sigma(ri, 100000, rng);
    worst = std::max({worst, relative_error(mc.ul, s.sigma_ul), relative_error(mc.dl, s.sigma_dl)});
  }
  return {worst <= 0.02, "worst Frobenius-relative error " + fmt("%.3e", worst) + " (tol 2e-2)"};
}

Verdict criterion3() {
  const SweepResult& r = g_sweeps.rho();
  const Series& mc = series(r, "FD-IRS-RB");
  const Series& lb = series(r, "Analytical FD-IRS-RB");
  bool pass = true;
  std::ostringstream os;
  for (double rho : {0.01, 0.1, 0.4, 1.0}) {
    const SeriesPoint& m = mc.points[point_index(mc, rho)];
    const SeriesPoint& l = lb.points[point_index(lb, rho)];
    const bool below = l.mean <= m.mean + 2.0 * m.std_error;
    const double rel = std::abs(m.mean - l.mean) / std::abs(m.mean);
    const bool tight = rho > 0.1 || rel <= 0.10;
    pass = pass && below && tight;
    os << " rho=" << rho << ": mc " << fmt("%.3f", m.mean) << " lb " << fmt("%.3f", l.mean)
       << " 2se " << fmt("%.3f", 2.0 * m.std_error) << " rel " << fmt("%.1f%%", 100.0 * rel)
       << (below ? "" : " [lb above mc+2se]") << (tight ? "" : " [gap > 10%]") << ";";
  }
  return {pass, os.str()};
}

Verdict criterion4() {
  const SweepResult& r = g_sweeps.rho();
  const Series& rb = series(r, "FD-IRS-RB");
  const Series& nr = series(r, "FD-IRS-Non-RB");
  const SeriesPoint& a = rb.points[point_index(rb, 0.4)];
  const SeriesPoint& b = nr.points[point_index(nr, 0.4)];
  const auto [diff, se] = paired(a, b);
  return {diff > 2.0 * se, "robust " + fmt("%.3f", a.mean) + " naive " + fmt("%.3f", b.mean) +
                               " paired diff " + fmt("%.3f", diff) + " 2se " + fmt("%.3f", 2.0 * se)};
}

Verdict criterion5() {
  const SweepResult& r = g_sweeps.snr();
  const Series& rb = series(r, "FD-IRS-RB");
  const Series& nr = series(r, "FD-IRS-Non-RB");
  std::vector<double> snr, gap;
  std::ostringstream os;
  for (std::size_t p = 0; p < rb.points.size(); ++p) {
    snr.push_back(rb.points[p].x);
    gap.push_back(rb.points[p].mean - nr.points[p].mean);
    os << " " << rb.points[p].x << "dB gap " << fmt("%.3f", gap.back()) << ";";
  }
  const double rs = irsfd::testing::spearman(snr, gap);
  return {rs <= 0.0, "spearman " + fmt("%.2f", rs) + " (need <= 0);" + os.str()};
}

Verdict criterion6() {
  const SweepResult& r = g_sweeps.rho();
  const Series& fd = series(r, "FD-IRS-RB");
  const Series& hd = series(r, "HD-IRS-RB");
  const double a = fd.points[point_index(fd, 0.4)].mean;
  const double b = hd.points[point_index(hd, 0.4)].mean;
  const double ratio = a / b;
  return {a > b && ratio > 1.0 && ratio <= 2.0,
          "FD " + fmt("%.3f", a) + " HD " + fmt("%.3f", b) + " ratio " + fmt("%.3f", ratio)};
}

Verdict criterion7() {
  const ExperimentSpec spec = preset("desk");
  SystemConfig cfg = spec.sys;
  const double snr = 1000.0;
  cfg.alpha0 = snr * cfg.sigmaj_sq;
  cfg.alphak = snr * cfg.sigma0_sq;
  CsiErrorPolicy pol = spec.csi;
  pol.rho = 0.4;
  const ErrorCovariances err = error_covariances(pol, snr, cfg);
  int converged = 0, violations = 0;
  double worst_drop = 0.0;
  SolverDiagnostics diag;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng = Rng::substream(kSeed, {7, i});
    const ChannelEstimates est = generate_estimates(cfg, spec.geo, rng);
    const SolveResult r = run_algorithm2(est, err, cfg, spec.solver);
    bool ok = true;
    for (std::size_t t = 1; t < r.trace.size(); ++t) {
      const double drop = (r.trace[t - 1] - r.trace[t]) / std::abs(r.trace[t - 1]);
      worst_drop = std::max(worst_drop, drop);
      if (drop > 1e-6) ok = false;
    }
    violations += ok ? 0 : 1;
    // Converged means the last relative change fell below 1e-4 within 200 sweeps.
    const std::size_t n = r.trace.size();
    if (n >= 2 && n <= 201 &&
        std::abs(r.trace[n - 1] - r.trace[n - 2]) < 1e-4 * std::abs(r.trace[n - 1])) {
      ++converged;
    }
    ++diag.runs;
    diag.max_power_excess = std::max({diag.max_power_excess, r.max_power_excess,
                                      r.state.power_ul() / cfg.alphak - 1.0,
                                      r.state.power_dl() / cfg.alpha0 - 1.0});
    diag.max_complementarity = std::max(diag.max_complementarity, r.max_complementarity);
  }
  g_sweeps.monotone_diag = diag;
  return {violations == 0 && converged >= 95,
          "non-monotone runs " + std::to_string(violations) + ", worst relative drop " +
              fmt("%.2e", worst_drop) + ", converged " + std::to_string(converged) + "/100"};
}

Verdict criterion8() {
  // (a) and (b) on desk-size problems taken after one solver sweep.
  const ExperimentSpec spec = preset("desk");
  SystemConfig cfg = spec.sys;
  cfg.alpha0 = cfg.alphak = 1000.0;
  CsiErrorPolicy pol = spec.csi;
  const ErrorCovariances err = error_covariances(pol, 1000.0, cfg);
  double modulus = 0.0, ascent = -INFINITY, consistency = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = Rng::substream(kSeed, {8, i});
    const ChannelEstimates est = generate_estimates(cfg, spec.geo, rng);
    BeamformingState st = initial_state(est, err, cfg, spec.solver);
    SolverOptions no_irs = spec.solver;
    no_irs.optimize_irs = false;
    st = ewmmse_sweep(est, err, st, cfg, no_irs);
    RealVec ang(cfg.rc());
    for (int k = 0; k < cfg.rc(); ++k) ang(k) = 2.0 * std::numbers::pi * rng.uniform();
    IrsPhase theta = IrsPhase::from_angles(ang);
    const StzMatrices m = build_stz(est, err, st, cfg);
    const MmProblem prob = build_mm_problem(m.s_mat, m.t_mat, m.z_mat);
    double prev = mm_objective(prob, theta.vec());
    for (int it = 0; it < 200; ++it) {
      theta = mm_step(prob, theta);
      modulus = std::max(modulus, (theta.vec().cwiseAbs().array() - 1.0).abs().maxCoeff());
      const double cur = mm_objective(prob, theta.vec());
      ascent = std::max(ascent, cur - prev);
      const double dense = irsfd::testing::trace_objective(m, theta.vec()) + prob.offset;
      consistency = std::max(consistency, std::abs(dense - cur) / std::max(1.0, std::abs(dense)));
      prev = cur;
    }
  }
  // (c) RC = 2 against the grid.
  double grid_gap = 0.0;
  Rng rng = Rng::substream(kSeed, {8, 1000});
  SystemConfig c2 = small_config();
  c2.irs_rows = 1;
  c2.irs_cols = 2;
  for (int i = 0; i < 20; ++i) {
    const RandomInstance ri = random_instance(c2, 0.3, rng);
    const StzMatrices m = build_stz(ri.est, ri.err, ri.state, ri.cfg);
    const MmProblem prob = build_mm_problem(m.s_mat, m.t_mat, m.z_mat);
    MmOptions o;
    o.inner_tol = 1e-14;
    o.max_inner_iters = 100000;
    const MmResult r = run_algorithm1(prob, ri.state.theta, o);
    const double got = irsfd::testing::trace_objective(m, r.theta.vec());
    grid_gap = std::max(grid_gap, std::abs(got - irsfd::testing::grid_min_rc2(m)));
  }
  const bool pass = modulus <= 1e-12 && ascent <= 1e-10 && grid_gap <= 1e-3 && consistency <= 1e-9;
  return {pass, "(a) max | |theta|-1 | " + fmt("%.2e", modulus) + " (b) max step increase " +
                    fmt("%.2e", ascent) + " (c) max grid gap " + fmt("%.2e", grid_gap) +
                    "; dense/vector objective mismatch " + fmt("%.2e", consistency)};
}

Verdict criterion9() {
  if (!g_sweeps.monotone_diag) criterion7();
  std::vector<SolverDiagnostics> all = {g_sweeps.rho().diag, g_sweeps.snr().diag,
                                        *g_sweeps.monotone_diag};
  double excess = 0.0, comp = 0.0;
  int runs = 0;
  for (const SolverDiagnostics& d : all) {
    excess = std::max(excess, d.max_power_excess);
    comp = std::max(comp, d.max_complementarity);
    runs += d.runs;
  }
  return {excess <= 1e-6 && comp <= 1e-6,
          std::to_string(runs) + " runs, max relative power excess " + fmt("%.2e", excess) +
              ", max relative complementarity " + fmt("%.2e", comp) + " (tol 1e-6)"};
}

Verdict criterion10() {
  Rng rng = Rng::substream(kSeed, {10});
  double worst = 0.0;
  const SolverOptions opts;
  for (int i = 0; i < 20; ++i) {
    RandomInstance ri = random_instance(irsfd::testing::desk_config(), 0.0, rng);
    ri.err = ErrorCovariances::zeros(ri.cfg);
    const BeamformingState a = ewmmse_sweep(ri.est, ri.err, ri.state, ri.cfg, opts);
    const BeamformingState b = reference_wmmse_sweep(ri.est, ri.state, ri.cfg, opts);
    for (auto [x, y] : {std::pair{&a.u_k, &b.u_k}, {&a.v_j, &b.v_j}, {&a.f_k, &b.f_k},
                        {&a.f_j, &b.f_j}, {&a.w_k, &b.w_k}, {&a.w_j, &b.w_j}}) {
      worst = std::max(worst, (*x - *y).cwiseAbs().maxCoeff());
    }
    worst = std::max(worst, (a.theta.vec() - b.theta.vec()).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "max entrywise block difference " + fmt("%.2e", worst) + " (tol 1e-9)"};
}

Verdict criterion11() {
  const std::string a = results_csv(g_sweeps.rho());
  const std::string& b = g_sweeps.rho_parallel_csv();
  return {a == b, "threads 1 vs 4: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "expectation_identity_mc", criterion1},
      {2, "sigma_covariance_mc", criterion2},
      {3, "lower_bound_vs_mc", criterion3},
      {4, "robust_beats_naive", criterion4},
      {5, "gap_trend_over_snr", criterion5},
      {6, "fd_beats_hd", criterion6},
      {7, "outer_loop_monotone", criterion7},
      {8, "mm_correctness", criterion8},
      {9, "power_kkt", criterion9},
      {10, "perfect_csi_reduction", criterion10},
      {11, "thread_reproducibility", criterion11},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += v.pass ? 0 : 1;
    std::printf("%s  C%-2d %-26s %6.1fs  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
