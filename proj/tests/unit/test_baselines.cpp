#include "irsfd/baselines.hpp"
#include "irsfd/experiment.hpp"
#include "irsfd/validation.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace irsfd {
namespace {

TEST(Schemes, LabelsRoundTrip) {
  const auto all = all_schemes();
  ASSERT_EQ(all.size(), 8u);
  EXPECT_EQ(all.front().label(), "FD-IRS-RB");
  std::set<std::string> seen;
  for (const SchemeId& s : all) {
    seen.insert(s.label());
    const auto back = parse_scheme(s.label());
    ASSERT_TRUE(back.has_value());
    EXPECT_TRUE(*back == s);
  }
  EXPECT_EQ(seen.size(), 8u);
  EXPECT_TRUE(seen.count("HD-No-IRS-Non-RB"));
  EXPECT_FALSE(parse_scheme("FD-IRS").has_value());
}

TEST(SchemeChannels, LinksRemovedPerScheme) {
  Rng rng(1);
  const RandomInstance inst = random_instance(small_config(), 0.3, rng);
  const SchemeChannels hd = scheme_channels({Duplex::hd, IrsMode::no_irs, Robustness::robust},
                                            inst.est, inst.err, inst.cfg);
  EXPECT_EQ(hd.est.h_0.norm(), 0.0);
  EXPECT_EQ(hd.est.h_jk.norm(), 0.0);
  for (Link l : kIrsLinks) {
    EXPECT_EQ(hd.est[l].norm(), 0.0);
    EXPECT_EQ(hd.eval_err[l].k_cov.norm(), 0.0);
  }
  EXPECT_EQ(hd.est.h_k, inst.est.h_k);
  EXPECT_EQ(hd.design_err[Link::ul_direct].k_cov, inst.err[Link::ul_direct].k_cov);

  const SchemeChannels nr = scheme_channels({Duplex::fd, IrsMode::with_irs, Robustness::non_robust},
                                            inst.est, inst.err, inst.cfg);
  for (Link l : kAllLinks) {
    EXPECT_EQ(nr.design_err[l].k_cov.norm(), 0.0);
    EXPECT_EQ(nr.eval_err[l].k_cov, inst.err[l].k_cov);
  }
}

TEST(SolveScheme, ZeroErrorsMakeRobustAndNaiveCoincide) {
  Rng rng(2);
  const SystemConfig cfg = testing::desk_config();
  const ChannelEstimates est = generate_estimates(cfg, {}, rng);
  const ErrorCovariances zero = ErrorCovariances::zeros(cfg);
  Rng r1(5), r2(5);
  const SchemeOutcome a = solve_scheme({Duplex::fd, IrsMode::with_irs, Robustness::robust}, est,
                                       zero, cfg, {}, 10, r1);
  const SchemeOutcome b = solve_scheme({Duplex::fd, IrsMode::with_irs, Robustness::non_robust},
                                       est, zero, cfg, {}, 10, r2);
  EXPECT_LT((a.runs[0].state.u_k - b.runs[0].state.u_k).norm(), 1e-9);
  EXPECT_LT((a.runs[0].state.v_j - b.runs[0].state.v_j).norm(), 1e-9);
  EXPECT_LT((a.runs[0].state.theta.vec() - b.runs[0].state.theta.vec()).norm(), 1e-9);
  EXPECT_EQ(a.mc.wsr_total, b.mc.wsr_total);
}

TEST(SolveScheme, HalfDuplexAveragesTwoInterferenceFreeSlots) {
  Rng rng(3);
  SystemConfig cfg = testing::desk_config();
  cfg.alpha0 = cfg.alphak = 100.0;
  const ChannelEstimates est = generate_estimates(cfg, {}, rng);
  CsiErrorPolicy pol;
  const ErrorCovariances err = error_covariances(pol, 100.0, cfg);
  const SchemeId hd{Duplex::hd, IrsMode::with_irs, Robustness::robust};
  Rng r(7);
  const SchemeOutcome out = solve_scheme(hd, est, err, cfg, {}, 20, r);
  ASSERT_EQ(out.runs.size(), 2u);
  EXPECT_EQ(out.runs[0].state.v_j.norm(), 0.0);
  EXPECT_EQ(out.runs[1].state.u_k.norm(), 0.0);
  const SchemeChannels sc = scheme_channels(hd, est, err, cfg);
  const double ul = ergodic_wsr_lb(sc.est, sc.eval_err, out.runs[0].state, cfg).wsr_total;
  const double dl = ergodic_wsr_lb(sc.est, sc.eval_err, out.runs[1].state, cfg).wsr_total;
  EXPECT_NEAR(out.lb.wsr_total, 0.5 * (ul + dl), 1e-12);
  EXPECT_NEAR(out.lb.r_ul, 0.5 * ul, 1e-12);
}

TEST(SolveScheme, NoIrsKeepsInitialPhases) {
  Rng rng(4);
  const SystemConfig cfg = testing::desk_config();
  const ChannelEstimates est = generate_estimates(cfg, {}, rng);
  const ErrorCovariances err = error_covariances({}, 100.0, cfg);
  Rng r(1);
  const SchemeOutcome out = solve_scheme({Duplex::fd, IrsMode::no_irs, Robustness::robust}, est,
                                         err, cfg, {}, 10, r);
  EXPECT_EQ(out.runs[0].state.theta.vec(), IrsPhase::ones(cfg.rc()).vec());
}

ExperimentSpec small_sweep() {
  ExperimentSpec s = preset("desk");
  s.n_scenarios = 8;
  s.n_error_draws = 50;
  s.write_traces = false;
  s.analytical = false;
  return s;
}

TEST(SchemeOrdering, IrsHelpsOnAverage) {
  ExperimentSpec s = small_sweep();
  s.rho_list = {0.4};
  s.schemes = {*parse_scheme("FD-IRS-RB"), *parse_scheme("FD-No-IRS-RB")};
  const SweepResult r = run_experiment(s);
  const SeriesPoint& irs = r.series[0].points[0];
  const SeriesPoint& none = r.series[1].points[0];
  EXPECT_GE(irs.mean + 2.0 * std::hypot(irs.std_error, none.std_error), none.mean);
}

TEST(SchemeOrdering, RobustGapShrinksAsErrorsVanish) {
  ExperimentSpec s = small_sweep();
  s.rho_list = {0.4, 0.1, 0.01, 0.001};
  s.schemes = {*parse_scheme("FD-IRS-RB"), *parse_scheme("FD-IRS-Non-RB")};
  const SweepResult r = run_experiment(s);
  std::vector<double> idx, gap;
  for (std::size_t p = 0; p < s.rho_list.size(); ++p) {
    idx.push_back(static_cast<double>(p));
    gap.push_back(std::abs(r.series[0].points[p].mean - r.series[1].points[p].mean));
  }
  EXPECT_LE(testing::spearman(idx, gap), 0.0);
}

}  // namespace
}  // namespace irsfd
