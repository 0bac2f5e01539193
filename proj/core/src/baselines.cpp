#include "irsfd/baselines.hpp"

#include <cmath>

namespace irsfd {

std::string SchemeId::label() const {
  std::string s = duplex == Duplex::fd ? "FD-" : "HD-";
  s += irs == IrsMode::with_irs ? "IRS-" : "No-IRS-";
  s += robust == Robustness::robust ? "RB" : "Non-RB";
  return s;
}

std::vector<SchemeId> all_schemes() {
  std::vector<SchemeId> out;
  for (Duplex d : {Duplex::fd, Duplex::hd}) {
    for (IrsMode i : {IrsMode::with_irs, IrsMode::no_irs}) {
      for (Robustness r : {Robustness::robust, Robustness::non_robust}) out.push_back({d, i, r});
    }
  }
  return out;
}

std::optional<SchemeId> parse_scheme(std::string_view label) {
  for (const SchemeId& s : all_schemes()) {
    if (s.label() == label) return s;
  }
  return std::nullopt;
}

namespace {

void remove_link(ChannelSet& ch, ErrorCovariances& err, Link link) {
  ch[link].setZero();
  err[link].j_cov.setZero();
  err[link].k_cov.setZero();
}

RateReport average_slots(const RateReport& a, const RateReport& b) {
  RateReport r;
  r.kind = a.kind;
  r.n_samples = a.n_samples;
  r.r_ul = 0.5 * (a.r_ul + b.r_ul);
  r.r_dl = 0.5 * (a.r_dl + b.r_dl);
  r.wsr_total = 0.5 * (a.wsr_total + b.wsr_total);
  r.std_error = 0.5 * std::hypot(a.std_error, b.std_error);
  return r;
}

}  // namespace

SchemeChannels scheme_channels(const SchemeId& scheme, const ChannelEstimates& est,
                               const ErrorCovariances& err, const SystemConfig& cfg) {
  require_consistent(cfg, static_cast<const ChannelSet&>(est));
  require_consistent(cfg, err);
  SchemeChannels sc{est, err, err};
  if (scheme.irs == IrsMode::no_irs) {
    for (Link l : kIrsLinks) remove_link(sc.est, sc.eval_err, l);
  }
  if (scheme.duplex == Duplex::hd) {
    remove_link(sc.est, sc.eval_err, Link::self_interf);
    remove_link(sc.est, sc.eval_err, Link::cross);
  }
  sc.design_err = scheme.robust == Robustness::robust ? sc.eval_err : ErrorCovariances::zeros(cfg);
  return sc;
}

SchemeOutcome solve_scheme(const SchemeId& scheme, const ChannelEstimates& est,
                           const ErrorCovariances& err, const SystemConfig& cfg,
                           const SolverOptions& opts, int n_error_draws, Rng& rng) {
  const SchemeChannels sc = scheme_channels(scheme, est, err, cfg);
  SolverOptions o = opts;
  if (scheme.irs == IrsMode::no_irs) o.optimize_irs = false;

  SchemeOutcome out;
  out.scheme = scheme;
  auto run_slot = [&](const SolverOptions& slot_opts, RateReport& mc, RateReport& lb) {
    SolveResult r = run_algorithm2(sc.est, sc.design_err, cfg, slot_opts);
    mc = monte_carlo_wsr(sc.est, sc.eval_err, r.state, cfg, n_error_draws, rng);
    lb = ergodic_wsr_lb(sc.est, sc.eval_err, r.state, cfg);
    out.runs.push_back(std::move(r));
  };

  if (scheme.duplex == Duplex::fd) {
    run_slot(o, out.mc, out.lb);
    return out;
  }
  SolverOptions ul = o, dl = o;
  ul.dl_active = false;
  dl.ul_active = false;
  RateReport mc_ul, lb_ul, mc_dl, lb_dl;
  run_slot(ul, mc_ul, lb_ul);
  run_slot(dl, mc_dl, lb_dl);
  out.mc = average_slots(mc_ul, mc_dl);
  out.lb = average_slots(lb_ul, lb_dl);
  return out;
}

}  // namespace irsfd
