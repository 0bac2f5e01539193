#include "irsfd/experiment.hpp"

#include "irsfd/plots.hpp"
#include "irsfd/rate.hpp"

#include "json.hpp"
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace irsfd {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::string fmt_point(const Point3& p) { return fmt(p.x()) + "," + fmt(p.y()) + "," + fmt(p.z()); }

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
  return out;
}

Point3 parse_point(const std::string& key, const std::string& value) {
  const auto v = parse_double_list(key, value);
  if (v.size() != 3) throw ConfigError("config key '" + key + "': expected three coordinates");
  return {v[0], v[1], v[2]};
}

std::string init_name(InitPolicy p) {
  switch (p) {
    case InitPolicy::svd_estimate: return "svd_estimate";
    case InitPolicy::scaled_identity: return "scaled_identity";
    case InitPolicy::random: return "random";
  }
  return "";
}

std::string order_name(UpdateOrder o) { return o == UpdateOrder::per_user ? "per_user" : "joint"; }

struct Setting {
  const char* key;
  bool affects_results;
  std::function<void(ExperimentSpec&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

#define INT_SETTING(name, field)                                                          \
  Setting{name, true,                                                                     \
          [](ExperimentSpec& s, const std::string& k, const std::string& v) {             \
            s.field = parse_int(k, v);                                                    \
          },                                                                              \
          [](const ExperimentSpec& s) { return std::to_string(s.field); }}
#define DOUBLE_SETTING(name, field)                                                       \
  Setting{name, true,                                                                     \
          [](ExperimentSpec& s, const std::string& k, const std::string& v) {             \
            s.field = parse_double(k, v);                                                 \
          },                                                                              \
          [](const ExperimentSpec& s) { return fmt(s.field); }}
#define POINT_SETTING(name, field)                                                        \
  Setting{name, true,                                                                     \
          [](ExperimentSpec& s, const std::string& k, const std::string& v) {             \
            s.field = parse_point(k, v);                                                  \
          },                                                                              \
          [](const ExperimentSpec& s) { return fmt_point(s.field); }}

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      INT_SETTING("m0", sys.m0),
      INT_SETTING("n0", sys.n0),
      INT_SETTING("mk", sys.mk),
      INT_SETTING("nj", sys.nj),
      INT_SETTING("uk", sys.uk),
      INT_SETTING("vj", sys.vj),
      INT_SETTING("irs_rows", sys.irs_rows),
      INT_SETTING("irs_cols", sys.irs_cols),
      DOUBLE_SETTING("wk", sys.wk),
      DOUBLE_SETTING("wj", sys.wj),
      DOUBLE_SETTING("noise_power", noise_power),
      POINT_SETTING("bs_position", geo.bs),
      POINT_SETTING("irs_position", geo.irs),
      POINT_SETTING("ul_center", geo.ul_center),
      POINT_SETTING("dl_center", geo.dl_center),
      DOUBLE_SETTING("user_radius", geo.user_radius),
      DOUBLE_SETTING("rician_k_direct", geo.rician_k_direct),
      DOUBLE_SETTING("rician_k_si", geo.rician_k_si),
      DOUBLE_SETTING("pathloss_ref_db", geo.pathloss_ref_db),
      DOUBLE_SETTING("pathloss_exp_direct", geo.pathloss_exp_direct),
      DOUBLE_SETTING("pathloss_exp_irs", geo.pathloss_exp_irs),
      DOUBLE_SETTING("si_distance_m", geo.si_distance_m),
      DOUBLE_SETTING("si_isolation_db", geo.si_isolation_db),
      Setting{"normalize_to_reference", true,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                s.geo.normalize_to_reference = parse_bool(k, v);
              },
              [](const ExperimentSpec& s) {
                return std::string(s.geo.normalize_to_reference ? "true" : "false");
              }},
      DOUBLE_SETTING("alpha_decay", csi.alpha_decay),
      DOUBLE_SETTING("outer_tol", solver.outer_tol),
      INT_SETTING("max_outer_iters", solver.max_outer_iters),
      DOUBLE_SETTING("bisection_tol", solver.bisection_tol),
      INT_SETTING("max_bisection_iters", solver.max_bisection_iters),
      DOUBLE_SETTING("mm_inner_tol", solver.inner_irs.inner_tol),
      INT_SETTING("mm_max_iters", solver.inner_irs.max_inner_iters),
      Setting{"init_policy", true,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                if (v == "svd_estimate") s.solver.init_policy = InitPolicy::svd_estimate;
                else if (v == "scaled_identity") s.solver.init_policy = InitPolicy::scaled_identity;
                else if (v == "random") s.solver.init_policy = InitPolicy::random;
                else throw ConfigError("config key '" + k + "': unknown policy '" + v + "'");
              },
              [](const ExperimentSpec& s) { return init_name(s.solver.init_policy); }},
      Setting{"init_seed", true,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                s.solver.init_seed = parse_u64(k, v);
              },
              [](const ExperimentSpec& s) { return std::to_string(s.solver.init_seed); }},
      Setting{"update_order", true,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                if (v == "per_user") s.solver.order = UpdateOrder::per_user;
                else if (v == "joint") s.solver.order = UpdateOrder::joint;
                else throw ConfigError("config key '" + k + "': unknown order '" + v + "'");
              },
              [](const ExperimentSpec& s) { return order_name(s.solver.order); }},
      Setting{"sweep", true,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                if (v == "rho") s.sweep = SweepKind::rho;
                else if (v == "snr") s.sweep = SweepKind::snr;
                else throw ConfigError("config key '" + k + "': expected rho or snr, got '" + v + "'");
              },
              [](const ExperimentSpec& s) { return sweep_name(s.sweep); }},
      DOUBLE_SETTING("snr_db", snr_db),
      Setting{"rho_list", true,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                s.rho_list = parse_double_list(k, v);
              },
              [](const ExperimentSpec& s) { return fmt_list(s.rho_list); }},
      DOUBLE_SETTING("rho", rho),
      Setting{"snr_db_list", true,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                s.snr_db_list = parse_double_list(k, v);
              },
              [](const ExperimentSpec& s) { return fmt_list(s.snr_db_list); }},
      Setting{"schemes", true,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                std::vector<SchemeId> out;
                for (const auto& item : split_list(v)) {
                  const auto id = parse_scheme(item);
                  if (!id) throw ConfigError("config key '" + k + "': unknown scheme '" + item + "'");
                  out.push_back(*id);
                }
                s.schemes = out;
              },
              [](const ExperimentSpec& s) {
                std::string out;
                for (std::size_t i = 0; i < s.schemes.size(); ++i) {
                  out += (i ? "," : "") + s.schemes[i].label();
                }
                return out;
              }},
      Setting{"analytical", true,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                s.analytical = parse_bool(k, v);
              },
              [](const ExperimentSpec& s) { return std::string(s.analytical ? "true" : "false"); }},
      INT_SETTING("n_scenarios", n_scenarios),
      INT_SETTING("n_error_draws", n_error_draws),
      Setting{"seed", true,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                s.master_seed = parse_u64(k, v);
              },
              [](const ExperimentSpec& s) { return std::to_string(s.master_seed); }},
      Setting{"threads", false,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                s.threads = parse_int(k, v);
              },
              [](const ExperimentSpec& s) { return std::to_string(s.threads); }},
      Setting{"write_traces", false,
              [](ExperimentSpec& s, const std::string& k, const std::string& v) {
                s.write_traces = parse_bool(k, v);
              },
              [](const ExperimentSpec& s) { return std::string(s.write_traces ? "true" : "false"); }},
      Setting{"out_dir", false,
              [](ExperimentSpec& s, const std::string&, const std::string& v) { s.out_dir = v; },
              [](const ExperimentSpec& s) { return s.out_dir; }},
  };
  return table;
}

#undef INT_SETTING
#undef DOUBLE_SETTING
#undef POINT_SETTING

std::string sha1_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("config_hash: SHA-1 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

}  // namespace

std::string sweep_name(SweepKind k) { return k == SweepKind::rho ? "rho" : "snr"; }

ExperimentSpec preset(const std::string& name) {
  ExperimentSpec s;
  s.schemes = all_schemes();
  s.rho_list = {0.001, 0.01, 0.1, 0.4, 1.0};
  s.snr_db_list = {0.0, 10.0, 20.0, 30.0};
  if (name == "desk") {
    s.sys.m0 = 8;
    s.sys.n0 = 4;
    s.sys.mk = 3;
    s.sys.nj = 3;
    s.sys.irs_rows = 4;
    s.sys.irs_cols = 4;
    s.n_scenarios = 50;
    s.n_error_draws = 200;
  } else if (name == "paper") {
    s.sys.m0 = 15;
    s.sys.n0 = 8;
    s.sys.mk = 5;
    s.sys.nj = 5;
    s.sys.irs_rows = 10;
    s.sys.irs_cols = 10;
    s.n_scenarios = 50;
    s.n_error_draws = 500;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
  }
  s.sys.uk = 2;
  s.sys.vj = 2;
  return s;
}

void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  for (const Setting& s : settings()) {
    if (key == s.key) {
      s.set(spec, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_settings(ExperimentSpec& spec, const KeyValues& kv) {
  for (const auto& [k, v] : kv) apply_setting(spec, k, v);
}

KeyValues spec_to_key_values(const ExperimentSpec& spec) {
  KeyValues out;
  for (const Setting& s : settings()) out.emplace_back(s.key, s.get(spec));
  return out;
}

std::vector<std::string> validate_spec(const ExperimentSpec& spec) {
  std::vector<std::string> bad = validate_config(spec.sys);
  auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      bad.emplace_back(e.what());
    }
  };
  check([&] { require_valid(spec.geo); });
  check([&] { require_valid(spec.solver); });
  if (!(spec.noise_power > 0.0)) bad.emplace_back("noise_power must be > 0");
  if (!(spec.csi.alpha_decay >= 0.0 && spec.csi.alpha_decay <= 1.0)) {
    bad.emplace_back("alpha_decay must lie in [0, 1]");
  }
  if (spec.sweep == SweepKind::rho) {
    if (spec.rho_list.empty()) bad.emplace_back("rho_list must not be empty");
    for (double r : spec.rho_list) {
      if (!(r >= 0.0)) bad.emplace_back("rho_list entries must be >= 0");
    }
    if (!std::isfinite(spec.snr_db)) bad.emplace_back("snr_db must be finite");
  } else {
    if (spec.snr_db_list.empty()) bad.emplace_back("snr_db_list must not be empty");
    for (double s : spec.snr_db_list) {
      if (!std::isfinite(s)) bad.emplace_back("snr_db_list entries must be finite");
    }
    if (!(spec.rho >= 0.0)) bad.emplace_back("rho must be >= 0");
  }
  if (spec.schemes.empty() && !spec.analytical) bad.emplace_back("schemes must not be empty");
  if (spec.n_scenarios < 1) bad.emplace_back("n_scenarios must be >= 1");
  if (spec.n_error_draws < 2) bad.emplace_back("n_error_draws must be >= 2");
  if (spec.threads < 1) bad.emplace_back("threads must be >= 1");
  return bad;
}

std::string config_hash(const ExperimentSpec& spec) {
  std::string text;
  for (const Setting& s : settings()) {
    if (s.affects_results) text += std::string(s.key) + " = " + s.get(spec) + "\n";
  }
  const std::string blob = "blob " + std::to_string(text.size()) + std::string(1, '\0') + text;
  return sha1_hex(blob);
}

namespace {

struct PointParams {
  double snr_db;
  double rho;
};

std::vector<PointParams> sweep_points(const ExperimentSpec& spec) {
  std::vector<PointParams> out;
  if (spec.sweep == SweepKind::rho) {
    for (double r : spec.rho_list) out.push_back({spec.snr_db, r});
  } else {
    for (double s : spec.snr_db_list) out.push_back({s, spec.rho});
  }
  return out;
}

struct RunStats {
  bool converged = false;
  int violations = 0;
  double worst_drop = 0.0;
  double power_excess = 0.0;
  double complementarity = 0.0;
};

RunStats run_stats(const SolveResult& r) {
  RunStats st;
  st.converged = r.converged;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    const double drop = (r.trace[i - 1] - r.trace[i]) / std::max(std::abs(r.trace[i - 1]), 1e-300);
    st.worst_drop = std::max(st.worst_drop, drop);
    if (drop > 1e-6) ++st.violations;
  }
  st.power_excess = r.max_power_excess;
  st.complementarity = r.max_complementarity;
  return st;
}

struct SchemeCell {
  double mc = 0.0, r_ul = 0.0, r_dl = 0.0, lb = 0.0, lb_ul = 0.0, lb_dl = 0.0;
  std::vector<RunStats> stats;
  std::vector<TraceLine> trace;
};

struct ItemResult {
  std::vector<SchemeCell> cells;  // one per solved scheme
};

void summarize(SeriesPoint& p, const std::vector<double>& values, const std::vector<double>& ul,
               const std::vector<double>& dl) {
  const int n = static_cast<int>(values.size());
  double sum = 0.0, sum_ul = 0.0, sum_dl = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += values[i];
    sum_ul += ul[i];
    sum_dl += dl[i];
  }
  p.n = n;
  p.mean = sum / n;
  p.mean_r_ul = sum_ul / n;
  p.mean_r_dl = sum_dl / n;
  double ss = 0.0;
  for (double v : values) ss += (v - p.mean) * (v - p.mean);
  p.std_error = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  p.per_scenario = values;
}

}  // namespace

SweepResult run_experiment(const ExperimentSpec& spec, TraceTable* traces, std::ostream* log) {
  if (const auto bad = validate_spec(spec); !bad.empty()) {
    std::string msg = "invalid experiment spec:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ConfigError(msg);
  }
  const std::vector<PointParams> points = sweep_points(spec);
  std::vector<SchemeId> solved = spec.schemes;
  const SchemeId proposed{};
  std::size_t proposed_idx = 0;
  if (spec.analytical) {
    const auto it = std::find(solved.begin(), solved.end(), proposed);
    if (it == solved.end()) solved.push_back(proposed);
    proposed_idx = static_cast<std::size_t>(
        std::find(solved.begin(), solved.end(), proposed) - solved.begin());
  }

  const std::size_t n_pts = points.size();
  const std::size_t n_sc = static_cast<std::size_t>(spec.n_scenarios);

  // Scenarios are shared by all sweep points.
  SystemConfig base = spec.sys;
  base.sigma0_sq = spec.noise_power;
  base.sigmaj_sq = spec.noise_power;
  std::vector<ChannelEstimates> scenarios(n_sc);
  for (std::size_t s = 0; s < n_sc; ++s) {
    Rng rng = Rng::substream(spec.master_seed, {1, s});
    scenarios[s] = generate_estimates(base, spec.geo, rng);
  }

  std::vector<ItemResult> items(n_pts * n_sc);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const bool keep_traces = traces != nullptr;

  auto work = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= items.size()) return;
      {
        std::lock_guard lock(failure_mu);
        if (failure) return;
      }
      try {
        const std::size_t p = idx / n_sc;
        const std::size_t s = idx % n_sc;
        const double snr = std::pow(10.0, points[p].snr_db / 10.0);
        SystemConfig cfg = base;
        cfg.alpha0 = snr * cfg.sigmaj_sq;
        cfg.alphak = snr * cfg.sigma0_sq;
        CsiErrorPolicy pol = spec.csi;
        pol.rho = points[p].rho;
        const ErrorCovariances err = error_covariances(pol, snr, cfg);
        ItemResult& out = items[idx];
        for (const SchemeId& id : solved) {
          // Same error draws for every scheme of this (point, scenario).
          Rng mc_rng = Rng::substream(spec.master_seed, {2, p, s});
          const SchemeOutcome o =
              solve_scheme(id, scenarios[s], err, cfg, spec.solver, spec.n_error_draws, mc_rng);
          SchemeCell cell;
          cell.mc = o.mc.wsr_total;
          cell.r_ul = o.mc.r_ul;
          cell.r_dl = o.mc.r_dl;
          cell.lb = o.lb.wsr_total;
          cell.lb_ul = o.lb.r_ul;
          cell.lb_dl = o.lb.r_dl;
          for (std::size_t slot = 0; slot < o.runs.size(); ++slot) {
            cell.stats.push_back(run_stats(o.runs[slot]));
            if (keep_traces) {
              for (const IterationRecord& rec : o.runs[slot].records) {
                cell.trace.push_back({static_cast<int>(s), static_cast<int>(slot), rec});
              }
            }
          }
          out.cells.push_back(std::move(cell));
        }
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(spec.threads, static_cast<int>(items.size())));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.sweep = spec.sweep;
  auto x_of = [&](const PointParams& pp) {
    return spec.sweep == SweepKind::rho ? pp.rho : pp.snr_db;
  };
  auto build_series = [&](std::size_t k, bool analytical) {
    Series ser;
    ser.analytical = analytical;
    ser.label = analytical ? "Analytical " + solved[k].label() : solved[k].label();
    for (std::size_t p = 0; p < n_pts; ++p) {
      std::vector<double> v(n_sc), ul(n_sc), dl(n_sc);
      for (std::size_t s = 0; s < n_sc; ++s) {
        const SchemeCell& c = items[p * n_sc + s].cells[k];
        v[s] = analytical ? c.lb : c.mc;
        ul[s] = analytical ? c.lb_ul : c.r_ul;
        dl[s] = analytical ? c.lb_dl : c.r_dl;
      }
      SeriesPoint sp;
      sp.x = x_of(points[p]);
      sp.snr_db = points[p].snr_db;
      sp.rho = points[p].rho;
      summarize(sp, v, ul, dl);
      ser.points.push_back(std::move(sp));
    }
    return ser;
  };
  for (std::size_t k = 0; k < spec.schemes.size(); ++k) result.series.push_back(build_series(k, false));
  if (spec.analytical) result.series.push_back(build_series(proposed_idx, true));

  SolverDiagnostics& d = result.diag;
  for (const ItemResult& it : items) {
    for (const SchemeCell& c : it.cells) {
      for (const RunStats& st : c.stats) {
        ++d.runs;
        d.converged_runs += st.converged ? 1 : 0;
        d.monotonicity_violations += st.violations;
        d.worst_relative_drop = std::max(d.worst_relative_drop, st.worst_drop);
        d.max_power_excess = std::max(d.max_power_excess, st.power_excess);
        d.max_complementarity = std::max(d.max_complementarity, st.complementarity);
      }
    }
  }

  if (keep_traces) {
    traces->assign(spec.schemes.size(), std::vector<std::vector<TraceLine>>(n_pts));
    for (std::size_t k = 0; k < spec.schemes.size(); ++k) {
      for (std::size_t p = 0; p < n_pts; ++p) {
        auto& dst = (*traces)[k][p];
        for (std::size_t s = 0; s < n_sc; ++s) {
          const auto& src = items[p * n_sc + s].cells[k].trace;
          dst.insert(dst.end(), src.begin(), src.end());
        }
      }
    }
  }
  if (log) {
    *log << "solver runs: " << d.runs << ", converged: " << d.converged_runs
         << ", monotonicity violations: " << d.monotonicity_violations << "\n";
  }
  return result;
}

std::string results_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "schema_version,sweep,point,x,snr_db,rho,series,kind,mean_wsr,stderr,n,mean_r_ul,mean_r_dl\n";
  char buf[512];
  for (const Series& ser : result.series) {
    for (std::size_t p = 0; p < ser.points.size(); ++p) {
      const SeriesPoint& sp = ser.points[p];
      std::snprintf(buf, sizeof(buf), "%d,%s,%zu,%.12g,%.12g,%.12g,%s,%s,%.12g,%.12g,%d,%.12g,%.12g\n",
                    kResultsSchemaVersion, sweep_name(result.sweep).c_str(), p, sp.x, sp.snr_db,
                    sp.rho, ser.label.c_str(), ser.analytical ? "analytical" : "monte_carlo",
                    sp.mean, sp.std_error, sp.n, sp.mean_r_ul, sp.mean_r_dl);
      os << buf;
    }
  }
  return os.str();
}

std::string results_json(const SweepResult& result, const ExperimentSpec& spec) {
  json j;
  j["schema_version"] = kResultsSchemaVersion;
  j["tool"] = "irsfd";
  json cfg = json::object();
  for (const auto& [k, v] : spec_to_key_values(spec)) cfg[k] = v;
  j["config"] = cfg;
  j["config_hash"] = config_hash(spec);
  j["sweep"] = sweep_name(result.sweep);
  json series = json::array();
  for (const Series& ser : result.series) {
    json js;
    js["label"] = ser.label;
    js["kind"] = ser.analytical ? "analytical" : "monte_carlo";
    json pts = json::array();
    for (const SeriesPoint& sp : ser.points) {
      pts.push_back({{"x", sp.x},
                     {"snr_db", sp.snr_db},
                     {"rho", sp.rho},
                     {"mean_wsr", sp.mean},
                     {"stderr", sp.std_error},
                     {"n", sp.n},
                     {"mean_r_ul", sp.mean_r_ul},
                     {"mean_r_dl", sp.mean_r_dl},
                     {"per_scenario", sp.per_scenario}});
    }
    js["points"] = pts;
    series.push_back(js);
  }
  j["series"] = series;
  const SolverDiagnostics& d = result.diag;
  j["diagnostics"] = {{"runs", d.runs},
                      {"converged_runs", d.converged_runs},
                      {"monotonicity_violations", d.monotonicity_violations},
                      {"worst_relative_drop", d.worst_relative_drop},
                      {"max_power_excess", d.max_power_excess},
                      {"max_complementarity", d.max_complementarity}};
  return j.dump(2) + "\n";
}

SweepResult parse_results_json(const std::string& text) {
  SweepResult r;
  try {
    const json j = json::parse(text);
    const std::string sweep = j.at("sweep").get<std::string>();
    if (sweep == "rho") r.sweep = SweepKind::rho;
    else if (sweep == "snr") r.sweep = SweepKind::snr;
    else throw ConfigError("results: unknown sweep '" + sweep + "'");
    for (const json& js : j.at("series")) {
      Series ser;
      ser.label = js.at("label").get<std::string>();
      ser.analytical = js.at("kind").get<std::string>() == "analytical";
      for (const json& jp : js.at("points")) {
        SeriesPoint sp;
        sp.x = jp.at("x").get<double>();
        sp.snr_db = jp.at("snr_db").get<double>();
        sp.rho = jp.at("rho").get<double>();
        sp.mean = jp.at("mean_wsr").get<double>();
        sp.std_error = jp.at("stderr").get<double>();
        sp.n = jp.at("n").get<int>();
        sp.mean_r_ul = jp.at("mean_r_ul").get<double>();
        sp.mean_r_dl = jp.at("mean_r_dl").get<double>();
        if (jp.contains("per_scenario")) sp.per_scenario = jp["per_scenario"].get<std::vector<double>>();
        ser.points.push_back(std::move(sp));
      }
      r.series.push_back(std::move(ser));
    }
    if (j.contains("diagnostics")) {
      const json& d = j["diagnostics"];
      r.diag.runs = d.value("runs", 0);
      r.diag.converged_runs = d.value("converged_runs", 0);
      r.diag.monotonicity_violations = d.value("monotonicity_violations", 0);
      r.diag.worst_relative_drop = d.value("worst_relative_drop", 0.0);
      r.diag.max_power_excess = d.value("max_power_excess", 0.0);
      r.diag.max_complementarity = d.value("max_complementarity", 0.0);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed results JSON: ") + e.what());
  }
  return r;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("error writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void write_outputs(const SweepResult& result, const ExperimentSpec& spec, const TraceTable* traces,
                   const std::filesystem::path& out_dir, std::ostream* log) {
  write_text_file(out_dir / "results.csv", results_csv(result));
  write_text_file(out_dir / "results.json", results_json(result, spec));
  emit_plots(result, out_dir, log);
  if (!traces || !spec.write_traces) return;
  for (std::size_t k = 0; k < traces->size() && k < spec.schemes.size(); ++k) {
    std::string name = spec.schemes[k].label();
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (std::size_t p = 0; p < (*traces)[k].size(); ++p) {
      std::string text;
      for (const TraceLine& t : (*traces)[k][p]) {
        json line = {{"scenario", t.scenario},
                     {"slot", t.slot},
                     {"iteration", t.record.iteration},
                     {"wsr_lb", t.record.wsr_lb},
                     {"power_ul", t.record.power_ul},
                     {"power_dl", t.record.power_dl},
                     {"lambda_k", t.record.lambda_k},
                     {"lambda_0", t.record.lambda_0}};
        text += line.dump() + "\n";
      }
      write_text_file(out_dir / "trace" / (name + "_p" + std::to_string(p) + ".jsonl"), text);
    }
  }
}

}  // namespace irsfd
