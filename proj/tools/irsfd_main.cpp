// irsfd: sweep driver for robust FD/HD beamforming with an IRS.
//
//   irsfd run         --preset desk --set rho_list=0.01,0.1 --out out/
//   irsfd validate    --seed 3
//   irsfd plot        --out out/
//   irsfd show-config --spec my.conf

#include "irsfd/experiment.hpp"
#include "irsfd/plots.hpp"
#include "irsfd/validation.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct CommonArgs {
  std::string preset = "desk";
  std::string spec_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--preset", a.preset, "Base configuration")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();
  cmd->add_option("--spec", a.spec_path, "key = value config file applied over the preset");
  cmd->add_option("--set", a.sets, "key=value override, repeatable (wins over --spec)");
  cmd->add_option("--out", a.out_dir, "Output directory");
  cmd->add_option("--seed", a.seed, "Master seed");
  cmd->add_option("--threads", a.threads, "Worker threads")->check(CLI::PositiveNumber);
}

irsfd::ExperimentSpec resolve(const CommonArgs& a) {
  irsfd::ExperimentSpec spec = irsfd::preset(a.preset);
  if (!a.spec_path.empty()) irsfd::apply_settings(spec, irsfd::load_config_file(a.spec_path));
  for (const auto& s : a.sets) {
    const auto [k, v] = irsfd::parse_override(s);
    irsfd::apply_setting(spec, k, v);
  }
  if (!a.out_dir.empty()) spec.out_dir = a.out_dir;
  if (a.seed) spec.master_seed = *a.seed;
  if (a.threads) spec.threads = *a.threads;
  return spec;
}

bool check_spec(const irsfd::ExperimentSpec& spec) {
  const auto bad = irsfd::validate_spec(spec);
  for (const auto& b : bad) std::cerr << "config error: " << b << "\n";
  return bad.empty();
}

void print_summary(const irsfd::SweepResult& r) {
  std::printf("%-26s %10s %10s %10s\n", "series", "x", "mean_wsr", "stderr");
  for (const auto& s : r.series) {
    for (const auto& p : s.points) {
      std::printf("%-26s %10g %10.4f %10.4f\n", s.label.c_str(), p.x, p.mean, p.std_error);
    }
  }
  std::printf("solver runs %d, converged %d, monotonicity violations %d\n", r.diag.runs,
              r.diag.converged_runs, r.diag.monotonicity_violations);
}

int cmd_run(const CommonArgs& a) {
  const irsfd::ExperimentSpec spec = resolve(a);
  if (!check_spec(spec)) return kExitValidation;
  irsfd::TraceTable traces;
  const irsfd::SweepResult r =
      irsfd::run_experiment(spec, spec.write_traces ? &traces : nullptr, &std::cerr);
  irsfd::write_outputs(r, spec, spec.write_traces ? &traces : nullptr, spec.out_dir, &std::cerr);
  print_summary(r);
  std::cout << "results written to " << spec.out_dir << "\n";
  return kExitOk;
}

int cmd_validate(const CommonArgs& a) {
  const irsfd::ExperimentSpec spec = resolve(a);
  if (!check_spec(spec)) return kExitValidation;
  irsfd::ValidationOptions vo;
  vo.seed = spec.master_seed;
  const irsfd::ValidationReport rep = irsfd::run_validation_suite(vo, &std::cout);
  std::printf("%zu oracles, %s, %.1f s\n", rep.results.size(),
              rep.all_passed() ? "all passed" : "FAILURES", rep.seconds);
  return rep.all_passed() ? kExitOk : kExitValidation;
}

int cmd_plot(const CommonArgs& a) {
  const irsfd::ExperimentSpec spec = resolve(a);
  const std::filesystem::path dir = spec.out_dir;
  const irsfd::SweepResult r = irsfd::parse_results_json(irsfd::read_text_file(dir / "results.json"));
  irsfd::emit_plots(r, dir, &std::cerr);
  std::cout << "wrote " << (dir / "sweep.svg").string() << "\n";
  return kExitOk;
}

int cmd_show_config(const CommonArgs& a) {
  const irsfd::ExperimentSpec spec = resolve(a);
  for (const auto& [k, v] : irsfd::spec_to_key_values(spec)) std::cout << k << " = " << v << "\n";
  std::cout << "# config_hash = " << irsfd::config_hash(spec) << "\n";
  return check_spec(spec) ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust beamforming sweeps for IRS-assisted full-duplex MIMO"};
  app.require_subcommand(1);
  CommonArgs args;
  CLI::App* run = app.add_subcommand("run", "Run a sweep and write results");
  CLI::App* validate = app.add_subcommand("validate", "Run the oracle validation suite");
  CLI::App* plot = app.add_subcommand("plot", "Re-render sweep.svg from results.json in --out");
  CLI::App* show = app.add_subcommand("show-config", "Print the resolved configuration");
  for (CLI::App* c : {run, validate, plot, show}) add_common(c, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return cmd_run(args);
    if (*validate) return cmd_validate(args);
    if (*plot) return cmd_plot(args);
    return cmd_show_config(args);
  } catch (const irsfd::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const irsfd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
