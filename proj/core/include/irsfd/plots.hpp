#pragma once

#include "irsfd/experiment.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace irsfd {

/// Standalone SVG line chart of every non-empty series: x is rho on a log
/// axis or SNR in dB, y is WSR in bits/s/Hz, error bars are 2 stderr.
/// Single-point series are drawn as markers without a line. Empty series are
/// skipped with a warning on `log`.
std::string render_sweep_svg(const SweepResult& result, std::ostream* log = nullptr);

/// Writes sweep.svg into out_dir. Throws ConfigError for a result without
/// any points, IoError on write failure.
void emit_plots(const SweepResult& result, const std::filesystem::path& out_dir,
                std::ostream* log = nullptr);

}  // namespace irsfd
