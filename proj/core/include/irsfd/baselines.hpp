#pragma once

#include "irsfd/ewmmse.hpp"
#include "irsfd/rate.hpp"
#include "irsfd/rng.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irsfd {

enum class Duplex { fd, hd };
enum class IrsMode { with_irs, no_irs };
enum class Robustness { robust, non_robust };

struct SchemeId {
  Duplex duplex = Duplex::fd;
  IrsMode irs = IrsMode::with_irs;
  Robustness robust = Robustness::robust;

  /// e.g. "FD-IRS-RB", "HD-No-IRS-Non-RB"
  std::string label() const;

  friend bool operator==(const SchemeId&, const SchemeId&) = default;
};

/// All eight duplex/IRS/robustness combinations, proposed scheme first.
std::vector<SchemeId> all_schemes();

std::optional<SchemeId> parse_scheme(std::string_view label);

/// The channels and statistics a scheme designs with and is evaluated on.
struct SchemeChannels {
  ChannelEstimates est;
  ErrorCovariances design_err;
  ErrorCovariances eval_err;
};

/// Removes the links that do not exist for this scheme (IRS hops for
/// no_irs, self-interference and cross link for hd) and zeroes the design
/// statistics of non-robust schemes.
SchemeChannels scheme_channels(const SchemeId& scheme, const ChannelEstimates& est,
                               const ErrorCovariances& err, const SystemConfig& cfg);

struct SchemeOutcome {
  SchemeId scheme;
  RateReport mc;  ///< ergodic WSR, sample mean over error draws
  RateReport lb;  ///< analytical lower bound of the final design
  /// One run for FD; UL slot then DL slot for HD.
  std::vector<SolveResult> runs;
};

/// Designs and evaluates one scheme. HD time-shares a UL-only and a DL-only
/// slot, each with its own phases, and reports the average of the two.
SchemeOutcome solve_scheme(const SchemeId& scheme, const ChannelEstimates& est,
                           const ErrorCovariances& err, const SystemConfig& cfg,
                           const SolverOptions& opts, int n_error_draws, Rng& rng);

}  // namespace irsfd
