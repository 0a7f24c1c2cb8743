#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sifrian/config.hpp"
#include "sifrian/data.hpp"
#include "sifrian/network.hpp"

namespace sifrian {

/// One CSV row per completed epoch.
///
/// train_cost and train_accuracy average the per-pattern values seen just
/// before each update of the epoch; test_accuracy is measured after the
/// epoch.  hessian_radius is the mean spectral radius over the epoch's steps
/// and is empty outside spectral mode.
struct MetricsRow {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double train_cost = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::optional<double> hessian_radius;
  double mean_inner_product = 0.0;
  /// Fraction of Newton/MK steps with <dir, grad> <= 0.
  double descent_violations = 0.0;
  /// Steps that fell back to damping because a layer was degenerate.
  std::size_t fallback_steps = 0;
  std::optional<double> wall_time;
};

std::string metrics_header(bool wall_time);
std::string format_row(const MetricsRow& row, bool wall_time);

/// Pattern order for one epoch; depends only on (seed, epoch, count).
std::vector<std::size_t> epoch_order(std::uint64_t seed, std::size_t epoch,
                                     std::size_t count);

/// Fraction of items whose output argmax equals the label.  Throws on an
/// empty dataset or mismatched shapes.
double evaluate(const NetworkParams& params, const Dataset& data);

NetworkParams initial_params(const RunConfig& cfg);

struct TrainResult {
  NetworkParams params;
  std::vector<MetricsRow> rows;
  /// Set when a step produced non-finite values; params then hold the last
  /// finite state.
  std::optional<std::string> aborted;
};

/// Runs cfg.epochs epochs.  When `csv` is given the header is written first
/// and each row is appended and flushed as its epoch completes.  Progress
/// and timings go to `log` if given.
TrainResult train(const RunConfig& cfg, const Dataset& train_set,
                  const Dataset& test_set, std::ostream* csv = nullptr,
                  std::ostream* log = nullptr);

/// Loads the datasets named by cfg, trains, writes cfg.metrics and
/// cfg.params_out (and the plot script if configured).  Returns the result;
/// an aborted run still writes its last good params.
TrainResult run_training(const RunConfig& cfg, std::ostream* log = nullptr);

/// gnuplot script that plots the cost and accuracy columns of `metrics`.
std::string plot_script(const std::filesystem::path& metrics);

}  // namespace sifrian
