#pragma once

// Run configuration: a flat key=value file plus command-line overrides.
//
//   # comment
//   sizes = 784,512,256,32,10
//   optimizer = mk
//
// Relative dataset paths resolve against data_dir, which the SIFRIAN_DATA_DIR
// environment variable overrides.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sifrian/network.hpp"
#include "sifrian/optimizer.hpp"
#include "sifrian/regularization.hpp"

namespace sifrian {

inline constexpr const char* kDataDirEnv = "SIFRIAN_DATA_DIR";

struct RunConfig {
  std::vector<std::size_t> sizes{784, 512, 256, 32, 10};
  Activation activation = Activation::leaky_relu(0.01);
  DirectionKind optimizer = DirectionKind::sgd;
  LambdaMode lambda_mode = LambdaMode::spectral_adaptive;
  /// Fixed-mode hidden lambdas; a single entry is broadcast to every layer.
  std::vector<double> lambdas{1.0};
  double lambda_out = 1.0;
  double mu = 0.0;
  double lr = 0.01;
  double step_scale = 1.0;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
  bool white_layer = true;

  std::filesystem::path data_dir = ".";
  std::filesystem::path train_images = "train-images-idx3-ubyte";
  std::filesystem::path train_labels = "train-labels-idx1-ubyte";
  std::filesystem::path test_images = "t10k-images-idx3-ubyte";
  std::filesystem::path test_labels = "t10k-labels-idx1-ubyte";
  /// Use only the first N items; 0 keeps everything.
  std::size_t train_subset = 0;
  std::size_t test_subset = 0;

  std::filesystem::path metrics = "metrics.csv";
  std::filesystem::path params_out = "params.bin";
  std::optional<std::filesystem::path> plot_script;
  /// Adds a wall_time column; off by default so the CSV is reproducible.
  bool record_wall_time = false;

  /// Layer count of the trained network, white layer included.
  std::size_t layers() const { return sizes.size() - 1 + (white_layer ? 1 : 0); }
  /// Schedule for fixed mode, lambdas broadcast to layers() - 1 entries.
  RegSchedule fixed_schedule() const;
  StepOptions step_options() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;

  /// Throws ConfigError describing the first inconsistency.
  void validate() const;
};

/// Applies one key=value assignment.  Throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Splits "key=value" and applies it.
void apply_override(RunConfig& cfg, const std::string& assignment);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

/// Honors SIFRIAN_DATA_DIR when set.
void apply_environment(RunConfig& cfg);

}  // namespace sifrian
