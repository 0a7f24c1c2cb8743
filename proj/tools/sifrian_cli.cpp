#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "sifrian/config.hpp"
#include "sifrian/data.hpp"
#include "sifrian/errors.hpp"
#include "sifrian/optimizer.hpp"
#include "sifrian/params_io.hpp"
#include "sifrian/sifrian.hpp"
#include "sifrian/trainer.hpp"
#include "sifrian/verify.hpp"

namespace fs = std::filesystem;
using namespace sifrian;

namespace {

int cmd_train(const fs::path& config, const std::vector<std::string>& sets) {
  const RunConfig cfg = load_config(config, sets);
  const TrainResult res = run_training(cfg, &std::cerr);
  if (res.aborted) {
    std::cerr << "training aborted; last good params written to "
              << cfg.params_out << '\n';
    return 1;
  }
  std::cout << "wrote " << cfg.metrics.string() << " and " << cfg.params_out.string() << '\n';
  return 0;
}

int cmd_eval(const fs::path& params, const fs::path& images, const fs::path& labels) {
  const double acc = evaluate(load_params(params), load_dataset(images, labels));
  std::cout << "accuracy " << acc << '\n';
  return 0;
}

int cmd_verify(std::uint64_t seed, std::optional<double> tol, bool inject,
               std::size_t samples) {
  VerifyOptions opt;
  opt.seed = seed;
  opt.tolerance = tol;
  opt.flip_mk_bias_sign = inject;
  opt.samples = samples;
  return print_report(run_verify(opt), std::cout) ? 0 : 1;
}

// Spectrum at one pattern: the first training image when the configured
// files exist and match d_0, otherwise a seeded random pattern.
int cmd_spectrum(const fs::path& config, const fs::path& out,
                 const std::vector<std::string>& sets) {
  const RunConfig cfg = load_config(config, sets);
  const NetworkParams params = initial_params(cfg);
  Vector input, label;
  const fs::path img = cfg.resolve(cfg.train_images);
  const fs::path lab = cfg.resolve(cfg.train_labels);
  if (fs::exists(img) && fs::exists(lab)) {
    const Dataset d = head(load_dataset(img, lab), 1);
    if (d.size() == 1 && d.images[0].size() == cfg.sizes.front() &&
        cfg.sizes.back() == kClasses) {
      input = d.images[0];
      label = d.one_hot(0);
    }
  }
  if (input.empty()) {
    std::cerr << "using a random pattern (seed " << cfg.seed << ")\n";
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    input = Vector(cfg.sizes.front());
    for (double& x : input) x = u(rng);
    label = Vector(cfg.sizes.back());
    label[cfg.seed % label.size()] = 1.0;
  }

  const ForwardState state = forward(params, input);
  const AdjointState plain = unregularized_adjoint(params, state, label);
  SpectrumReport rep;
  if (cfg.lambda_mode == LambdaMode::spectral_adaptive) {
    rep = closed_form_spectrum(state, plain, spectral_schedule(state, plain));
  } else {
    const RegSchedule sched = cfg.fixed_schedule();
    rep = closed_form_spectrum(state, backprop(params, state, label, sched), sched);
  }

  std::ofstream csv(out, std::ios::trunc);
  if (!csv) throw Error("cannot write " + out.string());
  csv << "layer,family,eigenvalue,multiplicity\n";
  csv.precision(17);
  for (const SpectrumEntry& e : rep.family_a)
    csv << e.layer << ",a," << e.eigenvalue << ',' << e.multiplicity << '\n';
  for (const SpectrumEntry& e : rep.family_b)
    csv << e.layer << ",b," << e.eigenvalue << ',' << e.multiplicity << '\n';
  std::cout << "radius " << rep.radius << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sifrian second-order training and verification"};
  app.require_subcommand(1);

  fs::path config, out, params, images, labels;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  bool inject = false;
  std::size_t samples = 20;

  auto* train = app.add_subcommand("train", "train a network from a config file");
  train->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  train->add_option("--set", sets, "key=value override (repeatable)");

  auto* eval = app.add_subcommand("eval", "accuracy of a params file on an IDX dataset");
  eval->add_option("--params", params)->required()->check(CLI::ExistingFile);
  eval->add_option("--images", images)->required()->check(CLI::ExistingFile);
  eval->add_option("--labels", labels)->required()->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "run the seeded self-check suite");
  verify->add_option("--seed", seed, "sample seed");
  verify->add_option("--tolerance", tol, "replace every check's tolerance");
  verify->add_option("--samples", samples, "random instances per check group");
  verify->add_flag("--inject-mk-sign-error", inject, "negate the MK bias part (test hook)");

  auto* spectrum = app.add_subcommand("spectrum", "closed-form spectrum at the initial params");
  spectrum->add_option("--config", config)->required()->check(CLI::ExistingFile);
  spectrum->add_option("--out", out)->required();
  spectrum->add_option("--set", sets, "key=value override (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config, sets);
    if (*eval) return cmd_eval(params, images, labels);
    if (*verify) return cmd_verify(seed, tol, inject, samples);
    if (*spectrum) return cmd_spectrum(config, out, sets);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
