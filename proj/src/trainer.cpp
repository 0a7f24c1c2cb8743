#include "sifrian/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

#include "sifrian/errors.hpp"
#include "sifrian/optimizer.hpp"
#include "sifrian/params_io.hpp"

namespace sifrian {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t argmax(const Vector& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::string metrics_header(bool wall_time) {
  std::string h =
      "epoch,step,train_cost,train_accuracy,test_accuracy,hessian_radius,"
      "mean_inner_product,descent_violations,fallback_steps";
  if (wall_time) h += ",wall_time";
  return h;
}

std::string format_row(const MetricsRow& r, bool wall_time) {
  std::string s = std::to_string(r.epoch) + "," + std::to_string(r.step) + "," +
                  num(r.train_cost) + "," + num(r.train_accuracy) + "," +
                  num(r.test_accuracy) + "," +
                  (r.hessian_radius ? num(*r.hessian_radius) : "") + "," +
                  num(r.mean_inner_product) + "," + num(r.descent_violations) +
                  "," + std::to_string(r.fallback_steps);
  if (wall_time) s += "," + (r.wall_time ? num(*r.wall_time) : "");
  return s;
}

std::vector<std::size_t> epoch_order(std::uint64_t seed, std::size_t epoch,
                                     std::size_t count) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  // Fisher-Yates with an explicit draw so the order does not depend on the
  // standard library's shuffle.
  for (std::size_t i = count; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

double evaluate(const NetworkParams& params, const Dataset& data) {
  if (data.size() == 0) throw Error("cannot evaluate on an empty dataset");
  if (data.images.front().size() != params.sizes.front())
    throw DimensionError("images have " + std::to_string(data.images.front().size()) +
                         " pixels, network expects " + std::to_string(params.sizes.front()));
  if (params.sizes.back() != kClasses)
    throw DimensionError("network has " + std::to_string(params.sizes.back()) +
                         " outputs, expected " + std::to_string(kClasses));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (argmax(predict(params, data.images[i])) == data.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

NetworkParams initial_params(const RunConfig& cfg) {
  NetworkParams p = init(cfg.sizes, cfg.activation, cfg.seed);
  if (cfg.white_layer) p = add_white_layer(p);
  return p;
}

TrainResult train(const RunConfig& cfg, const Dataset& train_set,
                  const Dataset& test_set, std::ostream* csv, std::ostream* log) {
  cfg.validate();
  if (train_set.size() == 0) throw Error("training set is empty");
  if (train_set.images.front().size() != cfg.sizes.front())
    throw DimensionError("training images have " +
                         std::to_string(train_set.images.front().size()) +
                         " pixels, sizes start with " + std::to_string(cfg.sizes.front()));

  TrainResult res;
  res.params = initial_params(cfg);
  StepOptions opt = cfg.step_options();
  opt.measure_after = false;
  if (csv) *csv << metrics_header(cfg.record_wall_time) << '\n' << std::flush;

  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs && !res.aborted; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    double cost = 0.0, inner = 0.0, radius = 0.0;
    std::size_t correct = 0, violations = 0, fallbacks = 0, radius_count = 0, done = 0;
    for (std::size_t idx : epoch_order(cfg.seed, epoch, train_set.size())) {
      try {
        const StepReport r = train_step(res.params, train_set.images[idx],
                                        train_set.one_hot(idx), opt);
        cost += r.cost_before;
        inner += r.inner_product;
        correct += r.correct_before ? 1 : 0;
        if (opt.kind != DirectionKind::sgd && !(r.inner_product > 0.0)) ++violations;
        if (r.kind != opt.kind) ++fallbacks;
        if (r.hessian_radius) {
          radius += *r.hessian_radius;
          ++radius_count;
        }
        ++done;
        ++step;
      } catch (const NonFiniteError& e) {
        res.aborted = "epoch " + std::to_string(epoch) + ", step " +
                      std::to_string(step + 1) + ": " + e.what();
        if (log) *log << "aborting: " << *res.aborted << '\n';
        break;
      }
    }
    if (res.aborted) break;

    MetricsRow row;
    row.epoch = epoch;
    row.step = step;
    const double n = static_cast<double>(done);
    row.train_cost = cost / n;
    row.train_accuracy = static_cast<double>(correct) / n;
    row.test_accuracy = test_set.size() ? evaluate(res.params, test_set) : 0.0;
    if (radius_count) row.hessian_radius = radius / static_cast<double>(radius_count);
    row.mean_inner_product = inner / n;
    row.descent_violations = static_cast<double>(violations) / n;
    row.fallback_steps = fallbacks;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cfg.record_wall_time) row.wall_time = secs;
    if (csv) *csv << format_row(row, cfg.record_wall_time) << '\n' << std::flush;
    if (log)
      *log << to_string(cfg.optimizer) << " epoch " << epoch << ": cost " << row.train_cost
           << ", train acc " << row.train_accuracy << ", test acc " << row.test_accuracy
           << " (" << secs << " s)\n";
    res.rows.push_back(row);
  }
  return res;
}

TrainResult run_training(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  const Dataset train_set = head(
      load_dataset(cfg.resolve(cfg.train_images), cfg.resolve(cfg.train_labels)),
      cfg.train_subset);
  const Dataset test_set = head(
      load_dataset(cfg.resolve(cfg.test_images), cfg.resolve(cfg.test_labels)),
      cfg.test_subset);

  std::ofstream csv(cfg.metrics, std::ios::trunc);
  if (!csv) throw Error("cannot write " + cfg.metrics.string());
  if (cfg.plot_script) {
    std::ofstream gp(*cfg.plot_script, std::ios::trunc);
    if (!gp) throw Error("cannot write " + cfg.plot_script->string());
    gp << plot_script(cfg.metrics);
  }
  TrainResult res = train(cfg, train_set, test_set, &csv, log);
  save_params(res.params, cfg.params_out);
  return res;
}

std::string plot_script(const std::filesystem::path& metrics) {
  const std::string f = metrics.string();
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'epoch'\n"
         "set multiplot layout 1,2\n"
         "set title 'training cost'\n"
         "plot '" + f + "' using 1:3 with linespoints\n"
         "set title 'accuracy'\n"
         "set yrange [0:1]\n"
         "plot '" + f + "' using 1:4 with linespoints, '" + f +
         "' using 1:5 with linespoints\n"
         "unset multiplot\n";
}

}  // namespace sifrian
