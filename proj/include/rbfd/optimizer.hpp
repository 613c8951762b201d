#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "rbfd/errors.hpp"
#include "rbfd/loss.hpp"
#include "rbfd/matrix.hpp"
#include "rbfd/model.hpp"
#include "rbfd/random.hpp"

namespace rbfd {

enum class OptimizerKind { Adam, AdamW, Adagrad };

inline std::string_view to_string(OptimizerKind kind) noexcept {
  switch (kind) {
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::AdamW: return "adamw";
    case OptimizerKind::Adagrad: return "adagrad";
  }
  return "?";
}

inline OptimizerKind parse_optimizer(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "adam") return OptimizerKind::Adam;
  if (lower == "adamw") return OptimizerKind::AdamW;
  if (lower == "adagrad") return OptimizerKind::Adagrad;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "' (adam|adamw|adagrad)");
}

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;  // AdamW only
};

struct FitConfig {
  std::size_t r = 1;
  bool symmetric = false;
  OptimizerSettings optimizer;
  std::size_t max_iters = 10000;
  std::size_t batch_runs = 100;
  double init_scale = 0.1;
  bool stochastic = false;
  std::size_t minibatch_size = 0;
  std::optional<double> target_loss;
  std::uint64_t seed = 0;
  std::size_t trace_stride = 100;
  /// Worker threads for independent runs; 0 means hardware concurrency.
  /// Results never depend on this value.
  std::size_t threads = 1;

  void validate() const {
    if (!(optimizer.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (batch_runs < 1) throw std::invalid_argument("batch_runs must be >= 1");
    if (!(init_scale > 0.0)) throw std::invalid_argument("init_scale must be > 0");
    if (stochastic && minibatch_size < 1)
      throw std::invalid_argument("minibatch_size must be >= 1 in stochastic mode");
    if (trace_stride < 1) throw std::invalid_argument("trace_stride must be >= 1");
    if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0 && optimizer.beta2 >= 0.0 &&
          optimizer.beta2 < 1.0))
      throw std::invalid_argument("Adam betas must lie in [0, 1)");
    if (!(optimizer.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  }
};

struct TracePoint {
  std::size_t iteration = 0;
  double loss = 0.0;
};

struct FitReport {
  RbfModel best_model;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_run = 0;
  std::vector<double> per_run_final_losses;
  std::vector<TracePoint> loss_trajectory;
  std::size_t iterations_used = 0;
  std::size_t diverged_runs = 0;
  std::uint64_t seed = 0;

  /// Fraction of runs whose final full-matrix MSE is strictly below `threshold`.
  double success_fraction(double threshold) const {
    if (per_run_final_losses.empty()) return 0.0;
    const auto hits = std::count_if(per_run_final_losses.begin(), per_run_final_losses.end(),
                                    [&](double l) { return l < threshold; });
    return static_cast<double>(hits) / static_cast<double>(per_run_final_losses.size());
  }
};

/// U, V ~ N(0, init_scale^2), a ~ N(0, 1), b = 0, drawn in that order.
inline RbfModel init_model(std::size_t r, std::size_t n, std::size_t m, bool symmetric,
                           double init_scale, Rng& rng) {
  RbfModel model(r, n, m, symmetric);
  std::normal_distribution<double> vec(0.0, init_scale);
  std::normal_distribution<double> coef(0.0, 1.0);
  auto theta = model.flat();
  const std::size_t nv = model.shape().vector_size();
  for (std::size_t p = 0; p < nv; ++p) theta[p] = vec(rng);
  for (double& ak : model.a()) ak = coef(rng);
  model.b() = 0.0;
  return model;
}

/// Adaptive first-order update rules over a flat parameter block. The
/// iteration counter starts at 1 and is supplied by the caller.
class AdaptiveOptimizer {
 public:
  AdaptiveOptimizer(OptimizerSettings settings, const ModelShape& shape)
      : settings_(settings),
        decay_extent_(shape.vector_size()),
        first_(shape.total_size(), 0.0),
        second_(settings.kind == OptimizerKind::Adagrad ? 0 : shape.total_size(), 0.0) {}

  const OptimizerSettings& settings() const noexcept { return settings_; }

  /// Returns false (and leaves the model untouched) on a non-finite gradient.
  bool step(ParameterBlock& model, const GradientSet& grads, std::uint64_t iteration) {
    auto theta = model.flat();
    const auto g = grads.flat();
    if (theta.size() != g.size() || theta.size() != first_.size())
      throw ShapeError("optimizer state does not match model shape");
    if (iteration < 1) throw std::invalid_argument("iteration counter starts at 1");
    for (double x : g)
      if (!std::isfinite(x)) return false;

    const double lr = settings_.learning_rate;
    const double eps = settings_.epsilon;
    if (settings_.kind == OptimizerKind::Adagrad) {
      for (std::size_t p = 0; p < theta.size(); ++p) {
        first_[p] += g[p] * g[p];
        theta[p] -= lr * g[p] / (std::sqrt(first_[p]) + eps);
      }
      return true;
    }

    const double b1 = settings_.beta1, b2 = settings_.beta2;
    const double t = static_cast<double>(iteration);
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    if (settings_.kind == OptimizerKind::AdamW) {
      // Decoupled decay on component vectors only; a and b are left alone.
      const double keep = 1.0 - lr * settings_.weight_decay;
      for (std::size_t p = 0; p < decay_extent_; ++p) theta[p] *= keep;
    }
    for (std::size_t p = 0; p < theta.size(); ++p) {
      first_[p] = b1 * first_[p] + (1.0 - b1) * g[p];
      second_[p] = b2 * second_[p] + (1.0 - b2) * g[p] * g[p];
      const double mhat = first_[p] / c1;
      const double vhat = second_[p] / c2;
      theta[p] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    return true;
  }

 private:
  OptimizerSettings settings_;
  std::size_t decay_extent_;
  std::vector<double> first_;   // Adam: first moment; Adagrad: squared-gradient sum
  std::vector<double> second_;  // Adam: second moment
};

/// `size` distinct coordinates drawn uniformly from the n x m grid (Floyd's
/// algorithm; the returned order is the insertion order).
inline IndexSample sample_minibatch(std::size_t n, std::size_t m, std::size_t size, Rng& rng) {
  const std::size_t total = n * m;
  if (size < 1 || size > total)
    throw std::invalid_argument("sample_minibatch: size must be in [1, n*m]");
  IndexSample sample;
  sample.pairs.reserve(size);
  std::vector<bool> taken(total, false);
  for (std::size_t j = total - size; j < total; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    std::size_t t = pick(rng);
    if (taken[t]) t = j;
    taken[t] = true;
    sample.pairs.push_back({t / m, t % m});
  }
  return sample;
}

namespace detail {

struct RunOutcome {
  RbfModel model;
  double final_loss = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::vector<TracePoint> trace;
  bool diverged = false;
};

inline RunOutcome run_single(const DenseMatrix& target, const FitConfig& config,
                             std::size_t run_index) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Rng rng = make_rng(config.seed, streams::kRunBase + run_index);
  RunOutcome out;
  out.model = init_model(config.r, target.rows(), target.cols(), config.symmetric,
                         config.init_scale, rng);
  AdaptiveOptimizer opt(config.optimizer, out.model.shape());
  GradientSet grad(out.model.shape());
  LossWorkspace ws;
  const double stop_at = config.target_loss.value_or(-kInf);

  std::size_t it = 0;
  for (; it < config.max_iters; ++it) {
    const bool checkpoint = it % config.trace_stride == 0;
    if (config.stochastic) {
      if (checkpoint) {
        const double full = mse_loss(target, out.model);
        if (!std::isfinite(full)) break;
        out.trace.push_back({it, full});
        if (full <= stop_at) break;
      }
      const auto sample =
          sample_minibatch(target.rows(), target.cols(), config.minibatch_size, rng);
      loss_and_gradient_subset(target, out.model, sample, grad, ws);
    } else {
      const double full = loss_and_gradient(target, out.model, grad, ws);
      if (!std::isfinite(full)) break;
      if (checkpoint) out.trace.push_back({it, full});
      if (full <= stop_at) break;
    }
    if (!opt.step(out.model, grad, it + 1)) break;
  }
  out.iterations = it;
  const double final_loss = out.model.all_finite() ? mse_loss(target, out.model) : kInf;
  out.diverged = !std::isfinite(final_loss);
  out.final_loss = out.diverged ? kInf : final_loss;
  if (out.trace.empty() || out.trace.back().iteration != it) out.trace.push_back({it, out.final_loss});
  return out;
}

}  // namespace detail

/// Fits `config.batch_runs` independently initialized models and keeps the one
/// with the lowest final full-matrix MSE (ties: lowest run index). Run i draws
/// from its own stream derived from (seed, i), so the report is identical for
/// any thread count.
inline FitReport fit(const DenseMatrix& target, const FitConfig& config) {
  config.validate();
  if (!target.all_finite()) throw std::invalid_argument("fit: target has non-finite values");
  if (config.symmetric && !target.square())
    throw ShapeError("fit: symmetric model requires a square target");
  if (config.stochastic && config.minibatch_size > target.size())
    throw std::invalid_argument("fit: minibatch_size exceeds matrix size");

  const std::size_t runs = config.batch_runs;
  std::vector<detail::RunOutcome> outcomes(runs);
  std::size_t workers = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  workers = std::clamp<std::size_t>(workers, 1, runs);

  if (workers == 1) {
    for (std::size_t i = 0; i < runs; ++i) outcomes[i] = detail::run_single(target, config, i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < runs; i = next++)
          outcomes[i] = detail::run_single(target, config, i);
      });
  }

  FitReport report;
  report.seed = config.seed;
  report.per_run_final_losses.reserve(runs);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < runs; ++i) {
    const auto& o = outcomes[i];
    report.per_run_final_losses.push_back(o.final_loss);
    if (o.diverged) {
      ++report.diverged_runs;
      continue;
    }
    if (!best || o.final_loss < outcomes[*best].final_loss) best = i;
  }
  if (!best)
    throw AllRunsDivergedError("fit: all " + std::to_string(runs) + " runs diverged");
  auto& winner = outcomes[*best];
  report.best_run = *best;
  report.best_loss = winner.final_loss;
  report.iterations_used = winner.iterations;
  report.loss_trajectory = std::move(winner.trace);
  report.best_model = std::move(winner.model);
  return report;
}

}  // namespace rbfd
