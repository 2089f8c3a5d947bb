#ifndef PATCHFORGE_PSO_HPP
#define PATCHFORGE_PSO_HPP

#include "patchforge/image.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace patchforge {

/// How the r1/r2 coefficients of the velocity update are produced:
/// fresh uniform draws per particle and dimension, or fixed constants.
enum class CoefficientMode { Stochastic, Fixed };

template <typename Scalar>
struct SwarmConfig {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  int alpha = 100;
  int m_max = 10;
  Scalar omega = Scalar(0.9);
  Scalar c1 = Scalar(1.6);
  Scalar c2 = Scalar(1.4);
  CoefficientMode r_mode = CoefficientMode::Stochastic;
  Scalar r1 = Scalar(0.5);
  Scalar r2 = Scalar(0.5);
  Vector lower;
  Vector upper;
  /// Empty means 0.5 * (upper - lower).
  Vector v_max;
  std::uint64_t seed = 0;
  std::optional<Scalar> early_stop_threshold;
  /// Stop on the first evaluation below the threshold instead of finishing
  /// the generation.
  bool abort_within_generation = true;
  /// Concurrent fitness evaluations per generation. Only used when the
  /// fitness is concurrent-safe and abort_within_generation is off.
  int workers = 1;

  void set_bounds(Eigen::Index dim, Scalar lo, Scalar hi) {
    lower = Vector::Constant(dim, lo);
    upper = Vector::Constant(dim, hi);
  }

  Vector velocity_cap() const {
    return v_max.size() == lower.size() ? v_max : Vector((upper - lower) * Scalar(0.5));
  }

  void validate(Eigen::Index dim) const {
    if (alpha < 1) throw InputError("swarm.alpha must be >= 1");
    if (m_max < 1) throw InputError("swarm.m_max must be >= 1");
    if (dim < 1) throw InputError("swarm dimension must be >= 1");
    if (lower.size() != dim || upper.size() != dim)
      throw InputError("swarm bounds must match the search dimension");
    if (!(lower.array() < upper.array()).all()) throw InputError("swarm bounds need lo < hi");
    if (v_max.size() != 0 && v_max.size() != dim)
      throw InputError("swarm.v_max must match the search dimension");
    if (!(velocity_cap().array() > Scalar(0)).all()) throw InputError("swarm.v_max must be > 0");
    if (workers < 1) throw InputError("swarm.workers must be >= 1");
  }
};

template <typename Scalar>
struct Particle {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector position;
  Vector velocity;
  Vector best_position;
  Scalar best_fitness = std::numeric_limits<Scalar>::infinity();
};

struct GenerationRecord {
  int generation = 0;
  double best_fitness = 0.0;
  std::int64_t evaluations = 0;
};

template <typename Scalar>
struct SwarmState {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  std::vector<Particle<Scalar>> particles;
  Vector global_best_position;
  Scalar global_best_fitness = std::numeric_limits<Scalar>::infinity();
  int generation = 0;
  std::int64_t total_evaluations = 0;
  std::int64_t nan_evaluations = 0;
  /// Set once an evaluation (or a generation) reached the early-stop
  /// threshold; the swarm does not move after that.
  bool converged = false;
  std::vector<GenerationRecord> history;
};

/// Coefficients drawn during one step, dimension x particle. Only filled
/// when a trace is passed to step().
template <typename Scalar>
struct StepTrace {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> r1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> r2;
};

template <typename Scalar>
using Fitness = std::function<Scalar(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>;

/// Thrown when the fitness function fails mid-run. The partial state is
/// kept so the caller can report how far the run got.
class FitnessError : public std::runtime_error {
 public:
  FitnessError(const std::string& what, std::int64_t evaluations, std::exception_ptr cause)
      : std::runtime_error(what), evaluations_(evaluations), cause_(std::move(cause)) {}
  std::int64_t evaluations() const { return evaluations_; }
  const std::exception_ptr& cause() const { return cause_; }
  /// Generations completed before the failure (filled in by run()).
  const std::vector<GenerationRecord>& history() const { return history_; }
  void set_history(std::vector<GenerationRecord> h) { history_ = std::move(h); }

 private:
  std::int64_t evaluations_;
  std::exception_ptr cause_;
  std::vector<GenerationRecord> history_;
};

template <typename Scalar>
SwarmState<Scalar> init_swarm(const SwarmConfig<Scalar>& cfg, Eigen::Index dim, std::mt19937_64& rng) {
  cfg.validate(dim);
  const auto vmax = cfg.velocity_cap();
  SwarmState<Scalar> state;
  state.particles.resize(static_cast<std::size_t>(cfg.alpha));
  for (auto& p : state.particles) {
    p.position.resize(dim);
    p.velocity.resize(dim);
    for (Eigen::Index d = 0; d < dim; ++d) {
      std::uniform_real_distribution<Scalar> pos(cfg.lower[d], cfg.upper[d]);
      p.position[d] = std::min(pos(rng), cfg.upper[d]);
    }
    for (Eigen::Index d = 0; d < dim; ++d) {
      std::uniform_real_distribution<Scalar> vel(-vmax[d], vmax[d]);
      p.velocity[d] = vel(rng);
    }
    p.best_position = p.position;
  }
  state.global_best_position = state.particles.front().position;
  return state;
}

namespace detail {

template <typename Scalar>
Scalar sanitize(Scalar f, SwarmState<Scalar>& state) {
  if (std::isnan(f)) {
    ++state.nan_evaluations;
    return std::numeric_limits<Scalar>::infinity();
  }
  return f;
}

template <typename Scalar>
std::vector<Scalar> evaluate_parallel(const SwarmState<Scalar>& state, const Fitness<Scalar>& fitness,
                                      int workers) {
  const std::size_t n = state.particles.size();
  std::vector<Scalar> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        out[i] = fitness(state.particles[i].position);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) throw FitnessError("fitness evaluation failed", state.total_evaluations + static_cast<std::int64_t>(i),
                         errors[i]);
  }
  return out;
}

}  // namespace detail

/// One generation: evaluate every particle, update personal and global
/// bests (strict improvement only), then move the swarm:
///   v' = omega v + c1 r1 (pbest - x) + c2 r2 (gbest - x),  x' = x + v'
/// with v' clamped to +-v_max and x' clamped to the bounds.
template <typename Scalar>
SwarmState<Scalar> step(SwarmState<Scalar> state, const Fitness<Scalar>& fitness,
                        const SwarmConfig<Scalar>& cfg, std::mt19937_64& rng,
                        StepTrace<Scalar>* trace = nullptr) {
  using Vector = typename SwarmState<Scalar>::Vector;
  const Eigen::Index dim = state.global_best_position.size();
  const auto& threshold = cfg.early_stop_threshold;
  const bool abort_early = cfg.abort_within_generation && threshold.has_value();

  std::vector<Scalar> precomputed;
  if (!abort_early && cfg.workers > 1 && state.particles.size() > 1)
    precomputed = detail::evaluate_parallel(state, fitness, cfg.workers);

  bool hit = false;
  for (std::size_t i = 0; i < state.particles.size(); ++i) {
    auto& p = state.particles[i];
    Scalar f;
    if (!precomputed.empty()) {
      f = precomputed[i];
    } else {
      try {
        f = fitness(p.position);
      } catch (...) {
        throw FitnessError("fitness evaluation failed", state.total_evaluations, std::current_exception());
      }
    }
    ++state.total_evaluations;
    f = detail::sanitize(f, state);
    if (f < p.best_fitness) {
      p.best_fitness = f;
      p.best_position = p.position;
    }
    if (abort_early && f < *threshold) {
      hit = true;
      break;
    }
  }
  // Particles are scanned in index order, so the earliest of several equal
  // bests is kept.
  for (const auto& p : state.particles) {
    if (p.best_fitness < state.global_best_fitness) {
      state.global_best_fitness = p.best_fitness;
      state.global_best_position = p.best_position;
    }
  }
  ++state.generation;
  state.history.push_back({state.generation, static_cast<double>(state.global_best_fitness),
                           state.total_evaluations});
  if (hit || (threshold && state.global_best_fitness < *threshold)) {
    state.converged = true;
    return state;
  }

  const Vector vmax = cfg.velocity_cap();
  const bool fixed = cfg.r_mode == CoefficientMode::Fixed;
  if (trace) {
    trace->r1.resize(dim, static_cast<Eigen::Index>(state.particles.size()));
    trace->r2.resize(dim, static_cast<Eigen::Index>(state.particles.size()));
  }
  std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
  for (std::size_t i = 0; i < state.particles.size(); ++i) {
    auto& p = state.particles[i];
    for (Eigen::Index d = 0; d < dim; ++d) {
      const Scalar r1 = fixed ? cfg.r1 : unit(rng);
      const Scalar r2 = fixed ? cfg.r2 : unit(rng);
      if (trace) {
        trace->r1(d, static_cast<Eigen::Index>(i)) = r1;
        trace->r2(d, static_cast<Eigen::Index>(i)) = r2;
      }
      Scalar v = cfg.omega * p.velocity[d] + cfg.c1 * r1 * (p.best_position[d] - p.position[d]) +
                 cfg.c2 * r2 * (state.global_best_position[d] - p.position[d]);
      v = std::clamp(v, -vmax[d], vmax[d]);
      p.velocity[d] = v;
      p.position[d] = std::clamp(p.position[d] + v, cfg.lower[d], cfg.upper[d]);
    }
  }
  return state;
}

template <typename Scalar>
struct RunResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> best_position;
  Scalar best_fitness = std::numeric_limits<Scalar>::infinity();
  std::int64_t evaluations = 0;
  int generations = 0;
  bool stopped_early = false;
  std::int64_t nan_evaluations = 0;
  std::vector<GenerationRecord> history;
};

/// Runs up to m_max generations, stopping as soon as the global best drops
/// below the early-stop threshold.
template <typename Scalar>
RunResult<Scalar> run(const SwarmConfig<Scalar>& cfg, Eigen::Index dim, const Fitness<Scalar>& fitness,
                      std::mt19937_64& rng) {
  auto state = init_swarm(cfg, dim, rng);
  while (state.generation < cfg.m_max && !state.converged) {
    auto history = state.history;
    try {
      state = step(std::move(state), fitness, cfg, rng);
    } catch (FitnessError& e) {
      e.set_history(std::move(history));
      throw;
    }
  }
  RunResult<Scalar> out;
  out.best_position = state.global_best_position;
  out.best_fitness = state.global_best_fitness;
  out.evaluations = state.total_evaluations;
  out.generations = state.generation;
  out.stopped_early = state.converged;
  out.nan_evaluations = state.nan_evaluations;
  out.history = std::move(state.history);
  return out;
}

/// Trajectory log: generation,best_fitness,evaluations.
inline void write_trajectory_csv(std::ostream& os, const std::vector<GenerationRecord>& history) {
  os << "generation,best_fitness,evaluations\n";
  char buf[64];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%.17g", r.best_fitness);
    os << r.generation << ',' << buf << ',' << r.evaluations << '\n';
  }
}

}  // namespace patchforge

#endif  // PATCHFORGE_PSO_HPP
