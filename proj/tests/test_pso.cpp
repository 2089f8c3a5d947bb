#include "patchforge/pso.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace pf = patchforge;
using Vec = Eigen::VectorXd;

namespace {

double sphere(const Vec& x) { return x.squaredNorm(); }

pf::SwarmConfig<double> sphere_config(std::uint64_t seed) {
  pf::SwarmConfig<double> cfg;
  cfg.set_bounds(8, -1.0, 1.0);
  cfg.seed = seed;
  return cfg;
}

bool within_bounds(const pf::SwarmState<double>& s, const pf::SwarmConfig<double>& cfg) {
  const Vec cap = cfg.velocity_cap();
  for (const auto& p : s.particles) {
    if ((p.position.array() < cfg.lower.array()).any() || (p.position.array() > cfg.upper.array()).any())
      return false;
    if ((p.velocity.array().abs() > cap.array()).any()) return false;
  }
  return true;
}

}  // namespace

TEST(SwarmConfig, PaperDefaults) {
  const pf::SwarmConfig<double> cfg;
  EXPECT_EQ(cfg.alpha, 100);
  EXPECT_EQ(cfg.m_max, 10);
  EXPECT_DOUBLE_EQ(cfg.omega, 0.9);
  EXPECT_DOUBLE_EQ(cfg.c1, 1.6);
  EXPECT_DOUBLE_EQ(cfg.c2, 1.4);
  EXPECT_DOUBLE_EQ(cfg.r1, 0.5);
  EXPECT_DOUBLE_EQ(cfg.r2, 0.5);
}

TEST(SwarmConfig, Validation) {
  pf::SwarmConfig<double> cfg;
  cfg.set_bounds(2, 0.0, 1.0);
  EXPECT_NO_THROW(cfg.validate(2));
  EXPECT_THROW(cfg.validate(3), pf::InputError);
  auto bad = cfg;
  bad.alpha = 0;
  EXPECT_THROW(bad.validate(2), pf::InputError);
  bad = cfg;
  bad.set_bounds(2, 1.0, 1.0);
  EXPECT_THROW(bad.validate(2), pf::InputError);
  bad = cfg;
  bad.v_max = Vec::Constant(2, 0.0);
  EXPECT_THROW(bad.validate(2), pf::InputError);
}

TEST(InitSwarm, PopulationAndDeterminism) {
  auto cfg = sphere_config(0);
  std::mt19937_64 a(5);
  std::mt19937_64 b(5);
  const auto sa = pf::init_swarm(cfg, 8, a);
  const auto sb = pf::init_swarm(cfg, 8, b);
  ASSERT_EQ(sa.particles.size(), 100u);
  for (std::size_t i = 0; i < sa.particles.size(); ++i) {
    EXPECT_EQ(sa.particles[i].position, sb.particles[i].position);
    EXPECT_EQ(sa.particles[i].velocity, sb.particles[i].velocity);
    EXPECT_TRUE(std::isinf(sa.particles[i].best_fitness));
  }
  EXPECT_TRUE(within_bounds(sa, cfg));
}

TEST(InitSwarm, NarrowBounds) {
  pf::SwarmConfig<double> cfg;
  cfg.set_bounds(3, 0.25, 0.25 + 1e-9);
  std::mt19937_64 rng(1);
  for (const auto& p : pf::init_swarm(cfg, 3, rng).particles)
    EXPECT_TRUE(((p.position.array() - 0.25).abs() <= 1e-9).all());
}

TEST(Step, ZeroCoefficientsStopTheSwarm) {
  auto cfg = sphere_config(0);
  cfg.omega = 0.0;
  cfg.c1 = 0.0;
  cfg.c2 = 0.0;
  std::mt19937_64 rng(2);
  const auto s0 = pf::init_swarm(cfg, 8, rng);
  const auto s1 = pf::step(s0, pf::Fitness<double>(sphere), cfg, rng);
  for (std::size_t i = 0; i < s0.particles.size(); ++i) {
    EXPECT_TRUE((s1.particles[i].velocity.array() == 0.0).all());
    EXPECT_EQ(s1.particles[i].position, s0.particles[i].position);
  }
}

TEST(Step, SingleParticleKeepsOnlyInertia) {
  auto cfg = sphere_config(0);
  cfg.alpha = 1;
  cfg.omega = 0.7;
  std::mt19937_64 rng(3);
  const auto s0 = pf::init_swarm(cfg, 8, rng);
  const auto s1 = pf::step(s0, pf::Fitness<double>(sphere), cfg, rng);
  const auto& p0 = s0.particles[0];
  const auto& p1 = s1.particles[0];
  for (int d = 0; d < 8; ++d) {
    const double v = 0.7 * p0.velocity[d];
    EXPECT_EQ(p1.velocity[d], v);
    EXPECT_EQ(p1.position[d], std::clamp(p0.position[d] + v, -1.0, 1.0));
  }
}

TEST(Step, FixedModeWithoutAttractionIsInertiaOnly) {
  auto cfg = sphere_config(0);
  cfg.r_mode = pf::CoefficientMode::Fixed;
  cfg.c1 = 0.0;
  cfg.c2 = 0.0;
  cfg.set_bounds(8, -1e6, 1e6);
  cfg.v_max = Vec::Constant(8, 10.0);
  std::mt19937_64 rng(4);
  const auto s0 = pf::init_swarm(cfg, 8, rng);
  const auto s1 = pf::step(s0, pf::Fitness<double>(sphere), cfg, rng);
  for (std::size_t i = 0; i < s0.particles.size(); ++i) {
    for (int d = 0; d < 8; ++d) {
      const double v = 0.9 * s0.particles[i].velocity[d];
      EXPECT_EQ(s1.particles[i].velocity[d], v);
      EXPECT_EQ(s1.particles[i].position[d], s0.particles[i].position[d] + v);
    }
  }
}

TEST(Step, VelocityUpdateMatchesHandComputation) {
  auto cfg = sphere_config(0);
  cfg.alpha = 6;
  cfg.set_bounds(3, -1.0, 1.0);
  std::mt19937_64 rng(5);
  auto s = pf::init_swarm(cfg, 3, rng);
  s = pf::step(std::move(s), pf::Fitness<double>(sphere), cfg, rng);
  const auto before = s;
  pf::StepTrace<double> trace;
  const auto after = pf::step(s, pf::Fitness<double>(sphere), cfg, rng, &trace);

  // Personal and global bests after the second evaluation, by hand.
  std::vector<Vec> pbest;
  Vec gbest = before.global_best_position;
  double gfit = before.global_best_fitness;
  for (const auto& p : before.particles) {
    const double f = sphere(p.position);
    pbest.push_back(f < p.best_fitness ? p.position : p.best_position);
  }
  for (std::size_t i = 0; i < before.particles.size(); ++i) {
    const double f = sphere(pbest[i]);
    if (f < gfit) {
      gfit = f;
      gbest = pbest[i];
    }
  }
  for (std::size_t i = 0; i < before.particles.size(); ++i) {
    const auto& p = before.particles[i];
    for (int d = 0; d < 3; ++d) {
      const double r1 = trace.r1(d, static_cast<Eigen::Index>(i));
      const double r2 = trace.r2(d, static_cast<Eigen::Index>(i));
      double v = 0.9 * p.velocity[d] + 1.6 * r1 * (pbest[i][d] - p.position[d]) + 1.4 * r2 * (gbest[d] - p.position[d]);
      v = std::clamp(v, -1.0, 1.0);
      EXPECT_EQ(after.particles[i].velocity[d], v);
      EXPECT_EQ(after.particles[i].position[d], std::clamp(p.position[d] + v, -1.0, 1.0));
    }
  }
}

TEST(Step, BoundsHoldEveryGeneration) {
  auto cfg = sphere_config(0);
  cfg.v_max = Vec::Constant(8, 0.3);
  std::mt19937_64 rng(6);
  auto s = pf::init_swarm(cfg, 8, rng);
  for (int g = 0; g < 10; ++g) {
    s = pf::step(std::move(s), pf::Fitness<double>(sphere), cfg, rng);
    EXPECT_TRUE(within_bounds(s, cfg));
  }
}

TEST(Step, NanCountsAsInfinity) {
  pf::SwarmConfig<double> cfg;
  cfg.alpha = 10;
  cfg.set_bounds(2, 0.0, 1.0);
  std::mt19937_64 rng(7);
  auto s = pf::init_swarm(cfg, 2, rng);
  s = pf::step(std::move(s), pf::Fitness<double>([](const Vec&) { return std::nan(""); }), cfg, rng);
  EXPECT_EQ(s.nan_evaluations, 10);
  EXPECT_TRUE(std::isinf(s.global_best_fitness));
}

TEST(Step, TiesKeepIncumbent) {
  pf::SwarmConfig<double> cfg;
  cfg.alpha = 5;
  cfg.set_bounds(2, 0.0, 1.0);
  std::mt19937_64 rng(8);
  auto s = pf::init_swarm(cfg, 2, rng);
  const pf::Fitness<double> flat = [](const Vec&) { return 1.0; };
  s = pf::step(std::move(s), flat, cfg, rng);
  const Vec first_best = s.particles[0].best_position;
  const Vec first_global = s.global_best_position;
  s = pf::step(std::move(s), flat, cfg, rng);
  EXPECT_EQ(s.particles[0].best_position, first_best);
  EXPECT_EQ(s.global_best_position, first_global);
}

TEST(Run, ConstantZeroStopsAfterOneGeneration) {
  pf::SwarmConfig<double> cfg;
  cfg.set_bounds(4, 0.0, 1.0);
  cfg.early_stop_threshold = 0.5;
  cfg.abort_within_generation = false;
  std::mt19937_64 rng(9);
  const auto r = pf::run(cfg, 4, pf::Fitness<double>([](const Vec&) { return 0.0; }), rng);
  EXPECT_EQ(r.generations, 1);
  EXPECT_EQ(r.evaluations, 100);
  EXPECT_TRUE(r.stopped_early);
}

TEST(Run, MidGenerationAbortStopsAtFirstHit) {
  pf::SwarmConfig<double> cfg;
  cfg.set_bounds(4, 0.0, 1.0);
  cfg.early_stop_threshold = 0.5;
  std::mt19937_64 rng(9);
  const auto r = pf::run(cfg, 4, pf::Fitness<double>([](const Vec&) { return 0.0; }), rng);
  EXPECT_EQ(r.evaluations, 1);
  EXPECT_TRUE(r.stopped_early);
}

TEST(Run, NoThresholdUsesFullBudget) {
  pf::SwarmConfig<double> cfg;
  cfg.set_bounds(4, 0.0, 1.0);
  std::mt19937_64 rng(10);
  const auto r = pf::run(cfg, 4, pf::Fitness<double>(sphere), rng);
  EXPECT_EQ(r.evaluations, 1000);
  EXPECT_EQ(r.generations, 10);
  EXPECT_FALSE(r.stopped_early);
}

TEST(Run, SphereTrajectory) {
  auto cfg = sphere_config(11);
  cfg.early_stop_threshold = 0.5;
  cfg.abort_within_generation = false;
  std::mt19937_64 rng(cfg.seed);
  const auto r = pf::run(cfg, 8, pf::Fitness<double>(sphere), rng);
  ASSERT_FALSE(r.history.empty());
  for (std::size_t g = 1; g < r.history.size(); ++g)
    EXPECT_LE(r.history[g].best_fitness, r.history[g - 1].best_fitness);
  for (const auto& h : r.history) EXPECT_EQ(h.evaluations, 100 * h.generation);
  EXPECT_EQ(r.evaluations, 100 * r.generations);
  EXPECT_LT(r.best_fitness, 0.5);
  EXPECT_TRUE(r.stopped_early);
}

TEST(Run, DeterministicUnderSeed) {
  auto cfg = sphere_config(12);
  auto once = [&] {
    std::mt19937_64 rng(cfg.seed);
    return pf::run(cfg, 8, pf::Fitness<double>(sphere), rng);
  };
  const auto a = once();
  const auto b = once();
  EXPECT_EQ(a.best_position, b.best_position);
  EXPECT_EQ(a.best_fitness, b.best_fitness);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].best_fitness, b.history[i].best_fitness);
}

TEST(Run, ParallelMatchesSequential) {
  auto cfg = sphere_config(13);
  cfg.abort_within_generation = false;
  auto with_workers = [&](int w) {
    auto c = cfg;
    c.workers = w;
    std::mt19937_64 rng(c.seed);
    return pf::run(c, 8, pf::Fitness<double>(sphere), rng);
  };
  const auto a = with_workers(1);
  const auto b = with_workers(4);
  EXPECT_EQ(a.best_position, b.best_position);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Run, FitnessErrorCarriesProgress) {
  pf::SwarmConfig<double> cfg;
  cfg.alpha = 10;
  cfg.set_bounds(2, 0.0, 1.0);
  int calls = 0;
  const pf::Fitness<double> f = [&](const Vec&) -> double {
    if (++calls == 25) throw std::runtime_error("boom");
    return 1.0;
  };
  std::mt19937_64 rng(14);
  try {
    pf::run(cfg, 2, f, rng);
    FAIL() << "expected FitnessError";
  } catch (const pf::FitnessError& e) {
    EXPECT_EQ(e.evaluations(), 24);
    EXPECT_EQ(e.history().size(), 2u);
  }
}

TEST(Trajectory, CsvLayout) {
  std::ostringstream os;
  pf::write_trajectory_csv(os, {{1, 0.5, 100}, {2, 0.25, 200}});
  EXPECT_EQ(os.str(), "generation,best_fitness,evaluations\n1,0.5,100\n2,0.25,200\n");
}
