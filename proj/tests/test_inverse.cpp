#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "scatterkit/inverse.hpp"
#include "scatterkit/io.hpp"
#include "scatterkit/moments.hpp"

using namespace scatterkit;

namespace {

double rel(const Signal& a, const Signal& b) { return distance(a, b) / b.norm(); }

Signal scaled(const Signal& x, double c) {
  Signal out = x;
  for (auto& v : out.samples()) v *= c;
  return out;
}

}  // namespace

TEST(Gradient, VanishesAtTarget) {
  const GridShape g({32, 32});
  const auto bank = build_bank(g, 3, 4);
  const Signal x = oracle::random_signal(g, 1);
  for (Rho kind : {Rho::modulus, Rho::rectifier}) {
    const ScatterConfig cfg{2, 1, kind};
    const auto grad = scatter_gradient(x, bank, cfg, scatter(x, bank, cfg));
    EXPECT_LE(grad.norm(), 1e-8 * x.norm());
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  const GridShape g({8});
  for (int K : {1, 2}) {
    const auto bank = build_bank(g, 2, K);
    for (Rho kind : {Rho::modulus, Rho::rectifier}) {
      for (int os : {1, kUnsubsampled}) {
        const ScatterConfig cfg{2, os, kind};
        const Scatterer sc(bank, cfg);
        const Signal x = oracle::random_signal(g, 10 + K);
        const auto target = sc(oracle::random_signal(g, 20 + K));
        const auto grad = scatter_gradient(x, bank, cfg, target);
        const auto fd = oracle::finite_difference_gradient([&](const Signal& s) { return sc.objective(s, target); }, x, 1e-6);
        EXPECT_LT(oracle::relative_error(grad.real_part(), fd), 1e-4) << "K=" << K << " os=" << os;
      }
    }
  }
}

TEST(Gradient, MatchesFiniteDifferences2d) {
  const GridShape g({8, 8});
  const auto bank = build_bank(g, 3, 4);
  const ScatterConfig cfg{2, 1, Rho::modulus};
  const Scatterer sc(bank, cfg);
  const Signal x = oracle::random_signal(g, 30);
  const auto target = sc(oracle::random_signal(g, 31));
  const auto grad = scatter_gradient(x, bank, cfg, target);
  const auto fd = oracle::finite_difference_gradient([&](const Signal& s) { return sc.objective(s, target); }, x, 1e-6);
  EXPECT_LT(oracle::relative_error(grad.real_part(), fd), 1e-4);
}

// Phi is positively homogeneous, so scaling x and the target by c scales the
// objective by c^2 and the gradient by c.
TEST(Gradient, Homogeneity) {
  const GridShape g({16, 16});
  const auto bank = build_bank(g, 3, 4);
  const ScatterConfig cfg{2, 1, Rho::modulus};
  const Scatterer sc(bank, cfg);
  const Signal x = oracle::random_signal(g, 40);
  const Signal y = oracle::random_signal(g, 41);
  const double c = 3.0;
  const auto [v1, g1] = sc.objective_and_gradient(x, sc(y));
  const auto [vc, gc] = sc.objective_and_gradient(scaled(x, c), sc(scaled(y, c)));
  EXPECT_NEAR(vc, c * c * v1, 1e-12 * vc);
  EXPECT_LT(rel(gc, scaled(g1, c)), 1e-12);
}

TEST(Reconstruct, ZeroTargetGivesZero) {
  const GridShape g({16, 16});
  const auto bank = build_bank(g, 4, 4);
  const auto run = reconstruct(scatter(Signal(g), bank), bank);
  EXPECT_EQ(run.iterate, Signal(g));
  EXPECT_TRUE(run.converged);
  EXPECT_LE(run.history.size(), 2u);
}

TEST(Reconstruct, HistoryIsMonotone) {
  const GridShape g({16, 16});
  const auto bank = build_bank(g, 4, 4);
  const Signal x = io::read_pgm(std::string(SCATTERKIT_DATA_DIR) + "/camera_128.pgm");
  Signal crop(g);
  for (std::size_t r = 0; r < 16; ++r) {
    for (std::size_t c = 0; c < 16; ++c) crop.at(r, c) = x.at(56 + r, 56 + c);
  }
  ReconstructionConfig rc;
  rc.seed = 3;
  rc.max_iter = 200;
  const auto run = reconstruct(scatter(crop, bank), bank, rc);
  ASSERT_GT(run.history.size(), 10u);
  for (std::size_t i = 1; i < run.history.size(); ++i) EXPECT_LE(run.history[i], run.history[i - 1]);
  EXPECT_LT(run.history.back(), 0.01 * run.history.front());
  EXPECT_FALSE(run.converged);
}

TEST(Reconstruct, SameSeedIsDeterministic) {
  const GridShape g({16, 16});
  const auto bank = build_bank(g, 4, 4);
  const auto target = scatter(oracle::random_signal(g, 5), bank);
  ReconstructionConfig rc;
  rc.seed = 9;
  rc.max_iter = 20;
  EXPECT_EQ(reconstruct(target, bank, rc).iterate, reconstruct(target, bank, rc).iterate);
}

// At 2^J = N the coefficients of a single image carry no spatial spread, so
// sigma_J comes from realizations of the generating process.
TEST(Reconstruct, TwoSeedsOnStationaryTexture) {
  const GridShape g({16, 16});
  const auto bank = build_bank(g, 4, 4);
  const auto model = ProcessModel::ar1(g, 0.6);
  const ScatterConfig cfg;
  const auto moments = estimate_moments(model, bank, cfg, 32, 77);
  const double sigma = std::sqrt(moments.sigma2 * static_cast<double>(g.count()));
  const Signal x = sample(model, 1234);
  const auto target = scatter(x, bank, cfg);
  ReconstructionConfig rc;
  rc.sigma = sigma;
  rc.max_iter = 500;
  std::vector<ReconstructionRun> runs;
  for (std::uint64_t seed : {1u, 2u}) {
    rc.seed = seed;
    runs.push_back(reconstruct(target, bank, rc));
    EXPECT_TRUE(runs.back().converged);
  }
  EXPECT_GT(distance(runs[0].iterate, runs[1].iterate), 0.1 * x.norm());
  EXPECT_LE(distance(scatter(runs[0].iterate, bank, cfg), scatter(runs[1].iterate, bank, cfg)), 2.0 * sigma);
}

// Second-order coefficients of a reconstruction sit closer to the texture's
// than those of a Gaussian surrogate with the same power spectrum.
TEST(Reconstruct, TextureBeatsGaussianSurrogate) {
  const GridShape g({16, 16});
  const Signal big = io::read_pgm(std::string(SCATTERKIT_DATA_DIR) + "/grass_64.pgm");
  Signal x(g);
  for (std::size_t r = 0; r < 16; ++r) {
    for (std::size_t c = 0; c < 16; ++c) x.at(r, c) = big.at(r, c);
  }
  const auto bank = build_bank(g, 4, 4);
  const auto target = scatter(x, bank);
  const auto order2 = [&](const ScatteringOutput& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.paths.size(); ++i) {
      if (s.paths[i].order() != 2) continue;
      const double d = distance(s.coeffs[i], target.coeffs[i]);
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  ReconstructionConfig rc;
  rc.seed = 1;
  rc.max_iter = 300;
  const auto run = reconstruct(target, bank, rc);
  const double recon = order2(scatter(run.iterate, bank));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_LT(recon, order2(scatter(sample(ProcessModel::phase_randomized(x), seed), bank)));
  }
}

TEST(Align, RecoversShiftAndReflection) {
  const GridShape g({32, 32});
  const Signal x = oracle::random_signal(g, 50);
  const auto a = align_to(x, shift(x, {5, -9}));
  EXPECT_LT(a.relative_error, 1e-9);
  EXPECT_FALSE(a.reflected);
  const auto b = align_to(x, shift(reflect(x), {3, 2}));
  EXPECT_LT(b.relative_error, 1e-9);
  EXPECT_TRUE(b.reflected);
  const auto c = align_to(x, shift(reflect(x), {3, 2}), false);
  EXPECT_GT(c.relative_error, 0.5);
}

TEST(Align, SubSampleShift) {
  const GridShape g({32, 32});
  Signal x(g);
  for (std::size_t r = 0; r < 32; ++r) {
    for (std::size_t c = 0; c < 32; ++c) {
      const double dr = r - 14.0, dc = c - 17.0;
      x.at(r, c) = std::exp(-(dr * dr + dc * dc) / 18.0);
    }
  }
  const std::vector<double> tau{2.37, -4.61};
  const auto a = align_to(x, shift_fractional(x, tau), false);
  EXPECT_LT(a.relative_error, 1e-3);
  EXPECT_NEAR(a.shift[0], -2.37, 1e-2);
  EXPECT_NEAR(a.shift[1], 4.61, 1e-2);
}
