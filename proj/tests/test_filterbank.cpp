#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "scatterkit/filterbank.hpp"
#include "scatterkit/wavelet.hpp"

using namespace scatterkit;

namespace {

// |phi(w)|^2 + 1/2 sum (|psi(w)|^2 + |psi(-w)|^2) recomputed from the raw responses.
std::vector<double> lp_sum(const FilterBank& bank) {
  const GridShape& g = bank.shape;
  const std::size_t rows = g.extent(0), cols = g.ndims() == 2 ? g.extent(1) : 1;
  std::vector<double> out(g.count());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      const std::size_t m = ((rows - r) % rows) * cols + (cols - c) % cols;
      double acc = std::norm(bank.phi.response[i]);
      for (const auto& h : bank.psi) acc += 0.5 * (std::norm(h.response[i]) + std::norm(h.response[m]));
      out[i] = acc;
    }
  }
  return out;
}

double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

// Worst |psi_{j+1,k}(w) - psi_{j,k}(2w)| over |w| <= pi/2 on every axis.
double dilation_mismatch(const FilterBank& bank, int j) {
  const GridShape& g = bank.shape;
  const std::size_t rows = g.extent(0), cols = g.ndims() == 2 ? g.extent(1) : 1;
  double worst = 0.0;
  for (int k = 0; k < bank.K; ++k) {
    const auto& coarse = bank.wavelet(j + 1, k).response;
    const auto& fine = bank.wavelet(j, k).response;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (std::abs(signed_bin(r, rows)) * 4 > static_cast<long>(rows)) continue;
        if (cols > 1 && std::abs(signed_bin(c, cols)) * 4 > static_cast<long>(cols)) continue;
        const std::size_t twice = ((2 * r) % rows) * cols + (2 * c) % cols;
        worst = std::max(worst, std::abs(coarse[r * cols + c] - fine[twice]));
      }
    }
  }
  return worst;
}

}  // namespace

TEST(Morlet2d, LayoutForFourScalesFourOrientations) {
  const auto bank = build_morlet_2d(GridShape({64, 64}), 4, 4, BankParams::defaults_2d(4));
  EXPECT_EQ(bank.psi.size(), 16u);
  EXPECT_EQ(bank.lowpass.size(), 5u);
  EXPECT_EQ(bank.phi.kind, KernelKind::low_pass);
  for (int j = 1; j <= 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      EXPECT_EQ(bank.wavelet(j, k).scale, j);
      EXPECT_EQ(bank.wavelet(j, k).band, k);
      EXPECT_EQ(bank.wavelet(j, k).kind, KernelKind::band_pass);
    }
  }
  EXPECT_THROW(bank.wavelet(5, 0), ScaleError);
  EXPECT_THROW(bank.wavelet(1, 4), ScaleError);
}

TEST(Morlet2d, OrientationsFollowAngle) {
  const auto bank = build_bank(GridShape({128, 128}), 3, 4);
  for (int k = 0; k < 4; ++k) {
    const auto& h = bank.wavelet(2, k).response;
    std::size_t best = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (std::abs(h[i]) > std::abs(h[best])) best = i;
    }
    const double angle = std::atan2(static_cast<double>(signed_bin(best % 128, 128)),
                                    static_cast<double>(signed_bin(best / 128, 128)));
    EXPECT_NEAR(angle, std::numbers::pi * k / 4.0, 0.1) << "k=" << k;
  }
}

TEST(FilterBank, ZeroMeanWaveletsAndUnitMassLowpass) {
  const std::vector<FilterBank> banks{build_bank(GridShape({64, 64}), 4, 4), build_bank(GridShape({32, 16}), 3, 8),
                                      build_bank(GridShape({1024}), 6, 12), build_bank(GridShape({8}), 2, 1)};
  for (const auto& bank : banks) {
    for (const auto& h : bank.psi) EXPECT_LT(std::abs(h.dc()), 1e-9);
    for (const auto& p : bank.lowpass) EXPECT_NEAR(std::abs(p.dc() - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(bank.phi.dc() - 1.0), 0.0, 1e-12);
  }
}

TEST(FilterBank, FrameBounds2dFrozen) {
  const auto k4 = build_bank(GridShape({128, 128}), 4, 4);
  const auto k8 = build_bank(GridShape({128, 128}), 4, 8);
  EXPECT_NEAR(k4.frame_lower, 0.790505, 1e-5);
  EXPECT_NEAR(k8.frame_lower, 0.610767, 1e-5);
  for (const auto* b : {&k4, &k8}) {
    EXPECT_GE(b->frame_lower, 0.5);
    EXPECT_LE(b->frame_upper, 1.0 + 1e-12);
    const auto lp = lp_sum(*b);
    EXPECT_NEAR(*std::min_element(lp.begin(), lp.end()), b->frame_lower, 1e-12);
    EXPECT_NEAR(*std::max_element(lp.begin(), lp.end()), b->frame_upper, 1e-12);
  }
}

TEST(FilterBank, FrameBounds1dFrozen) {
  const auto k12 = build_bank(GridShape({1024}), 6, 12);
  const auto k1 = build_bank(GridShape({8}), 2, 1);
  EXPECT_NEAR(k12.frame_lower, 0.579194, 1e-5);
  EXPECT_NEAR(k1.frame_lower, 0.756219, 1e-5);
  for (const auto* b : {&k12, &k1}) {
    EXPECT_LE(b->frame_upper, 1.0 + 1e-12);
    const auto lp = lp_sum(*b);
    EXPECT_NEAR(*std::min_element(lp.begin(), lp.end()), b->frame_lower, 1e-12);
  }
}

TEST(FilterBank, ScaleTooLargeThrows) {
  EXPECT_THROW(build_bank(GridShape({16, 16}), 5, 4), ScaleError);
  EXPECT_THROW(build_bank(GridShape({64}), 7, 1), ScaleError);
  EXPECT_THROW(build_bank(GridShape({16, 16}), 0, 4), ScaleError);
  EXPECT_NO_THROW(build_bank(GridShape({16, 16}), 4, 4));
}

TEST(FilterBank, FrameGateReportsFrequency) {
  auto params = BankParams::defaults_2d(8);
  params.frame_floor = 0.9;
  try {
    build_morlet_2d(GridShape({64, 64}), 3, 8, params);
    FAIL() << "expected a frame error";
  } catch (const FrameError& e) {
    EXPECT_NE(std::string(e.what()).find("frequency"), std::string::npos);
  }
}

TEST(Bank1d, DyadicWhenOneBandPerOctave) {
  const auto bank = build_bank(GridShape({4096}), 5, 1);
  EXPECT_EQ(bank.psi.size(), 5u);
  for (int j = 1; j < 5; ++j) {
    const auto peak = [&](int s) {
      const auto& h = bank.wavelet(s, 0).response;
      std::size_t best = 0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        if (std::abs(h[i]) > std::abs(h[best])) best = i;
      }
      return static_cast<double>(best);
    };
    if (j >= 2) EXPECT_NEAR(peak(j) / peak(j + 1), 2.0, 0.02) << "j=" << j;
  }
}

TEST(Bank1d, TwelveBandsPerOctaveAreSemitones) {
  const auto bank = build_bank(GridShape({1 << 14}), 4, 12);
  EXPECT_EQ(bank.psi.size(), 48u);
  std::vector<double> peaks;
  for (const auto& h : bank.psi) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < h.response.size(); ++i) {
      if (std::abs(h.response[i]) > std::abs(h.response[best])) best = i;
    }
    peaks.push_back(static_cast<double>(best));
  }
  // Skip the first octave, whose periodized bands bunch up near Nyquist.
  for (std::size_t i = 12; i + 1 < peaks.size(); ++i) {
    EXPECT_NEAR(peaks[i] / peaks[i + 1], std::pow(2.0, 1.0 / 12.0), 0.01) << "band " << i;
  }
}

TEST(Cascade, RecursionReproducesWavelets) {
  for (const auto& bank : {build_bank(GridShape({64, 64}), 4, 4), build_bank(GridShape({1024}), 5, 12)}) {
    const auto w = cascade_filters(bank);
    for (int j = 1; j <= bank.J; ++j) {
      const auto& base = bank.lowpass[static_cast<std::size_t>(j - 1)].response;
      for (int k = 0; k < bank.K; ++k) {
        const auto& wk = w.band[static_cast<std::size_t>((j - 1) * bank.K + k)].response;
        std::vector<cplx> rebuilt(wk.size());
        for (std::size_t i = 0; i < wk.size(); ++i) rebuilt[i] = wk[i] * base[i];
        EXPECT_LT(rel_l2(rebuilt, bank.wavelet(j, k).response), 1e-3) << j << "," << k;
      }
      std::vector<cplx> low(base.size());
      for (std::size_t i = 0; i < low.size(); ++i) low[i] = w.low[static_cast<std::size_t>(j - 1)].response[i] * base[i];
      EXPECT_LT(rel_l2(low, bank.lowpass[static_cast<std::size_t>(j)].response), 1e-3);
    }
  }
}

// phi_0 is a narrow Gaussian, so the first cascade filters stay close to the
// wavelets themselves; the residual is the phi_0 roll-off near Nyquist.
TEST(Cascade, FirstLevelCloseToWavelet) {
  const auto bank = build_bank(GridShape({64, 64}), 3, 4);
  for (int k = 0; k < 4; ++k) {
    const auto& w = bank.cascade_band[static_cast<std::size_t>(k)].response;
    EXPECT_LT(rel_l2(w, bank.wavelet(1, k).response), 0.35);
  }
}

TEST(Cascade, FastCascadeMatchesDirectConvolution) {
  for (const GridShape& g : {GridShape({64, 64}), GridShape({512})}) {
    const auto bank = build_bank(g, 4, g.ndims() == 2 ? 4 : 12);
    const Signal x = oracle::random_signal(g, 7);
    const auto fast = cascade_forward(x, bank, kUnsubsampled);
    const auto direct = forward(x, bank, kUnsubsampled);
    for (std::size_t b = 0; b < direct.bands.size(); ++b) {
      EXPECT_LT(distance(fast.bands[b].coeffs, direct.bands[b].coeffs) / direct.bands[b].coeffs.norm(), 1e-3);
    }
    EXPECT_LT(distance(fast.low, direct.low) / direct.low.norm(), 1e-3);
  }
}

TEST(Cascade, UncoveredEnergyThrows) {
  const GridShape g({16});
  FrequencyKernel target{g, std::vector<cplx>(16, 1.0), KernelKind::band_pass, 1, 0};
  FrequencyKernel base{g, std::vector<cplx>(16, 0.0), KernelKind::low_pass, 0, -1};
  base.response[0] = 1.0;
  EXPECT_THROW(detail::deconvolve(target, base, 1e-3), CascadeAccuracyError);
}

// The finest scales overlap their 2*pi images, so covariance is checked
// where the periodization is negligible.
TEST(FilterBank, DilationCovariance) {
  const auto b2 = build_bank(GridShape({128, 128}), 5, 4);
  for (int j = 3; j < 5; ++j) EXPECT_LT(dilation_mismatch(b2, j), 1e-6) << "2D j=" << j;
  const auto b1 = build_bank(GridShape({1024}), 5, 12);
  for (int j = 2; j < 5; ++j) EXPECT_LT(dilation_mismatch(b1, j), 1e-6) << "1D j=" << j;
}

TEST(FilterBank, FullGridLowpassIsExactMean) {
  const auto bank = build_bank(GridShape({16, 16}), 4, 4);
  for (std::size_t i = 1; i < bank.phi.response.size(); ++i) EXPECT_EQ(std::abs(bank.phi.response[i]), 0.0);
}
