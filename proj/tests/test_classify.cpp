#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "scatterkit/classify.hpp"

using namespace scatterkit;

namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXd X(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) X(i, j) = n(rng);
  }
  return X;
}

Eigen::VectorXd gaussian_vector(Eigen::Index n, std::uint64_t seed) { return gaussian_matrix(n, 1, seed).col(0); }

// Gradient of sum (y - Xw - b)^2 + lambda |w|^2 in (w, b).
Eigen::VectorXd ridge_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                               double lambda) {
  const Eigen::VectorXd r = (X * w).array() + b - y.array();
  Eigen::VectorXd g(w.size() + 1);
  g.head(w.size()) = 2.0 * X.transpose() * r + 2.0 * lambda * w;
  g[w.size()] = 2.0 * r.sum();
  return g;
}

// Q Gaussian blobs in d dimensions; centres depend only on Q, d and separation.
Dataset blobs(int Q, Eigen::Index per_class, Eigen::Index d, double separation, std::uint64_t seed) {
  Dataset ds;
  const Eigen::MatrixXd centres = separation * gaussian_matrix(Q, d, 12345);
  ds.X = gaussian_matrix(Q * per_class, d, seed);
  for (int q = 0; q < Q; ++q) {
    for (Eigen::Index i = 0; i < per_class; ++i) {
      ds.X.row(q * per_class + i) += centres.row(q);
      ds.labels.push_back(q);
    }
  }
  return ds;
}

}  // namespace

TEST(Ridge, MatchesNormalEquations) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto X = gaussian_matrix(10, 5, seed);
    const auto y = gaussian_vector(10, 100 + seed);
    for (double lambda : {0.0, 0.1, 3.0}) {
      const auto m = fit(X, Eigen::MatrixXd(y), 2, lambda);
      const auto [w, b] = oracle::ridge_normal_equations(X, y, lambda);
      EXPECT_LT((m.W.col(0) - w).norm(), 1e-8 * (1.0 + w.norm()));
      EXPECT_NEAR(m.b[0], b, 1e-8);
    }
  }
}

TEST(Ridge, KernelFormMatchesNormalEquations) {
  const auto X = gaussian_matrix(6, 20, 7);
  const auto y = gaussian_vector(6, 8);
  const auto m = fit(X, Eigen::MatrixXd(y), 2, 0.5);
  const auto [w, b] = oracle::ridge_normal_equations(X, y, 0.5);
  EXPECT_LT((m.W.col(0) - w).norm(), 1e-8 * (1.0 + w.norm()));
  EXPECT_NEAR(m.b[0], b, 1e-8);
}

TEST(Ridge, GradientVanishesAtSolution) {
  const auto X = gaussian_matrix(40, 12, 3);
  const auto y = gaussian_vector(40, 4);
  for (double lambda : {1e-3, 1.0, 100.0}) {
    const auto m = fit(X, Eigen::MatrixXd(y), 2, lambda);
    const double scale = 2.0 * (X.norm() * y.norm() + y.norm());
    EXPECT_LE(ridge_gradient(X, y, m.W.col(0), m.b[0], lambda).norm(), 1e-8 * scale);
  }
}

TEST(Ridge, LargePenaltyGivesIntercept) {
  const auto X = gaussian_matrix(30, 4, 5);
  const Eigen::VectorXd y = gaussian_vector(30, 6).array() + 2.0;
  const auto m = fit(X, Eigen::MatrixXd(y), 2, 1e12);
  EXPECT_LT(m.W.norm(), 1e-9);
  EXPECT_NEAR(m.b[0], y.mean(), 1e-9);
  const auto l = fit(X, Eigen::MatrixXd(y), 1, 1e12);
  EXPECT_EQ(l.W.norm(), 0.0);
  EXPECT_NEAR(l.b[0], y.mean(), 1e-12);
}

TEST(Ridge, TwoPointSignFollowsClassOrder) {
  Eigen::MatrixXd X(2, 1);
  X << -1.0, 2.0;
  for (double s : {1.0, -1.0}) {
    Eigen::VectorXd y(2);
    y << -s, s;
    const auto m = fit(X, Eigen::MatrixXd(y), 2, 1e-6);
    EXPECT_GT(m.W(0, 0) * s, 0.0);
  }
}

TEST(Ridge, SingularDesignNeedsPenalty) {
  Eigen::MatrixXd X = gaussian_matrix(10, 3, 9);
  X.col(2) = X.col(0) + X.col(1);
  const Eigen::VectorXd y = gaussian_vector(10, 10);
  EXPECT_THROW(fit(X, Eigen::MatrixXd(y), 2, 0.0), RegularizationError);
  EXPECT_THROW(fit(X, Eigen::MatrixXd(y), 1, 0.0), RegularizationError);
  EXPECT_THROW(fit(gaussian_matrix(4, 8, 1), Eigen::MatrixXd(gaussian_vector(4, 2)), 2, 0.0), RegularizationError);
  EXPECT_NO_THROW(fit(X, Eigen::MatrixXd(y), 2, 1e-3));
  EXPECT_THROW(fit(X, Eigen::MatrixXd(y), 2, -1.0), DomainError);
  EXPECT_THROW(fit(X, Eigen::MatrixXd(y), 3, 1.0), DomainError);
}

TEST(Ridge, StoredObjectiveMatchesReevaluation) {
  const auto X = gaussian_matrix(25, 6, 11);
  const auto y = gaussian_vector(25, 12);
  for (int p : {1, 2}) {
    const auto m = fit(X, Eigen::MatrixXd(y), p, 0.7);
    const double again = penalized_objective(X, y, m.W.col(0), m.b[0], p, 0.7);
    EXPECT_NEAR(m.objective[0], again, 1e-6 * again);
  }
}

// KKT: |X_c^T r| <= lambda/2 everywhere, with equality and matching sign on
// the support.
TEST(Lasso, DualityGapAndOptimality) {
  const auto X = gaussian_matrix(50, 20, 13);
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(20);
  truth[2] = 3.0;
  truth[7] = -2.0;
  truth[11] = 1.0;
  const Eigen::VectorXd y = X * truth + 0.1 * gaussian_vector(50, 14);
  const double lambda = 10.0;
  const auto res = fit_lasso(X, y, lambda);
  EXPECT_LE(res.gap, 1e-6);
  const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  const Eigen::VectorXd r = (y.array() - y.mean()).matrix() - Xc * res.w;
  const Eigen::VectorXd corr = Xc.transpose() * r;
  for (Eigen::Index j = 0; j < 20; ++j) {
    EXPECT_LE(std::abs(corr[j]), 0.5 * lambda * (1.0 + 1e-3));
    if (res.w[j] != 0.0) EXPECT_NEAR(corr[j], 0.5 * lambda * (res.w[j] > 0 ? 1.0 : -1.0), 1e-2 * lambda);
  }
  EXPECT_NE(res.w[2], 0.0);
  EXPECT_NE(res.w[7], 0.0);
  EXPECT_LT(res.w.cwiseAbs().minCoeff(), 1e-12);
}

TEST(Lasso, AgreesWithRidgeWhenUnpenalized) {
  const auto X = gaussian_matrix(30, 4, 15);
  const auto y = gaussian_vector(30, 16);
  const auto l = fit_lasso(X, y, 0.0, 1e-12);
  const auto [w, b] = oracle::ridge_normal_equations(X, y, 0.0);
  EXPECT_LT((l.w - w).norm(), 1e-5 * (1.0 + w.norm()));
  EXPECT_NEAR(l.b, b, 1e-5);
}

TEST(Path, TrainingLossNonDecreasingInLambda) {
  const auto X = gaussian_matrix(40, 15, 17);
  const auto y = gaussian_vector(40, 18);
  for (int p : {1, 2}) {
    double prev = -1.0;
    for (double lambda : lambda_grid()) {
      const auto m = fit(X, Eigen::MatrixXd(y), p, lambda);
      const Eigen::VectorXd r = (y - X * m.W.col(0)).array() - m.b[0];
      const double loss = r.squaredNorm();
      EXPECT_GE(loss, prev - 1e-9 * (1.0 + loss)) << "p=" << p << " lambda=" << lambda;
      prev = loss;
    }
  }
}

TEST(Ova, SeparableBlobsAreLearned) {
  const auto train = blobs(4, 40, 6, 5.0, 20);
  const auto test = blobs(4, 40, 6, 5.0, 21);
  OvaOptions opt;
  opt.seed = 3;
  const auto res = classify_ova(train, &test, opt);
  EXPECT_GT(res.test_accuracy, 0.95);
  EXPECT_GT(res.test_margin, 0.0);
  EXPECT_EQ(res.lambda_scores.size(), lambda_grid().size());
  EXPECT_EQ(res.model.classes, (std::vector<int>{0, 1, 2, 3}));
}

// Two classes share one feature distribution, so nothing separates them.
TEST(Ova, DuplicateFeatureClassesAreAtChance) {
  Dataset train, test;
  train.X = gaussian_matrix(400, 5, 30);
  test.X = gaussian_matrix(2000, 5, 31);
  for (Eigen::Index i = 0; i < 400; ++i) train.labels.push_back(static_cast<int>(i % 2));
  for (Eigen::Index i = 0; i < 2000; ++i) test.labels.push_back(static_cast<int>(i % 2));
  const auto res = classify_ova(train, &test, {});
  EXPECT_NEAR(res.test_accuracy, 0.5, 0.05);
}

TEST(Ova, FeaturePermutationLeavesPredictionsUnchanged) {
  const auto train = blobs(3, 30, 8, 2.0, 40);
  const auto test = blobs(3, 30, 8, 2.0, 41);
  std::vector<Eigen::Index> perm{5, 2, 7, 0, 1, 6, 3, 4};
  OvaOptions opt;
  opt.lambda = 0.3;
  const auto a = classify_ova(train, &test, opt);
  auto permute = [&](const Dataset& d) {
    Dataset out = d;
    for (std::size_t c = 0; c < perm.size(); ++c) out.X.col(static_cast<Eigen::Index>(c)) = d.X.col(perm[c]);
    return out;
  };
  const auto ptrain = permute(train), ptest = permute(test);
  const auto b = classify_ova(ptrain, &ptest, opt);
  EXPECT_EQ(a.test_predictions, b.test_predictions);
  for (std::size_t c = 0; c < perm.size(); ++c) {
    EXPECT_LT((b.model.W.row(static_cast<Eigen::Index>(c)) - a.model.W.row(perm[c])).norm(), 1e-9);
  }
  // Applying the permutation to the weights of the first model reproduces its scores on permuted rows.
  LinearModel moved = a.model;
  for (std::size_t c = 0; c < perm.size(); ++c) {
    moved.W.row(static_cast<Eigen::Index>(c)) = a.model.W.row(perm[c]);
    moved.standardizer->mean[static_cast<Eigen::Index>(c)] = a.model.standardizer->mean[perm[c]];
    moved.standardizer->scale[static_cast<Eigen::Index>(c)] = a.model.standardizer->scale[perm[c]];
  }
  EXPECT_EQ(predict(moved, ptest.X), a.test_predictions);
}

TEST(Ova, ClassMissingFromTrainingIsSplitError) {
  const auto train = blobs(2, 20, 3, 3.0, 50);
  auto test = blobs(3, 10, 3, 3.0, 51);
  EXPECT_THROW(classify_ova(train, &test, {}), SplitError);
  Dataset one = train;
  for (auto& l : one.labels) l = 0;
  EXPECT_THROW(classify_ova(one, nullptr, {}), SplitError);
}

TEST(Ova, AutomaticLambdaIsSeedReproducible) {
  const auto train = blobs(3, 50, 10, 1.0, 60);
  OvaOptions opt;
  opt.seed = 8;
  const auto a = classify_ova(train, nullptr, opt);
  const auto b = classify_ova(train, nullptr, opt);
  EXPECT_EQ(a.model.lambda, b.model.lambda);
  EXPECT_EQ(a.model.W, b.model.W);
  EXPECT_EQ(a.lambda_scores, b.lambda_scores);
}

TEST(Split, DisjointAndReproducible) {
  const auto [tr, te] = split_indices(100, 70, 5);
  EXPECT_EQ(tr.size(), 70u);
  EXPECT_EQ(te.size(), 30u);
  std::vector<int> seen(100, 0);
  for (auto i : tr) ++seen[i];
  for (auto i : te) ++seen[i];
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_EQ(split_indices(100, 70, 5).first, tr);
  EXPECT_NE(split_indices(100, 70, 6).first, tr);
  EXPECT_THROW(split_indices(10, 11, 0), SplitError);
}

TEST(Dataset, AllNanRowRejected) {
  auto d = blobs(2, 5, 3, 1.0, 70);
  d.X.row(3).setConstant(std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(validate(d), DomainError);
}

TEST(Margin, MinimumInterclassDistance) {
  Eigen::MatrixXd X(4, 2);
  X << 0, 0, 1, 0, 0, 3, 5, 5;
  EXPECT_DOUBLE_EQ(min_interclass_distance(X, {0, 0, 1, 1}), 3.0);
  EXPECT_DOUBLE_EQ(min_interclass_distance(X, {0, 1, 1, 1}), 1.0);
}

TEST(FeatureCsv, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "scatterkit_test_classify";
  std::filesystem::create_directories(dir);
  auto d = blobs(3, 4, 3, 1.0, 80);
  d.feature_names = {"m0", "m1_j1k0", "m1_j1k1"};
  write_feature_csv(dir / "f.csv", d);
  const auto back = read_feature_csv(dir / "f.csv");
  EXPECT_EQ(back.X, d.X);
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_EQ(back.feature_names, d.feature_names);
}

TEST(Digits, BundledSubsetLoads) {
  const auto digits = load_digits(std::filesystem::path(SCATTERKIT_DATA_DIR) / "digits_8x8.csv");
  ASSERT_GE(digits.images.size(), 1797u);
  EXPECT_EQ(digits.images[0].shape(), GridShape({32, 32}));
  EXPECT_EQ(class_list(digits.labels).size(), 10u);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 32; ++c) EXPECT_EQ(digits.images[0].at(r, c), cplx(0.0));
  }
}
