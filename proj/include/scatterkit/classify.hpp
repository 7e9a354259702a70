#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "scatterkit/errors.hpp"
#include "scatterkit/io.hpp"
#include "scatterkit/parallel.hpp"
#include "scatterkit/random.hpp"
#include "scatterkit/signal.hpp"

namespace scatterkit {

// Rows are samples. `labels` holds class ids (classification) and `targets`
// real responses (regression); either may be empty.
struct Dataset {
  Eigen::MatrixXd X;
  std::vector<int> labels;
  Eigen::VectorXd targets;
  std::vector<std::string> feature_names;
  std::string provenance = "raw";

  std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(X.cols()); }

  Dataset subset(const std::vector<std::size_t>& idx) const {
    Dataset d;
    d.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) d.X.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(idx[i]));
    for (std::size_t i : idx) {
      if (!labels.empty()) d.labels.push_back(labels[i]);
    }
    if (targets.size() > 0) {
      d.targets.resize(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t i = 0; i < idx.size(); ++i) d.targets[static_cast<Eigen::Index>(i)] = targets[static_cast<Eigen::Index>(idx[i])];
    }
    d.feature_names = feature_names;
    d.provenance = provenance;
    return d;
  }
};

inline void validate(const Dataset& d) {
  for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
    if (d.X.row(i).array().isNaN().all()) throw DomainError("dataset row " + std::to_string(i) + " is all NaN");
  }
  if (!d.labels.empty() && d.labels.size() != d.rows()) throw DimensionError("label count does not match rows");
}

// Seeded disjoint split: a shuffled permutation, the first `train_count`
// indices train.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                                   std::size_t train_count,
                                                                                   std::uint64_t seed) {
  if (train_count > n) throw SplitError("train size exceeds sample count");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<long>(train_count));
  std::vector<std::size_t> test(perm.begin() + static_cast<long>(train_count), perm.end());
  return {train, test};
}

// Per-feature mean and standard deviation from a training matrix; constant
// features keep scale 1.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& X) {
    Standardizer s;
    s.mean = X.colwise().mean();
    const Eigen::MatrixXd c = X.rowwise() - s.mean;
    s.scale = (c.colwise().squaredNorm() / std::max<double>(1.0, static_cast<double>(X.rows()))).cwiseSqrt();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
      if (!(s.scale[j] > 1e-12)) s.scale[j] = 1.0;
    }
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const {
    return (X.rowwise() - mean).array().rowwise() / scale.array();
  }
};

// f(x) = <x, w> + b, one column of W per output. Fitted on standardized
// features when `standardizer` is set.
struct LinearModel {
  int p = 2;
  double lambda = 0.0;
  Eigen::MatrixXd W;
  Eigen::RowVectorXd b;
  std::vector<double> objective;
  std::optional<Standardizer> standardizer;
  std::vector<int> classes;

  Eigen::MatrixXd scores(const Eigen::MatrixXd& X) const {
    const Eigen::MatrixXd Z = standardizer ? standardizer->apply(X) : X;
    return (Z * W).rowwise() + b;
  }
};

// sum_i (y_i - x_i.w - b)^2 + lambda sum_k |w_k|^p.
inline double penalized_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                  double b, int p, double lambda) {
  const Eigen::VectorXd r = (y - X * w).array() - b;
  const double pen = p == 1 ? w.lpNorm<1>() : w.squaredNorm();
  return r.squaredNorm() + lambda * pen;
}

// Centred ridge solver: eigendecomposition of X_c^T X_c (d <= n) or of the
// kernel X_c X_c^T (d > n), reused across lambdas and targets.
class RidgeSolver {
 public:
  explicit RidgeSolver(const Eigen::MatrixXd& X) : mean_(X.colwise().mean()) {
    Xc_ = X.rowwise() - mean_;
    primal_ = Xc_.cols() <= Xc_.rows();
    const Eigen::MatrixXd G = primal_ ? Eigen::MatrixXd(Xc_.transpose() * Xc_) : Eigen::MatrixXd(Xc_ * Xc_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.info() != Eigen::Success) throw DomainError("ridge eigendecomposition failed");
    evals_ = es.eigenvalues().cwiseMax(0.0);
    evecs_ = es.eigenvectors();
  }

  // Columns of Y are targets. Returns (W, b).
  std::pair<Eigen::MatrixXd, Eigen::RowVectorXd> solve(const Eigen::MatrixXd& Y, double lambda) const {
    if (lambda < 0.0) throw DomainError("lambda must be nonnegative");
    const double top = evals_.size() ? evals_.maxCoeff() : 0.0;
    const bool full_rank = primal_ && evals_.size() && evals_.minCoeff() > 1e-12 * std::max(top, 1.0);
    if (lambda == 0.0 && !full_rank) {
      throw RegularizationError("design is singular; lambda = 0 needs a full-rank design");
    }
    const Eigen::RowVectorXd ymean = Y.colwise().mean();
    const Eigen::MatrixXd Yc = Y.rowwise() - ymean;
    const Eigen::VectorXd inv = (evals_.array() + lambda).inverse().matrix();
    Eigen::MatrixXd W;
    if (primal_) {
      W = evecs_ * (inv.asDiagonal() * (evecs_.transpose() * (Xc_.transpose() * Yc)));
    } else {
      W = Xc_.transpose() * (evecs_ * (inv.asDiagonal() * (evecs_.transpose() * Yc)));
    }
    Eigen::RowVectorXd b = ymean - mean_ * W;
    return {W, b};
  }

 private:
  Eigen::RowVectorXd mean_;
  Eigen::MatrixXd Xc_;
  bool primal_ = true;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
};

struct LassoResult {
  Eigen::VectorXd w;
  double b = 0.0;
  double gap = 0.0;  // relative duality gap at exit
  int sweeps = 0;
};

// Coordinate descent on sum (y - Xw - b)^2 + lambda |w|_1 until the relative
// duality gap is <= tol.
inline LassoResult fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, double tol = 1e-6,
                             int max_sweeps = 100000) {
  if (lambda < 0.0) throw DomainError("lambda must be nonnegative");
  const Eigen::RowVectorXd xm = X.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - xm;
  const double ym = y.mean();
  const Eigen::VectorXd yc = y.array() - ym;
  const Eigen::Index d = Xc.cols();
  const Eigen::VectorXd col2 = Xc.colwise().squaredNorm();
  if (lambda == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Xc.transpose() * Xc, Eigen::EigenvaluesOnly);
    if (d > Xc.rows() || es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
      throw RegularizationError("design is singular; lambda = 0 needs a full-rank design");
    }
  }
  // Half-scaled problem: 1/2 |r|^2 + alpha |w|_1 with alpha = lambda / 2.
  const double alpha = 0.5 * lambda;
  LassoResult res;
  res.w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd r = yc;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (col2[j] == 0.0) continue;
      const double old = res.w[j];
      const double rho = Xc.col(j).dot(r) + col2[j] * old;
      const double nw = std::copysign(std::max(std::abs(rho) - alpha, 0.0), rho) / col2[j];
      if (nw != old) {
        r -= (nw - old) * Xc.col(j);
        res.w[j] = nw;
      }
    }
    res.sweeps = sweep;
    const double primal = 0.5 * r.squaredNorm() + alpha * res.w.lpNorm<1>();
    const double corr = (Xc.transpose() * r).lpNorm<Eigen::Infinity>();
    const double s = corr > alpha ? alpha / corr : 1.0;
    const double dual = 0.5 * yc.squaredNorm() - 0.5 * (yc - s * r).squaredNorm();
    res.gap = primal > 0.0 ? (primal - dual) / primal : 0.0;
    if (res.gap <= tol) break;
  }
  res.b = ym - xm.dot(res.w);
  return res;
}

// One model per output column of Y.
inline LinearModel fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, int p, double lambda) {
  if (p != 1 && p != 2) throw DomainError("regularization exponent must be 1 or 2");
  LinearModel m;
  m.p = p;
  m.lambda = lambda;
  if (p == 2) {
    auto [W, b] = RidgeSolver(X).solve(Y, lambda);
    m.W = std::move(W);
    m.b = std::move(b);
  } else {
    m.W.resize(X.cols(), Y.cols());
    m.b.resize(Y.cols());
    std::vector<LassoResult> res(static_cast<std::size_t>(Y.cols()));
    parallel_for(res.size(), [&](std::size_t c) { res[c] = fit_lasso(X, Y.col(static_cast<Eigen::Index>(c)), lambda); });
    for (std::size_t c = 0; c < res.size(); ++c) {
      m.W.col(static_cast<Eigen::Index>(c)) = res[c].w;
      m.b[static_cast<Eigen::Index>(c)] = res[c].b;
    }
  }
  for (Eigen::Index c = 0; c < Y.cols(); ++c) {
    m.objective.push_back(penalized_objective(X, Y.col(c), m.W.col(c), m.b[c], p, lambda));
  }
  return m;
}

inline LinearModel fit(const Dataset& d, int p, double lambda) {
  if (d.targets.size() != static_cast<Eigen::Index>(d.rows())) throw DimensionError("dataset has no regression targets");
  return fit(d.X, Eigen::MatrixXd(d.targets), p, lambda);
}

// ---- one-versus-all ------------------------------------------------------------

inline std::vector<int> class_list(const std::vector<int>& labels) {
  std::vector<int> c(labels);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

// +1 for the class, -1 otherwise.
inline Eigen::MatrixXd ova_targets(const std::vector<int>& labels, const std::vector<int>& classes) {
  Eigen::MatrixXd Y = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(labels.size()),
                                                static_cast<Eigen::Index>(classes.size()), -1.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::lower_bound(classes.begin(), classes.end(), labels[i]);
    if (it != classes.end() && *it == labels[i]) Y(static_cast<Eigen::Index>(i), it - classes.begin()) = 1.0;
  }
  return Y;
}

inline std::vector<int> predict(const LinearModel& m, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd S = m.scores(X);
  std::vector<int> out(static_cast<std::size_t>(S.rows()));
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    Eigen::Index best = 0;
    S.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = m.classes[static_cast<std::size_t>(best)];
  }
  return out;
}

inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size() || truth.empty()) throw DimensionError("accuracy needs matching label lists");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

// Smallest Euclidean distance between two rows with different labels. An
// empirical stand-in for the separation margin of a representation.
inline double min_interclass_distance(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
  if (labels.size() != static_cast<std::size_t>(X.rows())) throw DimensionError("label count does not match rows");
  const Eigen::VectorXd sq = X.rowwise().squaredNorm();
  std::vector<double> best(labels.size(), std::numeric_limits<double>::infinity());
  parallel_for(labels.size(), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      best[i] = std::min(best[i], sq[ii] + sq[jj] - 2.0 * X.row(ii).dot(X.row(jj)));
    }
  });
  const double m = *std::min_element(best.begin(), best.end());
  return std::sqrt(std::max(0.0, m));
}

// Mean gap between the winning score and the runner-up.
inline double mean_score_margin(const LinearModel& m, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd S = m.scores(X);
  if (S.rows() == 0 || S.cols() < 2) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    Eigen::RowVectorXd r = S.row(i);
    std::sort(r.data(), r.data() + r.size(), std::greater<>());
    acc += r[0] - r[1];
  }
  return acc / static_cast<double>(S.rows());
}

// Fixed logarithmic grid for automatic lambda selection.
inline std::vector<double> lambda_grid() {
  std::vector<double> g;
  for (int e = -3; e <= 5; ++e) {
    g.push_back(std::pow(10.0, e));
    if (e < 5) g.push_back(3.0 * std::pow(10.0, e));
  }
  return g;
}

struct OvaOptions {
  int p = 2;
  std::optional<double> lambda;  // automatic selection when unset
  bool standardize = true;
  double holdout = 0.2;          // validation share for automatic lambda
  std::uint64_t seed = 0;
};

struct OvaResult {
  LinearModel model;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::vector<std::pair<double, double>> lambda_scores;  // (lambda, validation accuracy)
  std::vector<int> test_predictions;
  double train_margin = 0.0;  // mean_score_margin on the training rows
  double test_margin = 0.0;
};

namespace detail {

inline LinearModel fit_ova(const Eigen::MatrixXd& X, const std::vector<int>& labels, const std::vector<int>& classes,
                           const OvaOptions& opt, double lambda) {
  std::optional<Standardizer> st;
  if (opt.standardize) st = Standardizer::fit(X);
  LinearModel m = fit(st ? st->apply(X) : X, ova_targets(labels, classes), opt.p, lambda);
  m.standardizer = st;
  m.classes = classes;
  return m;
}

}  // namespace detail

// Q one-versus-all regressions on +-1 targets, prediction by maximal score.
inline OvaResult classify_ova(const Dataset& train, const Dataset* test, const OvaOptions& opt = {}) {
  validate(train);
  const auto classes = class_list(train.labels);
  if (classes.size() < 2) throw SplitError("training split holds fewer than two classes");
  if (test) {
    validate(*test);
    for (int c : test->labels) {
      if (!std::binary_search(classes.begin(), classes.end(), c)) {
        throw SplitError("class " + std::to_string(c) + " is absent from the training split");
      }
    }
  }
  OvaResult res;
  double lambda = 0.0;
  if (opt.lambda) {
    lambda = *opt.lambda;
  } else {
    const std::size_t n = train.rows();
    const std::size_t n_fit = n - std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opt.holdout * n)));
    auto [fi, vi] = split_indices(n, n_fit, mix_seed(opt.seed, 0x1a3b));
    const Dataset fit_part = train.subset(fi), val_part = train.subset(vi);
    const auto fit_classes = class_list(fit_part.labels);
    if (fit_classes.size() < 2) throw SplitError("validation split leaves fewer than two classes");
    const auto grid = lambda_grid();
    std::vector<double> scores(grid.size());
    if (opt.p == 2) {
      // One decomposition serves the whole grid.
      std::optional<Standardizer> st;
      if (opt.standardize) st = Standardizer::fit(fit_part.X);
      const Eigen::MatrixXd Xf = st ? st->apply(fit_part.X) : fit_part.X;
      const RidgeSolver solver(Xf);
      const Eigen::MatrixXd Y = ova_targets(fit_part.labels, fit_classes);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        LinearModel m;
        std::tie(m.W, m.b) = solver.solve(Y, grid[g]);
        m.standardizer = st;
        m.classes = fit_classes;
        scores[g] = accuracy(predict(m, val_part.X), val_part.labels);
      }
    } else {
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto m = detail::fit_ova(fit_part.X, fit_part.labels, fit_classes, opt, grid[g]);
        scores[g] = accuracy(predict(m, val_part.X), val_part.labels);
      }
    }
    std::size_t best = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      res.lambda_scores.emplace_back(grid[g], scores[g]);
      if (scores[g] >= scores[best]) best = g;  // ties go to the stronger penalty
    }
    lambda = grid[best];
  }
  res.model = detail::fit_ova(train.X, train.labels, classes, opt, lambda);
  res.train_accuracy = accuracy(predict(res.model, train.X), train.labels);
  res.train_margin = mean_score_margin(res.model, train.X);
  if (test) {
    res.test_predictions = predict(res.model, test->X);
    res.test_accuracy = accuracy(res.test_predictions, test->labels);
    res.test_margin = mean_score_margin(res.model, test->X);
  }
  return res;
}

// ---- feature CSV -----------------------------------------------------------

inline constexpr const char* kLabelColumn = "__label__";

// Header of feature names plus an optional `__label__` column.
inline Dataset read_feature_csv(const std::filesystem::path& path) {
  const io::Table t = io::read_csv(path);
  Dataset d;
  d.provenance = path.filename().string();
  std::ptrdiff_t label_col = -1;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c] == kLabelColumn) {
      label_col = static_cast<std::ptrdiff_t>(c);
    } else {
      d.feature_names.push_back(t.header[c]);
    }
  }
  d.X.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(d.feature_names.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == label_col) {
        try {
          d.labels.push_back(std::stoi(t.rows[r][c]));
        } catch (const std::exception&) {
          throw IoError(path.string() + ": bad label '" + t.rows[r][c] + "'");
        }
      } else {
        d.X(static_cast<Eigen::Index>(r), col++) = io::parse_double(t.rows[r][c]);
      }
    }
  }
  return d;
}

inline void write_feature_csv(const std::filesystem::path& path, const Dataset& d) {
  io::Table t;
  if (!d.labels.empty()) t.header.push_back(kLabelColumn);
  for (const auto& n : d.feature_names) t.header.push_back(n);
  for (Eigen::Index r = 0; r < d.X.rows(); ++r) {
    std::vector<std::string> row;
    if (!d.labels.empty()) row.push_back(std::to_string(d.labels[static_cast<std::size_t>(r)]));
    for (Eigen::Index c = 0; c < d.X.cols(); ++c) row.push_back(io::format_double(d.X(r, c)));
    t.rows.push_back(std::move(row));
  }
  io::write_csv(path, t);
}

// ---- digits ------------------------------------------------------------------

struct DigitImages {
  std::vector<Signal> images;
  std::vector<int> labels;
};

// Bilinear resampling of an h x w image onto an n x n grid (pixel centres
// aligned, edge clamped).
inline std::vector<double> resize_bilinear(const std::vector<double>& img, std::size_t h, std::size_t w, std::size_t n) {
  std::vector<double> out(n * n);
  auto coord = [](std::size_t i, std::size_t from, std::size_t to) {
    const double c = (static_cast<double>(i) + 0.5) * static_cast<double>(from) / static_cast<double>(to) - 0.5;
    return std::clamp(c, 0.0, static_cast<double>(from - 1));
  };
  for (std::size_t r = 0; r < n; ++r) {
    const double y = coord(r, h, n);
    const std::size_t y0 = static_cast<std::size_t>(y), y1 = std::min(y0 + 1, h - 1);
    const double ty = y - static_cast<double>(y0);
    for (std::size_t c = 0; c < n; ++c) {
      const double x = coord(c, w, n);
      const std::size_t x0 = static_cast<std::size_t>(x), x1 = std::min(x0 + 1, w - 1);
      const double tx = x - static_cast<double>(x0);
      out[r * n + c] = (1 - ty) * ((1 - tx) * img[y0 * w + x0] + tx * img[y0 * w + x1]) +
                       ty * ((1 - tx) * img[y1 * w + x0] + tx * img[y1 * w + x1]);
    }
  }
  return out;
}

// 8x8 digits with intensities 0..16 (CSV: __label__,p0..p63), scaled to
// [0, 1], resized to `inner` x `inner` and zero-padded to `outer` x `outer`.
inline DigitImages load_digits(const std::filesystem::path& csv, std::size_t inner = 28, std::size_t outer = 32) {
  const io::Table t = io::read_csv(csv);
  const std::size_t lc = t.column(kLabelColumn);
  if (t.header.size() != 65) throw IoError(csv.string() + ": expected a label and 64 pixel columns");
  if (outer < inner) throw DimensionError("padding target smaller than the digit");
  DigitImages out;
  const std::size_t pad = (outer - inner) / 2;
  for (const auto& row : t.rows) {
    std::vector<double> px;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c != lc) px.push_back(io::parse_double(row[c]) / 16.0);
    }
    const auto big = resize_bilinear(px, 8, 8, inner);
    Signal img(GridShape({outer, outer}));
    for (std::size_t r = 0; r < inner; ++r) {
      for (std::size_t c = 0; c < inner; ++c) img.at(r + pad, c + pad) = big[r * inner + c];
    }
    out.images.push_back(std::move(img));
    out.labels.push_back(std::stoi(row[lc]));
  }
  return out;
}

}  // namespace scatterkit
