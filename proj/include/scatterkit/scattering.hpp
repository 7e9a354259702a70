#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scatterkit/errors.hpp"
#include "scatterkit/filterbank.hpp"
#include "scatterkit/parallel.hpp"
#include "scatterkit/signal.hpp"
#include "scatterkit/spectral.hpp"
#include "scatterkit/wavelet.hpp"

namespace scatterkit {

enum class Rho { modulus, rectifier };

inline const char* to_string(Rho r) { return r == Rho::modulus ? "modulus" : "rectifier"; }

inline Rho rho_from_string(const std::string& s) {
  if (s == "modulus") return Rho::modulus;
  if (s == "rectifier") return Rho::rectifier;
  throw DomainError("unknown nonlinearity '" + s + "' (expected modulus or rectifier)");
}

// Pointwise phase removal: |a| or max(0, Re a). Both are 1-Lipschitz.
inline double rho(cplx a, Rho kind) { return kind == Rho::modulus ? std::abs(a) : std::max(0.0, a.real()); }

struct PathStep {
  int j = 0;
  int k = 0;
  friend bool operator==(const PathStep&, const PathStep&) = default;
};

// Sequence ((j1,k1),...,(jm,km)) of wavelets applied before the final
// averaging; scales strictly increase along the path.
class ScatteringPath {
 public:
  ScatteringPath() = default;
  explicit ScatteringPath(std::vector<PathStep> steps) : steps_(std::move(steps)) {}

  std::size_t order() const { return steps_.size(); }
  const std::vector<PathStep>& steps() const { return steps_; }

  bool valid(int J, int K) const {
    int prev = 0;
    for (const auto& s : steps_) {
      if (s.j <= prev || s.j > J || s.k < 0 || s.k >= K) return false;
      prev = s.j;
    }
    return true;
  }

  ScatteringPath extended(PathStep s) const {
    auto steps = steps_;
    steps.push_back(s);
    return ScatteringPath(std::move(steps));
  }

  // "m0", "m1_j2k0", "m2_j1k3_j3k0".
  std::string label() const {
    std::string s = "m" + std::to_string(steps_.size());
    for (const auto& st : steps_) s += "_j" + std::to_string(st.j) + "k" + std::to_string(st.k);
    return s;
  }

  static ScatteringPath parse(const std::string& label) {
    std::istringstream in(label);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(in, tok, '_')) parts.push_back(tok);
    if (parts.empty() || parts[0].size() < 2 || parts[0][0] != 'm') throw DomainError("bad path label '" + label + "'");
    const std::size_t m = std::stoul(parts[0].substr(1));
    if (parts.size() != m + 1) throw DomainError("bad path label '" + label + "'");
    std::vector<PathStep> steps;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto kpos = parts[i].find('k');
      if (parts[i].size() < 4 || parts[i][0] != 'j' || kpos == std::string::npos) {
        throw DomainError("bad path label '" + label + "'");
      }
      steps.push_back({std::stoi(parts[i].substr(1, kpos - 1)), std::stoi(parts[i].substr(kpos + 1))});
    }
    return ScatteringPath(std::move(steps));
  }

  // Lexicographic by (order, scale sequence, band sequence).
  friend bool operator<(const ScatteringPath& a, const ScatteringPath& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    for (std::size_t i = 0; i < a.order(); ++i) {
      if (a.steps_[i].j != b.steps_[i].j) return a.steps_[i].j < b.steps_[i].j;
    }
    for (std::size_t i = 0; i < a.order(); ++i) {
      if (a.steps_[i].k != b.steps_[i].k) return a.steps_[i].k < b.steps_[i].k;
    }
    return false;
  }
  friend bool operator==(const ScatteringPath&, const ScatteringPath&) = default;

 private:
  std::vector<PathStep> steps_;
};

// Every path of order <= max_order with 0 < j1 < ... < jm <= J, in output order.
inline std::vector<ScatteringPath> enumerate_paths(int J, int K, int max_order) {
  std::vector<ScatteringPath> all{ScatteringPath{}};
  std::vector<ScatteringPath> frontier{ScatteringPath{}};
  for (int m = 1; m <= max_order; ++m) {
    std::vector<ScatteringPath> next;
    for (const auto& p : frontier) {
      const int last = p.order() ? p.steps().back().j : 0;
      for (int j = last + 1; j <= J; ++j) {
        for (int k = 0; k < K; ++k) next.push_back(p.extended({j, k}));
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::stable_sort(all.begin(), all.end());
  return all;
}

struct ScatterConfig {
  int max_order = 2;
  int oversampling = 1;
  Rho rho = Rho::modulus;
};

// Phi_J x indexed by path, in the fixed path order.
struct ScatteringOutput {
  int J = 0;
  int K = 0;
  ScatterConfig config;
  GridShape input_shape;
  std::vector<ScatteringPath> paths;
  std::vector<Signal> coeffs;
  std::vector<double> order_energy;  // E_m, stride-weighted

  const Signal* find(const ScatteringPath& p) const {
    auto it = std::lower_bound(paths.begin(), paths.end(), p);
    if (it == paths.end() || !(*it == p)) return nullptr;
    return &coeffs[static_cast<std::size_t>(it - paths.begin())];
  }

  double norm_squared() const {
    double acc = 0.0;
    for (const auto& c : coeffs) acc += c.norm_squared();
    return acc;
  }

  std::size_t feature_count() const {
    std::size_t n = 0;
    for (const auto& c : coeffs) n += c.size();
    return n;
  }
};

inline double distance(const ScatteringOutput& a, const ScatteringOutput& b) {
  if (a.paths != b.paths) throw DimensionError("scattering outputs have different path sets");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    const double d = distance(a.coeffs[i], b.coeffs[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline void record_order_energy(ScatteringOutput& s) {
  s.order_energy.assign(static_cast<std::size_t>(s.config.max_order) + 1, 0.0);
  for (std::size_t i = 0; i < s.paths.size(); ++i) s.order_energy[s.paths[i].order()] += s.coeffs[i].norm_squared();
}

// Precomputed evaluation of the scattering cascade for one bank and config.
// Propagation keeps rho(x * psi_{j,k}) at stride scale_stride(j) and the
// final averages at scale_stride(J). Wavelets are restricted to each grid;
// the low-pass is sampled there so averages of rho outputs stay nonnegative.
// The bank is referenced, not copied, and must outlive the Scatterer.
class Scatterer {
 public:
  Scatterer(const FilterBank&& bank, ScatterConfig config) = delete;
  Scatterer(const FilterBank& bank, ScatterConfig config) : bank_(&bank), config_(config) {
    if (config.max_order < 0) throw DomainError("max order must be >= 0");
    if (config.oversampling < 0) throw DomainError("oversampling must be >= 0");
    paths_ = enumerate_paths(bank.J, bank.K, config.max_order);
    out_stride_ = scale_stride(bank.J, config.oversampling);
    for (int e = 0; e <= bank.J; ++e) {
      const std::size_t stride = std::size_t{1} << e;
      GridShape level = bank.shape.subsampled(stride);
      std::vector<std::vector<cplx>> psi;
      for (const auto& h : bank.psi) psi.push_back(spectral::crop_response(h.response, bank.shape, level));
      levels_.push_back({level, std::move(psi), spectral::fold_lowpass(bank.phi.response, bank.shape, level)});
    }
    build_tree();
  }

  const FilterBank& bank() const { return *bank_; }
  const ScatterConfig& config() const { return config_; }
  const std::vector<ScatteringPath>& paths() const { return paths_; }

  ScatteringOutput operator()(const Signal& x) const {
    Tape tape = run(x);
    return std::move(tape.output);
  }

  // ||Phi(x) - target||^2 with stride-weighted norms.
  double objective(const Signal& x, const ScatteringOutput& target) const {
    return squared_distance((*this)(x), target);
  }

  // Objective value and its gradient with respect to the samples of x.
  std::pair<double, Signal> objective_and_gradient(const Signal& x, const ScatteringOutput& target) const {
    Tape tape = run(x);
    const double value = squared_distance(tape.output, target);
    return {value, backward(tape, target)};
  }

 private:
  struct Level {
    GridShape shape;
    std::vector<std::vector<cplx>> psi;
    std::vector<cplx> phi;
  };

  struct Node {
    int parent = -1;            // -1 for the root (the input itself)
    int wavelet = -1;           // index into bank.psi
    int stride_exp = 0;         // U_n lives at stride 2^stride_exp
    std::size_t output = 0;     // index in paths_
    std::vector<int> children;  // in (j, k) order
  };

  struct Tape {
    std::vector<Signal> pre;   // Y_n = U_parent * psi (complex), empty for root
    std::vector<Signal> post;  // U_n = rho(Y_n); root holds x
    ScatteringOutput output;
  };

  void build_tree() {
    nodes_.push_back(Node{});
    nodes_[0].output = index_of(ScatteringPath{});
    std::vector<std::pair<int, ScatteringPath>> frontier{{0, ScatteringPath{}}};
    for (int m = 1; m <= config_.max_order; ++m) {
      std::vector<std::pair<int, ScatteringPath>> next;
      for (const auto& [node, path] : frontier) {
        const int last = path.order() ? path.steps().back().j : 0;
        for (int j = last + 1; j <= bank_->J; ++j) {
          for (int k = 0; k < bank_->K; ++k) {
            Node n;
            n.parent = node;
            n.wavelet = (j - 1) * bank_->K + k;
            n.stride_exp = log2_exact(scale_stride(j, config_.oversampling));
            auto child_path = path.extended({j, k});
            n.output = index_of(child_path);
            nodes_.push_back(n);
            const int id = static_cast<int>(nodes_.size()) - 1;
            nodes_[static_cast<std::size_t>(node)].children.push_back(id);
            next.emplace_back(id, std::move(child_path));
          }
        }
      }
      layers_.push_back({});
      for (const auto& [id, p] : next) layers_.back().push_back(id);
      frontier = std::move(next);
    }
  }

  std::size_t index_of(const ScatteringPath& p) const {
    auto it = std::lower_bound(paths_.begin(), paths_.end(), p);
    return static_cast<std::size_t>(it - paths_.begin());
  }

  std::vector<int> parents_of_layer(std::size_t m) const {
    if (m == 0) return {0};
    return layers_[m - 1];
  }

  Tape run(const Signal& x) const {
    require_same_shape(x.shape(), bank_->shape, "scatter");
    if (!x.is_real()) throw DomainError("scattering input must be real-valued");
    Tape tape;
    tape.pre.resize(nodes_.size());
    tape.post.resize(nodes_.size());
    tape.post[0] = x;
    for (std::size_t m = 0; m < layers_.size(); ++m) {
      auto parents = parents_of_layer(m);
      parallel_for(parents.size(), [&](std::size_t pi) {
        const Node& parent = nodes_[static_cast<std::size_t>(parents[pi])];
        const Signal& u = tape.post[static_cast<std::size_t>(parents[pi])];
        const auto spec = spectrum(u);
        const Level& lv = levels_[static_cast<std::size_t>(parent.stride_exp)];
        for (int c : parent.children) {
          const Node& child = nodes_[static_cast<std::size_t>(c)];
          const std::size_t factor = std::size_t{1} << (child.stride_exp - parent.stride_exp);
          Signal y = spectral::filter_subsample(spec, lv.psi[static_cast<std::size_t>(child.wavelet)], lv.shape,
                                                u.spacing(), factor);
          Signal v(y.shape(), y.spacing());
          for (std::size_t i = 0; i < y.size(); ++i) v[i] = rho(y[i], config_.rho);
          tape.pre[static_cast<std::size_t>(c)] = std::move(y);
          tape.post[static_cast<std::size_t>(c)] = std::move(v);
        }
      });
    }
    ScatteringOutput& out = tape.output;
    out.J = bank_->J;
    out.K = bank_->K;
    out.config = config_;
    out.input_shape = x.shape();
    out.paths = paths_;
    out.coeffs.resize(paths_.size());
    parallel_for(nodes_.size(), [&](std::size_t n) {
      const Node& node = nodes_[n];
      const Signal& u = tape.post[n];
      const Level& lv = levels_[static_cast<std::size_t>(node.stride_exp)];
      const std::size_t factor = out_stride_ >> node.stride_exp;
      Signal s = spectral::filter_subsample(spectrum(u), lv.phi, lv.shape, u.spacing(), factor);
      for (auto& v : s.samples()) v = v.real();
      out.coeffs[node.output] = std::move(s);
    });
    record_order_energy(out);
    return tape;
  }

  double squared_distance(const ScatteringOutput& a, const ScatteringOutput& target) const {
    if (target.paths != paths_) throw DimensionError("target was computed with a different path set");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
      require_same_shape(a.coeffs[i].shape(), target.coeffs[i].shape(), "scattering target");
      double d = 0.0;
      for (std::size_t s = 0; s < a.coeffs[i].size(); ++s) d += std::norm(a.coeffs[i][s] - target.coeffs[i][s]);
      acc += d * a.coeffs[i].cell_volume();
    }
    return acc;
  }

  // Reverse pass. Gradients are accumulated in the frequency domain of each
  // node's grid: the output averaging and every child contribute
  // conj(h) * replicate(DFT(g)), followed by one inverse DFT per node.
  Signal backward(const Tape& tape, const ScatteringOutput& target) const {
    const ScatteringOutput& out = tape.output;
    std::vector<std::vector<cplx>> grad_u(nodes_.size());
    auto output_term = [&](std::size_t n) {
      const Node& node = nodes_[n];
      const Level& lv = levels_[static_cast<std::size_t>(node.stride_exp)];
      const Signal& s = out.coeffs[node.output];
      const Signal& t = target.coeffs[node.output];
      std::vector<cplx> g(s.size());
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * s.cell_volume() * (s[i] - t[i]);
      fft::forward(g, s.shape());
      auto z = spectral::replicate(g, s.shape(), lv.shape);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] *= std::conj(lv.phi[i]);
      return z;
    };
    auto finish = [&](std::size_t n) {
      const Node& node = nodes_[n];
      const Level& lv = levels_[static_cast<std::size_t>(node.stride_exp)];
      auto z = output_term(n);
      for (int c : node.children) {
        const Node& child = nodes_[static_cast<std::size_t>(c)];
        const Signal& y = tape.pre[static_cast<std::size_t>(c)];
        const auto& gu = grad_u[static_cast<std::size_t>(c)];
        std::vector<cplx> gy(y.size());
        for (std::size_t i = 0; i < gy.size(); ++i) {
          const double g = gu[i].real();
          if (config_.rho == Rho::modulus) {
            const double a = std::abs(y[i]);
            gy[i] = a > 0.0 ? g * y[i] / a : 0.0;
          } else {
            gy[i] = y[i].real() > 0.0 ? g : 0.0;
          }
        }
        fft::forward(gy, y.shape());
        auto rep = spectral::replicate(gy, y.shape(), lv.shape);
        const auto& h = lv.psi[static_cast<std::size_t>(child.wavelet)];
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += std::conj(h[i]) * rep[i];
      }
      fft::inverse(z, lv.shape);
      grad_u[n] = std::move(z);
    };
    for (std::size_t m = layers_.size() + 1; m-- > 0;) {
      const std::vector<int> layer = m == 0 ? std::vector<int>{0} : layers_[m - 1];
      parallel_for(layer.size(), [&](std::size_t i) { finish(static_cast<std::size_t>(layer[i])); });
    }
    Signal g(bank_->shape, tape.post[0].spacing());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = grad_u[0][i].real();
    return g;
  }

  const FilterBank* bank_;
  ScatterConfig config_;
  std::vector<ScatteringPath> paths_;
  std::size_t out_stride_ = 1;
  std::vector<Level> levels_;
  std::vector<Node> nodes_;
  std::vector<std::vector<int>> layers_;  // node ids of orders 1..M
};

inline ScatteringOutput scatter(const Signal& x, const FilterBank& bank, const ScatterConfig& config = {}) {
  return Scatterer(bank, config)(x);
}

// Offset range of one path inside a flattened feature vector.
struct FeatureBlock {
  ScatteringPath path;
  std::size_t offset = 0;
  GridShape shape;
  double spacing = 1.0;
};

struct FeatureVector {
  std::vector<double> values;
  std::vector<FeatureBlock> index;
  int J = 0;
  int K = 0;
  ScatterConfig config;
  GridShape input_shape;

  // One label per feature: the path label, suffixed by ":i" when the path
  // grid holds more than one coefficient.
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(values.size());
    for (const auto& b : index) {
      const std::size_t n = b.shape.count();
      for (std::size_t i = 0; i < n; ++i) out.push_back(n == 1 ? b.path.label() : b.path.label() + ":" + std::to_string(i));
    }
    return out;
  }

  const FeatureBlock& block_at(std::size_t feature) const {
    auto it = std::upper_bound(index.begin(), index.end(), feature,
                               [](std::size_t f, const FeatureBlock& b) { return f < b.offset; });
    return *(it - 1);
  }
};

inline FeatureVector flatten(const ScatteringOutput& s) {
  FeatureVector f;
  f.J = s.J;
  f.K = s.K;
  f.config = s.config;
  f.input_shape = s.input_shape;
  f.values.reserve(s.feature_count());
  for (std::size_t i = 0; i < s.paths.size(); ++i) {
    f.index.push_back({s.paths[i], f.values.size(), s.coeffs[i].shape(), s.coeffs[i].spacing()});
    for (const auto& v : s.coeffs[i].samples()) f.values.push_back(v.real());
  }
  return f;
}

inline ScatteringOutput unflatten(const FeatureVector& f) {
  ScatteringOutput s;
  s.J = f.J;
  s.K = f.K;
  s.config = f.config;
  s.input_shape = f.input_shape;
  for (const auto& b : f.index) {
    s.paths.push_back(b.path);
    std::vector<double> vals(f.values.begin() + static_cast<long>(b.offset),
                             f.values.begin() + static_cast<long>(b.offset + b.shape.count()));
    s.coeffs.push_back(Signal::from_real(b.shape, vals, b.spacing));
  }
  record_order_energy(s);
  return s;
}

// Flattened coefficients weighted by sqrt(cell volume), so the Euclidean
// distance between two vectors equals the stride-weighted scattering distance.
inline std::vector<double> weighted_features(const ScatteringOutput& s) {
  std::vector<double> out;
  out.reserve(s.feature_count());
  for (const auto& c : s.coeffs) {
    const double w = std::sqrt(c.cell_volume());
    for (const auto& v : c.samples()) out.push_back(w * v.real());
  }
  return out;
}

}  // namespace scatterkit
