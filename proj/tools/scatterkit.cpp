// scatterkit command-line tool. Every subcommand writes a run.json manifest
// beside its primary output; exit codes are 2 for usage errors, 3 for I/O
// failures and 4 for numeric failures.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scatterkit/scatterkit.hpp"

namespace fs = std::filesystem;
namespace sk = scatterkit;
using sk::io::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

int default_bands(std::size_t ndims) { return ndims == 1 ? 12 : 8; }

sk::GridShape grid_for(std::size_t size, int dims) {
  if (dims == 1) return sk::GridShape({size});
  if (dims == 2) return sk::GridShape({size, size});
  throw sk::DimensionError("--dims must be 1 or 2");
}

// Option values as given, keyed by long name. --threads is left out so that
// manifests do not depend on the worker count.
json options_json(const CLI::App& cmd) {
  json out = json::object();
  for (const CLI::Option* opt : cmd.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "threads" || opt->count() == 0) continue;
    const auto& r = opt->results();
    if (opt->get_type_size() == 0) {
      out[name] = true;
    } else if (r.size() == 1) {
      out[name] = r.front();
    } else {
      out[name] = r;
    }
  }
  return out;
}

void write_manifest(const fs::path& path, const CLI::App& cmd, const json& results = json::object()) {
  json m = {{"tool", "scatterkit"}, {"version", sk::kVersion}, {"command", cmd.get_name()}, {"options", options_json(cmd)}};
  if (!results.empty()) m["results"] = results;
  sk::io::write_json(path, m);
}

fs::path manifest_beside(const fs::path& file) {
  const fs::path parent = file.parent_path();
  return (parent.empty() ? fs::path(".") : parent) / "run.json";
}

void ensure_parent(const fs::path& file) {
  const fs::path parent = file.parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw sk::IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

void write_signal(const fs::path& path, const sk::Signal& x) {
  ensure_parent(path);
  if (path.extension() == ".pgm") {
    sk::io::write_pgm(path, x);
  } else {
    sk::io::write_sig(path, x);
  }
}

std::string fmt(double v) { return sk::io::format_double(v); }

// ---- bank --------------------------------------------------------------------

struct BankArgs {
  std::size_t size = 128;
  int dims = 2;
  int scales = 4;
  int bands = 0;
  double frame_floor = 0.5;
  bool check = false;
  std::string out;
};

void run_bank(const BankArgs& a, const CLI::App& cmd) {
  const auto shape = grid_for(a.size, a.dims);
  const int K = a.bands > 0 ? a.bands : default_bands(shape.ndims());
  auto params = shape.ndims() == 2 ? sk::BankParams::defaults_2d(K) : sk::BankParams::defaults_1d();
  params.frame_floor = a.frame_floor;
  const auto bank = shape.ndims() == 2 ? sk::build_morlet_2d(shape, a.scales, K, params)
                                       : sk::build_bank_1d(shape, a.scales, K, params);
  std::printf("grid %s J=%d K=%d\n", shape.str().c_str(), bank.J, K);
  std::printf("frame lower bound A = %.6f\n", bank.frame_lower);
  std::printf("frame upper bound B = %.6f\n", bank.frame_upper);
  if (a.check) std::printf("check passed: A >= %g\n", a.frame_floor);
  if (!a.out.empty()) {
    sk::io::write_bank(a.out, bank);
    write_manifest(fs::path(a.out) / "run.json", cmd,
                   {{"frame_lower", bank.frame_lower}, {"frame_upper", bank.frame_upper}});
  }
}

// ---- scatter -----------------------------------------------------------------

struct ScatterArgs {
  std::string input;
  int scales = 3;
  int bands = 0;
  int order = 2;
  std::string rho = "modulus";
  int oversampling = 1;
  std::string out;
};

void run_scatter(const ScatterArgs& a, const CLI::App& cmd) {
  const sk::Signal x = sk::io::load_signal(a.input);
  const int K = a.bands > 0 ? a.bands : default_bands(x.ndims());
  const auto bank = sk::build_bank(x.shape(), a.scales, K);
  const sk::ScatterConfig cfg{a.order, a.oversampling, sk::rho_from_string(a.rho)};
  const auto s = sk::scatter(x, bank, cfg);
  sk::io::write_scattering(a.out, s);
  sk::io::write_sig(fs::path(a.out) / "input.sig", x);
  json energy = s.order_energy;
  write_manifest(fs::path(a.out) / "run.json", cmd, {{"paths", s.paths.size()}, {"order_energy", energy}});
  std::printf("%zu paths, %zu features written to %s\n", s.paths.size(), s.feature_count(), a.out.c_str());
}

// ---- reconstruct -------------------------------------------------------------

struct ReconstructArgs {
  std::string target;
  std::uint64_t seed = 0;
  int max_iter = 2000;
  std::optional<double> sigma;
  std::string out;
  std::string history;
  std::string reference;
  std::string report;
};

void run_reconstruct(const ReconstructArgs& a, const CLI::App& cmd) {
  const auto target = sk::io::read_scattering(a.target);
  const auto bank = sk::build_bank(target.input_shape, target.J, target.K);
  sk::ReconstructionConfig rc;
  rc.seed = a.seed;
  rc.max_iter = a.max_iter;
  rc.sigma = a.sigma;
  const auto run = sk::reconstruct(target, bank, rc);
  write_signal(a.out, run.iterate);

  if (!a.history.empty()) {
    sk::io::Table h{{"iteration", "objective"}, {}};
    for (std::size_t i = 0; i < run.history.size(); ++i) h.rows.push_back({std::to_string(i), fmt(run.history[i])});
    ensure_parent(a.history);
    sk::io::write_csv(a.history, h);
  }

  const double objective = run.history.empty() ? 0.0 : run.history.back();
  const double tn = std::sqrt(target.norm_squared());
  sk::io::Table rep{{"seed", "iterations", "converged", "objective", "sigma", "scattering_error"}, {}};
  std::vector<std::string> row{std::to_string(run.seed), std::to_string(run.iterations), run.converged ? "1" : "0",
                               fmt(objective), fmt(run.sigma), fmt(tn > 0.0 ? std::sqrt(objective) / tn : 0.0)};
  fs::path ref = a.reference;
  if (ref.empty() && fs::exists(fs::path(a.target) / "input.sig")) ref = fs::path(a.target) / "input.sig";
  json results = {{"iterations", run.iterations}, {"converged", run.converged}, {"objective", objective}};
  if (!ref.empty()) {
    const auto al = sk::align_to(sk::io::load_signal(ref), run.iterate);
    rep.header.insert(rep.header.end(), {"aligned_error", "reflected"});
    row.insert(row.end(), {fmt(al.relative_error), al.reflected ? "1" : "0"});
    for (std::size_t d = 0; d < al.shift.size(); ++d) {
      rep.header.push_back("shift_" + std::to_string(d));
      row.push_back(fmt(al.shift[d]));
    }
    results["aligned_error"] = al.relative_error;
    std::printf("aligned relative error %.6g%s\n", al.relative_error, al.reflected ? " (reflected)" : "");
  }
  rep.rows.push_back(row);
  const fs::path report = a.report.empty() ? fs::path(a.out).replace_extension(".report.csv") : fs::path(a.report);
  ensure_parent(report);
  sk::io::write_csv(report, rep);
  write_manifest(manifest_beside(a.out), cmd, results);
  std::printf("%d iterations, objective %.6g, %s\n", run.iterations, objective,
              run.converged ? "converged" : "iteration cap reached");
}

// ---- stability ---------------------------------------------------------------

struct StabilityArgs {
  std::string input;
  std::string rep = "scattering";
  int scales = 3;
  int bands = 0;
  int order = 2;
  std::size_t warps = 20;
  double amplitude = 0.2;
  std::optional<double> min_amplitude;
  std::uint64_t seed = 0;
  std::string out;
};

void run_stability(const StabilityArgs& a, const CLI::App& cmd) {
  const sk::Signal x = sk::io::load_signal(a.input);
  sk::Representation rep;
  if (a.rep == "scattering") {
    const int K = a.bands > 0 ? a.bands : default_bands(x.ndims());
    rep = sk::scattering_representation(sk::build_bank(x.shape(), a.scales, K), {a.order, 1, sk::Rho::modulus});
  } else if (a.rep == "fourier") {
    rep = sk::fourier_modulus_representation;
  } else if (a.rep == "identity") {
    rep = sk::identity_representation;
  } else {
    throw sk::DomainError("unknown representation '" + a.rep + "'");
  }
  const double lo = a.min_amplitude.value_or(a.amplitude / 10.0);
  const auto sweep = sk::warp_sweep(x.shape(), a.warps, lo, a.amplitude, a.seed);
  std::vector<sk::StabilityMeasurement> m(sweep.size());
  sk::parallel_for(sweep.size(), [&](std::size_t i) { m[i] = sk::measure_stability(rep, x, sweep[i], a.scales); });
  sk::io::Table t{{"warp", "sup_norm", "jac_norm", "metric", "distance", "ratio"}, {}};
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    t.rows.push_back({std::to_string(i), fmt(m[i].sup_norm), fmt(m[i].jac_norm), fmt(m[i].metric), fmt(m[i].distance),
                      fmt(m[i].ratio)});
    worst = std::max(worst, m[i].ratio);
  }
  ensure_parent(a.out);
  sk::io::write_csv(a.out, t);
  write_manifest(manifest_beside(a.out), cmd, {{"max_ratio", worst}});
  std::printf("%s: max stability ratio %.6g over %zu warps\n", a.rep.c_str(), worst, m.size());
}

// ---- moments -----------------------------------------------------------------

struct MomentsArgs {
  std::string model = "white:1";
  std::size_t size = 64;
  int dims = 2;
  int scales = 3;
  int bands = 0;
  int order = 2;
  std::string rho = "modulus";
  int oversampling = 1;
  std::size_t realizations = 16;
  std::uint64_t seed = 0;
  std::string out;
};

// name[:value], where value is a number or, for phase and shifted, an image path.
sk::ProcessModel parse_model(const std::string& text, const sk::GridShape& shape) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string value = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto number = [&](double fallback) { return value.empty() ? fallback : sk::io::parse_double(value); };
  if (name == "white") return sk::ProcessModel::white(shape, number(1.0));
  if (name == "ar1") return sk::ProcessModel::ar1(shape, number(0.9));
  if (name == "spikes") return sk::ProcessModel::spikes(shape, number(0.02));
  if (name == "constant") return sk::ProcessModel::constant(shape, number(1.0));
  if (name == "phase" || name == "shifted") {
    if (value.empty()) throw sk::DomainError("model '" + name + "' needs an image path, e.g. " + name + ":x.pgm");
    const sk::Signal img = sk::io::load_signal(value);
    return name == "phase" ? sk::ProcessModel::phase_randomized(img) : sk::ProcessModel::shifted(img);
  }
  throw sk::DomainError("unknown process model '" + name + "'");
}

void run_moments(const MomentsArgs& a, const CLI::App& cmd) {
  const auto model = parse_model(a.model, grid_for(a.size, a.dims));
  const int K = a.bands > 0 ? a.bands : default_bands(model.shape.ndims());
  const auto bank = sk::build_bank(model.shape, a.scales, K);
  const sk::ScatterConfig cfg{a.order, a.oversampling, sk::rho_from_string(a.rho)};
  const auto est = sk::estimate_moments(model, bank, cfg, a.realizations, a.seed);
  sk::io::Table t{{"path", "order", "mean", "variance", "stderr"}, {}};
  for (std::size_t p = 0; p < est.paths.size(); ++p) {
    t.rows.push_back({est.paths[p].label(), std::to_string(est.paths[p].order()), fmt(est.mean[p]),
                      fmt(est.variance[p]), fmt(est.standard_error(p))});
  }
  ensure_parent(a.out);
  sk::io::write_csv(a.out, t);
  write_manifest(manifest_beside(a.out), cmd,
                 {{"model", model.describe()}, {"sigma2", est.sigma2}, {"sigma2_stderr", est.sigma2_stderr}});
  std::printf("%s: sigma_J^2 = %.6g +- %.2g per unit area\n", model.describe().c_str(), est.sigma2, est.sigma2_stderr);
}

// ---- features ----------------------------------------------------------------

struct FeaturesArgs {
  std::string digits;
  int scales = 3;
  int bands = 4;
  int order = 2;
  std::string rho = "modulus";
  int oversampling = 1;
  bool raw = false;
  std::size_t train = 1000;
  std::uint64_t seed = 0;
  double warp = 0.0;
  std::string out_train;
  std::string out_test;
};

// Digits split into train and test, optionally warping the test images, then
// written as feature CSVs for `classify`.
void run_features(const FeaturesArgs& a, const CLI::App& cmd) {
  const auto digits = sk::load_digits(a.digits);
  const auto [tr, te] = sk::split_indices(digits.images.size(), a.train, a.seed);
  auto pick = [&](const std::vector<std::size_t>& idx, bool warped) {
    std::vector<sk::Signal> imgs(idx.size());
    std::vector<int> labels(idx.size());
    sk::parallel_for(idx.size(), [&](std::size_t i) {
      imgs[i] = digits.images[idx[i]];
      if (warped) {
        // correlation length 2^J, the invariance scale of the features
        const auto g = sk::random_smooth_field(imgs[i].shape(), std::ldexp(1.0, a.scales), a.warp, sk::mix_seed(a.seed, 1000000 + idx[i]));
        imgs[i] = sk::warp(imgs[i], g);
      }
    });
    for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = digits.labels[idx[i]];
    return std::pair{imgs, labels};
  };
  auto featurize = [&](const std::vector<sk::Signal>& imgs, const std::vector<int>& labels) {
    if (a.raw) return sk::raw_dataset(imgs, labels);
    const auto bank = sk::build_bank(imgs.front().shape(), a.scales, a.bands);
    return sk::scattering_dataset(imgs, labels, bank, {a.order, a.oversampling, sk::rho_from_string(a.rho)});
  };
  const auto [trx, trl] = pick(tr, false);
  ensure_parent(a.out_train);
  sk::write_feature_csv(a.out_train, featurize(trx, trl));
  if (!a.out_test.empty()) {
    const auto [tex, tel] = pick(te, a.warp > 0.0);
    ensure_parent(a.out_test);
    sk::write_feature_csv(a.out_test, featurize(tex, tel));
  }
  write_manifest(manifest_beside(a.out_train), cmd, {{"train_rows", tr.size()}, {"test_rows", te.size()}});
  std::printf("%zu train / %zu test digits featurized (%s)\n", tr.size(), te.size(), a.raw ? "raw" : "scattering");
}

// ---- classify ----------------------------------------------------------------

struct ClassifyArgs {
  std::string train;
  std::string test;
  int p = 2;
  std::string lambda = "auto";
  std::uint64_t seed = 0;
  bool no_standardize = false;
  std::vector<std::string> out;
};

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(M.cols()));
    for (Eigen::Index c = 0; c < M.cols(); ++c) row[static_cast<std::size_t>(c)] = M(r, c);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> row_vector(const Eigen::RowVectorXd& v) { return {v.data(), v.data() + v.size()}; }

void run_classify(const ClassifyArgs& a, const CLI::App& cmd) {
  const auto train = sk::read_feature_csv(a.train);
  std::optional<sk::Dataset> test;
  if (!a.test.empty()) {
    test = sk::read_feature_csv(a.test);
    if (test->feature_names != train.feature_names) throw sk::DimensionError("train and test feature columns differ");
  }
  sk::OvaOptions opt;
  opt.p = a.p;
  opt.seed = a.seed;
  opt.standardize = !a.no_standardize;
  if (a.lambda != "auto") opt.lambda = sk::io::parse_double(a.lambda);
  const auto res = sk::classify_ova(train, test ? &*test : nullptr, opt);

  const Eigen::MatrixXd Z = res.model.standardizer ? res.model.standardizer->apply(train.X) : train.X;
  const double separation = sk::min_interclass_distance(Z, train.labels);
  json model = {{"format", "scatterkit-linear-model"},
                {"version", sk::kVersion},
                {"p", res.model.p},
                {"lambda", res.model.lambda},
                {"classes", res.model.classes},
                {"feature_names", train.feature_names},
                {"weights", matrix_json(res.model.W.transpose())},
                {"intercepts", row_vector(res.model.b)},
                {"objective", res.model.objective}};
  if (res.model.standardizer) {
    model["standardizer"] = {{"mean", row_vector(res.model.standardizer->mean)},
                             {"scale", row_vector(res.model.standardizer->scale)}};
  }
  json scores = json::array();
  for (const auto& [l, s] : res.lambda_scores) scores.push_back({{"lambda", l}, {"validation_accuracy", s}});
  model["lambda_scores"] = scores;
  const fs::path model_path = a.out.at(0);
  ensure_parent(model_path);
  sk::io::write_json(model_path, model);

  sk::io::Table rep{{"metric", "value"}, {}};
  rep.rows.push_back({"lambda", fmt(res.model.lambda)});
  rep.rows.push_back({"train_accuracy", fmt(res.train_accuracy)});
  rep.rows.push_back({"train_margin", fmt(res.train_margin)});
  rep.rows.push_back({"min_interclass_distance", fmt(separation)});
  if (test) {
    rep.rows.push_back({"test_accuracy", fmt(res.test_accuracy)});
    rep.rows.push_back({"test_margin", fmt(res.test_margin)});
  }
  const fs::path report = a.out.size() > 1 ? fs::path(a.out[1]) : model_path.parent_path() / "report.csv";
  ensure_parent(report);
  sk::io::write_csv(report, rep);
  write_manifest(manifest_beside(model_path), cmd,
                 {{"lambda", res.model.lambda}, {"train_accuracy", res.train_accuracy}, {"test_accuracy", res.test_accuracy}});
  std::printf("lambda %g, train accuracy %.4f", res.model.lambda, res.train_accuracy);
  if (test) std::printf(", test accuracy %.4f", res.test_accuracy);
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scatterkit: wavelet scattering transforms, inversion, moments and classification"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: SCATTERKIT_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  BankArgs bank;
  auto* c_bank = app.add_subcommand("bank", "build a filter bank and report its frame bounds");
  c_bank->add_option("--size", bank.size, "samples per axis (power of two)");
  c_bank->add_option("--dims", bank.dims, "1 or 2");
  c_bank->add_option("--scales", bank.scales, "J");
  c_bank->add_option("--bands", bank.bands, "K (default 8 in 2D, 12 in 1D)");
  c_bank->add_option("--frame-floor", bank.frame_floor, "minimum accepted lower frame bound");
  c_bank->add_flag("--check", bank.check, "fail unless the frame gate passes");
  c_bank->add_option("--out", bank.out, "write the bank to this directory");

  ScatterArgs sc;
  auto* c_scatter = app.add_subcommand("scatter", "scattering transform of one signal");
  c_scatter->add_option("--input", sc.input, "x.sig or x.pgm")->required();
  c_scatter->add_option("--scales", sc.scales, "J");
  c_scatter->add_option("--bands", sc.bands, "K (default 8 in 2D, 12 in 1D)");
  c_scatter->add_option("--order", sc.order, "M");
  c_scatter->add_option("--rho", sc.rho, "modulus|rectifier")->check(CLI::IsMember({"modulus", "rectifier"}));
  c_scatter->add_option("--oversampling", sc.oversampling, "extra dyadic levels kept");
  c_scatter->add_option("--out", sc.out, "output directory")->required();

  ReconstructArgs rc;
  auto* c_recon = app.add_subcommand("reconstruct", "signal from scattering coefficients by gradient descent");
  c_recon->add_option("--target", rc.target, "scattering directory")->required();
  c_recon->add_option("--seed", rc.seed, "seed of the white-noise start");
  c_recon->add_option("--max-iter", rc.max_iter, "iteration cap");
  c_recon->add_option("--sigma", rc.sigma, "stop once sqrt(objective) <= sigma");
  c_recon->add_option("--out", rc.out, "recon.pgm or recon.sig")->required();
  c_recon->add_option("--history", rc.history, "objective history CSV");
  c_recon->add_option("--reference", rc.reference, "original signal (default: input.sig in the target directory)");
  c_recon->add_option("--report", rc.report, "report CSV (default: beside --out)");

  StabilityArgs st;
  auto* c_stab = app.add_subcommand("stability", "deformation stability sweep");
  c_stab->add_option("--input", st.input, "x.pgm or x.sig")->required();
  c_stab->add_option("--rep", st.rep, "scattering|fourier|identity")
      ->check(CLI::IsMember({"scattering", "fourier", "identity"}));
  c_stab->add_option("--scales", st.scales, "J");
  c_stab->add_option("--bands", st.bands, "K");
  c_stab->add_option("--order", st.order, "M");
  c_stab->add_option("--warps", st.warps, "number of warps");
  c_stab->add_option("--amplitude", st.amplitude, "largest ||grad g||_inf in the sweep");
  c_stab->add_option("--min-amplitude", st.min_amplitude, "smallest ||grad g||_inf (default amplitude/10)");
  c_stab->add_option("--seed", st.seed, "warp seed");
  c_stab->add_option("--out", st.out, "report CSV")->required();

  MomentsArgs mo;
  auto* c_mom = app.add_subcommand("moments", "expected scattering of a stationary process");
  c_mom->add_option("--model", mo.model, "white:s | ar1:a | spikes:p | constant:c | phase:img | shifted:img");
  c_mom->add_option("--size", mo.size, "samples per axis");
  c_mom->add_option("--dims", mo.dims, "1 or 2");
  c_mom->add_option("--scales", mo.scales, "J");
  c_mom->add_option("--bands", mo.bands, "K");
  c_mom->add_option("--order", mo.order, "M");
  c_mom->add_option("--rho", mo.rho, "modulus|rectifier")->check(CLI::IsMember({"modulus", "rectifier"}));
  c_mom->add_option("--oversampling", mo.oversampling, "extra dyadic levels kept");
  c_mom->add_option("--realizations", mo.realizations, "R");
  c_mom->add_option("--seed", mo.seed, "master seed");
  c_mom->add_option("--out", mo.out, "moments CSV")->required();

  FeaturesArgs fe;
  auto* c_feat = app.add_subcommand("features", "digit feature tables for classify");
  c_feat->add_option("--digits", fe.digits, "8x8 digits CSV")->required();
  c_feat->add_option("--scales", fe.scales, "J");
  c_feat->add_option("--bands", fe.bands, "K");
  c_feat->add_option("--order", fe.order, "M");
  c_feat->add_option("--rho", fe.rho, "modulus|rectifier")->check(CLI::IsMember({"modulus", "rectifier"}));
  c_feat->add_option("--oversampling", fe.oversampling, "extra dyadic levels kept");
  c_feat->add_flag("--raw", fe.raw, "pixel features instead of scattering");
  c_feat->add_option("--train", fe.train, "training rows");
  c_feat->add_option("--seed", fe.seed, "split and warp seed");
  c_feat->add_option("--warp", fe.warp, "||grad g||_inf of random warps applied to test images");
  c_feat->add_option("--out-train", fe.out_train, "training CSV")->required();
  c_feat->add_option("--out-test", fe.out_test, "test CSV");

  ClassifyArgs cl;
  auto* c_cls = app.add_subcommand("classify", "one-versus-all regularized linear classification");
  c_cls->add_option("--train", cl.train, "training feature CSV")->required();
  c_cls->add_option("--test", cl.test, "test feature CSV");
  c_cls->add_option("--p", cl.p, "1 (lasso) or 2 (ridge)")->check(CLI::IsMember({1, 2}));
  c_cls->add_option("--lambda", cl.lambda, "penalty or 'auto'");
  c_cls->add_option("--seed", cl.seed, "validation split seed");
  c_cls->add_flag("--no-standardize", cl.no_standardize, "fit on raw feature scales");
  c_cls->add_option("--out", cl.out, "model.json [report.csv]")->required()->expected(1, 2);

  if (argc <= 1) {
    std::cerr << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  sk::set_thread_count(threads);
  try {
    if (c_bank->parsed()) run_bank(bank, *c_bank);
    if (c_scatter->parsed()) run_scatter(sc, *c_scatter);
    if (c_recon->parsed()) run_reconstruct(rc, *c_recon);
    if (c_stab->parsed()) run_stability(st, *c_stab);
    if (c_mom->parsed()) run_moments(mo, *c_mom);
    if (c_feat->parsed()) run_features(fe, *c_feat);
    if (c_cls->parsed()) run_classify(cl, *c_cls);
  } catch (const sk::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const sk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
