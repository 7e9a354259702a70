#pragma once

#include <string>
#include <vector>

#include "scatterkit/classify.hpp"
#include "scatterkit/errors.hpp"
#include "scatterkit/parallel.hpp"
#include "scatterkit/scattering.hpp"

namespace scatterkit {

// Flattened scattering coefficients of each image, one row per image.
inline Dataset scattering_dataset(const std::vector<Signal>& images, const std::vector<int>& labels,
                                  const FilterBank& bank, const ScatterConfig& config) {
  if (images.empty()) throw DimensionError("no images to featurize");
  if (!labels.empty() && labels.size() != images.size()) throw DimensionError("label count does not match images");
  const Scatterer scatterer(bank, config);
  std::vector<FeatureVector> rows(images.size());
  parallel_for(images.size(), [&](std::size_t i) { rows[i] = flatten(scatterer(images[i])); });
  Dataset d;
  d.feature_names = rows.front().labels();
  d.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.feature_names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].values.size(); ++c) {
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i].values[c];
    }
  }
  d.labels = labels;
  d.provenance = "scattering J=" + std::to_string(bank.J) + " K=" + std::to_string(bank.K) +
                 " M=" + std::to_string(config.max_order) + " os=" + std::to_string(config.oversampling) + " rho=" +
                 to_string(config.rho);
  return d;
}

// Pixel values as features.
inline Dataset raw_dataset(const std::vector<Signal>& images, const std::vector<int>& labels) {
  if (images.empty()) throw DimensionError("no images to featurize");
  const std::size_t n = images.front().size();
  Dataset d;
  d.X.resize(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].size() != n) throw DimensionError("images differ in size");
    for (std::size_t c = 0; c < n; ++c) d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = images[i][c].real();
  }
  for (std::size_t c = 0; c < n; ++c) d.feature_names.push_back("px" + std::to_string(c));
  d.labels = labels;
  d.provenance = "raw";
  return d;
}

}  // namespace scatterkit
