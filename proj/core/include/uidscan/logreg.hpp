//------------------------------------------------------------------------------
//
//   Copyright 2026 The uidscan Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uidscan/matrix.hpp"

namespace uidscan {

struct TrainConfig
{
  std::size_t   max_iterations  = 10000;
  double        l2_strength     = 1.0;
  double        convergence_tol = 1e-6;
  std::uint64_t seed            = 0;  // recorded only; the convex fit starts at zero
  bool          standardize     = true;

  void validate() const;

  bool operator==(TrainConfig const &) const = default;
};

/// Affine part of a multinomial logistic regression: C x D weights plus C biases.
struct LinearParams
{
  Matrix              weights;
  std::vector<double> bias;

  static LinearParams zeros(std::size_t classes, std::size_t dim)
  {
    return {Matrix(classes, dim), std::vector<double>(classes, 0.0)};
  }

  bool operator==(LinearParams const &) const = default;
};

struct LossAndGradient
{
  double       loss = 0.0;
  LinearParams gradient;
};

/// Mean softmax cross-entropy plus (l2/2)*||W||^2; the bias is not penalized.
/// `targets[i]` is the class index of row i. Throws DimensionError or
/// ValidationError on shape mismatch, out-of-range targets or non-finite input.
LossAndGradient loss_and_gradient(LinearParams const &params, Matrix const &x,
                                  std::span<std::size_t const> targets, double l2);

/// Numerically stable softmax.
std::vector<double> softmax(std::span<double const> scores);

struct LogRegModel
{
  std::vector<std::string> classes;  // lexicographic; row order of `weights`
  Matrix                   weights;
  std::vector<double>      bias;
  std::size_t              feature_dim = 0;
  std::size_t              span_length = 0;
  std::string              span_mode   = "minmax";
  bool                     standardize = true;
  std::vector<double>      feature_mean;
  std::vector<double>      feature_std;
  TrainConfig              train_config;

  /// Throws Error when the fields are mutually inconsistent.
  void validate() const;

  bool operator==(LogRegModel const &) const = default;
};

struct TrainResult
{
  LogRegModel              model;
  std::size_t              iterations = 0;
  double                   final_loss = 0.0;
  bool                     converged  = false;
  std::vector<double>      loss_history;
  std::vector<std::string> warnings;
};

/// Fits the model by L-BFGS from zero weights (or `warm_start`, given in the
/// standardized feature space). Classes are the distinct labels of `labels` in
/// lexicographic order; every label must belong to `label_set`. Throws
/// ValidationError with fewer than two classes. Zero-variance features get a
/// standard deviation of 1 and a warning.
TrainResult train(Matrix const &x, std::vector<std::string> const &labels,
                  std::vector<std::string> const &label_set, TrainConfig const &cfg,
                  std::optional<LinearParams> const &warm_start = std::nullopt);

/// Affine class scores after standardization.
std::vector<double>  class_scores(LogRegModel const &model, std::span<double const> x);
std::vector<double>  predict_proba(LogRegModel const &model, std::span<double const> x);
std::size_t          predict_index(LogRegModel const &model, std::span<double const> x);
std::string const   &predict(LogRegModel const &model, std::span<double const> x);

inline constexpr int kModelVersion = 1;

std::string  model_to_json(LogRegModel const &model);
LogRegModel  model_from_json(std::string const &text);
void         save_model(LogRegModel const &model, std::filesystem::path const &path);
LogRegModel  load_model(std::filesystem::path const &path);

}  // namespace uidscan
