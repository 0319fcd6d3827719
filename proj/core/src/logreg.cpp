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
#include "uidscan/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "uidscan/error.hpp"
#include "uidscan/file_util.hpp"
#include "uidscan/lbfgs.hpp"

namespace uidscan {

using nlohmann::json;

void TrainConfig::validate() const
{
  if (max_iterations < 1)
  {
    throw ValidationError("max_iterations must be at least 1");
  }
  if (!(l2_strength >= 0.0) || !std::isfinite(l2_strength))
  {
    throw ValidationError("l2_strength must be a finite non-negative number");
  }
  if (!(convergence_tol > 0.0))
  {
    throw ValidationError("convergence_tol must be positive");
  }
}

namespace {

double log_sum_exp(std::span<double const> scores)
{
  double const top = *std::max_element(scores.begin(), scores.end());
  double       acc = 0.0;
  for (double s : scores)
  {
    acc += std::exp(s - top);
  }
  return top + std::log(acc);
}

void require_finite(std::span<double const> values, char const *what)
{
  for (double v : values)
  {
    if (!std::isfinite(v))
    {
      throw ValidationError(std::string("non-finite value in ") + what);
    }
  }
}

// Flat parameter layout for the optimizer: weights row-major, then bias.
std::vector<double> pack(LinearParams const &p)
{
  std::vector<double> flat(p.weights.data().begin(), p.weights.data().end());
  flat.insert(flat.end(), p.bias.begin(), p.bias.end());
  return flat;
}

LinearParams unpack(std::span<double const> flat, std::size_t classes, std::size_t dim)
{
  auto p = LinearParams::zeros(classes, dim);
  std::copy_n(flat.begin(), classes * dim, p.weights.data().begin());
  std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(classes * dim), classes, p.bias.begin());
  return p;
}

// Loss and gradient without input validation; the training loop calls this
// thousands of times on data it has already checked.
double accumulate_loss(LinearParams const &params, Matrix const &x,
                       std::span<std::size_t const> targets, double l2, LinearParams &grad)
{
  std::size_t const classes = params.bias.size();
  std::size_t const dim     = x.cols();
  std::fill(grad.weights.data().begin(), grad.weights.data().end(), 0.0);
  std::fill(grad.bias.begin(), grad.bias.end(), 0.0);

  std::vector<double> scores(classes);
  double              loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
  {
    auto const row = x.row(i);
    for (std::size_t c = 0; c < classes; ++c)
    {
      auto const w = params.weights.row(c);
      double     s = params.bias[c];
      for (std::size_t j = 0; j < dim; ++j)
      {
        s += w[j] * row[j];
      }
      scores[c] = s;
    }
    double const lse = log_sum_exp(scores);
    loss += lse - scores[targets[i]];
    for (std::size_t c = 0; c < classes; ++c)
    {
      double const residual = std::exp(scores[c] - lse) - (c == targets[i] ? 1.0 : 0.0);
      auto const   g        = grad.weights.row(c);
      for (std::size_t j = 0; j < dim; ++j)
      {
        g[j] += residual * row[j];
      }
      grad.bias[c] += residual;
    }
  }

  double const inv_n = 1.0 / static_cast<double>(x.rows());
  loss *= inv_n;
  for (double &g : grad.weights.data())
  {
    g *= inv_n;
  }
  for (double &g : grad.bias)
  {
    g *= inv_n;
  }

  double penalty = 0.0;
  auto   w       = params.weights.data();
  auto   gw      = grad.weights.data();
  for (std::size_t k = 0; k < w.size(); ++k)
  {
    penalty += w[k] * w[k];
    gw[k] += l2 * w[k];
  }
  return loss + 0.5 * l2 * penalty;
}

void check_shapes(LinearParams const &params, Matrix const &x, std::span<std::size_t const> targets)
{
  if (params.weights.rows() != params.bias.size())
  {
    throw DimensionError("weights have " + std::to_string(params.weights.rows()) + " rows but bias has " +
                         std::to_string(params.bias.size()) + " entries");
  }
  if (params.weights.cols() != x.cols())
  {
    throw DimensionError("weights have " + std::to_string(params.weights.cols()) +
                         " columns but features have " + std::to_string(x.cols()));
  }
  if (x.rows() != targets.size())
  {
    throw DimensionError("feature matrix has " + std::to_string(x.rows()) + " rows but " +
                         std::to_string(targets.size()) + " targets were given");
  }
  if (x.rows() == 0)
  {
    throw ValidationError("no training examples");
  }
  for (auto t : targets)
  {
    if (t >= params.bias.size())
    {
      throw ValidationError("target class index " + std::to_string(t) + " out of range");
    }
  }
}

}  // namespace

LossAndGradient loss_and_gradient(LinearParams const &params, Matrix const &x,
                                  std::span<std::size_t const> targets, double l2)
{
  check_shapes(params, x, targets);
  require_finite(x.data(), "feature matrix");
  require_finite(params.weights.data(), "weights");
  require_finite(params.bias, "bias");
  if (!(l2 >= 0.0) || !std::isfinite(l2))
  {
    throw ValidationError("l2 strength must be a finite non-negative number");
  }

  LossAndGradient out;
  out.gradient = LinearParams::zeros(params.bias.size(), x.cols());
  out.loss     = accumulate_loss(params, x, targets, l2, out.gradient);
  return out;
}

std::vector<double> softmax(std::span<double const> scores)
{
  if (scores.empty())
  {
    return {};
  }
  double const top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> p(scores.size());
  double              total = 0.0;
  for (std::size_t c = 0; c < scores.size(); ++c)
  {
    p[c] = std::exp(scores[c] - top);
    total += p[c];
  }
  for (double &v : p)
  {
    v /= total;
  }
  return p;
}

void LogRegModel::validate() const
{
  if (classes.size() < 2)
  {
    throw ValidationError("model needs at least 2 classes");
  }
  if (std::set<std::string>(classes.begin(), classes.end()).size() != classes.size())
  {
    throw ValidationError("model classes must be distinct");
  }
  if (weights.rows() != classes.size() || weights.cols() != feature_dim)
  {
    throw DimensionError("weight matrix is " + std::to_string(weights.rows()) + "x" +
                         std::to_string(weights.cols()) + ", expected " + std::to_string(classes.size()) +
                         "x" + std::to_string(feature_dim));
  }
  if (bias.size() != classes.size())
  {
    throw DimensionError("bias has " + std::to_string(bias.size()) + " entries, expected " +
                         std::to_string(classes.size()));
  }
  if (feature_mean.size() != feature_dim || feature_std.size() != feature_dim)
  {
    throw DimensionError("standardization statistics do not match feature_dim " +
                         std::to_string(feature_dim));
  }
  require_finite(weights.data(), "weights");
  require_finite(bias, "bias");
  require_finite(feature_mean, "feature_mean");
  if (standardize)
  {
    for (double s : feature_std)
    {
      if (!(s > 0.0) || !std::isfinite(s))
      {
        throw ValidationError("feature_std entries must be positive");
      }
    }
  }
}

TrainResult train(Matrix const &x, std::vector<std::string> const &labels,
                  std::vector<std::string> const &label_set, TrainConfig const &cfg,
                  std::optional<LinearParams> const &warm_start)
{
  cfg.validate();
  if (x.rows() != labels.size())
  {
    throw DimensionError("feature matrix has " + std::to_string(x.rows()) + " rows but " +
                         std::to_string(labels.size()) + " labels were given");
  }
  require_finite(x.data(), "feature matrix");

  std::set<std::string> distinct;
  for (auto const &label : labels)
  {
    if (std::find(label_set.begin(), label_set.end(), label) == label_set.end())
    {
      throw ValidationError("label " + label + " is not in the label set");
    }
    distinct.insert(label);
  }
  if (distinct.size() < 2)
  {
    throw ValidationError("need >= 2 classes, got " + std::to_string(distinct.size()));
  }

  TrainResult result;
  auto       &model = result.model;
  model.classes.assign(distinct.begin(), distinct.end());
  model.feature_dim  = x.cols();
  model.standardize  = cfg.standardize;
  model.train_config = cfg;
  model.feature_mean.assign(x.cols(), 0.0);
  model.feature_std.assign(x.cols(), 1.0);

  for (auto const &name : label_set)
  {
    if (!distinct.contains(name))
    {
      result.warnings.push_back("label " + name + " has no training examples and is left out of the model");
    }
  }

  Matrix z = x;
  if (cfg.standardize)
  {
    double const n = static_cast<double>(x.rows());
    for (std::size_t j = 0; j < x.cols(); ++j)
    {
      double mean = 0.0;
      for (std::size_t i = 0; i < x.rows(); ++i)
      {
        mean += x(i, j);
      }
      mean /= n;
      double var = 0.0;
      for (std::size_t i = 0; i < x.rows(); ++i)
      {
        double const d = x(i, j) - mean;
        var += d * d;
      }
      double sd = std::sqrt(var / n);
      if (!(sd > 0.0))
      {
        result.warnings.push_back("feature " + std::to_string(j) +
                                  " has zero variance; its standard deviation is set to 1");
        sd = 1.0;
      }
      model.feature_mean[j] = mean;
      model.feature_std[j]  = sd;
      for (std::size_t i = 0; i < x.rows(); ++i)
      {
        z(i, j) = (x(i, j) - mean) / sd;
      }
    }
  }

  std::vector<std::size_t> targets(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
  {
    targets[i] = static_cast<std::size_t>(
        std::lower_bound(model.classes.begin(), model.classes.end(), labels[i]) - model.classes.begin());
  }

  std::size_t const classes = model.classes.size();
  std::size_t const dim     = x.cols();
  auto              start   = LinearParams::zeros(classes, dim);
  if (warm_start)
  {
    if (warm_start->weights.rows() != classes || warm_start->weights.cols() != dim ||
        warm_start->bias.size() != classes)
    {
      throw DimensionError("warm start parameters do not match " + std::to_string(classes) + "x" +
                           std::to_string(dim));
    }
    start = *warm_start;
  }

  LinearParams scratch_params = LinearParams::zeros(classes, dim);
  LinearParams scratch_grad   = LinearParams::zeros(classes, dim);
  auto const   objective      = [&](std::span<double const> flat, std::span<double> grad_out) {
    std::copy_n(flat.begin(), classes * dim, scratch_params.weights.data().begin());
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(classes * dim), classes,
                scratch_params.bias.begin());
    double const loss = accumulate_loss(scratch_params, z, targets, cfg.l2_strength, scratch_grad);
    auto         out  = std::copy(scratch_grad.weights.data().begin(), scratch_grad.weights.data().end(),
                                  grad_out.begin());
    std::copy(scratch_grad.bias.begin(), scratch_grad.bias.end(), out);
    return loss;
  };

  LbfgsOptions options;
  options.max_iterations = cfg.max_iterations;
  options.gradient_tol   = cfg.convergence_tol;
  auto const fit         = minimize_lbfgs(objective, pack(start), options);

  auto params          = unpack(fit.x, classes, dim);
  model.weights        = std::move(params.weights);
  model.bias           = std::move(params.bias);
  result.iterations    = fit.iterations;
  result.final_loss    = fit.value;
  result.converged     = fit.converged;
  result.loss_history  = fit.history;
  if (!fit.converged)
  {
    result.warnings.push_back("not converged after " + std::to_string(fit.iterations) +
                              " iterations (max |gradient| " + std::to_string(fit.grad_norm) + ")");
  }
  return result;
}

std::vector<double> class_scores(LogRegModel const &model, std::span<double const> x)
{
  if (x.size() != model.feature_dim)
  {
    throw DimensionError("expected feature dimension D=" + std::to_string(model.feature_dim) + ", got " +
                         std::to_string(x.size()));
  }
  require_finite(x, "feature vector");

  std::vector<double> scores(model.classes.size());
  for (std::size_t c = 0; c < scores.size(); ++c)
  {
    auto const w = model.weights.row(c);
    double     s = model.bias[c];
    for (std::size_t j = 0; j < x.size(); ++j)
    {
      double const v = model.standardize ? (x[j] - model.feature_mean[j]) / model.feature_std[j] : x[j];
      s += w[j] * v;
    }
    scores[c] = s;
  }
  return scores;
}

std::vector<double> predict_proba(LogRegModel const &model, std::span<double const> x)
{
  auto const scores = class_scores(model, x);
  return softmax(scores);
}

std::size_t predict_index(LogRegModel const &model, std::span<double const> x)
{
  auto const  p    = predict_proba(model, x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < p.size(); ++c)
  {
    if (p[c] > p[best])
    {
      best = c;
    }
  }
  return best;
}

std::string const &predict(LogRegModel const &model, std::span<double const> x)
{
  return model.classes[predict_index(model, x)];
}

std::string model_to_json(LogRegModel const &model)
{
  json weights = json::array();
  for (std::size_t c = 0; c < model.weights.rows(); ++c)
  {
    auto const row = model.weights.row(c);
    weights.push_back(std::vector<double>(row.begin(), row.end()));
  }
  auto const &tc  = model.train_config;
  json        doc = {
      {"version", kModelVersion},
      {"classes", model.classes},
      {"feature_dim", model.feature_dim},
      {"span_length", model.span_length},
      {"span_mode", model.span_mode},
      {"standardize", model.standardize},
      {"feature_mean", model.feature_mean},
      {"feature_std", model.feature_std},
      {"weights", std::move(weights)},
      {"bias", model.bias},
      {"train_config",
       {{"max_iterations", tc.max_iterations},
        {"l2_strength", tc.l2_strength},
        {"convergence_tol", tc.convergence_tol},
        {"seed", tc.seed},
        {"standardize", tc.standardize}}},
  };
  return doc.dump(2) + "\n";
}

LogRegModel model_from_json(std::string const &text)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (json::exception const &e)
  {
    throw ParseError(std::string("corrupt model file: ") + e.what());
  }
  if (!doc.is_object())
  {
    throw ParseError("corrupt model file: expected a JSON object");
  }

  auto const version = doc.find("version");
  if (version == doc.end() || !version->is_number_integer() || version->get<int>() != kModelVersion)
  {
    throw Error("unsupported model version " + (version == doc.end() ? std::string("(missing)") : version->dump()));
  }

  LogRegModel model;
  try
  {
    model.classes      = doc.at("classes").get<std::vector<std::string>>();
    model.feature_dim  = doc.at("feature_dim").get<std::size_t>();
    model.span_length  = doc.at("span_length").get<std::size_t>();
    model.span_mode    = doc.value("span_mode", std::string("minmax"));
    model.standardize  = doc.at("standardize").get<bool>();
    model.feature_mean = doc.at("feature_mean").get<std::vector<double>>();
    model.feature_std  = doc.at("feature_std").get<std::vector<double>>();
    model.bias         = doc.at("bias").get<std::vector<double>>();
    auto const rows    = doc.at("weights").get<std::vector<std::vector<double>>>();
    model.weights      = rows.empty() ? Matrix(0, model.feature_dim) : Matrix::from_rows(rows);

    auto const &tc                     = doc.at("train_config");
    model.train_config.max_iterations  = tc.at("max_iterations").get<std::size_t>();
    model.train_config.l2_strength     = tc.at("l2_strength").get<double>();
    model.train_config.convergence_tol = tc.at("convergence_tol").get<double>();
    model.train_config.seed            = tc.at("seed").get<std::uint64_t>();
    model.train_config.standardize     = tc.at("standardize").get<bool>();
  }
  catch (json::exception const &e)
  {
    throw ParseError(std::string("corrupt model file: ") + e.what());
  }
  model.validate();
  return model;
}

void save_model(LogRegModel const &model, std::filesystem::path const &path)
{
  model.validate();
  write_file_atomic(path, model_to_json(model));
}

LogRegModel load_model(std::filesystem::path const &path)
{
  return model_from_json(read_file(path));
}

}  // namespace uidscan
