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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "uidscan/error.hpp"
#include "uidscan/logreg.hpp"
#include "uidscan/synthetic.hpp"
#include "uidscan/uid_features.hpp"

namespace uidscan {
namespace {

namespace fs = std::filesystem;

Matrix random_matrix(std::mt19937_64 &rng, std::size_t rows, std::size_t cols, double scale = 1.0)
{
  std::normal_distribution<double> n(0.0, scale);
  Matrix                           m(rows, cols);
  for (double &v : m.data())
  {
    v = n(rng);
  }
  return m;
}

std::vector<double> flatten(LinearParams const &p)
{
  std::vector<double> flat(p.weights.data().begin(), p.weights.data().end());
  flat.insert(flat.end(), p.bias.begin(), p.bias.end());
  return flat;
}

LinearParams unflatten(std::vector<double> const &flat, std::size_t classes, std::size_t dim)
{
  auto p = LinearParams::zeros(classes, dim);
  std::copy_n(flat.begin(), classes * dim, p.weights.data().begin());
  std::copy(flat.begin() + static_cast<std::ptrdiff_t>(classes * dim), flat.end(), p.bias.begin());
  return p;
}

TEST(Loss, ZeroParamsBalancedBinaryIsLn2)
{
  std::mt19937_64                rng(1);
  auto const                     x = random_matrix(rng, 10, 3);
  std::vector<std::size_t> const y{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  auto const                     r = loss_and_gradient(LinearParams::zeros(2, 3), x, y, 1.0);
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-15);
}

TEST(Loss, ConfidentCorrectPredictionApproachesZero)
{
  Matrix x(1, 2);
  x(0, 0)     = 1.0;
  x(0, 1)     = -1.0;
  auto params = LinearParams::zeros(3, 2);
  params.bias = {60.0, 0.0, 0.0};
  std::vector<std::size_t> const y{0};
  EXPECT_LT(loss_and_gradient(params, x, y, 0.0).loss, 1e-20);
}

TEST(Loss, GradientMatchesCentralDifferences)
{
  std::mt19937_64 rng(2024);
  for (int point = 0; point < 10; ++point)
  {
    std::size_t const classes = 2 + point % 3;
    std::size_t const dim     = 3 + point % 4;
    auto const        x       = random_matrix(rng, 25, dim, 2.0);
    std::vector<std::size_t> y(25);
    for (auto &t : y)
    {
      t = rng() % classes;
    }
    auto const params = unflatten(
        [&] {
          std::vector<double>              v(classes * dim + classes);
          std::normal_distribution<double> n(0.0, 1.0);
          for (double &e : v)
          {
            e = n(rng);
          }
          return v;
        }(),
        classes, dim);
    double const l2 = 0.25 * point;

    auto const analytic = flatten(loss_and_gradient(params, x, y, l2).gradient);
    auto const numeric  = testing::central_differences(
        [&](std::vector<double> const &flat) {
          return loss_and_gradient(unflatten(flat, classes, dim), x, y, l2).loss;
        },
        flatten(params), 1e-4);
    for (std::size_t i = 0; i < analytic.size(); ++i)
    {
      EXPECT_NEAR(analytic[i], numeric[i], 1e-5) << "point " << point << " index " << i;
    }
  }
}

TEST(Loss, InputValidation)
{
  Matrix                         x(2, 3);
  std::vector<std::size_t> const y{0, 1};
  EXPECT_THROW(loss_and_gradient(LinearParams::zeros(2, 4), x, y, 0.0), DimensionError);
  EXPECT_THROW(loss_and_gradient(LinearParams::zeros(2, 3), x, std::vector<std::size_t>{0}, 0.0),
               DimensionError);
  EXPECT_THROW(loss_and_gradient(LinearParams::zeros(2, 3), x, std::vector<std::size_t>{0, 2}, 0.0),
               ValidationError);
  x(1, 1) = std::nan("");
  EXPECT_THROW(loss_and_gradient(LinearParams::zeros(2, 3), x, y, 0.0), ValidationError);
}

TEST(Softmax, StableAndNormalized)
{
  auto const p = softmax(std::vector<double>{1000.0, 1000.0, -1000.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
  EXPECT_EQ(p[2], 0.0);
}

struct Dataset
{
  Matrix                   x;
  std::vector<std::string> labels;
};

Dataset dispersion_features(std::size_t docs, std::uint64_t seed)
{
  auto const corpus = make_synthetic_corpus(dispersion_pair(docs, seed));
  auto const table  = featurize_corpus(corpus, FeatureConfig{});
  Dataset    d{Matrix(table.records.size(), table.feature_dim), {}};
  for (std::size_t i = 0; i < table.records.size(); ++i)
  {
    std::copy(table.records[i].features.begin(), table.records[i].features.end(), d.x.row(i).begin());
    d.labels.push_back(*table.records[i].label);
  }
  return d;
}

std::vector<std::string> const kLabels{"human", "machine"};

TEST(Train, SeparableSyntheticData)
{
  auto const data = dispersion_features(150, 3);
  auto const fit  = train(data.x, data.labels, kLabels, TrainConfig{});
  EXPECT_TRUE(fit.converged);
  EXPECT_EQ(fit.model.classes, kLabels);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.x.rows(); ++i)
  {
    correct += predict(fit.model, data.x.row(i)) == data.labels[i];
  }
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(data.x.rows()), 0.99);
}

TEST(Train, IsBitDeterministic)
{
  auto const data = dispersion_features(60, 4);
  auto const a    = train(data.x, data.labels, kLabels, TrainConfig{});
  auto const b    = train(data.x, data.labels, kLabels, TrainConfig{});
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.loss_history, b.loss_history);
}

TEST(Train, LossNeverIncreases)
{
  auto const data = dispersion_features(60, 5);
  TrainConfig cfg;
  cfg.l2_strength     = 0.01;
  cfg.convergence_tol = 1e-9;
  auto const fit      = train(data.x, data.labels, kLabels, cfg);
  ASSERT_GT(fit.loss_history.size(), 2u);
  for (std::size_t i = 1; i < fit.loss_history.size(); ++i)
  {
    EXPECT_LE(fit.loss_history[i], fit.loss_history[i - 1]);
  }
}

TEST(Train, ConvexFitIsIndependentOfStart)
{
  auto const  data = dispersion_features(60, 6);
  TrainConfig cfg;
  cfg.l2_strength     = 0.1;
  cfg.convergence_tol = 1e-8;
  auto const from_zero = train(data.x, data.labels, kLabels, cfg);

  std::mt19937_64 rng(1);
  LinearParams    start{random_matrix(rng, 2, data.x.cols(), 3.0), {2.0, -5.0}};
  auto const      from_random = train(data.x, data.labels, kLabels, cfg, start);
  ASSERT_TRUE(from_zero.converged);
  ASSERT_TRUE(from_random.converged);
  for (std::size_t k = 0; k < from_zero.model.weights.data().size(); ++k)
  {
    EXPECT_NEAR(from_zero.model.weights.data()[k], from_random.model.weights.data()[k], 1e-6);
  }
  // The unpenalized bias is only defined up to a shift common to all classes.
  EXPECT_NEAR(from_zero.model.bias[0] - from_zero.model.bias[1],
              from_random.model.bias[0] - from_random.model.bias[1], 1e-6);
}

TEST(Train, StandardizationInvariance)
{
  auto const train_set = dispersion_features(80, 7);
  auto const test_set  = dispersion_features(40, 8);

  std::mt19937_64                        rng(3);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  std::vector<double>                    a(train_set.x.cols());
  std::vector<double>                    b(train_set.x.cols());
  for (std::size_t j = 0; j < a.size(); ++j)
  {
    a[j] = scale(rng);
    b[j] = shift(rng);
  }
  auto const rescale = [&](Matrix m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
    {
      for (std::size_t j = 0; j < m.cols(); ++j)
      {
        m(i, j) = a[j] * m(i, j) + b[j];
      }
    }
    return m;
  };

  auto const plain  = train(train_set.x, train_set.labels, kLabels, TrainConfig{});
  auto const scaled = train(rescale(train_set.x), train_set.labels, kLabels, TrainConfig{});
  auto const x2     = rescale(test_set.x);
  for (std::size_t i = 0; i < test_set.x.rows(); ++i)
  {
    EXPECT_EQ(predict(plain.model, test_set.x.row(i)), predict(scaled.model, x2.row(i)));
  }
}

TEST(Train, RequiresTwoClasses)
{
  Matrix x(3, 2, 1.0);
  try
  {
    train(x, {"a", "a", "a"}, {"a", "b"}, TrainConfig{});
    FAIL();
  }
  catch (ValidationError const &e)
  {
    EXPECT_NE(std::string(e.what()).find("need >= 2 classes"), std::string::npos);
  }
  EXPECT_THROW(train(x, {"a", "b", "c"}, {"a", "b"}, TrainConfig{}), ValidationError);
  EXPECT_THROW(train(x, {"a", "b"}, {"a", "b"}, TrainConfig{}), DimensionError);
}

TEST(Train, ZeroVarianceFeatureWarns)
{
  Matrix x(4, 2);
  for (std::size_t i = 0; i < 4; ++i)
  {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = 3.0;
  }
  auto const fit = train(x, {"a", "a", "b", "b"}, {"a", "b"}, TrainConfig{});
  EXPECT_EQ(fit.model.feature_std[1], 1.0);
  ASSERT_FALSE(fit.warnings.empty());
  EXPECT_NE(fit.warnings[0].find("zero variance"), std::string::npos);
}

TEST(Train, ClassesAreLexicographic)
{
  auto data = dispersion_features(20, 9);
  for (auto &l : data.labels)
  {
    l = l == "human" ? "zeta" : "alpha";
  }
  auto const fit = train(data.x, data.labels, {"zeta", "alpha"}, TrainConfig{});
  EXPECT_EQ(fit.model.classes, (std::vector<std::string>{"alpha", "zeta"}));
}

TEST(Train, IterationCapWarns)
{
  auto const  data = dispersion_features(30, 10);
  TrainConfig cfg;
  cfg.max_iterations = 1;
  auto const fit     = train(data.x, data.labels, kLabels, cfg);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.iterations, 1u);
  EXPECT_NE(fit.warnings.back().find("not converged"), std::string::npos);
}

LogRegModel zero_model(std::size_t classes, std::size_t dim)
{
  LogRegModel m;
  for (std::size_t c = 0; c < classes; ++c)
  {
    m.classes.push_back("class" + std::to_string(c));
  }
  m.weights      = Matrix(classes, dim);
  m.bias.assign(classes, 0.0);
  m.feature_dim  = dim;
  m.span_length  = 20;
  m.feature_mean.assign(dim, 0.0);
  m.feature_std.assign(dim, 1.0);
  return m;
}

TEST(Predict, ZeroModelIsUniformAndPicksFirstClass)
{
  auto const          m = zero_model(4, 3);
  std::vector<double> x{1.0, -2.0, 3.0};
  for (double p : predict_proba(m, x))
  {
    EXPECT_DOUBLE_EQ(p, 0.25);
  }
  EXPECT_EQ(predict(m, x), "class0");
}

TEST(Predict, ProbabilitiesSumToOneProperty)
{
  std::mt19937_64                  rng(11);
  std::normal_distribution<double> n(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial)
  {
    auto m = zero_model(2 + rng() % 5, 1 + rng() % 10);
    for (double &w : m.weights.data())
    {
      w = n(rng);
    }
    for (double &b : m.bias)
    {
      b = n(rng);
    }
    std::vector<double> x(m.feature_dim);
    for (double &v : x)
    {
      v = n(rng);
    }
    auto const p   = predict_proba(m, x);
    double     sum = 0.0;
    for (double v : p)
    {
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);

    // Raising one class score raises only that class's probability.
    std::size_t const c = rng() % m.classes.size();
    auto              m2 = m;
    m2.bias[c] += 0.5;
    // Strict unless the class already saturates at 1 in double precision.
    EXPECT_GE(predict_proba(m2, x)[c], p[c]);
    if (p[c] < 0.5)
    {
      EXPECT_GT(predict_proba(m2, x)[c], p[c]);
    }

    // A common shift of every score leaves the decision alone.
    auto m3 = m;
    for (double &b : m3.bias)
    {
      b += 123.0;
    }
    EXPECT_EQ(predict_index(m3, x), predict_index(m, x));
  }
}

TEST(Predict, DimensionMismatchNamesExpectedDim)
{
  auto const m = zero_model(2, 44);
  try
  {
    predict(m, std::vector<double>(4, 0.0));
    FAIL();
  }
  catch (DimensionError const &e)
  {
    EXPECT_NE(std::string(e.what()).find("D=44"), std::string::npos);
  }
  std::vector<double> bad(44, 0.0);
  bad[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(predict(m, bad), ValidationError);
}

class ModelFileTest : public ::testing::Test
{
protected:
  fs::path path_ = fs::temp_directory_path() / ("uidscan_model_" + std::to_string(std::random_device{}()) + ".json");
  void     TearDown() override
  {
    std::error_code ec;
    fs::remove(path_, ec);
  }
};

TEST_F(ModelFileTest, RoundTripIsBitExact)
{
  auto const data = dispersion_features(40, 12);
  auto const fit  = train(data.x, data.labels, kLabels, TrainConfig{});
  save_model(fit.model, path_);
  auto const loaded = load_model(path_);
  EXPECT_EQ(loaded, fit.model);
  for (std::size_t i = 0; i < 5; ++i)
  {
    auto const a = predict_proba(fit.model, data.x.row(i));
    auto const b = predict_proba(loaded, data.x.row(i));
    EXPECT_EQ(a, b);
  }
}

TEST_F(ModelFileTest, VersionGate)
{
  auto        text = model_to_json(zero_model(2, 3));
  auto const  pos  = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 12, "\"version\": \"99\"");
  try
  {
    model_from_json(text);
    FAIL();
  }
  catch (Error const &e)
  {
    EXPECT_NE(std::string(e.what()).find("unsupported model version"), std::string::npos);
  }
}

TEST_F(ModelFileTest, CorruptFiles)
{
  EXPECT_THROW(model_from_json("{\"version\": 1, \"classes\": ["), ParseError);
  EXPECT_THROW(model_from_json("{\"version\": 1}"), ParseError);
  EXPECT_THROW(load_model("/nonexistent/model.json"), Error);

  auto m = zero_model(2, 3);
  m.feature_dim = 4;
  EXPECT_THROW(model_from_json(model_to_json(m)), DimensionError);
}

}  // namespace
}  // namespace uidscan
