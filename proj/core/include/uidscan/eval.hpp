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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uidscan/logreg.hpp"
#include "uidscan/surprisal_io.hpp"
#include "uidscan/uid_features.hpp"

namespace uidscan {

struct ClassMetrics
{
  std::string name;
  double      precision = 0.0;
  double      recall    = 0.0;
  double      f1        = 0.0;
  std::size_t support   = 0;  // gold count
  std::size_t predicted = 0;  // prediction count
};

/// One-vs-rest metrics. F1 is 0 when precision + recall is 0.
///
/// `average_f1` is the unweighted mean of per-class F1 over classes with
/// nonzero gold support (the summary row of the benchmark tables).
/// `macro_f1` averages over every class of the label set, `weighted_f1` weights
/// by support.
struct EvalReport
{
  std::vector<ClassMetrics>             per_class;  // label_set order
  std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
  double                                average_f1  = 0.0;
  double                                macro_f1    = 0.0;
  double                                weighted_f1 = 0.0;
  double                                accuracy    = 0.0;
  std::size_t                           n_docs      = 0;

  ClassMetrics const &metrics(std::string const &name) const;
};

/// Throws DimensionError on length mismatch and ValidationError for labels
/// outside `label_set`.
EvalReport f1_report(std::vector<std::string> const &predictions,
                     std::vector<std::string> const &gold,
                     std::vector<std::string> const &label_set);

std::string report_to_json(EvalReport const &report);
/// `class,precision,recall,f1,support` followed by average/macro/weighted rows.
std::string report_to_csv(EvalReport const &report);

/// Mean of `average_f1` across testbeds, for tables that average per-dataset scores.
double average_over_testbeds(std::span<EvalReport const> reports);

struct MetricStats
{
  double mean = 0.0;
  double std  = 0.0;  // population standard deviation across seeds
  double min  = 0.0;
  double max  = 0.0;
};

MetricStats aggregate(std::span<double const> values);

struct ExperimentSpec
{
  std::vector<SurprisalSequence> train;
  std::vector<SurprisalSequence> test;
  std::vector<std::string>       label_set;
  FeatureConfig                  features;
  TrainConfig                    training;
};

struct SeedRun
{
  std::uint64_t seed = 0;
  EvalReport    report;
  std::size_t   iterations = 0;
  bool          converged  = false;
};

struct SeedAggregate
{
  std::vector<SeedRun>                             runs;
  MetricStats                                      average_f1;
  MetricStats                                      macro_f1;
  MetricStats                                      accuracy;
  std::vector<std::pair<std::string, MetricStats>> per_class_f1;  // label_set order
};

/// Featurize + train + evaluate once per seed. The seed drives random span
/// sampling and is recorded in the training config. A failing seed aborts the
/// run with an Error naming the seed.
SeedAggregate seed_averaged_eval(ExperimentSpec const &spec, std::span<std::uint64_t const> seeds);

struct SummaryStats
{
  double      mean   = 0.0;
  double      std    = 0.0;  // population
  double      min    = 0.0;
  double      q25    = 0.0;
  double      median = 0.0;
  double      q75    = 0.0;
  double      max    = 0.0;
  std::size_t n_docs = 0;
};

/// Quantile with linear interpolation between order statistics, q in [0, 1].
/// `sorted` must be ascending and non-empty.
double quantile_linear(std::span<double const> sorted, double q);

SummaryStats summarize(std::span<double const> values);

struct DistributionSummary
{
  std::vector<std::pair<std::string, SummaryStats>> per_label;  // label_set order
  std::size_t                                       n_docs = 0;

  SummaryStats const &at(std::string const &label) const;
};

/// Per-label statistics of document uid_variance. Throws ValidationError for
/// an unlabeled document, a label outside `label_set`, or a label with no documents.
DistributionSummary uid_distribution_summary(std::vector<SurprisalSequence> const &corpus,
                                             std::vector<std::string> const       &label_set);

/// `label,mean,std,min,q25,median,q75,max,n_docs`
std::string distribution_to_csv(DistributionSummary const &summary);

}  // namespace uidscan
