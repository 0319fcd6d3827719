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
#include "uidscan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "uidscan/csv.hpp"
#include "uidscan/error.hpp"

namespace uidscan {

namespace {

std::size_t index_of(std::vector<std::string> const &label_set, std::string const &label)
{
  auto const it = std::find(label_set.begin(), label_set.end(), label);
  if (it == label_set.end())
  {
    throw ValidationError("unknown label " + label);
  }
  return static_cast<std::size_t>(it - label_set.begin());
}

double ratio(std::size_t num, std::size_t den)
{
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct Averages
{
  double precision = 0.0;
  double recall    = 0.0;
  double f1        = 0.0;
};

Averages average_rows(std::vector<ClassMetrics> const &rows, bool supported_only, bool weighted)
{
  Averages    avg;
  double      total = 0.0;
  for (auto const &m : rows)
  {
    if (supported_only && m.support == 0)
    {
      continue;
    }
    double const w = weighted ? static_cast<double>(m.support) : 1.0;
    avg.precision += w * m.precision;
    avg.recall += w * m.recall;
    avg.f1 += w * m.f1;
    total += w;
  }
  if (total > 0.0)
  {
    avg.precision /= total;
    avg.recall /= total;
    avg.f1 /= total;
  }
  return avg;
}

}  // namespace

ClassMetrics const &EvalReport::metrics(std::string const &name) const
{
  for (auto const &m : per_class)
  {
    if (m.name == name)
    {
      return m;
    }
  }
  throw ValidationError("no metrics for class " + name);
}

EvalReport f1_report(std::vector<std::string> const &predictions, std::vector<std::string> const &gold,
                     std::vector<std::string> const &label_set)
{
  if (predictions.size() != gold.size())
  {
    throw DimensionError(std::to_string(predictions.size()) + " predictions for " +
                         std::to_string(gold.size()) + " gold labels");
  }

  std::size_t const C = label_set.size();
  EvalReport        report;
  report.n_docs = gold.size();
  report.confusion.assign(C, std::vector<std::size_t>(C, 0));
  for (std::size_t i = 0; i < gold.size(); ++i)
  {
    ++report.confusion[index_of(label_set, gold[i])][index_of(label_set, predictions[i])];
  }

  std::size_t correct = 0;
  for (std::size_t c = 0; c < C; ++c)
  {
    ClassMetrics m;
    m.name = label_set[c];
    for (std::size_t k = 0; k < C; ++k)
    {
      m.support += report.confusion[c][k];
      m.predicted += report.confusion[k][c];
    }
    std::size_t const tp = report.confusion[c][c];
    correct += tp;
    m.precision = ratio(tp, m.predicted);
    m.recall    = ratio(tp, m.support);
    m.f1        = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    report.per_class.push_back(std::move(m));
  }

  report.average_f1  = average_rows(report.per_class, true, false).f1;
  report.macro_f1    = average_rows(report.per_class, false, false).f1;
  report.weighted_f1 = average_rows(report.per_class, true, true).f1;
  report.accuracy    = ratio(correct, report.n_docs);
  return report;
}

std::string report_to_json(EvalReport const &report)
{
  nlohmann::json classes = nlohmann::json::array();
  for (auto const &m : report.per_class)
  {
    classes.push_back({{"class", m.name},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"support", m.support},
                       {"predicted", m.predicted}});
  }
  nlohmann::json doc = {{"n_docs", report.n_docs},
                        {"average_f1", report.average_f1},
                        {"macro_f1", report.macro_f1},
                        {"weighted_f1", report.weighted_f1},
                        {"accuracy", report.accuracy},
                        {"per_class", std::move(classes)},
                        {"confusion", report.confusion}};
  return doc.dump(2) + "\n";
}

std::string report_to_csv(EvalReport const &report)
{
  std::ostringstream out;
  out << "class,precision,recall,f1,support\n";
  for (auto const &m : report.per_class)
  {
    out << csv_field(m.name) << ',' << format_double(m.precision) << ',' << format_double(m.recall) << ','
        << format_double(m.f1) << ',' << m.support << '\n';
  }
  auto const row = [&](char const *name, Averages const &a) {
    out << name << ',' << format_double(a.precision) << ',' << format_double(a.recall) << ','
        << format_double(a.f1) << ',' << report.n_docs << '\n';
  };
  row("average", average_rows(report.per_class, true, false));
  row("macro", average_rows(report.per_class, false, false));
  row("weighted", average_rows(report.per_class, true, true));
  return out.str();
}

double average_over_testbeds(std::span<EvalReport const> reports)
{
  if (reports.empty())
  {
    throw ValidationError("no testbed reports to average");
  }
  double sum = 0.0;
  for (auto const &r : reports)
  {
    sum += r.average_f1;
  }
  return sum / static_cast<double>(reports.size());
}

MetricStats aggregate(std::span<double const> values)
{
  if (values.empty())
  {
    throw ValidationError("cannot aggregate an empty list of values");
  }
  MetricStats s;
  s.mean = surprisal_mean(values);  // shifted mean: identical inputs aggregate exactly
  s.std  = std::sqrt(uid_variance(values));
  s.min  = *std::min_element(values.begin(), values.end());
  s.max  = *std::max_element(values.begin(), values.end());
  return s;
}

SeedAggregate seed_averaged_eval(ExperimentSpec const &spec, std::span<std::uint64_t const> seeds)
{
  if (seeds.empty())
  {
    throw ValidationError("at least one seed is required");
  }

  auto const labels_of = [](FeatureTable const &table) {
    std::vector<std::string> out;
    for (auto const &r : table.records)
    {
      if (!r.label)
      {
        throw ValidationError("document " + r.doc_id + " has no label");
      }
      out.push_back(*r.label);
    }
    return out;
  };
  auto const matrix_of = [](FeatureTable const &table) {
    Matrix m(table.records.size(), table.feature_dim);
    for (std::size_t i = 0; i < table.records.size(); ++i)
    {
      std::copy(table.records[i].features.begin(), table.records[i].features.end(), m.row(i).begin());
    }
    return m;
  };

  SeedAggregate agg;
  for (auto const seed : seeds)
  {
    try
    {
      auto features = spec.features;
      features.seed = seed;
      auto training = spec.training;
      training.seed = seed;

      auto const train_table = featurize_corpus(spec.train, features);
      auto const test_table  = featurize_corpus(spec.test, features);
      if (train_table.records.empty() || test_table.records.empty())
      {
        throw ValidationError("no documents left after featurization");
      }
      auto const fit = train(matrix_of(train_table), labels_of(train_table), spec.label_set, training);

      auto const               x_test = matrix_of(test_table);
      std::vector<std::string> predictions;
      predictions.reserve(x_test.rows());
      for (std::size_t i = 0; i < x_test.rows(); ++i)
      {
        predictions.push_back(predict(fit.model, x_test.row(i)));
      }
      agg.runs.push_back({seed, f1_report(predictions, labels_of(test_table), spec.label_set),
                          fit.iterations, fit.converged});
    }
    catch (std::exception const &e)
    {
      throw Error("seed " + std::to_string(seed) + ": " + e.what());
    }
  }

  auto const collect = [&](auto const &pick) {
    std::vector<double> v;
    for (auto const &run : agg.runs)
    {
      v.push_back(pick(run.report));
    }
    return aggregate(v);
  };
  agg.average_f1 = collect([](EvalReport const &r) { return r.average_f1; });
  agg.macro_f1   = collect([](EvalReport const &r) { return r.macro_f1; });
  agg.accuracy   = collect([](EvalReport const &r) { return r.accuracy; });
  for (std::size_t c = 0; c < spec.label_set.size(); ++c)
  {
    agg.per_class_f1.emplace_back(spec.label_set[c],
                                  collect([c](EvalReport const &r) { return r.per_class[c].f1; }));
  }
  return agg;
}

double quantile_linear(std::span<double const> sorted, double q)
{
  if (sorted.empty())
  {
    throw ValidationError("quantile of an empty sample");
  }
  double const      h  = q * static_cast<double>(sorted.size() - 1);
  std::size_t const lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size())
  {
    return sorted.back();
  }
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

SummaryStats summarize(std::span<double const> values)
{
  if (values.empty())
  {
    throw ValidationError("cannot summarize an empty sample");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  SummaryStats s;
  s.mean   = surprisal_mean(values);
  s.std    = std::sqrt(uid_variance(values));
  s.min    = sorted.front();
  s.q25    = quantile_linear(sorted, 0.25);
  s.median = quantile_linear(sorted, 0.5);
  s.q75    = quantile_linear(sorted, 0.75);
  s.max    = sorted.back();
  s.n_docs = values.size();
  return s;
}

SummaryStats const &DistributionSummary::at(std::string const &label) const
{
  for (auto const &[name, stats] : per_label)
  {
    if (name == label)
    {
      return stats;
    }
  }
  throw ValidationError("no summary for label " + label);
}

DistributionSummary uid_distribution_summary(std::vector<SurprisalSequence> const &corpus,
                                             std::vector<std::string> const       &label_set)
{
  std::map<std::string, std::vector<double>> groups;
  for (auto const &doc : corpus)
  {
    if (!doc.label)
    {
      throw ValidationError("document " + doc.doc_id + " has no label");
    }
    index_of(label_set, *doc.label);
    groups[*doc.label].push_back(uid_variance(doc.surprisals()));
  }

  DistributionSummary summary;
  summary.n_docs = corpus.size();
  for (auto const &label : label_set)
  {
    auto const it = groups.find(label);
    if (it == groups.end())
    {
      throw ValidationError("no documents for label " + label);
    }
    summary.per_label.emplace_back(label, summarize(it->second));
  }
  return summary;
}

std::string distribution_to_csv(DistributionSummary const &summary)
{
  std::ostringstream out;
  out << "label,mean,std,min,q25,median,q75,max,n_docs\n";
  for (auto const &[label, s] : summary.per_label)
  {
    out << csv_field(label) << ',' << format_double(s.mean) << ',' << format_double(s.std) << ','
        << format_double(s.min) << ',' << format_double(s.q25) << ',' << format_double(s.median) << ','
        << format_double(s.q75) << ',' << format_double(s.max) << ',' << s.n_docs << '\n';
  }
  return out.str();
}

}  // namespace uidscan
