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
#include "cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uidscan/csv.hpp"
#include "uidscan/error.hpp"
#include "uidscan/eval.hpp"
#include "uidscan/file_util.hpp"
#include "uidscan/logreg.hpp"
#include "uidscan/surprisal_io.hpp"
#include "uidscan/synthetic.hpp"
#include "uidscan/uid_features.hpp"

namespace uidscan::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions
{
  std::uint64_t seed              = 0;
  bool          quiet             = false;
  bool          strict_short_docs = false;
};

/// Output sinks shared by every subcommand.
class Console
{
public:
  Console(std::ostream &out, std::ostream &err, GlobalOptions const &globals)
    : out_(out)
    , err_(err)
    , globals_(globals)
  {}

  std::ostream &out()
  {
    return globals_.quiet ? null_ : out_;
  }
  void warn(std::string const &message)
  {
    if (!globals_.quiet)
    {
      err_ << "warning: " << message << '\n';
    }
  }
  void error(std::string const &message)
  {
    err_ << "error: " << message << '\n';
  }

private:
  std::ostream        &out_;
  std::ostream        &err_;
  GlobalOptions const &globals_;
  std::ostringstream   null_;
};

struct SpanOptions
{
  std::size_t span_length = 20;
  std::string span_mode   = "minmax";
};

FeatureConfig feature_config(SpanOptions const &spans, GlobalOptions const &globals)
{
  FeatureConfig cfg;
  cfg.span_length       = spans.span_length;
  cfg.span_mode         = *parse_span_mode(spans.span_mode);
  cfg.seed              = globals.seed;
  cfg.strict_short_docs = globals.strict_short_docs;
  return cfg;
}

void report_rejects(Console &console, std::vector<Reject> const &rejects)
{
  for (auto const &r : rejects)
  {
    console.warn("rejected line " + std::to_string(r.line) + (r.doc_id.empty() ? "" : " (" + r.doc_id + ")") +
                 ": " + r.reason);
  }
}

void report_skips(Console &console, std::vector<SkippedDocument> const &skipped)
{
  for (auto const &s : skipped)
  {
    console.warn("skipped " + s.doc_id + ": " + s.reason);
  }
}

ParseResult read_input(fs::path const &path)
{
  if (!fs::exists(path))
  {
    throw Error("input file not found: " + path.string());
  }
  return parse_surprisal_file(path);
}

Matrix to_matrix(FeatureTable const &table)
{
  Matrix m(table.records.size(), table.feature_dim);
  for (std::size_t i = 0; i < table.records.size(); ++i)
  {
    std::copy(table.records[i].features.begin(), table.records[i].features.end(), m.row(i).begin());
  }
  return m;
}

std::vector<std::string> labels_of(FeatureTable const &table)
{
  std::vector<std::string> labels;
  labels.reserve(table.records.size());
  for (auto const &r : table.records)
  {
    if (!r.label)
    {
      throw ValidationError("document " + r.doc_id + " has no label");
    }
    labels.push_back(*r.label);
  }
  return labels;
}

FeatureTable read_feature_file(fs::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw Error("cannot open feature file " + path.string());
  }
  return parse_feature_stream(in);
}

/// Labeled feature table from either a manifest split or a feature file.
struct LabeledTable
{
  FeatureTable             table;
  std::vector<std::string> label_set;
};

LabeledTable labeled_features(Console &console, std::string const &manifest_path, std::string const &split,
                              std::string const &features_path, FeatureConfig const &cfg)
{
  LabeledTable result;
  if (!features_path.empty())
  {
    result.table = read_feature_file(features_path);
    auto labels  = labels_of(result.table);
    std::set<std::string> distinct(labels.begin(), labels.end());
    result.label_set.assign(distinct.begin(), distinct.end());
    return result;
  }

  auto const manifest = load_manifest(manifest_path);
  auto const corpus   = load_corpus(manifest, split, LabelPolicy::kRequired);
  report_rejects(console, corpus.rejects);
  result.table = featurize_corpus(corpus.documents, cfg);
  report_skips(console, result.table.skipped);
  result.label_set = manifest.label_set;
  return result;
}

std::string lower_extension(fs::path const &path)
{
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// ---------------------------------------------------------------------------

struct FeaturizeArgs
{
  std::string input;
  std::string output;
  SpanOptions spans;
  unsigned    threads = 1;
};

int cmd_featurize(FeaturizeArgs const &args, GlobalOptions const &globals, Console &console)
{
  auto const cfg    = feature_config(args.spans, globals);
  auto const parsed = read_input(args.input);
  report_rejects(console, parsed.rejects);

  auto const table = featurize_corpus(parsed.documents, cfg, args.threads);
  report_skips(console, table.skipped);

  std::ostringstream buf;
  write_feature_stream(buf, table);
  write_file_atomic(args.output, buf.str());

  console.out() << "featurized " << table.records.size() << " document(s), dim " << table.feature_dim << ", skipped "
                << table.skipped.size() + parsed.rejects.size() << '\n';
  return 0;
}

struct TrainArgs
{
  std::string manifest;
  std::string split = "train";
  std::string features;
  std::string model_out;
  std::size_t max_iter = 10000;
  double      l2       = 1.0;
  double      tol      = 1e-6;
  bool        no_standardize = false;
  SpanOptions spans;
};

int cmd_train(TrainArgs const &args, GlobalOptions const &globals, Console &console)
{
  if (args.manifest.empty() == args.features.empty())
  {
    throw Error("pass exactly one of --manifest or --features");
  }
  auto const cfg  = feature_config(args.spans, globals);
  auto const data = labeled_features(console, args.manifest, args.split, args.features, cfg);
  if (data.table.records.empty())
  {
    throw Error("no documents to train on");
  }

  TrainConfig tc;
  tc.max_iterations  = args.max_iter;
  tc.l2_strength     = args.l2;
  tc.convergence_tol = args.tol;
  tc.seed            = globals.seed;
  tc.standardize     = !args.no_standardize;

  auto fit = train(to_matrix(data.table), labels_of(data.table), data.label_set, tc);
  for (auto const &w : fit.warnings)
  {
    console.warn(w);
  }

  auto &model = fit.model;
  if (args.features.empty())
  {
    model.span_length = cfg.span_length;
    model.span_mode   = std::string(to_string(cfg.effective_mode()));
  }
  else
  {
    // Recover the span layout from the vector length.
    std::size_t const dim = data.table.feature_dim;
    model.span_length     = dim > kGlobalFeatureCount ? (dim - kGlobalFeatureCount) / 2 : cfg.span_length;
    model.span_mode       = dim > kGlobalFeatureCount ? args.spans.span_mode : "none";
  }
  save_model(model, args.model_out);

  auto &out = console.out();
  out << "trained " << model.classes.size() << " classes on " << data.table.records.size()
      << " document(s), dim " << model.feature_dim << '\n';
  out << "iterations " << fit.iterations << ", final loss " << format_double(fit.final_loss) << ", "
      << (fit.converged ? "converged" : "not converged") << '\n';
  return 0;
}

FeatureConfig model_feature_config(LogRegModel const &model, GlobalOptions const &globals)
{
  FeatureConfig cfg;
  cfg.span_length       = model.span_length;
  auto const mode       = parse_span_mode(model.span_mode);
  cfg.span_mode         = mode.value_or(SpanMode::kMinMax);
  cfg.seed              = globals.seed;
  cfg.strict_short_docs = globals.strict_short_docs;
  return cfg;
}

void check_dims(LogRegModel const &model, std::size_t dim)
{
  if (dim != model.feature_dim)
  {
    throw DimensionError("feature dimension mismatch: model expects " + std::to_string(model.feature_dim) +
                         ", documents have " + std::to_string(dim));
  }
}

struct EvaluateArgs
{
  std::string              manifest;
  std::string              split = "test";
  std::string              features;
  std::string              model;
  std::vector<std::string> report_out;
  std::size_t              span_length = 0;  // 0: take from the model
  std::string              span_mode;        // empty: take from the model
};

int cmd_evaluate(EvaluateArgs const &args, GlobalOptions const &globals, Console &console)
{
  if (args.manifest.empty() == args.features.empty())
  {
    throw Error("pass exactly one of --manifest or --features");
  }
  auto const model = load_model(args.model);
  auto       cfg   = model_feature_config(model, globals);
  if (args.span_length != 0)
  {
    cfg.span_length = args.span_length;
  }
  if (!args.span_mode.empty())
  {
    cfg.span_mode = *parse_span_mode(args.span_mode);
  }

  auto data = labeled_features(console, args.manifest, args.split, args.features, cfg);
  if (data.table.records.empty())
  {
    throw Error("no documents in split " + args.split);
  }
  check_dims(model, data.table.feature_dim);

  for (auto const &c : model.classes)
  {
    if (std::find(data.label_set.begin(), data.label_set.end(), c) == data.label_set.end())
    {
      data.label_set.push_back(c);
    }
  }

  auto const               x = to_matrix(data.table);
  std::vector<std::string> predictions;
  predictions.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
  {
    predictions.push_back(predict(model, x.row(i)));
  }
  auto const report = f1_report(predictions, labels_of(data.table), data.label_set);

  for (auto const &path : args.report_out)
  {
    write_file_atomic(path, lower_extension(path) == ".csv" ? report_to_csv(report) : report_to_json(report));
  }

  auto &out = console.out();
  for (auto const &m : report.per_class)
  {
    out << m.name << ": precision " << format_double(m.precision) << ", recall " << format_double(m.recall)
        << ", f1 " << format_double(m.f1) << ", support " << m.support << '\n';
  }
  out << "average F1 " << format_double(report.average_f1) << " over " << report.n_docs << " document(s)\n";
  return 0;
}

struct PredictArgs
{
  std::string input;
  std::string model;
  std::string output;
};

int cmd_predict(PredictArgs const &args, GlobalOptions const &globals, Console &console)
{
  auto const model  = load_model(args.model);
  auto const cfg    = model_feature_config(model, globals);
  auto const parsed = read_input(args.input);
  report_rejects(console, parsed.rejects);

  auto const table = featurize_corpus(parsed.documents, cfg);
  report_skips(console, table.skipped);
  if (!table.records.empty())
  {
    check_dims(model, table.feature_dim);
  }

  std::ostringstream buf;
  for (auto const &rec : table.records)
  {
    auto const              p = predict_proba(model, rec.features);
    nlohmann::ordered_json  proba;
    for (std::size_t c = 0; c < p.size(); ++c)
    {
      proba[model.classes[c]] = p[c];
    }
    nlohmann::ordered_json line;
    line["doc_id"] = rec.doc_id;
    line["pred"]   = model.classes[predict_index(model, rec.features)];
    line["proba"]  = std::move(proba);
    buf << line.dump() << '\n';
  }
  write_file_atomic(args.output, buf.str());
  console.out() << "predicted " << table.records.size() << " document(s), skipped "
                << table.skipped.size() + parsed.rejects.size() << '\n';
  return 0;
}

struct ExplainArgs
{
  std::string input;
  std::string doc_id;
  std::size_t span_length = 20;
  std::string output;
};

void print_span(std::ostream &out, char const *title, SurprisalSequence const &doc, std::size_t offset,
                std::size_t span_length, double variance, bool padded)
{
  out << title << ": offset " << offset << ", length " << span_length << ", variance " << format_double(variance)
      << (padded ? " (padded)" : "") << '\n';
  std::size_t const end = std::min(doc.tokens.size(), offset + span_length);
  for (std::size_t i = offset; i < end; ++i)
  {
    out << "  " << i << '\t' << format_double(doc.tokens[i].surprisal) << '\t'
        << nlohmann::json(doc.tokens[i].text).dump() << '\n';
  }
}

int cmd_explain(ExplainArgs const &args, GlobalOptions const &globals, Console &console)
{
  auto const parsed = read_input(args.input);
  auto const it     = std::find_if(parsed.documents.begin(), parsed.documents.end(),
                                   [&](auto const &d) { return d.doc_id == args.doc_id; });
  if (it == parsed.documents.end())
  {
    throw Error("unknown doc-id " + args.doc_id + " in " + args.input);
  }
  auto const &doc   = *it;
  auto const  u     = doc.surprisals();
  auto const  spans = extreme_spans(u, args.span_length, globals.strict_short_docs);

  if (!args.output.empty())
  {
    std::ostringstream csv;
    csv << "index,token,surprisal\n";
    for (std::size_t i = 0; i < doc.tokens.size(); ++i)
    {
      csv << i << ',' << csv_field(doc.tokens[i].text) << ',' << format_double(doc.tokens[i].surprisal) << '\n';
    }
    write_file_atomic(args.output, csv.str());
  }

  auto &out = console.out();
  out << "document " << doc.doc_id << (doc.label ? " (" + *doc.label + ")" : std::string()) << ", " << u.size()
      << " tokens, mean surprisal " << format_double(surprisal_mean(u)) << ", UID variance "
      << format_double(uid_variance(u)) << '\n';
  print_span(out, "max-UID span", doc, spans.max_offset, args.span_length, spans.max_variance, spans.padded);
  print_span(out, "min-UID span", doc, spans.min_offset, args.span_length, spans.min_variance, spans.padded);
  return 0;
}

struct DistributionArgs
{
  std::string manifest;
  std::string split = "test";
  std::string output;
};

int cmd_distribution(DistributionArgs const &args, GlobalOptions const &, Console &console)
{
  auto const manifest = load_manifest(args.manifest);
  auto const corpus   = load_corpus(manifest, args.split, LabelPolicy::kRequired);
  report_rejects(console, corpus.rejects);
  if (corpus.documents.empty())
  {
    throw Error("no documents in split " + args.split);
  }
  auto const summary = uid_distribution_summary(corpus.documents, manifest.label_set);
  write_file_atomic(args.output, distribution_to_csv(summary));

  auto &out = console.out();
  for (auto const &[label, s] : summary.per_label)
  {
    out << label << ": mean " << format_double(s.mean) << ", std " << format_double(s.std) << ", median "
        << format_double(s.median) << ", n " << s.n_docs << '\n';
  }
  return 0;
}

struct SynthArgs
{
  std::string kind = "dispersion";
  std::size_t train_docs = 100;
  std::size_t test_docs  = 50;
  std::string output_dir;
};

int cmd_synth(SynthArgs const &args, GlobalOptions const &globals, Console &console)
{
  auto const make = [&](std::size_t docs, std::uint64_t seed, std::string prefix) {
    auto cfg      = args.kind == "burst" ? burst_pair(docs, seed) : dispersion_pair(docs, seed);
    cfg.id_prefix = std::move(prefix);
    return std::pair{make_synthetic_corpus(cfg), cfg};
  };
  auto const [train_docs, cfg] = make(args.train_docs, globals.seed * 2 + 1, "train");
  auto const [test_docs, _]    = make(args.test_docs, globals.seed * 2 + 2, "test");

  fs::path const dir = args.output_dir;
  fs::create_directories(dir);
  std::ostringstream train_buf;
  std::ostringstream test_buf;
  write_surprisal_stream(train_buf, train_docs);
  write_surprisal_stream(test_buf, test_docs);
  write_file_atomic(dir / "train.jsonl", train_buf.str());
  write_file_atomic(dir / "test.jsonl", test_buf.str());

  std::vector<std::string> labels;
  for (auto const &a : cfg.authors)
  {
    labels.push_back(a.label);
  }
  std::sort(labels.begin(), labels.end());
  nlohmann::ordered_json manifest;
  manifest["name"]      = "synthetic-" + args.kind;
  manifest["label_set"] = labels;
  manifest["splits"]    = {{"train", {"train.jsonl"}}, {"test", {"test.jsonl"}}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");

  console.out() << "wrote " << train_docs.size() << " train and " << test_docs.size() << " test document(s) to "
                << dir.string() << '\n';
  return 0;
}

void add_span_options(CLI::App *cmd, SpanOptions &spans)
{
  cmd->add_option("--span-length", spans.span_length, "Tokens per UID span")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))
      ->capture_default_str();
  cmd->add_option("--span-mode", spans.span_mode, "Span features: minmax, random or none")
      ->check(CLI::IsMember({"minmax", "random", "none"}))
      ->capture_default_str();
}

}  // namespace

int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"uidscan: authorship detection from token surprisal uniformity", "uidscan"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions globals;
  app.add_option("--seed", globals.seed, "Seed for every random choice")->capture_default_str();
  app.add_flag("--quiet", globals.quiet, "Suppress summaries and warnings");
  app.add_flag("--strict-short-docs", globals.strict_short_docs,
               "Reject documents shorter than the span length instead of padding");

  FeaturizeArgs featurize_args;
  auto         *featurize = app.add_subcommand("featurize", "Surprisal JSONL -> UID feature JSONL");
  featurize->add_option("--input", featurize_args.input, "Surprisal JSONL file")->required();
  featurize->add_option("--output", featurize_args.output, "Feature JSONL file")->required();
  featurize->add_option("--threads", featurize_args.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  add_span_options(featurize, featurize_args.spans);

  TrainArgs train_args;
  auto     *train_cmd = app.add_subcommand("train", "Fit the logistic-regression detector");
  train_cmd->add_option("--manifest", train_args.manifest, "Dataset manifest (featurized on the fly)");
  train_cmd->add_option("--split", train_args.split, "Manifest split")->capture_default_str();
  train_cmd->add_option("--features", train_args.features, "Labeled feature JSONL from `featurize`");
  train_cmd->add_option("--model-out", train_args.model_out, "Model JSON to write")->required();
  train_cmd->add_option("--max-iter", train_args.max_iter, "Optimizer iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--l2", train_args.l2, "L2 penalty strength")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train_cmd->add_option("--tol", train_args.tol, "Gradient max-norm tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_flag("--no-standardize", train_args.no_standardize, "Train on raw features");
  add_span_options(train_cmd, train_args.spans);

  EvaluateArgs evaluate_args;
  auto        *evaluate = app.add_subcommand("evaluate", "Per-class and average F1 on a labeled split");
  evaluate->add_option("--manifest", evaluate_args.manifest, "Dataset manifest");
  evaluate->add_option("--split", evaluate_args.split, "Manifest split")->capture_default_str();
  evaluate->add_option("--features", evaluate_args.features, "Labeled feature JSONL");
  evaluate->add_option("--model", evaluate_args.model, "Model JSON")->required();
  evaluate->add_option("--report-out", evaluate_args.report_out, "Report path(s); .csv writes CSV, else JSON")
      ->required();
  evaluate->add_option("--span-length", evaluate_args.span_length, "Override the model's span length")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  evaluate->add_option("--span-mode", evaluate_args.span_mode, "Override the model's span mode")
      ->check(CLI::IsMember({"minmax", "random", "none"}));

  PredictArgs predict_args;
  auto       *predict_cmd = app.add_subcommand("predict", "Predict the author of each document");
  predict_cmd->add_option("--input", predict_args.input, "Surprisal JSONL file")->required();
  predict_cmd->add_option("--model", predict_args.model, "Model JSON")->required();
  predict_cmd->add_option("--output", predict_args.output, "Prediction JSONL file")->required();

  ExplainArgs explain_args;
  auto       *explain = app.add_subcommand("explain", "Show the most and least uniform spans of a document");
  explain->add_option("--input", explain_args.input, "Surprisal JSONL file")->required();
  explain->add_option("--doc-id", explain_args.doc_id, "Document to explain")->required();
  explain->add_option("--span-length", explain_args.span_length, "Tokens per UID span")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))
      ->capture_default_str();
  explain->add_option("--output", explain_args.output, "CSV of index,token,surprisal for plotting");

  DistributionArgs distribution_args;
  auto *distribution = app.add_subcommand("distribution", "Per-author UID variance distribution as CSV");
  distribution->add_option("--manifest", distribution_args.manifest, "Dataset manifest")->required();
  distribution->add_option("--split", distribution_args.split, "Manifest split")->capture_default_str();
  distribution->add_option("--output", distribution_args.output, "CSV file")->required();

  SynthArgs synth_args;
  auto     *synth = app.add_subcommand("synth", "Write a synthetic two-author corpus with a manifest");
  synth->add_option("--kind", synth_args.kind, "dispersion or burst")
      ->check(CLI::IsMember({"dispersion", "burst"}))
      ->capture_default_str();
  synth->add_option("--train-docs", synth_args.train_docs, "Training documents per author")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--test-docs", synth_args.test_docs, "Test documents per author")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--output-dir", synth_args.output_dir, "Directory to write into")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try
  {
    app.parse(reversed);
  }
  catch (CLI::ParseError const &e)
  {
    return app.exit(e, out, err);
  }

  Console console(out, err, globals);
  try
  {
    if (*featurize)
    {
      return cmd_featurize(featurize_args, globals, console);
    }
    if (*train_cmd)
    {
      return cmd_train(train_args, globals, console);
    }
    if (*evaluate)
    {
      return cmd_evaluate(evaluate_args, globals, console);
    }
    if (*predict_cmd)
    {
      return cmd_predict(predict_args, globals, console);
    }
    if (*explain)
    {
      return cmd_explain(explain_args, globals, console);
    }
    if (*distribution)
    {
      return cmd_distribution(distribution_args, globals, console);
    }
    if (*synth)
    {
      return cmd_synth(synth_args, globals, console);
    }
  }
  catch (std::exception const &e)
  {
    console.error(e.what());
    return 1;
  }
  return 1;
}

}  // namespace uidscan::cli
