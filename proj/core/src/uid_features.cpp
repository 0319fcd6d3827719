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
#include "uidscan/uid_features.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "uidscan/error.hpp"

namespace uidscan {

namespace {

void require_length(std::span<double const> u, std::size_t minimum, char const *what)
{
  if (u.size() < minimum)
  {
    throw ValidationError(std::string(what) + " needs at least " + std::to_string(minimum) +
                          " token(s), got " + std::to_string(u.size()));
  }
}

// Variance over [first, last) computed on values shifted by the first element,
// so a constant range yields exactly 0.
double shifted_variance(std::span<double const> u)
{
  double const base = u.front();
  double       sum  = 0.0;
  for (double v : u)
  {
    sum += v - base;
  }
  double const n    = static_cast<double>(u.size());
  double const mean = sum / n;
  double       acc  = 0.0;
  for (double v : u)
  {
    double const d = (v - base) - mean;
    acc += d * d;
  }
  return acc / n;
}

constexpr std::size_t kReanchorEvery = 64;

std::uint64_t fnv1a(std::string_view text)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text)
  {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> padded_copy(std::span<double const> u, std::size_t length, double fill)
{
  std::vector<double> out(u.begin(), u.end());
  out.resize(length, fill);
  return out;
}

}  // namespace

double surprisal_mean(std::span<double const> surprisals)
{
  require_length(surprisals, 1, "surprisal_mean");
  double const base = surprisals.front();
  double       sum  = 0.0;
  for (double v : surprisals)
  {
    sum += v - base;
  }
  return base + sum / static_cast<double>(surprisals.size());
}

double uid_variance(std::span<double const> surprisals)
{
  require_length(surprisals, 1, "uid_variance");
  return shifted_variance(surprisals);
}

double uid_diff(std::span<double const> surprisals)
{
  require_length(surprisals, 2, "uid_diff");
  double acc = 0.0;
  for (std::size_t t = 1; t < surprisals.size(); ++t)
  {
    acc += std::abs(surprisals[t] - surprisals[t - 1]);
  }
  return acc / static_cast<double>(surprisals.size() - 1);
}

double uid_diff_sq(std::span<double const> surprisals)
{
  require_length(surprisals, 2, "uid_diff_sq");
  double acc = 0.0;
  for (std::size_t t = 1; t < surprisals.size(); ++t)
  {
    double const d = surprisals[t] - surprisals[t - 1];
    acc += d * d;
  }
  return acc / static_cast<double>(surprisals.size() - 1);
}

std::vector<double> window_variances(std::span<double const> surprisals, std::size_t span_length)
{
  if (span_length == 0 || surprisals.size() < span_length)
  {
    return {};
  }

  // Center on the rounded mean: keeps the running sums small, and integer-valued
  // inputs stay exact so equal windows compare equal.
  double const center = std::round(surprisal_mean(surprisals));
  double const n      = static_cast<double>(span_length);
  std::size_t const count = surprisals.size() - span_length + 1;

  std::vector<double> out(count);
  double              s1 = 0.0;
  double              s2 = 0.0;

  auto const anchor = [&](std::size_t offset) {
    s1 = 0.0;
    s2 = 0.0;
    for (std::size_t i = offset; i < offset + span_length; ++i)
    {
      double const a = surprisals[i] - center;
      s1 += a;
      s2 += a * a;
    }
  };

  for (std::size_t offset = 0; offset < count; ++offset)
  {
    if (offset % kReanchorEvery == 0)
    {
      anchor(offset);
    }
    else
    {
      double const in  = surprisals[offset + span_length - 1] - center;
      double const out_ = surprisals[offset - 1] - center;
      s1 += in - out_;
      s2 += in * in - out_ * out_;
    }
    out[offset] = std::max(0.0, (s2 - s1 * s1 / n) / n);
  }
  return out;
}

ExtremeSpans extreme_spans(std::span<double const> surprisals, std::size_t span_length, bool strict)
{
  require_length(surprisals, 1, "extreme_spans");
  if (span_length < 2)
  {
    throw ValidationError("span length must be at least 2, got " + std::to_string(span_length));
  }

  ExtremeSpans result;
  if (surprisals.size() < span_length)
  {
    if (strict)
    {
      throw ValidationError("sequence of " + std::to_string(surprisals.size()) +
                            " tokens is shorter than the span length " +
                            std::to_string(span_length));
    }
    double const mean   = surprisal_mean(surprisals);
    result.max_span     = padded_copy(surprisals, span_length, mean);
    result.min_span     = result.max_span;
    result.max_variance = uid_variance(result.max_span);
    result.min_variance = result.max_variance;
    result.padded       = true;
    return result;
  }

  auto const   variances = window_variances(surprisals, span_length);
  auto const [lo, hi]    = std::minmax_element(variances.begin(), variances.end());
  double const tol       = kSpanTieTolerance * *hi;
  double const max_v     = *hi;
  double const min_v     = *lo;

  // First offset within tolerance of the extreme wins.
  for (std::size_t i = 0; i < variances.size(); ++i)
  {
    if (variances[i] >= max_v - tol)
    {
      result.max_offset = i;
      break;
    }
  }
  for (std::size_t i = 0; i < variances.size(); ++i)
  {
    if (variances[i] <= min_v + tol)
    {
      result.min_offset = i;
      break;
    }
  }

  auto const max_window = surprisals.subspan(result.max_offset, span_length);
  auto const min_window = surprisals.subspan(result.min_offset, span_length);
  result.max_span.assign(max_window.begin(), max_window.end());
  result.min_span.assign(min_window.begin(), min_window.end());
  result.max_variance = uid_variance(max_window);
  result.min_variance = uid_variance(min_window);
  return result;
}

std::string_view to_string(SpanMode mode)
{
  switch (mode)
  {
  case SpanMode::kMinMax:
    return "minmax";
  case SpanMode::kRandom:
    return "random";
  case SpanMode::kNone:
    return "none";
  }
  return "minmax";
}

std::optional<SpanMode> parse_span_mode(std::string_view text)
{
  if (text == "minmax")
  {
    return SpanMode::kMinMax;
  }
  if (text == "random")
  {
    return SpanMode::kRandom;
  }
  if (text == "none")
  {
    return SpanMode::kNone;
  }
  return std::nullopt;
}

std::size_t FeatureConfig::feature_dim() const noexcept
{
  return effective_mode() == SpanMode::kNone ? kGlobalFeatureCount
                                              : kGlobalFeatureCount + 2 * span_length;
}

void FeatureConfig::validate() const
{
  if (span_length < 2)
  {
    throw ValidationError("span length must be at least 2, got " + std::to_string(span_length));
  }
}

std::vector<double> UIDFeatures::flatten() const
{
  std::vector<double> out{mean_surprisal, uid_variance, uid_diff, uid_diff_sq};
  if (span_mode != SpanMode::kNone)
  {
    out.reserve(kGlobalFeatureCount + max_span.size() + min_span.size());
    out.insert(out.end(), max_span.begin(), max_span.end());
    out.insert(out.end(), min_span.begin(), min_span.end());
  }
  return out;
}

UIDFeatures featurize(std::span<double const> surprisals, FeatureConfig const &cfg,
                      std::string_view doc_id)
{
  cfg.validate();
  require_length(surprisals, 2, "featurize");

  UIDFeatures f;
  f.mean_surprisal = surprisal_mean(surprisals);
  f.uid_variance   = uid_variance(surprisals);
  f.uid_diff       = uid_diff(surprisals);
  f.uid_diff_sq    = uid_diff_sq(surprisals);
  f.span_length    = cfg.span_length;
  f.span_mode      = cfg.effective_mode();

  switch (f.span_mode)
  {
  case SpanMode::kMinMax: {
    auto spans        = extreme_spans(surprisals, cfg.span_length, cfg.strict_short_docs);
    f.max_span        = std::move(spans.max_span);
    f.min_span        = std::move(spans.min_span);
    f.max_span_offset = spans.max_offset;
    f.min_span_offset = spans.min_offset;
    f.padded          = spans.padded;
    break;
  }
  case SpanMode::kRandom: {
    if (surprisals.size() < cfg.span_length)
    {
      // Only one window exists; reuse the padding rule.
      auto spans = extreme_spans(surprisals, cfg.span_length, cfg.strict_short_docs);
      f.max_span = std::move(spans.max_span);
      f.min_span = std::move(spans.min_span);
      f.padded   = true;
      break;
    }
    std::mt19937_64   rng(splitmix64(cfg.seed ^ splitmix64(fnv1a(doc_id))));
    std::size_t const count = surprisals.size() - cfg.span_length + 1;
    // mt19937_64 output is fully specified; the modulo bias over 2^64 is negligible.
    f.max_span_offset = static_cast<std::size_t>(rng() % count);
    f.min_span_offset = static_cast<std::size_t>(rng() % count);
    auto const a      = surprisals.subspan(f.max_span_offset, cfg.span_length);
    auto const b      = surprisals.subspan(f.min_span_offset, cfg.span_length);
    f.max_span.assign(a.begin(), a.end());
    f.min_span.assign(b.begin(), b.end());
    break;
  }
  case SpanMode::kNone:
    f.max_span.assign(cfg.span_length, 0.0);
    f.min_span.assign(cfg.span_length, 0.0);
    break;
  }
  return f;
}

UIDFeatures featurize(SurprisalSequence const &seq, FeatureConfig const &cfg)
{
  auto const u = seq.surprisals();
  return featurize(u, cfg, seq.doc_id);
}

FeatureTable featurize_corpus(std::vector<SurprisalSequence> const &corpus, FeatureConfig const &cfg,
                              unsigned threads)
{
  cfg.validate();

  struct Slot
  {
    std::optional<UIDFeatures> features;
    std::string                error;
  };
  std::vector<Slot> slots(corpus.size());

  auto const work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
    {
      try
      {
        slots[i].features = featurize(corpus[i], cfg);
      }
      catch (std::exception const &e)
      {
        slots[i].error = e.what();
      }
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1 || corpus.size() < 2 * threads)
  {
    work(0, corpus.size());
  }
  else
  {
    std::vector<std::jthread> pool;
    std::size_t const         chunk = (corpus.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < corpus.size(); begin += chunk)
    {
      pool.emplace_back(work, begin, std::min(corpus.size(), begin + chunk));
    }
  }

  FeatureTable table;
  table.feature_dim = cfg.feature_dim();
  for (std::size_t i = 0; i < corpus.size(); ++i)
  {
    auto &slot = slots[i];
    if (!slot.features)
    {
      table.skipped.push_back({i, corpus[i].doc_id, std::move(slot.error)});
      continue;
    }
    auto const &f = *slot.features;
    table.records.push_back(
        {corpus[i].doc_id, corpus[i].label, f.flatten(), f.padded, f.max_span_offset, f.min_span_offset});
  }
  return table;
}

std::string to_json_line(FeatureRecord const &record)
{
  nlohmann::json doc = {{"doc_id", record.doc_id},
                        {"label", record.label ? nlohmann::json(*record.label) : nlohmann::json(nullptr)},
                        {"features", record.features},
                        {"padded", record.padded},
                        {"max_offset", record.max_offset},
                        {"min_offset", record.min_offset}};
  return doc.dump();
}

FeatureTable parse_feature_stream(std::istream &in)
{
  FeatureTable table;
  std::string  line;
  std::size_t  line_number = 0;
  while (std::getline(in, line))
  {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
    {
      continue;
    }
    try
    {
      auto const    doc = nlohmann::json::parse(line);
      FeatureRecord rec;
      rec.doc_id = doc.at("doc_id").get<std::string>();
      if (auto it = doc.find("label"); it != doc.end() && !it->is_null())
      {
        rec.label = it->get<std::string>();
      }
      rec.features   = doc.at("features").get<std::vector<double>>();
      rec.padded     = doc.value("padded", false);
      rec.max_offset = doc.value("max_offset", std::size_t{0});
      rec.min_offset = doc.value("min_offset", std::size_t{0});
      if (table.records.empty())
      {
        table.feature_dim = rec.features.size();
      }
      else if (rec.features.size() != table.feature_dim)
      {
        throw DimensionError("feature vector of " + rec.doc_id + " has length " +
                             std::to_string(rec.features.size()) + ", expected " +
                             std::to_string(table.feature_dim));
      }
      table.records.push_back(std::move(rec));
    }
    catch (nlohmann::json::exception const &e)
    {
      throw ParseError(std::string("malformed feature record: ") + e.what(), line_number);
    }
    catch (DimensionError const &e)
    {
      throw ParseError(e.what(), line_number);
    }
  }
  return table;
}

void write_feature_stream(std::ostream &out, FeatureTable const &table)
{
  for (auto const &record : table.records)
  {
    out << to_json_line(record) << '\n';
  }
}

}  // namespace uidscan
