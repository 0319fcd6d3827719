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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uidscan/surprisal_io.hpp"

namespace uidscan {

// Global and local UID scores over a surprisal sequence (nats).
// All four throw ValidationError when the sequence is too short.

/// (1/n) sum u_t. Requires n >= 1.
double surprisal_mean(std::span<double const> surprisals);

/// Population variance (1/n) sum (u_t - mean)^2. Requires n >= 1.
/// Exactly 0 iff all values are equal.
double uid_variance(std::span<double const> surprisals);

/// (1/(n-1)) sum |u_t - u_{t-1}|. Requires n >= 2.
double uid_diff(std::span<double const> surprisals);

/// (1/(n-1)) sum (u_t - u_{t-1})^2. Requires n >= 2.
double uid_diff_sq(std::span<double const> surprisals);

/// Result of the sliding-window search for the most and least uniform window.
struct ExtremeSpans
{
  std::vector<double> max_span;
  std::vector<double> min_span;
  std::size_t         max_offset   = 0;
  std::size_t         min_offset   = 0;
  double              max_variance = 0.0;
  double              min_variance = 0.0;
  bool                padded       = false;
};

/// Window variances whose difference is below this fraction of the largest
/// window variance are treated as ties (rounding noise of the rolling sums).
inline constexpr double kSpanTieTolerance = 1e-12;

/// Scans every window of `span_length` consecutive surprisals (stride 1) and
/// returns the highest- and lowest-variance windows, smallest offset first on
/// ties. Sequences shorter than the window are right-padded with their mean and
/// flagged `padded`, unless `strict` is set, in which case ValidationError is thrown.
ExtremeSpans extreme_spans(std::span<double const> surprisals, std::size_t span_length,
                           bool strict = false);

/// Population variance of every window, indexed by offset. O(n) rolling sums.
std::vector<double> window_variances(std::span<double const> surprisals, std::size_t span_length);

enum class SpanMode
{
  kMinMax,
  kRandom,
  kNone,
};

std::string_view        to_string(SpanMode mode);
std::optional<SpanMode> parse_span_mode(std::string_view text);

struct FeatureConfig
{
  std::size_t   span_length       = 20;
  bool          include_spans     = true;
  SpanMode      span_mode         = SpanMode::kMinMax;
  std::uint64_t seed              = 0;  // only consulted by SpanMode::kRandom
  bool          strict_short_docs = false;

  /// kNone when include_spans is off.
  SpanMode effective_mode() const noexcept
  {
    return include_spans ? span_mode : SpanMode::kNone;
  }

  /// 4 + 2 * span_length, or 4 without spans.
  std::size_t feature_dim() const noexcept;

  /// Throws ValidationError when span_length < 2.
  void validate() const;
};

inline constexpr std::size_t kGlobalFeatureCount = 4;

struct UIDFeatures
{
  double              mean_surprisal = 0.0;
  double              uid_variance   = 0.0;
  double              uid_diff       = 0.0;
  double              uid_diff_sq    = 0.0;
  std::vector<double> max_span;
  std::vector<double> min_span;
  std::size_t         max_span_offset = 0;
  std::size_t         min_span_offset = 0;
  std::size_t         span_length     = 0;
  SpanMode            span_mode       = SpanMode::kMinMax;
  bool                padded          = false;

  /// [mean, variance, diff, diff^2, max_span..., min_span...]; the span block is
  /// dropped for SpanMode::kNone. This order is part of the model file contract.
  std::vector<double> flatten() const;
};

/// Requires at least 2 tokens. Pure: the random-span draw is seeded from
/// (cfg.seed, doc_id), so identical inputs give bit-identical output.
UIDFeatures featurize(std::span<double const> surprisals, FeatureConfig const &cfg,
                      std::string_view doc_id = {});
UIDFeatures featurize(SurprisalSequence const &seq, FeatureConfig const &cfg);

/// One line of a feature file.
struct FeatureRecord
{
  std::string                doc_id;
  std::optional<std::string> label;
  std::vector<double>        features;
  bool                       padded     = false;
  std::size_t                max_offset = 0;
  std::size_t                min_offset = 0;

  bool operator==(FeatureRecord const &) const = default;
};

struct SkippedDocument
{
  std::size_t index = 0;  // position in the input corpus
  std::string doc_id;
  std::string reason;
};

struct FeatureTable
{
  std::vector<FeatureRecord>   records;  // corpus order, skipped documents removed
  std::vector<SkippedDocument> skipped;
  std::size_t                  feature_dim = 0;
};

/// Featurizes every document; documents failing the preconditions are skipped
/// and reported. `threads` > 1 splits the corpus into contiguous chunks; the
/// output does not depend on the thread count.
FeatureTable featurize_corpus(std::vector<SurprisalSequence> const &corpus, FeatureConfig const &cfg,
                              unsigned threads = 1);

std::string  to_json_line(FeatureRecord const &record);
FeatureTable parse_feature_stream(std::istream &in);
void         write_feature_stream(std::ostream &out, FeatureTable const &table);

}  // namespace uidscan
