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
#include "uidscan/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uidscan/error.hpp"

namespace uidscan {

std::vector<double> sample_surprisals(std::mt19937_64 &rng, SurprisalProfile const &profile,
                                      std::size_t length)
{
  if (!(profile.mean > 0.0) || !(profile.stddev > 0.0))
  {
    throw ValidationError("surprisal profile needs a positive mean and standard deviation");
  }
  double const shape = (profile.mean / profile.stddev) * (profile.mean / profile.stddev);
  double const scale = profile.stddev * profile.stddev / profile.mean;
  std::gamma_distribution<double> gamma(shape, scale);

  std::vector<double> out(length);
  for (double &v : out)
  {
    v = gamma(rng);
  }
  return out;
}

namespace {

std::vector<double> sample_document(std::mt19937_64 &rng, SyntheticAuthor const &author, std::size_t length)
{
  auto u = sample_surprisals(rng, author.base, length);

  if (author.burst && author.burst->length <= length)
  {
    auto const        burst  = sample_surprisals(rng, author.burst->profile, author.burst->length);
    std::size_t const offset = std::uniform_int_distribution<std::size_t>(0, length - burst.size())(rng);
    std::copy(burst.begin(), burst.end(), u.begin() + static_cast<std::ptrdiff_t>(offset));
  }

  if (author.mimic_burst)
  {
    // A burst covering fraction f with level shift d adds f*d to the mean and
    // f*(1-f)*d^2 to the variance (between-segment part).
    double const f     = std::min(1.0, static_cast<double>(author.mimic_burst->length) / static_cast<double>(length));
    double const d     = author.mimic_burst->profile.mean - author.base.mean;
    double const amp   = std::sqrt(2.0 * f * (1.0 - f) * d * d);
    double const phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    for (std::size_t t = 0; t < length; ++t)
    {
      double const angle = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(length);
      u[t]               = std::max(0.0, u[t] + f * d + amp * std::sin(angle + phase));
    }
  }
  return u;
}

}  // namespace

std::vector<SurprisalSequence> make_synthetic_corpus(SyntheticCorpusConfig const &cfg)
{
  if (cfg.authors.empty())
  {
    throw ValidationError("synthetic corpus needs at least one author");
  }
  if (cfg.min_length < 1 || cfg.max_length < cfg.min_length)
  {
    throw ValidationError("invalid synthetic document length range");
  }

  std::mt19937_64                            rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> lengths(cfg.min_length, cfg.max_length);

  std::vector<SurprisalSequence> corpus;
  corpus.reserve(cfg.docs_per_author * cfg.authors.size());
  for (std::size_t i = 0; i < cfg.docs_per_author; ++i)
  {
    for (auto const &author : cfg.authors)
    {
      auto const        u = sample_document(rng, author, lengths(rng));
      SurprisalSequence seq;
      seq.doc_id = cfg.id_prefix + "-" + author.label + "-" + std::to_string(i);
      seq.label  = author.label;
      seq.tokens.reserve(u.size());
      for (std::size_t t = 0; t < u.size(); ++t)
      {
        seq.tokens.push_back({"w" + std::to_string(t), u[t]});
      }
      corpus.push_back(std::move(seq));
    }
  }
  return corpus;
}

SyntheticCorpusConfig dispersion_pair(std::size_t docs_per_author, std::uint64_t seed)
{
  SyntheticCorpusConfig cfg;
  cfg.authors         = {{"human", {3.0, 2.0}, std::nullopt, std::nullopt},
                         {"machine", {3.0, 0.7}, std::nullopt, std::nullopt}};
  cfg.docs_per_author = docs_per_author;
  cfg.min_length      = 200;
  cfg.max_length      = 400;
  cfg.seed            = seed;
  return cfg;
}

SyntheticCorpusConfig burst_pair(std::size_t docs_per_author, std::uint64_t seed)
{
  SurprisalProfile const base{3.0, 1.0};
  Burst const            burst{{7.0, 1.0}, 20};

  SyntheticCorpusConfig cfg;
  cfg.authors         = {{"bursty", base, burst, std::nullopt}, {"steady", base, std::nullopt, burst}};
  cfg.docs_per_author = docs_per_author;
  cfg.min_length      = 800;
  cfg.max_length      = 1200;
  cfg.seed            = seed;
  return cfg;
}

}  // namespace uidscan
