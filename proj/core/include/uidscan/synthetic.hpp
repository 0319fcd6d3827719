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
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "uidscan/surprisal_io.hpp"

namespace uidscan {

// Synthetic surprisal generators for tests, benchmarks and demos.

/// Gamma-distributed surprisals with the given mean and standard deviation.
struct SurprisalProfile
{
  double mean   = 3.0;
  double stddev = 1.0;
};

/// A contiguous segment drawn from a different profile, placed at a uniformly
/// random offset.
struct Burst
{
  SurprisalProfile profile;
  std::size_t      length = 20;
};

struct SyntheticAuthor
{
  std::string          label;
  SurprisalProfile     base;
  std::optional<Burst> burst;
  /// Adds a constant offset and one slow sinusoidal cycle over the document
  /// that contribute the same mean and variance this burst would, but without
  /// any local jump. Used to build a control author whose global statistics
  /// match a bursty one.
  std::optional<Burst> mimic_burst;
};

struct SyntheticCorpusConfig
{
  std::vector<SyntheticAuthor> authors;
  std::size_t                  docs_per_author = 100;
  std::size_t                  min_length      = 200;
  std::size_t                  max_length      = 400;
  std::uint64_t                seed            = 0;
  std::string                  id_prefix       = "doc";
};

std::vector<double> sample_surprisals(std::mt19937_64 &rng, SurprisalProfile const &profile,
                                      std::size_t length);

/// Documents are interleaved across authors (a0, b0, a1, b1, ...). Token text is
/// a placeholder ("w<index>"); only the surprisals carry signal.
std::vector<SurprisalSequence> make_synthetic_corpus(SyntheticCorpusConfig const &cfg);

/// Two authors separated by global dispersion only: "machine" draws low-variance
/// surprisals, "human" high-variance ones, both with the same mean.
SyntheticCorpusConfig dispersion_pair(std::size_t docs_per_author, std::uint64_t seed);

/// Two authors whose global statistics match but one carries a short burst of
/// unexpected tokens; only span features can tell them apart.
SyntheticCorpusConfig burst_pair(std::size_t docs_per_author, std::uint64_t seed);

}  // namespace uidscan
