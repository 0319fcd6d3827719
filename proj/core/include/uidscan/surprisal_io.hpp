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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace uidscan {

/// One token and its surprisal in nats.
struct TokenSurprisal
{
  std::string text;
  double      surprisal = 0.0;

  bool operator==(TokenSurprisal const &) const = default;
};

/// A document as produced by the surprisal extractor.
struct SurprisalSequence
{
  std::string                 doc_id;
  std::optional<std::string>  label;
  std::vector<TokenSurprisal> tokens;

  std::size_t size() const noexcept
  {
    return tokens.size();
  }

  std::vector<double> surprisals() const;

  bool operator==(SurprisalSequence const &) const = default;
};

/// A document that could not be ingested.
struct Reject
{
  std::size_t line = 0;  // 1-based line in the source file, 0 if not line-bound
  std::string doc_id;    // empty when the line could not be parsed far enough
  std::string reason;
};

struct ParseResult
{
  std::vector<SurprisalSequence> documents;
  std::vector<Reject>            rejects;
};

/// Parses one interchange line. Throws ParseError (malformed JSON / schema) or
/// ValidationError (invariant violation) with the offending doc_id in the message.
SurprisalSequence parse_surprisal_line(std::string const &line, std::size_t line_number = 0);

/// Parses a JSON Lines stream. Bad lines and duplicate doc_ids become rejects;
/// every non-blank input line ends up either in `documents` or in `rejects`.
ParseResult parse_surprisal_stream(std::istream &in);

/// Throws Error when the file cannot be opened.
ParseResult parse_surprisal_file(std::filesystem::path const &path);

std::string to_json_line(SurprisalSequence const &seq);
void        write_surprisal_stream(std::ostream &out, std::vector<SurprisalSequence> const &docs);

/// Named splits of surprisal files plus the closed label set.
struct DatasetManifest
{
  std::string                                               name;
  std::vector<std::string>                                  label_set;
  std::map<std::string, std::vector<std::filesystem::path>> splits;
  std::filesystem::path                                     base_dir;  // split paths are relative to this

  bool has_label(std::string const &label) const;
};

DatasetManifest parse_manifest(std::string const &json_text, std::filesystem::path base_dir = {});
DatasetManifest load_manifest(std::filesystem::path const &path);

enum class LabelPolicy
{
  kRequired,  // training / evaluation
  kOptional,  // prediction
};

/// Concatenation of the split's files in manifest order. Rejected lines are
/// reported, not fatal. Throws ValidationError for an unknown split, a missing
/// label under kRequired, a label outside label_set, or a doc_id repeated
/// across files.
ParseResult load_corpus(DatasetManifest const &manifest, std::string const &split,
                        LabelPolicy policy = LabelPolicy::kRequired);

}  // namespace uidscan
