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
#include "uidscan/surprisal_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uidscan/error.hpp"

namespace uidscan {

using nlohmann::json;

std::vector<double> SurprisalSequence::surprisals() const
{
  std::vector<double> out;
  out.reserve(tokens.size());
  for (auto const &tok : tokens)
  {
    out.push_back(tok.surprisal);
  }
  return out;
}

namespace {

bool is_blank(std::string const &line)
{
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

SurprisalSequence parse_surprisal_line(std::string const &line, std::size_t line_number)
{
  json doc;
  try
  {
    doc = json::parse(line);
  }
  catch (json::exception const &e)
  {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_number);
  }

  if (!doc.is_object())
  {
    throw ParseError("expected a JSON object", line_number);
  }

  SurprisalSequence seq;
  auto const        id = doc.find("doc_id");
  if (id == doc.end() || !id->is_string() || id->get_ref<std::string const &>().empty())
  {
    throw ParseError("missing or non-string doc_id", line_number);
  }
  seq.doc_id = id->get<std::string>();

  if (auto const label = doc.find("label"); label != doc.end() && !label->is_null())
  {
    if (!label->is_string())
    {
      throw ParseError("label must be a string or null in " + seq.doc_id, line_number);
    }
    seq.label = label->get<std::string>();
  }

  auto const tokens = doc.find("tokens");
  if (tokens == doc.end() || !tokens->is_array())
  {
    throw ParseError("missing tokens array in " + seq.doc_id, line_number);
  }
  if (tokens->empty())
  {
    throw ValidationError("empty token list in " + seq.doc_id);
  }

  seq.tokens.reserve(tokens->size());
  for (auto const &tok : *tokens)
  {
    auto const text = tok.find("t");
    auto const surp = tok.find("s");
    if (!tok.is_object() || text == tok.end() || !text->is_string() || surp == tok.end() ||
        !surp->is_number())
    {
      throw ParseError("token entries need a string \"t\" and a number \"s\" in " + seq.doc_id,
                       line_number);
    }
    TokenSurprisal ts{text->get<std::string>(), surp->get<double>()};
    if (ts.text.empty())
    {
      throw ValidationError("empty token text in " + seq.doc_id);
    }
    if (!std::isfinite(ts.surprisal))
    {
      throw ValidationError("non-finite surprisal in " + seq.doc_id);
    }
    if (ts.surprisal < 0.0)
    {
      throw ValidationError("negative surprisal in " + seq.doc_id);
    }
    seq.tokens.push_back(std::move(ts));
  }
  return seq;
}

ParseResult parse_surprisal_stream(std::istream &in)
{
  ParseResult           result;
  std::set<std::string> seen;
  std::string           line;
  std::size_t           line_number = 0;

  while (std::getline(in, line))
  {
    ++line_number;
    if (is_blank(line))
    {
      continue;
    }
    try
    {
      auto seq = parse_surprisal_line(line, line_number);
      if (!seen.insert(seq.doc_id).second)
      {
        result.rejects.push_back({line_number, seq.doc_id, "duplicate doc_id " + seq.doc_id});
        continue;
      }
      result.documents.push_back(std::move(seq));
    }
    catch (ValidationError const &e)
    {
      // The doc_id was readable; recover it for the report.
      std::string id;
      try
      {
        id = json::parse(line).value("doc_id", "");
      }
      catch (...)
      {
      }
      result.rejects.push_back({line_number, id, e.what()});
    }
    catch (ParseError const &e)
    {
      result.rejects.push_back({line_number, "", e.what()});
    }
  }
  return result;
}

ParseResult parse_surprisal_file(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw Error("cannot open surprisal file " + path.string());
  }
  return parse_surprisal_stream(in);
}

std::string to_json_line(SurprisalSequence const &seq)
{
  json tokens = json::array();
  for (auto const &tok : seq.tokens)
  {
    tokens.push_back({{"t", tok.text}, {"s", tok.surprisal}});
  }
  json doc = {{"doc_id", seq.doc_id},
              {"label", seq.label ? json(*seq.label) : json(nullptr)},
              {"tokens", std::move(tokens)}};
  return doc.dump();
}

void write_surprisal_stream(std::ostream &out, std::vector<SurprisalSequence> const &docs)
{
  for (auto const &doc : docs)
  {
    out << to_json_line(doc) << '\n';
  }
}

bool DatasetManifest::has_label(std::string const &label) const
{
  return std::find(label_set.begin(), label_set.end(), label) != label_set.end();
}

DatasetManifest parse_manifest(std::string const &json_text, std::filesystem::path base_dir)
{
  json doc;
  try
  {
    doc = json::parse(json_text);
  }
  catch (json::exception const &e)
  {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }

  DatasetManifest manifest;
  manifest.base_dir = std::move(base_dir);
  try
  {
    manifest.name = doc.at("name").get<std::string>();
    for (auto const &label : doc.at("label_set"))
    {
      auto name = label.get<std::string>();
      if (manifest.has_label(name))
      {
        throw ValidationError("duplicate label " + name + " in manifest label_set");
      }
      manifest.label_set.push_back(std::move(name));
    }
    for (auto const &[split, paths] : doc.at("splits").items())
    {
      auto &files = manifest.splits[split];
      for (auto const &p : paths)
      {
        files.emplace_back(p.get<std::string>());
      }
    }
  }
  catch (json::exception const &e)
  {
    throw ParseError(std::string("invalid manifest: ") + e.what());
  }
  return manifest;
}

DatasetManifest load_manifest(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw Error("cannot open manifest " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

ParseResult load_corpus(DatasetManifest const &manifest, std::string const &split,
                        LabelPolicy policy)
{
  auto const it = manifest.splits.find(split);
  if (it == manifest.splits.end())
  {
    throw ValidationError("unknown split " + split + " in manifest " + manifest.name);
  }

  ParseResult           corpus;
  std::set<std::string> seen;
  for (auto const &rel : it->second)
  {
    auto const path = rel.is_absolute() ? rel : manifest.base_dir / rel;
    auto       part = parse_surprisal_file(path);
    for (auto &doc : part.documents)
    {
      if (!doc.label)
      {
        if (policy == LabelPolicy::kRequired)
        {
          throw ValidationError("missing label for " + doc.doc_id + " in split " + split);
        }
      }
      else if (!manifest.has_label(*doc.label))
      {
        throw ValidationError("label " + *doc.label + " of " + doc.doc_id +
                              " is not in the manifest label_set");
      }
      if (!seen.insert(doc.doc_id).second)
      {
        throw ValidationError("doc_id " + doc.doc_id + " appears twice in split " + split);
      }
      corpus.documents.push_back(std::move(doc));
    }
    for (auto &reject : part.rejects)
    {
      reject.reason = path.filename().string() + ": " + reject.reason;
      corpus.rejects.push_back(std::move(reject));
    }
  }
  return corpus;
}

}  // namespace uidscan
