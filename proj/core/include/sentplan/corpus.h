#pragma once

// On-disk corpora: the plans, every generated alternative with its
// realization, the template baseline, and the pruned feature matrix.
//
//   manifest.json        generation parameters and plan ids
//   plans/<id>.plan      the input plans, re-serialized
//   alternatives.jsonl   one alternative per line
//   features.txt         sparse matrix over the generated alternatives
//   ratings.jsonl        appended by the rating service
//   models/              trained models

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "sentplan/features.h"
#include "sentplan/lexicon.h"
#include "sentplan/plan.h"

namespace sentplan {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kSourceGenerated = "spg";
inline constexpr const char* kSourceTemplate = "template";

struct AlternativeRecord {
  std::string plan_id;
  std::string alt_id;  // content hash, unique within the plan
  std::string source;  // kSourceGenerated or kSourceTemplate
  std::size_t tp_index = 0;
  std::uint64_t seed = 0;
  std::string sp_tree;  // empty for the template
  std::string d_tree;
  std::string text;
  bool operator==(const AlternativeRecord&) const = default;
};

struct Manifest {
  std::uint64_t seed = 0;
  std::size_t max_alts = 20;
  std::size_t min_count = 10;
  std::string dictionary;  // hash of the dictionary text
  std::vector<std::string> plans;
};

struct Corpus {
  Manifest manifest;
  std::vector<ContentPlan> plans;
  std::vector<AlternativeRecord> alternatives;
  FeatureMatrix matrix;  // rows are the generated alternatives only

  const ContentPlan* find_plan(std::string_view id) const;
  const AlternativeRecord* find(std::string_view plan_id, std::string_view alt_id) const;
};

struct GenerateOptions {
  std::size_t max_alts = 20;
  std::uint64_t seed = 0;
  std::size_t min_count = 10;
};

std::string alternative_id(std::string_view plan_id, std::string_view source,
                           std::string_view sp_tree, std::string_view text);

// Each path is a plan file or a directory of *.plan / *.json files. The
// plan id is the file stem unless the file names one.
std::vector<ContentPlan> load_plans(const std::vector<std::filesystem::path>& paths);

Corpus generate_corpus(const std::vector<ContentPlan>& plans,
                       const GenerationDictionary& dictionary,
                       std::string_view dictionary_text, const GenerateOptions& options);

// Refuses to write into a non-empty directory.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& dir);

std::filesystem::path ratings_path(const std::filesystem::path& corpus_dir);
std::filesystem::path models_dir(const std::filesystem::path& corpus_dir);

}  // namespace sentplan
