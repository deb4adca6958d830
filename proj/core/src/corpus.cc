#include "sentplan/corpus.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sentplan/random.h"
#include "sentplan/realizer.h"
#include "sentplan/sentence_plan.h"

namespace sentplan {
namespace fs = std::filesystem;
namespace {

std::string hex(std::uint64_t v, int digits) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf + 16 - digits);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CorpusError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw CorpusError("cannot write " + p.string());
}

bool safe_id(std::string_view id) {
  if (id.empty() || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

nlohmann::json record_to_json(const AlternativeRecord& a) {
  return {{"plan", a.plan_id},       {"alt", a.alt_id},   {"source", a.source},
          {"tp_index", a.tp_index},  {"seed", a.seed},    {"sp_tree", a.sp_tree},
          {"d_tree", a.d_tree},      {"text", a.text}};
}

AlternativeRecord record_from_json(const nlohmann::json& j) {
  AlternativeRecord a;
  a.plan_id = j.at("plan").get<std::string>();
  a.alt_id = j.at("alt").get<std::string>();
  a.source = j.at("source").get<std::string>();
  a.tp_index = j.at("tp_index").get<std::size_t>();
  a.seed = j.at("seed").get<std::uint64_t>();
  a.sp_tree = j.at("sp_tree").get<std::string>();
  a.d_tree = j.at("d_tree").get<std::string>();
  a.text = j.at("text").get<std::string>();
  return a;
}

}  // namespace

const ContentPlan* Corpus::find_plan(std::string_view id) const {
  for (const auto& p : plans) {
    if (p.plan_id == id) return &p;
  }
  return nullptr;
}

const AlternativeRecord* Corpus::find(std::string_view plan_id, std::string_view alt_id) const {
  for (const auto& a : alternatives) {
    if (a.plan_id == plan_id && a.alt_id == alt_id) return &a;
  }
  return nullptr;
}

std::string alternative_id(std::string_view plan_id, std::string_view source,
                           std::string_view sp_tree, std::string_view text) {
  std::string key;
  for (auto part : {plan_id, source, sp_tree, text}) {
    key += part;
    key += '\0';
  }
  return hex(hash_string(key), 12);
}

std::vector<ContentPlan> load_plans(const std::vector<fs::path>& paths) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".plan" || ext == ".json")) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw CorpusError("no such plan file: " + p.string());
    }
  }
  if (files.empty()) throw CorpusError("no plan files given");
  std::vector<ContentPlan> plans;
  std::set<std::string> seen;
  for (const auto& f : files) {
    ContentPlan plan;
    try {
      plan = parse_plan(read_file(f), f.stem().string());
    } catch (const PlanError& e) {
      throw PlanError(f.string() + ": " + e.what());
    }
    if (!safe_id(plan.plan_id)) throw CorpusError(f.string() + ": bad plan id '" + plan.plan_id + "'");
    if (!seen.insert(plan.plan_id).second) {
      throw CorpusError("duplicate plan id '" + plan.plan_id + "' in " + f.string());
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

Corpus generate_corpus(const std::vector<ContentPlan>& plans,
                       const GenerationDictionary& dictionary,
                       std::string_view dictionary_text, const GenerateOptions& options) {
  Corpus corpus;
  corpus.manifest.seed = options.seed;
  corpus.manifest.max_alts = options.max_alts;
  corpus.manifest.min_count = options.min_count;
  corpus.manifest.dictionary = hex(hash_string(dictionary_text), 16);
  corpus.plans = plans;

  std::vector<FeatureRow> rows;
  for (const auto& plan : plans) {
    corpus.manifest.plans.push_back(plan.plan_id);
    EntityLexicon lexicon;
    lexicon.add_plan(plan);
    GeneratorOptions g;
    g.max_alts = options.max_alts;
    g.seed = mix_seed(options.seed, hash_string(plan.plan_id));
    for (const auto& alt : generate_alternatives(plan, dictionary, g)) {
      AlternativeRecord rec;
      rec.plan_id = plan.plan_id;
      rec.source = kSourceGenerated;
      rec.tp_index = alt.tp_index;
      rec.seed = alt.seed;
      rec.sp_tree = to_string(alt.sp_tree);
      rec.d_tree = to_string(alt.d_tree);
      rec.text = linearize(alt.d_tree).text;
      rec.alt_id = alternative_id(plan.plan_id, rec.source, rec.sp_tree, rec.text);
      rows.push_back({{plan.plan_id, rec.alt_id}, extract_features(plan, alt, lexicon)});
      corpus.alternatives.push_back(std::move(rec));
    }
    AlternativeRecord tmpl;
    tmpl.plan_id = plan.plan_id;
    tmpl.source = kSourceTemplate;
    tmpl.text = realize_template(plan).text;
    tmpl.alt_id = alternative_id(plan.plan_id, tmpl.source, "", tmpl.text);
    corpus.alternatives.push_back(std::move(tmpl));
  }
  corpus.matrix = assemble_and_prune(rows, options.min_count);
  return corpus;
}

fs::path ratings_path(const fs::path& dir) { return dir / "ratings.jsonl"; }
fs::path models_dir(const fs::path& dir) { return dir / "models"; }

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    throw CorpusError("output directory " + dir.string() + " is not empty");
  }
  fs::create_directories(dir / "plans");

  nlohmann::json m = {{"seed", corpus.manifest.seed},
                      {"max_alts", corpus.manifest.max_alts},
                      {"min_count", corpus.manifest.min_count},
                      {"dictionary", corpus.manifest.dictionary},
                      {"plans", corpus.manifest.plans}};
  write_file(dir / "manifest.json", m.dump(2) + "\n");
  for (const auto& p : corpus.plans) {
    write_file(dir / "plans" / (p.plan_id + ".plan"), serialize_plan(p));
  }
  std::string lines;
  for (const auto& a : corpus.alternatives) lines += record_to_json(a).dump() + "\n";
  write_file(dir / "alternatives.jsonl", lines);
  std::ostringstream matrix;
  write_matrix(matrix, corpus.matrix);
  write_file(dir / "features.txt", matrix.str());
}

Corpus load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw CorpusError("no corpus at " + dir.string());
  Corpus corpus;
  try {
    const auto m = nlohmann::json::parse(read_file(dir / "manifest.json"));
    corpus.manifest.seed = m.at("seed").get<std::uint64_t>();
    corpus.manifest.max_alts = m.at("max_alts").get<std::size_t>();
    corpus.manifest.min_count = m.at("min_count").get<std::size_t>();
    corpus.manifest.dictionary = m.at("dictionary").get<std::string>();
    corpus.manifest.plans = m.at("plans").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw CorpusError("bad manifest.json: " + std::string(e.what()));
  }
  for (const auto& id : corpus.manifest.plans) {
    if (!safe_id(id)) throw CorpusError("bad plan id in manifest: " + id);
    corpus.plans.push_back(parse_plan(read_file(dir / "plans" / (id + ".plan")), id));
  }
  std::istringstream alts(read_file(dir / "alternatives.jsonl"));
  std::string line;
  int line_no = 0;
  while (std::getline(alts, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      corpus.alternatives.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw CorpusError("alternatives.jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::ifstream features(dir / "features.txt");
  if (!features) throw CorpusError("cannot read " + (dir / "features.txt").string());
  corpus.matrix = read_matrix(features);
  for (const auto& row : corpus.matrix.rows) {
    if (!corpus.find(row.plan_id, row.alt_id)) {
      throw CorpusError("features.txt row " + row.plan_id + "/" + row.alt_id +
                        " has no alternative");
    }
  }
  return corpus;
}

}  // namespace sentplan
