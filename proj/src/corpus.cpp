#include "gorenet/corpus.hpp"

#include <cstdlib>
#include <fstream>

#include "json.hpp"

#include "gorenet/error.hpp"

#ifndef GORENET_DEFAULT_CORPUS_DIR
#define GORENET_DEFAULT_CORPUS_DIR "corpus"
#endif

namespace gorenet {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path corpus_dir() {
  if (const char* env = std::getenv("GORENET_CORPUS_DIR"); env != nullptr && *env != '\0') return env;
  return GORENET_DEFAULT_CORPUS_DIR;
}

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("parse-error", path.string() + ": " + e.what());
  }
}

std::optional<QualLabel> label_field(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  auto l = parse_label(j[key].get<std::string>());
  if (!l) throw Error("parse-error", "bad label '" + j[key].get<std::string>() + "'");
  return l;
}

ExpectedTable read_table(const fs::path& path) {
  const json j = read_json(path);
  ExpectedTable t;
  t.scenario = j.at("scenario").get<std::string>();
  t.caption = j.value("caption", "");
  for (const auto& r : j.at("rows")) {
    ExpectedRow row;
    row.element = r.at("element").get<std::string>();
    row.initial = label_field(r, "initial");
    row.final = label_field(r, "final");
    row.human_judgment = r.value("hj", false);
    row.excluded = r.value("excluded", false);
    row.note = r.value("note", "");
    t.rows.push_back(std::move(row));
  }
  return t;
}

ExpectedMarkings read_markings(const fs::path& path) {
  const json j = read_json(path);
  ExpectedMarkings m;
  m.script = j.at("script").get<std::string>();
  for (const auto& v : j.at("markings")) m.markings.push_back(Marking{v.get<std::vector<std::uint64_t>>()});
  return m;
}

std::string joined(const std::vector<ParseDiagnostic>& diags, const std::string& origin) {
  std::string out;
  for (const auto& d : diags) {
    if (d.severity != Severity::error) continue;
    if (!out.empty()) out += '\n';
    out += format_diagnostic(d, origin);
  }
  return out;
}

}  // namespace

TwoLayerModel load_model_file(const fs::path& path) {
  auto doc = read_document(path);
  auto result = parse(doc);
  if (!result.ok()) throw Error("parse-error", joined(result.diagnostics, doc.origin));
  return std::move(*result.model);
}

JudgmentTable load_judgment_file(const fs::path& path, const GoalModel& model) {
  auto doc = read_document(path);
  auto result = parse_judgments(doc, model);
  if (!result.table) throw Error("parse-error", joined(result.diagnostics, doc.origin));
  return std::move(*result.table);
}

std::vector<std::string> corpus_names(const fs::path& dir) {
  const json manifest = read_json(dir / "corpus.json");
  std::vector<std::string> out;
  for (const auto& e : manifest.at("entries")) out.push_back(e.at("id").get<std::string>());
  return out;
}

CorpusEntry load_corpus(std::string_view name, const fs::path& dir) {
  const json manifest = read_json(dir / "corpus.json");
  for (const auto& e : manifest.at("entries")) {
    if (e.at("id").get<std::string>() != name) continue;
    CorpusEntry entry;
    entry.id = std::string(name);
    entry.model_doc = read_document(dir / e.at("model").get<std::string>());
    auto parsed = parse(entry.model_doc);
    if (!parsed.ok()) throw Error("parse-error", joined(parsed.diagnostics, entry.model_doc.origin));
    entry.model = std::move(*parsed.model);
    entry.judgments = entry.model.judgments;
    if (e.contains("judgments")) {
      entry.judgments.merge(load_judgment_file(dir / e["judgments"].get<std::string>(), entry.model.goals));
    }
    if (e.contains("expected")) {
      const json& x = e["expected"];
      if (x.contains("markings")) entry.markings = read_markings(dir / x["markings"].get<std::string>());
      for (const auto& t : x.value("tables", json::array())) {
        entry.tables.push_back(read_table(dir / t.get<std::string>()));
      }
    }
    return entry;
  }
  throw Error("unknown-corpus", "no corpus entry named '" + std::string(name) + "'");
}

}  // namespace gorenet
