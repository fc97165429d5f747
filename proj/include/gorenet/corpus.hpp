#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gorenet/dsl.hpp"

namespace gorenet {

/// One transcribed row of a reasoning table. An empty `final` means the
/// table leaves the cell blank because the row carries an initial label.
struct ExpectedRow {
  std::string element;  // element name as printed
  std::optional<QualLabel> initial;
  std::optional<QualLabel> final;
  bool human_judgment = false;
  bool excluded = false;  // listed in DISCREPANCIES.md, not checked
  std::string note;

  /// Label the evaluation must produce for the row.
  std::optional<QualLabel> expected() const { return final ? final : initial; }
};

struct ExpectedTable {
  std::string scenario;
  std::string caption;
  std::vector<ExpectedRow> rows;
};

struct ExpectedMarkings {
  std::string script;
  std::vector<Marking> markings;
};

struct CorpusEntry {
  std::string id;
  SourceDocument model_doc;
  TwoLayerModel model;
  JudgmentTable judgments;  // model judgments merged with the judgment file
  std::optional<ExpectedMarkings> markings;
  std::vector<ExpectedTable> tables;
};

/// $GORENET_CORPUS_DIR when set, else the directory the build was
/// configured with.
std::filesystem::path corpus_dir();

std::vector<std::string> corpus_names(const std::filesystem::path& dir = corpus_dir());

/// Throws "unknown-corpus", "io" or "parse-error".
CorpusEntry load_corpus(std::string_view name, const std::filesystem::path& dir = corpus_dir());

/// Reads and parses a model file; throws "io" or "parse-error" with the
/// formatted diagnostics as message.
TwoLayerModel load_model_file(const std::filesystem::path& path);

/// Reads a judgment file against `model`; throws "io" or "parse-error".
JudgmentTable load_judgment_file(const std::filesystem::path& path, const GoalModel& model);

}  // namespace gorenet
