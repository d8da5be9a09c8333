#pragma once

// Sentiment-shift evaluation: score original/transferred pairs with the local
// analyzer and optional LLM judges and aggregate per-scorer means.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "proxyllm/llm_client.hpp"
#include "proxyllm/prompting.hpp"
#include "proxyllm/sentiment.hpp"
#include "proxyllm/service.hpp"

namespace proxyllm::eval {

struct EvalRecord {
  std::string id;
  std::string original;
  std::optional<std::string> transferred;

  bool operator==(const EvalRecord&) const = default;
};

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, int line = 0) : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Newline-delimited JSON, one {"id", "original", "transferred"?} per line.
// Blank lines are ignored.
std::vector<EvalRecord> load_dataset(std::istream& source);
std::vector<EvalRecord> load_dataset_file(const std::filesystem::path& path);
void write_dataset(std::ostream& out, std::span<const EvalRecord> records);

struct GenerationFailure {
  std::string id;
  std::string reason;
};

struct EnsureResult {
  std::vector<EvalRecord> records;
  std::vector<GenerationFailure> failures;
};

// Fills in missing transferred texts by running the pipeline with force=true.
// Records that already carry a transferred text are left untouched.
EnsureResult ensure_transferred(std::vector<EvalRecord> records, const service::Pipeline& pipeline,
                                const prompting::TonePreset& preset = prompting::TonePreset::positive());

class JudgeParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// First decimal literal in `reply` lying in [-1, 1]. Throws JudgeParseError.
double parse_judge_reply(std::string_view reply);

struct JudgeOptions {
  // Appends the "reply with only the number" instruction to the judge prompt.
  bool reply_with_number = true;
};

double judge(const std::string& text, llm::GenerationBackend& judge_backend,
             const prompting::PromptBuilder& prompts = prompting::PromptBuilder{},
             const JudgeOptions& options = {});

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string name() const = 0;
  // Returns a score in [-1, 1] or throws when this text cannot be scored.
  virtual double score(const std::string& text) = 0;
  // Scores a batch; nullopt marks a failed item. The default fans `score`
  // out over `parallelism` worker threads.
  virtual std::vector<std::optional<double>> score_all(std::span<const std::string> texts,
                                                       std::size_t parallelism);
};

class LocalScorer final : public Scorer {
 public:
  explicit LocalScorer(const sentiment::Lexicon& lexicon, std::string name = "local");
  std::string name() const override { return name_; }
  double score(const std::string& text) override;
  // Uses the OpenMP batch kernel.
  std::vector<std::optional<double>> score_all(std::span<const std::string> texts,
                                               std::size_t parallelism) override;

 private:
  const sentiment::Lexicon& lexicon_;
  std::string name_;
};

class JudgeScorer final : public Scorer {
 public:
  JudgeScorer(std::string name, llm::GenerationBackend& backend,
              prompting::PromptBuilder prompts = prompting::PromptBuilder{}, JudgeOptions options = {});
  std::string name() const override { return name_; }
  double score(const std::string& text) override;

 private:
  std::string name_;
  llm::GenerationBackend& backend_;
  prompting::PromptBuilder prompts_;
  JudgeOptions options_;
};

struct ScorerSummary {
  double mean_original = 0.0;
  double mean_transferred = 0.0;
  std::size_t n = 0;
  std::size_t failures = 0;
};

struct RecordScore {
  std::string id;
  std::string scorer;
  double score_original = 0.0;
  double score_transferred = 0.0;
};

struct EvalReport {
  std::vector<std::string> scorer_order;
  std::map<std::string, ScorerSummary> per_scorer;
  std::vector<RecordScore> per_record;

  nlohmann::json to_json() const;
  // Aligned plain-text table: scorer, mean original, mean transferred, n.
  std::string to_table() const;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every record must carry a transferred text. A (record, scorer) pair is
// included only when both texts score successfully.
EvalReport run_eval(std::span<const EvalRecord> records, std::span<Scorer* const> scorers,
                    std::size_t parallelism = 4);

}  // namespace proxyllm::eval
