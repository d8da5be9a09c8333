#include "proxyllm/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

namespace proxyllm::eval {

using nlohmann::json;

std::vector<EvalRecord> load_dataset(std::istream& source) {
  std::vector<EvalRecord> records;
  std::set<std::string, std::less<>> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    const json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw DatasetError(where + "not a JSON object", line_no);

    EvalRecord rec;
    if (!doc.contains("id") || !doc["id"].is_string()) throw DatasetError(where + "missing string 'id'", line_no);
    rec.id = doc["id"].get<std::string>();
    if (!doc.contains("original") || !doc["original"].is_string() ||
        doc["original"].get_ref<const std::string&>().empty()) {
      throw DatasetError(where + "missing non-empty 'original'", line_no);
    }
    rec.original = doc["original"].get<std::string>();
    if (doc.contains("transferred") && !doc["transferred"].is_null()) {
      if (!doc["transferred"].is_string()) throw DatasetError(where + "'transferred' must be a string", line_no);
      rec.transferred = doc["transferred"].get<std::string>();
    }
    if (!ids.insert(rec.id).second) throw DatasetError(where + "duplicate id '" + rec.id + "'", line_no);
    records.push_back(std::move(rec));
  }
  if (source.bad()) throw DatasetError("error while reading dataset");
  return records;
}

std::vector<EvalRecord> load_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset " + path.string());
  try {
    return load_dataset(in);
  } catch (const DatasetError& e) {
    throw DatasetError(path.string() + ": " + e.what(), e.line());
  }
}

void write_dataset(std::ostream& out, std::span<const EvalRecord> records) {
  for (const auto& r : records) {
    json j = {{"id", r.id}, {"original", r.original}};
    if (r.transferred) j["transferred"] = *r.transferred;
    out << j.dump() << '\n';
  }
}

EnsureResult ensure_transferred(std::vector<EvalRecord> records, const service::Pipeline& pipeline,
                                const prompting::TonePreset& preset) {
  EnsureResult result;
  for (auto& rec : records) {
    if (rec.transferred) continue;
    service::TransformRequest req{rec.original, preset, true, rec.id};
    try {
      const auto response = pipeline.transform(req);
      if (response.degraded) {
        result.failures.push_back({rec.id, response.degraded_reason.value_or("backend_error")});
      } else {
        rec.transferred = response.transformed_text;
      }
    } catch (const std::exception& e) {
      result.failures.push_back({rec.id, e.what()});
    }
  }
  result.records = std::move(records);
  return result;
}

double parse_judge_reply(std::string_view reply) {
  static const std::regex kNumber(R"([-+]?(?:\d+(?:\.\d+)?|\.\d+))");
  const std::string text(reply);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kNumber); it != std::sregex_iterator(); ++it) {
    const double value = std::strtod(it->str().c_str(), nullptr);
    if (std::isfinite(value) && value >= -1.0 && value <= 1.0) return value;
  }
  throw JudgeParseError("no score in [-1, 1] found in judge reply: " + text.substr(0, 120));
}

double judge(const std::string& text, llm::GenerationBackend& judge_backend,
             const prompting::PromptBuilder& prompts, const JudgeOptions& options) {
  const auto reply = judge_backend.generate(prompts.build_judge_prompt(text, options.reply_with_number));
  return parse_judge_reply(reply.text);
}

std::vector<std::optional<double>> Scorer::score_all(std::span<const std::string> texts,
                                                     std::size_t parallelism) {
  std::vector<std::optional<double>> out(texts.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < texts.size(); i = next++) {
      try {
        out[i] = score(texts[i]);
      } catch (const std::exception&) {
        out[i] = std::nullopt;
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(texts.size(), 1));
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  return out;
}

LocalScorer::LocalScorer(const sentiment::Lexicon& lexicon, std::string name)
    : lexicon_(lexicon), name_(std::move(name)) {}

double LocalScorer::score(const std::string& text) { return sentiment::analyze(text, lexicon_).compound; }

std::vector<std::optional<double>> LocalScorer::score_all(std::span<const std::string> texts, std::size_t) {
  const auto results = sentiment::analyze_batch(texts, lexicon_);
  std::vector<std::optional<double>> out;
  out.reserve(results.size());
  for (const auto& r : results) out.emplace_back(r.compound);
  return out;
}

JudgeScorer::JudgeScorer(std::string name, llm::GenerationBackend& backend, prompting::PromptBuilder prompts,
                         JudgeOptions options)
    : name_(std::move(name)), backend_(backend), prompts_(std::move(prompts)), options_(options) {}

double JudgeScorer::score(const std::string& text) { return judge(text, backend_, prompts_, options_); }

namespace {

// Sorting first makes the mean independent of record order, bit for bit.
double mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

EvalReport run_eval(std::span<const EvalRecord> records, std::span<Scorer* const> scorers,
                    std::size_t parallelism) {
  std::vector<std::string> originals;
  std::vector<std::string> transferred;
  for (const auto& r : records) {
    if (!r.transferred) throw EvalError("record '" + r.id + "' has no transferred text");
    originals.push_back(r.original);
    transferred.push_back(*r.transferred);
  }

  EvalReport report;
  for (Scorer* scorer : scorers) {
    const std::string name = scorer->name();
    if (report.per_scorer.contains(name)) throw EvalError("duplicate scorer name '" + name + "'");
    report.scorer_order.push_back(name);

    const auto orig_scores = scorer->score_all(originals, parallelism);
    const auto trans_scores = scorer->score_all(transferred, parallelism);

    ScorerSummary summary;
    std::vector<double> kept_orig;
    std::vector<double> kept_trans;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!orig_scores[i] || !trans_scores[i]) {
        ++summary.failures;
        continue;
      }
      kept_orig.push_back(*orig_scores[i]);
      kept_trans.push_back(*trans_scores[i]);
      report.per_record.push_back({records[i].id, name, *orig_scores[i], *trans_scores[i]});
    }
    summary.n = kept_orig.size();
    summary.mean_original = mean(std::move(kept_orig));
    summary.mean_transferred = mean(std::move(kept_trans));
    report.per_scorer.emplace(name, summary);
  }
  return report;
}

json EvalReport::to_json() const {
  json scorers = json::object();
  for (const auto& name : scorer_order) {
    const auto& s = per_scorer.at(name);
    scorers[name] = json{{"mean_original", s.mean_original},
                         {"mean_transferred", s.mean_transferred},
                         {"n", s.n},
                         {"failures", s.failures}};
  }
  json rows = json::array();
  for (const auto& r : per_record) {
    rows.push_back({{"id", r.id},
                    {"scorer", r.scorer},
                    {"score_original", r.score_original},
                    {"score_transferred", r.score_transferred}});
  }
  return {{"per_scorer", scorers}, {"per_record", rows}};
}

std::string EvalReport::to_table() const {
  std::size_t width = 6;
  for (const auto& name : scorer_order) width = std::max(width, name.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "Scorer" << " | " << std::right
      << std::setw(8) << "Original" << " | " << std::setw(11) << "Transferred" << " | " << std::setw(4)
      << "n" << '\n';
  out << std::string(width, '-') << "-+-" << std::string(8, '-') << "-+-" << std::string(11, '-') << "-+-"
      << std::string(4, '-') << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& name : scorer_order) {
    const auto& s = per_scorer.at(name);
    out << std::left << std::setw(static_cast<int>(width)) << name << " | " << std::right << std::setw(8)
        << s.mean_original << " | " << std::setw(11) << s.mean_transferred << " | " << std::setw(4) << s.n
        << '\n';
  }
  return out.str();
}

}  // namespace proxyllm::eval
