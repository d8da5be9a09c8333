#include <benchmark/benchmark.h>

#include <fstream>
#include <string>
#include <vector>

#include "proxyllm/sentiment.hpp"

namespace {

using proxyllm::sentiment::Lexicon;

const Lexicon& lexicon() {
  static const Lexicon lex = [] {
    auto l = proxyllm::sentiment::load_lexicon_file(PROXYLLM_DATA_DIR "/vader_lexicon.txt");
    l.set_emoji_descriptions(
        proxyllm::sentiment::load_emoji_descriptions_file(PROXYLLM_DATA_DIR "/emoji_utf8_lexicon.txt"));
    return l;
  }();
  return lex;
}

std::vector<std::string> corpus(std::size_t n) {
  std::vector<std::string> base;
  std::ifstream in(PROXYLLM_TEST_DATA_DIR "/sentiment_corpus.txt");
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) base.push_back(line);
  }
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(base[i % base.size()]);
  return out;
}

void BM_AnalyzeBatchSerial(benchmark::State& state) {
  const auto texts = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(proxyllm::sentiment::analyze_batch_serial(texts, lexicon()));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AnalyzeBatchParallel(benchmark::State& state) {
  const auto texts = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(proxyllm::sentiment::analyze_batch(texts, lexicon()));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_AnalyzeBatchSerial)->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK(BM_AnalyzeBatchParallel)->Arg(64)->Arg(1024)->Arg(16384);

}  // namespace

BENCHMARK_MAIN();
