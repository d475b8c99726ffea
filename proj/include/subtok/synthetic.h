#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subtok/corpus.h"
#include "subtok/probe.h"

namespace subtok {

// Generator for a toy agglutinative language. Every content word is a stem
// followed by one of its class's suffixes, so a word's class is a function of
// its suffix alone. Sentences are topical: one class per sentence plus class
// marker words, which gives skip-gram a distributional signal that agrees
// with the morphology.
struct SyntheticOptions {
  int classes = 4;
  int suffixes_per_class = 2;
  int suffix_length = 3;
  int corpus_stems = 300;
  int heldout_stems = 120;
  std::size_t corpus_tokens = 50'000;
  std::size_t train_mentions = 2'000;
  std::size_t dev_mentions = 400;
  std::size_t test_mentions = 1'000;
  std::size_t tag_sentences = 600;
  // Reserve the last suffix of every class for test mentions. It still
  // occurs in the corpus, so a model can only transfer the label through
  // what it learned about that suffix from context.
  bool heldout_suffixes = false;
  // Share of sentence tokens that are class markers.
  double marker_rate = 0.3;
  // Probability that a content word takes its sentence's class rather than
  // a uniformly random one.
  double class_purity = 1.0;
  std::uint64_t seed = 2024;
};

struct SyntheticLanguage {
  std::vector<std::vector<std::string>> suffixes;  // per class
  std::vector<std::vector<std::string>> markers;   // per class
  std::vector<std::string> function_words;
  std::vector<std::string> corpus_stems;
  std::vector<std::string> heldout_stems;  // never appear in the corpus
};

struct SyntheticBenchmark {
  SyntheticLanguage language;
  Corpus corpus;
  // Train/dev mentions use corpus stems; test mentions use held-out stems
  // only, so every test word is out of vocabulary.
  MentionDataset mentions;
  // Per-token tags: `Class=<c>` for content words (a function of the
  // suffix), `Func` for marker and function words. Test sentences use
  // held-out stems.
  TagDataset tags;
};

std::string class_label(int c);

SyntheticBenchmark make_synthetic_benchmark(const SyntheticOptions& options);

}  // namespace subtok
