#include "subtok/synthetic.h"

#include <algorithm>
#include <set>

#include "subtok/error.h"
#include "subtok/random.h"

namespace subtok {
namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::string syllable(Rng& rng) {
  std::string s;
  s += kConsonants[rng.below(kConsonants.size())];
  s += kVowels[rng.below(kVowels.size())];
  return s;
}

std::string random_letters(Rng& rng, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    s += i % 2 == 0 ? kVowels[rng.below(kVowels.size())]
                    : kConsonants[rng.below(kConsonants.size())];
  }
  return s;
}

// Draws `n` strings from `make` that are not yet in `used`.
template <typename Make>
std::vector<std::string> distinct(Rng& rng, int n, std::set<std::string>& used,
                                  Make&& make) {
  std::vector<std::string> out;
  while (static_cast<int>(out.size()) < n) {
    std::string s = make(rng);
    if (used.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

// Zipf-like stem ranks so the corpus has a realistic frequency tail.
class StemSampler {
 public:
  explicit StemSampler(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
    sampler_ = DiscreteSampler(w);
  }
  std::size_t sample(Rng& rng) const { return sampler_.sample(rng); }

 private:
  DiscreteSampler sampler_;
};

struct Generator {
  const SyntheticLanguage& lang;
  const SyntheticOptions& opt;
  Rng& rng;

  // Suffixes are drawn from indices [first, last) of the class's list;
  // last == 0 means the whole list.
  std::string content_word(const std::vector<std::string>& stems,
                           const StemSampler* zipf, int c, std::size_t first = 0,
                           std::size_t last = 0) {
    const std::size_t s = zipf ? zipf->sample(rng) : rng.below(stems.size());
    const auto& sufs = lang.suffixes[c];
    if (last == 0) last = sufs.size();
    return stems[s] + sufs[first + rng.below(last - first)];
  }

  // Tokens with their tags.
  std::pair<Sentence, std::vector<std::string>> sentence(
      const std::vector<std::string>& stems, const StemSampler* zipf) {
    const int c = static_cast<int>(rng.below(lang.suffixes.size()));
    const auto len = 6 + rng.below(7);
    Sentence tokens;
    std::vector<std::string> tags;
    for (std::size_t i = 0; i < len; ++i) {
      const double u = rng.uniform();
      if (u < opt.marker_rate) {
        const auto& m = lang.markers[c];
        tokens.push_back(m[rng.below(m.size())]);
        tags.emplace_back("Func");
      } else if (u < opt.marker_rate + 0.15) {
        tokens.push_back(lang.function_words[rng.below(lang.function_words.size())]);
        tags.emplace_back("Func");
      } else {
        int wc = c;
        if (opt.class_purity < 1.0 && rng.uniform() >= opt.class_purity) {
          wc = static_cast<int>(rng.below(lang.suffixes.size()));
        }
        tokens.push_back(content_word(stems, zipf, wc));
        tags.push_back("Class=" + std::to_string(wc));
      }
    }
    return {std::move(tokens), std::move(tags)};
  }

  Mention mention(const std::vector<std::string>& stems, std::size_t first = 0,
                  std::size_t last = 0) {
    const int c = static_cast<int>(rng.below(lang.suffixes.size()));
    Mention m;
    const auto len = 1 + rng.below(2);
    for (std::size_t i = 0; i < len; ++i) {
      m.tokens.push_back(content_word(stems, nullptr, c, first, last));
    }
    m.label = class_label(c);
    return m;
  }
};

}  // namespace

std::string class_label(int c) { return "/type/c" + std::to_string(c); }

SyntheticBenchmark make_synthetic_benchmark(const SyntheticOptions& o) {
  if (o.classes < 2 || o.suffixes_per_class < 1 || o.suffix_length < 2 ||
      o.corpus_stems < 1 || o.heldout_stems < 1 ||
      (o.heldout_suffixes && o.suffixes_per_class < 2) || o.marker_rate < 0.0 ||
      o.marker_rate > 0.85 || o.class_purity < 0.0 || o.class_purity > 1.0) {
    throw Error("invalid synthetic benchmark options");
  }
  Rng rng(o.seed);
  SyntheticBenchmark b;
  SyntheticLanguage& lang = b.language;

  std::set<std::string> used;
  for (int c = 0; c < o.classes; ++c) {
    lang.suffixes.push_back(distinct(rng, o.suffixes_per_class, used, [&](Rng& r) {
      return random_letters(r, o.suffix_length);
    }));
  }
  for (int c = 0; c < o.classes; ++c) {
    lang.markers.push_back(distinct(rng, 2, used, [](Rng& r) {
      return std::string(1, kConsonants[r.below(kConsonants.size())]) + "'" +
             std::string(1, kVowels[r.below(kVowels.size())]);
    }));
  }
  lang.function_words = distinct(rng, 6, used, [](Rng& r) {
    return std::string(1, kVowels[r.below(kVowels.size())]) +
           std::string(1, kConsonants[r.below(kConsonants.size())]);
  });
  auto stem = [](Rng& r) {
    std::string s;
    const auto syllables = 2 + r.below(2);
    for (std::size_t i = 0; i < syllables; ++i) s += syllable(r);
    return s;
  };
  lang.corpus_stems = distinct(rng, o.corpus_stems, used, stem);
  lang.heldout_stems = distinct(rng, o.heldout_stems, used, stem);

  Generator gen{lang, o, rng};
  const StemSampler zipf(lang.corpus_stems.size());
  std::set<std::string> corpus_words;
  while (b.corpus.token_count < o.corpus_tokens) {
    auto [tokens, tags] = gen.sentence(lang.corpus_stems, &zipf);
    tokens.resize(std::min(tokens.size(), o.corpus_tokens - b.corpus.token_count));
    b.corpus.token_count += tokens.size();
    corpus_words.insert(tokens.begin(), tokens.end());
    b.corpus.sentences.push_back(std::move(tokens));
  }

  const std::size_t k = static_cast<std::size_t>(o.suffixes_per_class);
  const std::size_t seen_last = o.heldout_suffixes ? k - 1 : k;
  const std::size_t test_first = o.heldout_suffixes ? k - 1 : 0;
  std::vector<Mention> train, dev, test;
  for (std::size_t i = 0; i < o.train_mentions; ++i) {
    train.push_back(gen.mention(lang.corpus_stems, 0, seen_last));
  }
  for (std::size_t i = 0; i < o.dev_mentions; ++i) {
    dev.push_back(gen.mention(lang.corpus_stems, 0, seen_last));
  }
  // Held-out stem + suffix can in principle collide with a corpus word built
  // from a different split of the same letters; drop such mentions.
  while (test.size() < o.test_mentions) {
    Mention m = gen.mention(lang.heldout_stems, test_first, k);
    bool oov = true;
    for (const auto& t : m.tokens) oov = oov && !corpus_words.count(t);
    if (oov) test.push_back(std::move(m));
  }
  b.mentions = make_mention_dataset(std::move(train), std::move(dev), std::move(test));

  std::vector<TaggedSentence> tag_train, tag_dev, tag_test;
  const std::size_t n_train = o.tag_sentences * 6 / 10;
  const std::size_t n_dev = o.tag_sentences * 2 / 10;
  for (std::size_t i = 0; i < o.tag_sentences; ++i) {
    const bool is_test = i >= n_train + n_dev;
    auto [tokens, tags] =
        gen.sentence(is_test ? lang.heldout_stems : lang.corpus_stems,
                     is_test ? nullptr : &zipf);
    TaggedSentence s{std::move(tokens), std::move(tags)};
    (i < n_train ? tag_train : i < n_train + n_dev ? tag_dev : tag_test)
        .push_back(std::move(s));
  }
  b.tags = make_tag_dataset(std::move(tag_train), std::move(tag_dev), std::move(tag_test));
  return b;
}

}  // namespace subtok
