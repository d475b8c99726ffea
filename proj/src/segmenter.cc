#include "subtok/segmenter.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "subtok/char_ngram.h"
#include "subtok/error.h"

namespace subtok {

std::string_view to_string(SegmenterKind kind) {
  switch (kind) {
    case SegmenterKind::kMorf:
      return "morf";
    case SegmenterKind::kBpe:
      return "bpe";
    case SegmenterKind::kCharNgram:
      return "charn";
    case SegmenterKind::kWord:
      return "word";
  }
  return "?";
}

SegmenterKind parse_segmenter_kind(std::string_view name) {
  if (name == "morf") return SegmenterKind::kMorf;
  if (name == "bpe") return SegmenterKind::kBpe;
  if (name == "charn") return SegmenterKind::kCharNgram;
  if (name == "word") return SegmenterKind::kWord;
  throw Error("unknown segmenter '" + std::string(name) + "'");
}

SegmenterKind Segmenter::kind() const {
  return static_cast<SegmenterKind>(model_.index());
}

std::vector<std::string> Segmenter::split(std::string_view word) const {
  if (word.empty()) throw Error("cannot segment an empty word");
  struct Visitor {
    std::string_view word;
    std::vector<std::string> operator()(const MorfModel& m) const {
      return apply_morfessor(m, word);
    }
    std::vector<std::string> operator()(const BpeModel& m) const {
      return apply_bpe(m, word);
    }
    std::vector<std::string> operator()(const CharNgramRange& r) const {
      return char_ngrams(word, r.n_min, r.n_max);
    }
    std::vector<std::string> operator()(const WholeWord&) const {
      return {std::string(word)};
    }
  };
  return std::visit(Visitor{word}, model_);
}

Segmentation Segmenter::segment(std::string_view word,
                                bool include_word_token) const {
  Segmentation seg;
  seg.word = std::string(word);
  seg.subwords = split(word);
  if (include_word_token) {
    seg.subwords.emplace_back(word);
    seg.includes_word_token = true;
  }
  return seg;
}

void Segmenter::write(std::ostream& out) const {
  struct Visitor {
    std::ostream& out;
    void operator()(const MorfModel& m) const { write_morf(m, out); }
    void operator()(const BpeModel& m) const { write_bpe(m, out); }
    void operator()(const CharNgramRange& r) const {
      out << "#charn v1 " << r.n_min << ' ' << r.n_max << '\n';
    }
    void operator()(const WholeWord&) const { out << "#word v1\n"; }
  };
  std::visit(Visitor{out}, model_);
}

Segmenter Segmenter::read(SegmenterKind kind, std::istream& in) {
  switch (kind) {
    case SegmenterKind::kMorf:
      return Segmenter(read_morf(in));
    case SegmenterKind::kBpe:
      return Segmenter(read_bpe(in));
    case SegmenterKind::kCharNgram: {
      std::string tag, version;
      CharNgramRange r;
      if (!(in >> tag >> version >> r.n_min >> r.n_max) || tag != "#charn" ||
          version != "v1" || r.n_min < 1 || r.n_max < r.n_min) {
        throw FormatError("expected '#charn v1 <min> <max>'", 1);
      }
      return Segmenter(r);
    }
    case SegmenterKind::kWord: {
      std::string line;
      if (!std::getline(in, line) || line != "#word v1") {
        throw FormatError("expected '#word v1'", 1);
      }
      return Segmenter(WholeWord{});
    }
  }
  throw Error("unknown segmenter kind");
}

void Segmenter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write(out);
  if (!out) throw IoError("write failed for " + path.string());
}

Segmenter Segmenter::load(SegmenterKind kind,
                          const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read(kind, in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string SubwordVocab::key(KeySpace space, std::string_view text) {
  std::string k;
  k.reserve(text.size() + 1);
  k.push_back(static_cast<char>(space));
  k.append(text);
  return k;
}

SubwordId SubwordVocab::add(KeySpace space, std::string_view text) {
  const auto next = static_cast<SubwordId>(keys_.size());
  auto [it, inserted] = index_.try_emplace(key(space, text), next);
  if (inserted) keys_.emplace_back(space, std::string(text));
  return it->second;
}

SubwordId SubwordVocab::id(KeySpace space, std::string_view text) const {
  auto it = index_.find(key(space, text));
  return it == index_.end() ? kNoSubword : it->second;
}

std::vector<SubwordId> SubwordVocab::lookup(const Segmentation& seg) const {
  std::vector<SubwordId> ids;
  ids.reserve(seg.subwords.size());
  const std::size_t n = seg.subword_count();
  for (std::size_t i = 0; i < seg.subwords.size(); ++i) {
    ids.push_back(id(i < n ? KeySpace::kSubword : KeySpace::kWordToken,
                     seg.subwords[i]));
  }
  return ids;
}

void SubwordVocab::write_tsv(std::ostream& out) const {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    out << (keys_[i].first == KeySpace::kSubword ? 's' : 'w') << '\t'
        << keys_[i].second << '\t' << i << '\n';
  }
}

SubwordVocab SubwordVocab::read_tsv(std::istream& in) {
  SubwordVocab v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.rfind('\t');
    if (t1 != 1 || t2 == t1 || (line[0] != 's' && line[0] != 'w')) {
      throw FormatError("expected space<TAB>text<TAB>id", line_no);
    }
    const KeySpace space =
        line[0] == 's' ? KeySpace::kSubword : KeySpace::kWordToken;
    std::size_t id;
    try {
      id = std::stoull(line.substr(t2 + 1));
    } catch (const std::logic_error&) {
      throw FormatError("bad subword id", line_no);
    }
    if (id != v.size() || v.add(space, line.substr(2, t2 - 2)) !=
                              static_cast<SubwordId>(id)) {
      throw FormatError("non-contiguous or duplicate subword id", line_no);
    }
  }
  return v;
}

SubwordVocab build_subword_vocab(const Vocab& vocab, const Segmenter& segmenter,
                                 bool include_word_token) {
  if (vocab.empty()) throw EmptyVocabError("vocabulary is empty");
  SubwordVocab sv;
  for (const std::string& w : vocab.words()) {
    const Segmentation seg = segmenter.segment(w, include_word_token);
    const std::size_t n = seg.subword_count();
    for (std::size_t i = 0; i < seg.subwords.size(); ++i) {
      sv.add(i < n ? KeySpace::kSubword : KeySpace::kWordToken,
             seg.subwords[i]);
    }
  }
  return sv;
}

}  // namespace subtok
