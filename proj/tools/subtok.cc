// subtok: command-line front end for the subword embedding library.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subtok/corpus.h"
#include "subtok/error.h"
#include "subtok/experiment.h"
#include "subtok/key_values.h"
#include "subtok/model.h"
#include "subtok/probe.h"
#include "subtok/segmenter.h"
#include "subtok/synthetic.h"
#include "subtok/train.h"

namespace fs = std::filesystem;
using namespace subtok;

namespace {

// Relative artifact paths resolve against $SUBTOK_DATA_DIR when it is set.
fs::path artifact(const std::string& p) {
  const fs::path path(p);
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv("SUBTOK_DATA_DIR"); root && *root) {
    return fs::path(root) / path;
  }
  return path;
}

// Writes to a sibling temporary and renames into place on commit; the
// temporary is removed if the command fails first.
class PendingOutput {
 public:
  explicit PendingOutput(fs::path target)
      : target_(std::move(target)), tmp_(target_) {
    tmp_ += ".partial";
    if (target_.has_parent_path()) fs::create_directories(target_.parent_path());
    fs::remove_all(tmp_);
  }
  PendingOutput(const PendingOutput&) = delete;
  PendingOutput& operator=(const PendingOutput&) = delete;
  ~PendingOutput() {
    std::error_code ec;
    if (!committed_) fs::remove_all(tmp_, ec);
  }

  const fs::path& path() const { return tmp_; }

  void commit() {
    fs::remove_all(target_);
    fs::rename(tmp_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path tmp_;
  bool committed_ = false;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

// Writes `write(stream)` either to stdout or atomically to a file.
template <typename Fn>
void emit(const std::string& out_path, Fn&& write) {
  if (out_path.empty() || out_path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  PendingOutput pending(artifact(out_path));
  std::ofstream out = open_out(pending.path());
  write(out);
  close_out(out, pending.path());
  pending.commit();
}

struct ModelFlags {
  std::string seg = "charn";
  std::size_t merges = 10'000;
  int ngram_min = 3;
  int ngram_max = 6;
  int morf_iters = 10;
  bool word_token = false;
  bool position = false;
  int dim = 50;
  int max_positions = 20;
  std::uint64_t seed = 1;

  void add_segmenter(CLI::App* app) {
    app->add_option("--seg,--segmenter", seg, "Segmentation method")
        ->check(CLI::IsMember({"morf", "bpe", "charn", "word"}))
        ->capture_default_str();
    app->add_option("--merges", merges, "BPE merge operations")->capture_default_str();
    app->add_option("--ngram-min", ngram_min, "Shortest character n-gram")->capture_default_str();
    app->add_option("--ngram-max", ngram_max, "Longest character n-gram")->capture_default_str();
    app->add_option("--morf-iters", morf_iters, "Morfessor-lite passes")->capture_default_str();
  }

  void add_all(CLI::App* app) {
    add_segmenter(app);
    app->add_flag("--word-token,!--no-word-token", word_token,
                  "Add the whole word as an extra subword");
    app->add_flag("--position,!--no-position", position,
                  "Add position embeddings to subwords");
    app->add_option("--dim", dim, "Embedding dimension")->capture_default_str();
    app->add_option("--max-positions", max_positions, "Position table size")
        ->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
  }

  ModelConfig config() const {
    ModelConfig c;
    c.segmenter = parse_segmenter_kind(seg);
    c.merges = merges;
    c.ngram_min = ngram_min;
    c.ngram_max = ngram_max;
    c.morf_iters = morf_iters;
    c.word_token = word_token;
    c.position = position;
    c.dim = dim;
    c.max_positions = max_positions;
    c.seed = seed;
    c.validate();
    return c;
  }
};

struct TrainFlags {
  int window = 5;
  int negatives = 5;
  double lr = 0.025;
  double subsample = 1e-5;
  int threads = 1;
  // 0 selects the value of the data group implied by the corpus size.
  int epochs = 0;
  int batch_size = 0;
  int min_count = 0;

  void add(CLI::App* app, bool group_overrides) {
    app->add_option("--window", window, "Maximum context radius")->capture_default_str();
    app->add_option("--negatives", negatives, "Negative samples per pair")
        ->capture_default_str();
    app->add_option("--lr", lr, "Initial learning rate")->capture_default_str();
    app->add_option("--subsample", subsample, "Subsampling threshold")
        ->capture_default_str();
    app->add_option("--threads", threads, "Training threads")->capture_default_str();
    if (group_overrides) {
      app->add_option("--epochs", epochs, "Epochs (default: from data group)");
      app->add_option("--batch-size", batch_size, "Pairs per update (default: from data group)");
      app->add_option("--min-count", min_count, "Vocabulary cutoff (default: from data group)");
    }
  }

  TrainConfig config(const DataGroup& group, std::uint64_t seed) const {
    TrainConfig t = TrainConfig::for_group(group);
    t.window = window;
    t.negatives = negatives;
    t.lr_start = lr;
    t.subsample_t = subsample;
    t.threads = threads;
    t.seed = seed;
    if (epochs > 0) t.epochs = epochs;
    if (batch_size > 0) t.batch_size = batch_size;
    if (min_count > 0) t.min_count = min_count;
    t.validate();
    return t;
  }
};

struct TaskFlags {
  std::string task = "fget";
  std::string data, train, dev, test;
  std::uint64_t split_seed = 13;
  int epochs = 100;
  double lr = 0.05;
  int patience = 5;
  bool fine_tune = false;
  int tag_window = 1;

  void add(CLI::App* app) {
    app->add_option("--task", task, "Probe task")
        ->check(CLI::IsMember({"fget", "mtag", "ner"}))
        ->capture_default_str();
    app->add_option("--data", data, "Task file, split 60/20/20 by --split-seed");
    app->add_option("--train", train, "Task training file");
    app->add_option("--dev", dev, "Task development file");
    app->add_option("--test", test, "Task test file");
    app->add_option("--split-seed", split_seed, "Seed of the 60/20/20 split")
        ->capture_default_str();
    app->add_option("--probe-epochs", epochs, "Maximum probe epochs")->capture_default_str();
    app->add_option("--probe-lr", lr, "Probe learning rate")->capture_default_str();
    app->add_option("--patience", patience, "Early-stopping patience")->capture_default_str();
    app->add_flag("--fine-tune", fine_tune, "Update embeddings while probing");
    app->add_option("--tag-window", tag_window, "Tagger context radius")
        ->capture_default_str();
  }

  void check() const {
    const bool split_files = !train.empty() || !dev.empty() || !test.empty();
    if (data.empty() == !split_files) {
      throw Error("give either --data or all of --train/--dev/--test");
    }
    if (split_files && (train.empty() || dev.empty() || test.empty())) {
      throw Error("--train, --dev and --test must be given together");
    }
  }

  ProbeOptions options(std::uint64_t seed) const {
    ProbeOptions p;
    p.epochs = epochs;
    p.lr = lr;
    p.patience = patience;
    p.fine_tune = fine_tune;
    p.seed = seed;
    return p;
  }
};

Corpus load_corpus(const std::string& path, std::size_t we_tokens) {
  if (path.empty()) throw Error("--corpus is required");
  Corpus corpus = read_corpus(path);
  if (we_tokens > 0) corpus = sample_tokens(corpus, we_tokens);
  if (corpus.token_count == 0) throw EmptyVocabError("corpus has no tokens");
  return corpus;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

void run_probe_command(const std::string& model_dir, const TaskFlags& task,
                       std::size_t instances, std::uint64_t seed,
                       const std::string& out_path) {
  task.check();
  EmbeddingModel model = EmbeddingModel::load(artifact(model_dir));
  const TaskKind kind = parse_task_kind(task.task);
  const ProbeOptions opts = task.options(seed);
  const std::string label = model.config().label();
  const std::size_t limit = instances > 0 ? instances : SIZE_MAX;

  std::ostringstream rows;
  if (kind == TaskKind::kFget) {
    MentionDataset data;
    if (!task.data.empty()) {
      data = load_mentions(fs::path(task.data), task.split_seed);
    } else {
      auto tr = open_in(task.train), dv = open_in(task.dev), te = open_in(task.test);
      data = make_mention_dataset(read_mention_lines(tr), read_mention_lines(dv),
                                  read_mention_lines(te));
    }
    data = limit_train(std::move(data), limit, seed);
    const SoftmaxProbe probe = train_mention_probe(model, data, opts);
    for (Split s : {Split::kDev, Split::kTest}) {
      write_metric_row(rows, "fget", label, to_string(s), "accuracy",
                       eval_mention_accuracy(probe, model, data, s));
    }
  } else {
    TagDataset data;
    if (!task.data.empty()) {
      data = load_conll(fs::path(task.data), task.split_seed);
    } else {
      auto tr = open_in(task.train), dv = open_in(task.dev), te = open_in(task.test);
      data = make_tag_dataset(read_conll_sentences(tr), read_conll_sentences(dv),
                              read_conll_sentences(te));
    }
    data = limit_train(std::move(data), limit, seed);
    const SoftmaxProbe probe = train_tagger_probe(model, data, task.tag_window, opts);
    for (Split s : {Split::kDev, Split::kTest}) {
      if (kind == TaskKind::kMtag) {
        write_metric_row(rows, "mtag", label, to_string(s), "per_label_accuracy",
                         eval_tag_accuracy(probe, model, data, s));
      } else {
        const SpanScores f = eval_span_f1(probe, model, data, s);
        write_metric_row(rows, "ner", label, to_string(s), "precision", f.precision);
        write_metric_row(rows, "ner", label, to_string(s), "recall", f.recall);
        write_metric_row(rows, "ner", label, to_string(s), "f1", f.f1);
      }
    }
  }
  emit(out_path, [&](std::ostream& out) { out << rows.str(); });
}

// Splices `--key=value` pairs from a subcommand's --config file in front of
// its own arguments, so explicit flags (parsed later) win.
std::vector<std::string> expand_config(int argc, char** argv,
                                       const std::vector<std::string>& commands) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::size_t sub = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (std::find(commands.begin(), commands.end(), args[i]) != commands.end()) {
      sub = i;
      break;
    }
  }
  if (sub == args.size()) return args;
  std::optional<std::string> file;
  std::vector<std::string> rest;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!file) return args;
  std::vector<std::string> out(args.begin(), args.begin() + sub + 1);
  for (const auto& [key, value] : load_key_values(*file)) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    out.push_back(flag + "=" + value);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Subword-informed word embeddings and data-scarcity experiments"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // vocab
  std::string corpus_path, out_path;
  std::size_t we_tokens = 0;
  int min_count = 1;
  auto* vocab_cmd = app.add_subcommand("vocab", "Count word types of a corpus");
  vocab_cmd->add_option("--corpus", corpus_path, "Corpus, one sentence per line")->required();
  vocab_cmd->add_option("--min-count", min_count, "Frequency cutoff")->capture_default_str();
  vocab_cmd->add_option("--we-tokens", we_tokens, "Use only the first N tokens");
  vocab_cmd->add_option("--out", out_path, "Output TSV (default stdout)");
  vocab_cmd->callback([&] {
    const Corpus corpus = load_corpus(corpus_path, we_tokens);
    const Vocab vocab = Vocab::build(corpus, min_count);
    if (vocab.size() == 0) throw EmptyVocabError("no word reaches --min-count");
    emit(out_path, [&](std::ostream& out) { vocab.write_tsv(out); });
  });

  // segment-learn
  ModelFlags model_flags;
  auto* seg_learn = app.add_subcommand("segment-learn", "Learn a segmentation model");
  seg_learn->add_option("--corpus", corpus_path, "Corpus, one sentence per line")->required();
  seg_learn->add_option("--min-count", min_count, "Frequency cutoff")->capture_default_str();
  seg_learn->add_option("--we-tokens", we_tokens, "Use only the first N tokens");
  seg_learn->add_option("--out", out_path, "Output model file")->required();
  model_flags.add_segmenter(seg_learn);
  seg_learn->callback([&] {
    const Corpus corpus = load_corpus(corpus_path, we_tokens);
    const Vocab vocab = Vocab::build(corpus, min_count);
    if (vocab.size() == 0) throw EmptyVocabError("no word reaches --min-count");
    const Segmenter seg = make_segmenter(model_flags.config(), vocab);
    emit(out_path, [&](std::ostream& out) { seg.write(out); });
  });

  // segment-apply
  std::string seg_model, input_path;
  bool with_word = false;
  auto* seg_apply = app.add_subcommand("segment-apply", "Segment words with a learned model");
  seg_apply->add_option("--model", seg_model, "Segmentation model file");
  seg_apply->add_option("--input", input_path, "Whitespace-separated words (default stdin)");
  seg_apply->add_option("--out", out_path, "Output TSV (default stdout)");
  seg_apply->add_flag("--word-token", with_word, "Append the whole-word element");
  seg_apply->add_option("--seg,--segmenter", model_flags.seg, "Segmentation method")
      ->check(CLI::IsMember({"morf", "bpe", "charn", "word"}))
      ->capture_default_str();
  seg_apply->add_option("--ngram-min", model_flags.ngram_min, "Shortest n-gram (no --model)");
  seg_apply->add_option("--ngram-max", model_flags.ngram_max, "Longest n-gram (no --model)");
  seg_apply->callback([&] {
    const SegmenterKind kind = parse_segmenter_kind(model_flags.seg);
    std::optional<Segmenter> seg;
    if (!seg_model.empty()) {
      seg.emplace(Segmenter::load(kind, artifact(seg_model)));
    } else if (kind == SegmenterKind::kCharNgram) {
      seg.emplace(CharNgramRange{model_flags.ngram_min, model_flags.ngram_max});
    } else if (kind == SegmenterKind::kWord) {
      seg.emplace(WholeWord{});
    } else {
      throw Error("--model is required for --seg " + model_flags.seg);
    }
    std::ifstream file;
    if (!input_path.empty()) file = open_in(input_path);
    std::istream& in = input_path.empty() ? std::cin : file;
    std::ostringstream text;
    text << in.rdbuf();
    const Corpus words = tokenize_corpus(text.str());
    emit(out_path, [&](std::ostream& out) {
      for (const Sentence& s : words.sentences) {
        for (const std::string& w : s) {
          const Segmentation result = seg->segment(w, with_word);
          out << w << '\t';
          for (std::size_t i = 0; i < result.subwords.size(); ++i) {
            out << (i ? " " : "") << result.subwords[i];
          }
          out << '\n';
        }
      }
    });
  });

  // train
  TrainFlags train_flags;
  std::string trace_path;
  auto* train_cmd = app.add_subcommand("train", "Train subword-informed embeddings");
  train_cmd->add_option("--corpus", corpus_path, "Corpus, one sentence per line")->required();
  train_cmd->add_option("--we-tokens", we_tokens, "Use only the first N tokens");
  train_cmd->add_option("--out", out_path, "Output model directory")->required();
  train_cmd->add_option("--trace", trace_path, "Write the loss trace TSV here");
  model_flags.add_all(train_cmd);
  train_flags.add(train_cmd, true);
  train_cmd->callback([&] {
    const ModelConfig config = model_flags.config();
    const Corpus corpus = load_corpus(corpus_path, we_tokens);
    const DataGroup group = data_group_for(corpus.token_count);
    const TrainConfig tc = train_flags.config(group, config.seed);
    Vocab vocab = Vocab::build(corpus, tc.min_count);
    if (vocab.size() == 0) throw EmptyVocabError("no word reaches the min count");
    Segmenter seg = make_segmenter(config, vocab);
    EmbeddingModel model = EmbeddingModel::create(config, std::move(vocab), std::move(seg));
    const TrainResult result = train(corpus, model, tc);
    PendingOutput pending(artifact(out_path));
    model.save(pending.path());
    if (!trace_path.empty()) {
      emit(trace_path, [&](std::ostream& out) { write_trace(result.trace, out); });
    }
    pending.commit();
    std::cerr << config.label() << ": " << model.vocab().size() << " words, "
              << model.subwords().size() << " subword rows, " << result.pairs
              << " pairs, group " << to_string(group.label) << '\n';
  });

  // export
  std::string model_dir;
  auto* export_cmd = app.add_subcommand("export", "Write word vectors in text format");
  export_cmd->add_option("--model", model_dir, "Model directory")->required();
  export_cmd->add_option("--out", out_path, "Output file (default stdout)");
  export_cmd->callback([&] {
    const EmbeddingModel model = EmbeddingModel::load(artifact(model_dir));
    emit(out_path, [&](std::ostream& out) { export_vectors(model, out); });
  });

  // probe
  TaskFlags task_flags;
  std::size_t task_instances = 0;
  std::uint64_t probe_seed = 1;
  auto* probe_cmd = app.add_subcommand("probe", "Train and evaluate a downstream probe");
  probe_cmd->add_option("--model", model_dir, "Model directory")->required();
  probe_cmd->add_option("--task-instances", task_instances, "Training instances to keep");
  probe_cmd->add_option("--seed", probe_seed, "Probe seed")->capture_default_str();
  probe_cmd->add_option("--out", out_path, "Metrics TSV (default stdout)");
  task_flags.add(probe_cmd);
  probe_cmd->callback([&] {
    run_probe_command(model_dir, task_flags, task_instances, probe_seed, out_path);
  });

  // simulate
  std::vector<std::string> config_labels;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> we_grid, task_grid;
  int sim_dim = 50;
  auto* sim = app.add_subcommand("simulate", "Run the data-scarcity grid");
  sim->add_option("--corpus", corpus_path, "Corpus, one sentence per line")->required();
  sim->add_option("--configs", config_labels, "Config labels, e.g. charn/w+/p-/add w2v ft")
      ->delimiter(',');
  sim->add_option("--seeds", seeds, "Seeds")->delimiter(',');
  sim->add_option("--we-tokens", we_grid, "WE data sizes in tokens")->delimiter(',');
  sim->add_option("--task-instances", task_grid, "Task training sizes")->delimiter(',');
  sim->add_option("--dim", sim_dim, "Embedding dimension")->capture_default_str();
  sim->add_option("--out", out_path, "Output directory")->required();
  for (auto* o : sim->get_options()) {
    if (o->get_items_expected_max() > 1) o->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  }
  task_flags.add(sim);
  train_flags.add(sim, false);
  sim->callback([&] {
    task_flags.check();
    ExperimentSpec spec;
    spec.corpus = corpus_path;
    if (!we_grid.empty()) spec.we_tokens = we_grid;
    spec.task_instances = task_grid;
    if (config_labels.empty()) config_labels = {"w2v", "charn/w+/p-/add"};
    for (const std::string& l : config_labels) {
      ModelConfig c = ModelConfig::from_label(l);
      c.dim = sim_dim;
      spec.configs.push_back(c);
    }
    if (!seeds.empty()) spec.seeds = seeds;
    spec.output_dir = artifact(out_path);
    spec.task = parse_task_kind(task_flags.task);
    if (!task_flags.data.empty()) {
      spec.task_data = task_flags.data;
    } else {
      spec.task_train = task_flags.train;
      spec.task_dev = task_flags.dev;
      spec.task_test = task_flags.test;
    }
    spec.split_seed = task_flags.split_seed;
    spec.train = train_flags.config(data_group_for(1), 1);
    spec.probe = task_flags.options(1);
    spec.tag_window = task_flags.tag_window;
    const SimulationSummary s = run_simulation(spec, &std::cerr);
    std::cerr << s.computed << " cells computed, " << s.skipped << " skipped, "
              << s.failed << " failed\n";
  });

  // report
  std::string metrics_path;
  auto* report = app.add_subcommand("report", "Aggregate simulation metrics over seeds");
  report->add_option("--metrics", metrics_path, "metrics.tsv from simulate")->required();
  report->add_option("--out", out_path, "Summary TSV (default stdout)");
  report->callback([&] {
    const auto rows = load_metric_rows(artifact(metrics_path));
    if (rows.empty()) throw Error("metrics table is empty");
    const auto summary = summarize(rows);
    emit(out_path, [&](std::ostream& out) { write_summary(summary, out); });
  });

  // synth
  SyntheticOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Generate the synthetic morphology benchmark");
  synth->add_option("--out", out_path, "Output directory")->required();
  synth->add_option("--seed", synth_opts.seed, "Generator seed")->capture_default_str();
  synth->add_option("--corpus-tokens", synth_opts.corpus_tokens, "Corpus size")
      ->capture_default_str();
  synth->add_option("--train-mentions", synth_opts.train_mentions, "Training mentions")
      ->capture_default_str();
  synth->add_option("--tag-sentences", synth_opts.tag_sentences, "Tagged sentences")
      ->capture_default_str();
  synth->add_option("--classes", synth_opts.classes, "Mention classes")->capture_default_str();
  synth->add_option("--suffixes-per-class", synth_opts.suffixes_per_class,
                    "Suffixes marking each class")
      ->capture_default_str();
  synth->add_flag("--heldout-suffixes", synth_opts.heldout_suffixes,
                  "Reserve one suffix per class for test mentions");
  synth->add_option("--marker-rate", synth_opts.marker_rate, "Share of class marker tokens")
      ->capture_default_str();
  synth->add_option("--class-purity", synth_opts.class_purity,
                    "Probability a content word matches its sentence class")
      ->capture_default_str();
  synth->callback([&] {
    const SyntheticBenchmark b = make_synthetic_benchmark(synth_opts);
    PendingOutput pending(artifact(out_path));
    fs::create_directories(pending.path());
    auto write_file = [&](const std::string& name, auto&& fn) {
      const fs::path p = pending.path() / name;
      std::ofstream out = open_out(p);
      fn(out);
      close_out(out, p);
    };
    write_file("corpus.txt", [&](std::ostream& out) {
      for (const Sentence& s : b.corpus.sentences) {
        for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
        out << '\n';
      }
    });
    for (Split s : {Split::kTrain, Split::kDev, Split::kTest}) {
      const std::string name(to_string(s));
      write_file("mentions." + name + ".tsv", [&](std::ostream& out) {
        std::vector<Mention> part;
        for (std::size_t i : b.mentions.split.of(s)) part.push_back(b.mentions.examples[i]);
        write_mentions(part, out);
      });
      write_file("tags." + name + ".conll", [&](std::ostream& out) {
        std::vector<TaggedSentence> part;
        for (std::size_t i : b.tags.split.of(s)) part.push_back(b.tags.sentences[i]);
        write_conll(part, out);
      });
    }
    pending.commit();
  });

  const std::vector<std::string> commands = {"vocab",  "segment-learn", "segment-apply",
                                             "train",  "export",        "probe",
                                             "simulate", "report",      "synth"};
  std::vector<std::string> args = expand_config(argc, argv, commands);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const subtok::Error& e) {
    std::cerr << "subtok: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "subtok: internal error: " << e.what() << '\n';
    return 2;
  } catch (...) {
    std::cerr << "subtok: internal error\n";
    return 2;
  }
}
