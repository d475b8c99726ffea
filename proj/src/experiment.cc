#include "subtok/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "subtok/error.h"
#include "subtok/random.h"

namespace subtok {

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::kFget:
      return "fget";
    case TaskKind::kMtag:
      return "mtag";
    case TaskKind::kNer:
      return "ner";
  }
  return "?";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "fget") return TaskKind::kFget;
  if (name == "mtag") return TaskKind::kMtag;
  if (name == "ner") return TaskKind::kNer;
  throw Error("unknown task '" + std::string(name) + "'");
}

std::vector<std::size_t> ExperimentSpec::effective_task_grid() const {
  if (!task_instances.empty()) return task_instances;
  return task == TaskKind::kFget ? kDefaultMentionGrid : kDefaultSentenceGrid;
}

void ExperimentSpec::validate() const {
  if (configs.empty()) throw Error("experiment needs at least one config");
  if (seeds.empty()) throw Error("experiment needs at least one seed");
  for (std::size_t n : we_tokens) {
    if (n == 0) throw Error("WE data points must be positive");
  }
  for (std::size_t n : effective_task_grid()) {
    if (n == 0) throw Error("task data points must be positive");
  }
  const bool explicit_splits = task_train && task_dev && task_test;
  if (!task_data && !explicit_splits) {
    throw Error("experiment needs task data (one file or train/dev/test files)");
  }
  for (const ModelConfig& c : configs) c.validate();
}

void write_metric_header(std::ostream& out) {
  out << "we_tokens\ttask_instances\tconfig\tseed\tgroup\tbatch_size\tepochs\t"
         "min_count\ttask\tmetric\tvalue\tstatus\n";
}

void write_metric_row(std::ostream& out, const MetricRow& r) {
  char value[48];
  if (std::isfinite(r.value)) {
    std::snprintf(value, sizeof value, "%.6f", r.value);
  } else {
    std::snprintf(value, sizeof value, "nan");
  }
  out << r.we_tokens << '\t' << r.task_instances << '\t' << r.config << '\t'
      << r.seed << '\t' << r.group << '\t' << r.batch_size << '\t' << r.epochs
      << '\t' << r.min_count << '\t' << r.task << '\t' << r.metric << '\t'
      << value << '\t' << r.status << '\n';
}

std::vector<MetricRow> read_metric_rows(std::istream& in) {
  std::vector<MetricRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("we_tokens\t", 0) == 0) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (true) {
      const auto tab = line.find('\t', pos);
      f.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (f.size() != 12) throw FormatError("expected 12 metric columns", line_no);
    MetricRow r;
    try {
      r.we_tokens = std::stoull(f[0]);
      r.task_instances = std::stoull(f[1]);
      r.config = f[2];
      r.seed = std::stoull(f[3]);
      r.group = f[4];
      r.batch_size = std::stoi(f[5]);
      r.epochs = std::stoi(f[6]);
      r.min_count = std::stoi(f[7]);
      r.task = f[8];
      r.metric = f[9];
      r.value = f[10] == "nan" ? NAN : std::stod(f[10]);
      r.status = f[11];
    } catch (const std::logic_error&) {
      throw FormatError("bad numeric field in metrics row", line_no);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<MetricRow> load_metric_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_metric_rows(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

using CellKey = std::tuple<std::size_t, std::size_t, std::string, std::uint64_t>;

struct TaskData {
  std::optional<MentionDataset> mentions;
  std::optional<TagDataset> tags;
};

TaskData load_task_data(const ExperimentSpec& spec) {
  TaskData d;
  auto open = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    return in;
  };
  if (spec.task == TaskKind::kFget) {
    if (spec.task_data) {
      d.mentions = load_mentions(*spec.task_data, spec.split_seed);
    } else {
      auto tr = open(*spec.task_train), dv = open(*spec.task_dev), te = open(*spec.task_test);
      d.mentions = make_mention_dataset(read_mention_lines(tr), read_mention_lines(dv),
                                        read_mention_lines(te));
    }
  } else {
    if (spec.task_data) {
      d.tags = load_conll(*spec.task_data, spec.split_seed);
    } else {
      auto tr = open(*spec.task_train), dv = open(*spec.task_dev), te = open(*spec.task_test);
      d.tags = make_tag_dataset(read_conll_sentences(tr), read_conll_sentences(dv),
                                read_conll_sentences(te));
    }
  }
  return d;
}

std::pair<std::string, double> run_probe(const ExperimentSpec& spec,
                                         EmbeddingModel& model,
                                         const TaskData& data, std::size_t n,
                                         std::uint64_t seed) {
  ProbeOptions opts = spec.probe;
  opts.seed = seed;
  switch (spec.task) {
    case TaskKind::kFget: {
      const auto d = limit_train(*data.mentions, n, seed);
      const SoftmaxProbe p = train_mention_probe(model, d, opts);
      return {"accuracy", eval_mention_accuracy(p, model, d, Split::kTest)};
    }
    case TaskKind::kMtag: {
      const auto d = limit_train(*data.tags, n, seed);
      const SoftmaxProbe p = train_tagger_probe(model, d, spec.tag_window, opts);
      return {"per_label_accuracy", eval_tag_accuracy(p, model, d, Split::kTest)};
    }
    case TaskKind::kNer: {
      const auto d = limit_train(*data.tags, n, seed);
      const SoftmaxProbe p = train_tagger_probe(model, d, spec.tag_window, opts);
      return {"f1", eval_span_f1(p, model, d, Split::kTest).f1};
    }
  }
  throw std::logic_error("unhandled task");
}

}  // namespace

SimulationSummary run_simulation(const ExperimentSpec& spec, std::ostream* log) {
  spec.validate();
  const std::filesystem::path metrics_path = spec.output_dir / "metrics.tsv";
  std::filesystem::create_directories(spec.output_dir);

  std::set<CellKey> done;
  const bool existed = std::filesystem::exists(metrics_path);
  if (existed) {
    for (const MetricRow& r : load_metric_rows(metrics_path)) {
      done.insert({r.we_tokens, r.task_instances, r.config, r.seed});
    }
  }

  const std::vector<std::size_t> task_grid = spec.effective_task_grid();
  SimulationSummary summary;
  std::vector<CellKey> pending;
  for (std::size_t we : spec.we_tokens) {
    for (const ModelConfig& c : spec.configs) {
      for (std::uint64_t seed : spec.seeds) {
        for (std::size_t n : task_grid) {
          CellKey key{we, n, c.label(), seed};
          if (done.count(key)) {
            ++summary.skipped;
          } else {
            pending.push_back(key);
          }
        }
      }
    }
  }
  if (pending.empty()) return summary;

  const Corpus corpus = read_corpus(spec.corpus);
  const std::size_t max_we = *std::max_element(spec.we_tokens.begin(), spec.we_tokens.end());
  if (corpus.token_count < max_we) {
    throw InsufficientDataError(max_we, corpus.token_count);
  }
  const TaskData data = load_task_data(spec);

  std::ofstream out(metrics_path, std::ios::app);
  if (!out) throw IoError("cannot write " + metrics_path.string());
  if (!existed) write_metric_header(out);

  for (std::size_t we : spec.we_tokens) {
    const Corpus sample = sample_tokens(corpus, we);
    const DataGroup group = data_group_for(we);
    for (const ModelConfig& base : spec.configs) {
      for (std::uint64_t seed : spec.seeds) {
        std::vector<std::size_t> sizes;
        for (std::size_t n : task_grid) {
          if (!done.count({we, n, base.label(), seed})) sizes.push_back(n);
        }
        if (sizes.empty()) continue;

        auto row_for = [&](std::size_t n) {
          MetricRow r;
          r.we_tokens = we;
          r.task_instances = n;
          r.config = base.label();
          r.seed = seed;
          r.group = std::string(to_string(group.label));
          r.batch_size = group.batch_size;
          r.epochs = group.epochs;
          r.min_count = group.min_count;
          r.task = std::string(to_string(spec.task));
          return r;
        };

        std::optional<EmbeddingModel> trained;
        std::string failure;
        try {
          ModelConfig config = base;
          config.seed = seed;
          Vocab vocab = Vocab::build(sample, group.min_count);
          Segmenter seg = make_segmenter(config, vocab);
          trained.emplace(EmbeddingModel::create(config, std::move(vocab), std::move(seg)));
          TrainConfig tc = spec.train;
          tc.epochs = group.epochs;
          tc.batch_size = group.batch_size;
          tc.min_count = group.min_count;
          tc.seed = seed;
          train(sample, *trained, tc);
        } catch (const std::exception& e) {
          failure = e.what();
        }

        for (std::size_t n : sizes) {
          MetricRow r = row_for(n);
          if (failure.empty()) {
            try {
              // Fine-tuning mutates the tables, so each cell probes a copy.
              EmbeddingModel model = *trained;
              auto [metric, value] = run_probe(spec, model, data, n, seed);
              r.metric = metric;
              r.value = value;
              r.status = "ok";
            } catch (const std::exception& e) {
              r.metric = "error";
              r.value = NAN;
              r.status = "failed";
              if (log) *log << "cell failed: " << e.what() << '\n';
            }
          } else {
            r.metric = "error";
            r.value = NAN;
            r.status = "failed";
            if (log) *log << "cell failed: " << failure << '\n';
          }
          write_metric_row(out, r);
          out.flush();
          ++summary.computed;
          if (r.status != "ok") ++summary.failed;
          if (log) {
            *log << r.config << " we=" << we << " n=" << n << " seed=" << seed
                 << " " << r.metric << "=" << r.value << '\n';
          }
        }
      }
    }
  }
  return summary;
}

std::vector<SummaryRow> summarize(const std::vector<MetricRow>& rows) {
  using Key = std::tuple<std::size_t, std::size_t, std::string, std::string>;
  struct Acc {
    std::vector<double> values;
    std::string metric;
    std::size_t failed = 0;
  };
  std::map<Key, Acc> groups;
  for (const MetricRow& r : rows) {
    Acc& a = groups[{r.we_tokens, r.task_instances, r.config, r.task}];
    if (r.status == "ok") {
      a.values.push_back(r.value);
      a.metric = r.metric;
    } else {
      ++a.failed;
    }
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, a] : groups) {
    SummaryRow s{std::get<0>(key), std::get<1>(key), std::get<2>(key),
                 std::get<3>(key), a.metric.empty() ? "error" : a.metric,
                 NAN, 0.0, a.values.size(), a.failed};
    if (!a.values.empty()) {
      double sum = 0.0;
      for (double v : a.values) sum += v;
      s.mean = sum / static_cast<double>(a.values.size());
      if (a.values.size() > 1) {
        double ss = 0.0;
        for (double v : a.values) ss += (v - s.mean) * (v - s.mean);
        s.stdev = std::sqrt(ss / static_cast<double>(a.values.size() - 1));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "we_tokens\ttask_instances\tconfig\ttask\tmetric\tmean\tstdev\tn\tn_failed\n";
  char buf[64];
  for (const SummaryRow& r : rows) {
    out << r.we_tokens << '\t' << r.task_instances << '\t' << r.config << '\t'
        << r.task << '\t' << r.metric << '\t';
    if (std::isfinite(r.mean)) {
      std::snprintf(buf, sizeof buf, "%.6f\t%.6f", r.mean, r.stdev);
    } else {
      std::snprintf(buf, sizeof buf, "nan\tnan");
    }
    out << buf << '\t' << r.n << '\t' << r.n_failed << '\n';
  }
}

}  // namespace subtok
