#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "auc.hpp"
#include "corpus.hpp"
#include "features.hpp"
#include "interests.hpp"
#include "kv_config.hpp"
#include "svm.hpp"
#include "util.hpp"

namespace crossact {

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LabeledInstance {
  std::string user_id;
  std::string item_id;
  bool positive = false;
  ActivityType task = ActivityType::Answer;

  friend bool operator==(const LabeledInstance&, const LabeledInstance&) = default;
};

struct SplitSizes {
  std::size_t pos = 5000;
  std::size_t neg = 5000;
};

struct DatasetSplit {
  std::vector<LabeledInstance> train;
  std::vector<LabeledInstance> test;
  TimeWindow train_window;
  TimeWindow test_window;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t pair_key(std::uint32_t user, std::uint32_t item) {
  return (std::uint64_t{user} << 32) | item;
}

inline std::vector<std::uint32_t> user_indices(const Corpus& corpus,
                                               std::span<const std::string> users) {
  std::vector<std::uint32_t> out;
  for (const auto& u : users)
    if (auto idx = corpus.user_index(u)) out.push_back(*idx);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Distinct (user, item) pairs of the task activity anywhere in the corpus.
class TaskPairs {
 public:
  TaskPairs(const Corpus& corpus, ActivityType task) {
    for (const auto& r : corpus.refs())
      if (r.activity == task) pairs_.insert(detail::pair_key(r.user, r.item));
  }
  bool contains(std::uint32_t user, std::uint32_t item) const {
    return pairs_.count(detail::pair_key(user, item)) != 0;
  }

 private:
  std::unordered_set<std::uint64_t> pairs_;
};

/// n distinct positive pairs drawn uniformly without replacement from the
/// base users' task activities inside the window. Output is sorted by
/// (user, item).
inline std::vector<LabeledInstance> sample_positives(const Corpus& corpus, ActivityType task,
                                                     TimeWindow window, std::size_t n,
                                                     std::uint64_t seed,
                                                     std::span<const std::string> base_users) {
  auto base = detail::user_indices(corpus, base_users);
  std::vector<std::uint64_t> population;
  for (const auto& r : window_slice(corpus, window.start, window.end).refs())
    if (r.activity == task && std::binary_search(base.begin(), base.end(), r.user))
      population.push_back(detail::pair_key(r.user, r.item));
  std::sort(population.begin(), population.end());
  population.erase(std::unique(population.begin(), population.end()), population.end());
  if (population.size() < n)
    throw SamplingError("sample_positives: requested " + std::to_string(n) + " " +
                        std::string(to_string(task)) + " positives but only " +
                        std::to_string(population.size()) + " are available");
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    std::swap(population[i], population[i + uniform_index(rng, population.size() - i)]);
  population.resize(n);
  std::sort(population.begin(), population.end());
  std::vector<LabeledInstance> out;
  out.reserve(n);
  for (auto key : population)
    out.push_back({corpus.users()[key >> 32], corpus.item(static_cast<std::uint32_t>(key)).item_id,
                   true, task});
  return out;
}

/// n distinct negative pairs by rejection sampling: a uniform base user times
/// a uniform item of the task's platform that saw any activity in the window,
/// rejecting pairs with a task activity anywhere in the corpus.
inline std::vector<LabeledInstance> sample_negatives(const Corpus& corpus, ActivityType task,
                                                     TimeWindow window, std::size_t n,
                                                     std::uint64_t seed,
                                                     std::span<const std::string> base_users) {
  auto users = detail::user_indices(corpus, base_users);
  std::vector<std::uint32_t> items;
  for (const auto& r : window_slice(corpus, window.start, window.end).refs())
    if (platform_of(r.activity) == platform_of(task)) items.push_back(r.item);
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  if (n == 0) return {};
  if (users.empty() || items.empty())
    throw SamplingError("sample_negatives: empty user or item pool");

  TaskPairs existing(corpus, task);
  std::unordered_set<std::uint64_t> chosen;
  std::vector<std::uint64_t> picked;
  const std::uint64_t budget = 1000 * static_cast<std::uint64_t>(n) + 10000;
  Rng rng(seed);
  for (std::uint64_t attempt = 0; attempt < budget && picked.size() < n; ++attempt) {
    auto u = users[uniform_index(rng, users.size())];
    auto k = items[uniform_index(rng, items.size())];
    if (existing.contains(u, k)) continue;
    if (!chosen.insert(detail::pair_key(u, k)).second) continue;
    picked.push_back(detail::pair_key(u, k));
  }
  if (picked.size() < n)
    throw SamplingError("sample_negatives: rejection rate too high; found " +
                        std::to_string(picked.size()) + " of " + std::to_string(n) +
                        " negatives within " + std::to_string(budget) + " attempts");
  std::sort(picked.begin(), picked.end());
  std::vector<LabeledInstance> out;
  out.reserve(n);
  for (auto key : picked)
    out.push_back({corpus.users()[key >> 32], corpus.item(static_cast<std::uint32_t>(key)).item_id,
                   false, task});
  return out;
}

/// Train instances from the train window and test instances from the test
/// window, each with sizes.pos positives followed by sizes.neg negatives.
inline DatasetSplit build_split(const Corpus& corpus, ActivityType task, SplitSizes sizes,
                                TimeWindow train_window, TimeWindow test_window, std::uint64_t seed,
                                std::span<const std::string> base_users) {
  if (!(train_window.start < train_window.end) || !(test_window.start < test_window.end))
    throw std::invalid_argument("build_split: empty window");
  if (test_window.start < train_window.end)
    throw std::invalid_argument("build_split: train window must end before the test window starts");
  DatasetSplit split;
  split.train_window = train_window;
  split.test_window = test_window;
  split.seed = seed;
  auto fill = [&](std::vector<LabeledInstance>& out, TimeWindow w, std::uint64_t tag) {
    out = sample_positives(corpus, task, w, sizes.pos, derive_seed(seed, tag), base_users);
    auto neg = sample_negatives(corpus, task, w, sizes.neg, derive_seed(seed, tag + 1), base_users);
    out.insert(out.end(), neg.begin(), neg.end());
  };
  fill(split.train, train_window, 1);
  fill(split.test, test_window, 3);
  return split;
}

// ---------------------------------------------------------------------------
// Experiment protocol
// ---------------------------------------------------------------------------

/// Which activity history featurizes test instances.
enum class FeatureHistory { OwnWindow, TrainWindow };

struct ExperimentConfig {
  std::vector<ActivityType> tasks{ActivityType::Answer, ActivityType::Favorite, ActivityType::Fork,
                                  ActivityType::Watch};
  std::vector<FeatureConfig> configs{kFeatureConfigs.begin(), kFeatureConfigs.end()};
  TimeWindow train_window{parse_timestamp("2013-10-01T00:00:00Z"),
                          parse_timestamp("2014-07-01T00:00:00Z")};
  TimeWindow test_window{parse_timestamp("2014-07-01T00:00:00Z"),
                         parse_timestamp("2015-04-01T00:00:00Z")};
  SplitSizes sizes{};
  std::size_t runs = 5;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double lambda = 1e-4;
  std::size_t epochs = 200;
  std::size_t co_cap = 0;
  FeatureHistory history = FeatureHistory::OwnWindow;
  bool shuffle_labels = false;  // permutation control: labels shuffled on both sides
  unsigned threads = 1;
};

inline const std::vector<std::string>& experiment_config_keys() {
  static const std::vector<std::string> keys{
      "task",   "tasks", "configs",  "train_window", "test_window",    "n_pos",  "n_neg",
      "runs",   "seeds", "lambda",   "epochs",       "co_cap",         "history", "shuffle_labels",
      "threads"};
  return keys;
}

inline ExperimentConfig parse_experiment_config(const KeyValueConfig& kv) {
  if (auto bad = kv.unknown_keys(experiment_config_keys()); !bad.empty())
    throw std::invalid_argument("experiment config: unknown key '" + bad.front() + "'");
  ExperimentConfig cfg;
  auto tasks = kv.get_list(kv.has("tasks") ? "tasks" : "task");
  if (!tasks.empty() && !(tasks.size() == 1 && tasks[0] == "all")) {
    cfg.tasks.clear();
    for (const auto& t : tasks) {
      auto a = parse_activity(t);
      if (std::find(cfg.tasks.begin(), cfg.tasks.end(), a) == cfg.tasks.end()) cfg.tasks.push_back(a);
    }
  }
  if (auto cs = kv.get_list("configs"); !cs.empty()) {
    cfg.configs.clear();
    for (const auto& c : cs) cfg.configs.push_back(parse_feature_config(c));
  }
  if (std::find(cfg.configs.begin(), cfg.configs.end(), FeatureConfig::ALL) == cfg.configs.end())
    cfg.configs.push_back(FeatureConfig::ALL);
  if (kv.has("train_window")) cfg.train_window = parse_window(kv.get("train_window", ""));
  if (kv.has("test_window")) cfg.test_window = parse_window(kv.get("test_window", ""));
  cfg.sizes.pos = kv.get_number<std::size_t>("n_pos", cfg.sizes.pos);
  cfg.sizes.neg = kv.get_number<std::size_t>("n_neg", cfg.sizes.neg);
  cfg.runs = kv.get_number<std::size_t>("runs", cfg.runs);
  if (cfg.runs == 0) throw std::invalid_argument("experiment config: runs must be >= 1");
  if (kv.has("seeds")) {
    cfg.seeds.clear();
    for (const auto& s : kv.get_list("seeds")) cfg.seeds.push_back(std::stoull(s));
  } else {
    cfg.seeds.clear();
    for (std::size_t r = 1; r <= cfg.runs; ++r) cfg.seeds.push_back(r);
  }
  if (cfg.seeds.size() != cfg.runs)
    throw std::invalid_argument("experiment config: need exactly one seed per run");
  cfg.lambda = kv.get_number<double>("lambda", cfg.lambda);
  cfg.epochs = kv.get_number<std::size_t>("epochs", cfg.epochs);
  cfg.co_cap = kv.get_number<std::size_t>("co_cap", cfg.co_cap);
  auto hist = kv.get("history", "own");
  if (hist == "own") cfg.history = FeatureHistory::OwnWindow;
  else if (hist == "train") cfg.history = FeatureHistory::TrainWindow;
  else throw std::invalid_argument("experiment config: history must be 'own' or 'train'");
  cfg.shuffle_labels = kv.get_bool("shuffle_labels", cfg.shuffle_labels);
  cfg.threads = kv.get_number<unsigned>("threads", cfg.threads);
  return cfg;
}

/// Canonical text form, used in run manifests.
inline std::string describe(const ExperimentConfig& cfg) {
  std::string s;
  auto line = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  auto join = [](const auto& xs, auto fn) {
    std::string out;
    for (const auto& x : xs) out += (out.empty() ? "" : ",") + fn(x);
    return out;
  };
  line("tasks", join(cfg.tasks, [](ActivityType a) { return std::string(to_string(a)); }));
  line("configs", join(cfg.configs, [](FeatureConfig c) { return std::string(to_string(c)); }));
  line("train_window", format_timestamp(cfg.train_window.start) + "," + format_timestamp(cfg.train_window.end));
  line("test_window", format_timestamp(cfg.test_window.start) + "," + format_timestamp(cfg.test_window.end));
  line("n_pos", std::to_string(cfg.sizes.pos));
  line("n_neg", std::to_string(cfg.sizes.neg));
  line("runs", std::to_string(cfg.runs));
  line("seeds", join(cfg.seeds, [](std::uint64_t x) { return std::to_string(x); }));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", cfg.lambda);
  line("lambda", buf);
  line("epochs", std::to_string(cfg.epochs));
  line("co_cap", std::to_string(cfg.co_cap));
  line("history", cfg.history == FeatureHistory::OwnWindow ? "own" : "train");
  line("shuffle_labels", cfg.shuffle_labels ? "true" : "false");
  return s;
}

struct RunResult {
  std::uint64_t seed = 0;
  double auc = 0.0;
  std::vector<RocPoint> roc;
};

struct ConfigResult {
  ActivityType task = ActivityType::Answer;
  FeatureConfig config = FeatureConfig::ALL;
  std::vector<RunResult> runs;
  double auc_mean = 0.0;
  double auc_std = 0.0;  // sample standard deviation; 0 for a single run
};

struct EvalReport {
  std::size_t runs = 0;
  std::vector<ConfigResult> results;  // task-major, configs in configured order

  const ConfigResult& find(ActivityType task, FeatureConfig config) const {
    for (const auto& r : results)
      if (r.task == task && r.config == config) return r;
    throw std::out_of_range("EvalReport: no result for " + std::string(to_string(task)) + "/" +
                            std::string(to_string(config)));
  }
};

/// Featurized instances of one split side.
struct FeaturizedSide {
  std::vector<FeatureVector> features;
  std::vector<int> labels;  // +1 / -1
};

inline std::vector<QueryPair> to_queries(const Corpus& corpus,
                                         std::span<const LabeledInstance> instances) {
  std::vector<QueryPair> q;
  q.reserve(instances.size());
  for (const auto& inst : instances) {
    auto k = corpus.item_index(inst.item_id);
    if (!k) throw std::invalid_argument("instance references unknown item: " + inst.item_id);
    q.push_back({corpus.user_index(inst.user_id).value_or(kNoUser), *k});
  }
  return q;
}

inline Matrix config_matrix(std::span<const FeatureVector> features, FeatureConfig config) {
  auto cols = config_columns(config);
  Matrix m(features.size(), cols.size());
  for (std::size_t r = 0; r < features.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) m.row(r)[c] = features[r].values[cols[c]];
  return m;
}

/// Trains on `train` restricted to a configuration and scores `test`.
inline RunResult evaluate_config(const FeaturizedSide& train, const FeaturizedSide& test,
                                 FeatureConfig config, SvmParams params) {
  auto model = fit_linear_model(config_matrix(train.features, config), train.labels, config, params);
  auto xt = config_matrix(test.features, config);
  std::vector<double> pos, neg;
  for (std::size_t r = 0; r < xt.rows(); ++r)
    (test.labels[r] > 0 ? pos : neg).push_back(predict_score(model, xt.row(r)));
  return {params.seed, compute_auc(pos, neg), roc_points(pos, neg)};
}

inline void summarize(ConfigResult& r) {
  const double n = static_cast<double>(r.runs.size());
  double sum = 0.0;
  for (const auto& run : r.runs) sum += run.auc;
  r.auc_mean = sum / n;
  double ss = 0.0;
  for (const auto& run : r.runs) ss += (run.auc - r.auc_mean) * (run.auc - r.auc_mean);
  r.auc_std = r.runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

/// The full protocol: for every task and run, sample a fresh split with that
/// run's seed, featurize it, then train and evaluate each configuration.
inline EvalReport run_experiment(const Corpus& corpus, const ItemInterests& interests,
                                 const ExperimentConfig& cfg) {
  if (cfg.runs == 0 || cfg.seeds.size() != cfg.runs)
    throw std::invalid_argument("run_experiment: need runs >= 1 and one seed per run");
  const TimeWindow study{cfg.train_window.start, cfg.test_window.end};
  const auto base = filter_base_users(corpus, study);
  const CoCap cap{cfg.co_cap, 1};
  const auto train_ctx = make_feature_context(
      window_slice(corpus, cfg.train_window.start, cfg.train_window.end), interests, cap);
  const auto test_ctx = make_feature_context(
      window_slice(corpus, cfg.test_window.start, cfg.test_window.end), interests, cap);
  const auto& test_feature_ctx = cfg.history == FeatureHistory::OwnWindow ? test_ctx : train_ctx;

  // Sample every split first so each context is featurized in one batch.
  struct Job {
    ActivityType task;
    std::size_t run;
    DatasetSplit split;
    FeaturizedSide train, test;
  };
  std::vector<Job> jobs;
  for (auto task : cfg.tasks)
    for (std::size_t r = 0; r < cfg.runs; ++r)
      jobs.push_back({task, r,
                      build_split(corpus, task, cfg.sizes, cfg.train_window, cfg.test_window,
                                  cfg.seeds[r], base),
                      {}, {}});

  auto featurize_all = [&](const FeatureContext& ctx, bool test_side) {
    std::vector<QueryPair> queries;
    for (const auto& j : jobs) {
      auto q = to_queries(corpus, test_side ? j.split.test : j.split.train);
      queries.insert(queries.end(), q.begin(), q.end());
    }
    auto feats = featurize_batch(ctx, queries, cfg.threads);
    std::size_t offset = 0;
    for (auto& j : jobs) {
      const auto& inst = test_side ? j.split.test : j.split.train;
      auto& side = test_side ? j.test : j.train;
      side.features.assign(feats.begin() + offset, feats.begin() + offset + inst.size());
      for (const auto& i : inst) side.labels.push_back(i.positive ? 1 : -1);
      offset += inst.size();
    }
  };
  featurize_all(train_ctx, false);
  featurize_all(test_feature_ctx, true);

  if (cfg.shuffle_labels)
    for (auto& j : jobs) {
      Rng rng(derive_seed(j.split.seed, 0x5eed));
      shuffle(j.train.labels, rng);
      shuffle(j.test.labels, rng);
    }

  EvalReport report;
  report.runs = cfg.runs;
  for (auto task : cfg.tasks)
    for (auto c : cfg.configs) report.results.push_back({task, c, std::vector<RunResult>(cfg.runs), 0, 0});

  const std::size_t n_cfg = cfg.configs.size();
  parallel_for(jobs.size() * n_cfg, cfg.threads, [&](std::size_t i) {
    const auto& job = jobs[i / n_cfg];
    const auto c = i % n_cfg;
    SvmParams params{cfg.lambda, cfg.epochs, job.split.seed};
    auto t = static_cast<std::size_t>(std::find(cfg.tasks.begin(), cfg.tasks.end(), job.task) -
                                      cfg.tasks.begin());
    report.results[t * n_cfg + c].runs[job.run] =
        evaluate_config(job.train, job.test, cfg.configs[c], params);
  });
  for (auto& r : report.results) summarize(r);
  return report;
}

inline EvalReport run_experiment(const Corpus& corpus, const ExperimentConfig& cfg) {
  return run_experiment(corpus, item_interests(corpus, build_vocabulary(corpus)), cfg);
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline nlohmann::json report_json(const EvalReport& report) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : report.results) {
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t i = 0; i < r.runs.size(); ++i)
      runs.push_back({{"run", i + 1}, {"seed", r.runs[i].seed}, {"auc", r.runs[i].auc}});
    results.push_back({{"task", to_string(r.task)},
                       {"config", to_string(r.config)},
                       {"auc_mean", r.auc_mean},
                       {"auc_std", r.auc_std},
                       {"runs", std::move(runs)}});
  }
  return {{"runs", report.runs}, {"results", std::move(results)}};
}

inline std::string summary_table(const EvalReport& report) {
  std::string out = "task      config    auc_mean  auc_std\n";
  char buf[128];
  for (const auto& r : report.results) {
    std::snprintf(buf, sizeof buf, "%-9s %-9s %.4f    %.4f\n", std::string(to_string(r.task)).c_str(),
                  std::string(to_string(r.config)).c_str(), r.auc_mean, r.auc_std);
    out += buf;
  }
  return out;
}

/// Writes report.json, summary.txt and roc.csv into `dir`.
inline void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << report_json(report).dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "summary.txt", std::ios::binary);
    out << summary_table(report);
  }
  std::ofstream out(dir / "roc.csv", std::ios::binary);
  out << "task,config,run,fpr,tpr\n";
  for (const auto& r : report.results)
    for (std::size_t i = 0; i < r.runs.size(); ++i)
      for (const auto& p : r.runs[i].roc)
        out << to_string(r.task) << ',' << to_string(r.config) << ',' << i + 1 << ','
            << detail::fmt_double(p.fpr) << ',' << detail::fmt_double(p.tpr) << '\n';
}

/// Feature export: user_id, item_id, label, then the eight features in
/// FeatureVector order, tab separated, 17 significant digits.
inline void write_feature_rows(std::ostream& out, std::span<const LabeledInstance> instances,
                               std::span<const FeatureVector> features) {
  if (instances.size() != features.size())
    throw std::invalid_argument("write_feature_rows: size mismatch");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    out << instances[i].user_id << '\t' << instances[i].item_id << '\t'
        << (instances[i].positive ? 1 : 0);
    for (double v : features[i].values) out << '\t' << detail::fmt_double(v);
    out << '\n';
  }
}

}  // namespace crossact
