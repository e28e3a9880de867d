// crossact: command-line front end over the crossact library.
//
//   crossact ingest     --posts Posts.xml [--votes Votes.xml] --events events.jsonl
//                       [--links links.csv] --out corpus/
//   crossact interests  --corpus corpus/ --out interests.jsonl
//   crossact experiment --corpus corpus/ --config experiment.cfg --out report/
//   crossact stats      --corpus corpus/ [--top-k 10] --out tags.tsv
//   crossact synth      --spec synth.cfg --out corpus/
//
// Every subcommand writes a run manifest next to its output.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <crossact/crossact.hpp>

namespace fs = std::filesystem;
using namespace crossact;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out;
};

void write_manifest(const fs::path& path, const std::string& subcommand, nlohmann::json config,
                    nlohmann::json inputs, const std::string& output, nlohmann::json seeds,
                    std::chrono::steady_clock::time_point started) {
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  nlohmann::json m{{"subcommand", subcommand},
                   {"config", std::move(config)},
                   {"inputs", std::move(inputs)},
                   {"output", output},
                   {"seeds", std::move(seeds)},
                   {"tool_version", CROSSACT_VERSION},
                   {"duration_seconds", secs}};
  std::ofstream out(path);
  out << m.dump(2) << '\n';
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input: " + path);
  return in;
}

// manifest path for a single-file output: "<out>.manifest.json"
fs::path sidecar(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

int cmd_ingest(const std::string& posts, const std::string& votes, const std::string& events,
               const std::string& links_path, const Globals& g) {
  auto started = std::chrono::steady_clock::now();
  auto posts_in = open_input(posts);
  std::optional<std::ifstream> votes_in;
  if (!votes.empty()) votes_in = open_input(votes);
  auto so = parse_stackoverflow(posts_in, votes_in ? &*votes_in : nullptr);
  auto events_in = open_input(events);
  auto gh = parse_github_events(events_in);

  std::vector<AccountLink> links;
  if (!links_path.empty()) {
    auto in = open_input(links_path);
    links = read_links(in);
  }
  if (links.empty()) std::cerr << "warning: no account links; no user spans both platforms\n";

  auto corpus = link_accounts(links, gh, so);
  write_corpus(corpus, g.out);

  nlohmann::json diag{{"stackoverflow_skipped", so.skipped},
                      {"github_skipped", gh.skipped},
                      {"items", corpus.items().size()},
                      {"activities", corpus.activities().size()},
                      {"users", corpus.users().size()},
                      {"links", corpus.links().size()}};
  {
    std::ofstream d(fs::path(g.out) / "diagnostics.json");
    d << diag.dump(2) << '\n';
  }
  for (const auto& [reason, n] : so.skipped) std::cerr << "stackoverflow skipped " << reason << ": " << n << '\n';
  for (const auto& [reason, n] : gh.skipped) std::cerr << "github skipped " << reason << ": " << n << '\n';
  write_manifest(fs::path(g.out) / "manifest.json", "ingest", nlohmann::json::object(),
                 {{"posts", posts}, {"votes", votes}, {"events", events}, {"links", links_path}},
                 g.out, nlohmann::json::array(), started);
  return 0;
}

int cmd_interests(const std::string& corpus_dir, const Globals& g) {
  auto started = std::chrono::steady_clock::now();
  auto corpus = read_corpus(corpus_dir);
  auto vocab = build_vocabulary(corpus);
  std::cerr << "vocabulary: " << vocab.size() << " tags from " << vocab.built_from << " questions\n";
  auto interests = item_interests(corpus, vocab);
  {
    std::ofstream out(g.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + g.out);
    write_interests(interests, out);
  }
  write_manifest(sidecar(g.out), "interests", {{"vocabulary_size", vocab.size()}},
                 {{"corpus", corpus_dir}}, g.out, nlohmann::json::array(), started);
  return 0;
}

int cmd_experiment(const std::string& corpus_dir, const std::string& config_path, const Globals& g) {
  auto started = std::chrono::steady_clock::now();
  auto cfg = parse_experiment_config(KeyValueConfig::load(config_path));
  if (g.seed) {
    cfg.seeds.clear();
    for (std::size_t r = 0; r < cfg.runs; ++r) cfg.seeds.push_back(*g.seed + r);
  }
  if (g.threads > 1) cfg.threads = g.threads;
  auto corpus = read_corpus(corpus_dir);
  auto report = run_experiment(corpus, cfg);
  write_report(report, g.out);
  std::cerr << summary_table(report);
  write_manifest(fs::path(g.out) / "manifest.json", "experiment", describe(cfg),
                 {{"corpus", corpus_dir}, {"config", config_path}}, g.out, cfg.seeds, started);
  return 0;
}

int cmd_stats(const std::string& corpus_dir, std::size_t top_k, const Globals& g) {
  auto started = std::chrono::steady_clock::now();
  auto corpus = read_corpus(corpus_dir);
  auto interests = item_interests(corpus, build_vocabulary(corpus));
  auto table = tag_usage_stats(corpus.view(), interests, top_k);
  {
    std::ofstream out(g.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + g.out);
    write_tag_usage(table, out);
  }
  write_manifest(sidecar(g.out), "stats", {{"top_k", top_k}}, {{"corpus", corpus_dir}}, g.out,
                 nlohmann::json::array(), started);
  return 0;
}

int cmd_synth(const std::string& spec_path, const Globals& g) {
  auto started = std::chrono::steady_clock::now();
  auto spec = parse_synth_spec(KeyValueConfig::load(spec_path));
  if (g.seed) spec.seed = *g.seed;
  auto synth = generate_corpus(spec);
  write_corpus(synth.corpus, g.out);
  write_ground_truth(synth, g.out);
  nlohmann::json resolved{{"n_users", spec.n_users},
                          {"n_repos", spec.n_repos},
                          {"n_questions", spec.n_questions},
                          {"n_topics", spec.n_topics},
                          {"tags_per_topic", spec.tags_per_topic},
                          {"user_affinity_sharpness", spec.user_affinity_sharpness},
                          {"activity_rate", spec.activity_rate},
                          {"noise_rate", spec.noise_rate},
                          {"window", format_timestamp(spec.window.start) + "," +
                                         format_timestamp(spec.window.end)},
                          {"n_cold_users", spec.n_cold_users}};
  write_manifest(fs::path(g.out) / "manifest.json", "synth", resolved, {{"spec", spec_path}}, g.out,
                 {spec.seed}, started);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-platform activity prediction over GitHub and Stack Overflow"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override seed(s)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", g.out, "Output path")->required(); };

  std::string posts, votes, events, links, corpus_dir, config, spec;
  std::size_t top_k = 10;

  auto* ingest = app.add_subcommand("ingest", "Parse platform dumps into a canonical corpus");
  ingest->add_option("--posts", posts, "Stack Overflow Posts.xml")->required();
  ingest->add_option("--votes", votes, "Stack Overflow Votes.xml");
  ingest->add_option("--events", events, "GitHub event export (JSON lines)")->required();
  ingest->add_option("--links", links, "Account links file");
  add_out(ingest);

  auto* interests = app.add_subcommand("interests", "Export inferred item interests");
  interests->add_option("--corpus", corpus_dir, "Canonical corpus directory")->required();
  add_out(interests);

  auto* experiment = app.add_subcommand("experiment", "Run the prediction experiment");
  experiment->add_option("--corpus", corpus_dir, "Canonical corpus directory")->required();
  experiment->add_option("--config", config, "Experiment config file")->required();
  add_out(experiment);

  auto* stats = app.add_subcommand("stats", "Tag usage per activity type");
  stats->add_option("--corpus", corpus_dir, "Canonical corpus directory")->required();
  stats->add_option("--top-k", top_k, "Rows per activity type (0 = all)");
  add_out(stats);

  auto* synth = app.add_subcommand("synth", "Generate a planted synthetic corpus");
  synth->add_option("--spec", spec, "Synthetic corpus spec file")->required();
  add_out(synth);

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*ingest) return cmd_ingest(posts, votes, events, links, g);
    if (*interests) return cmd_interests(corpus_dir, g);
    if (*experiment) return cmd_experiment(corpus_dir, config, g);
    if (*stats) return cmd_stats(corpus_dir, top_k, g);
    if (*synth) return cmd_synth(spec, g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
