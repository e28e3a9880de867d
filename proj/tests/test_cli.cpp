#include <gtest/gtest.h>

#include <cstdlib>

#include "support.hpp"

using namespace crossact;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string err;
};

Result run(const std::string& args, const fs::path& scratch) {
  auto err = scratch / "stderr.txt";
  std::string cmd = std::string(CROSSACT_CLI_PATH) + " " + args + " 2> " + err.string();
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(err)};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const char* kSpec =
    "n_users = 60\nn_repos = 80\nn_questions = 80\nn_topics = 4\nactivity_rate = 8\nseed = 11\n";

const char* kExperiment =
    "tasks = answer, fork\nconfigs = GH_Act, SO_Act\nn_pos = 40\nn_neg = 40\nruns = 2\nepochs = 10\n";

}  // namespace

TEST(Cli, IngestMatchesLibrary) {
  auto dir = temp_dir("cli_ingest");
  auto r = run("ingest --posts " + q(fixture("Posts.xml")) + " --votes " + q(fixture("Votes.xml")) +
                   " --events " + q(fixture("events.jsonl")) + " --links " + q(fixture("links.csv")) +
                   " --out " + q(dir / "corpus"),
               dir);
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream posts(fixture("Posts.xml")), votes(fixture("Votes.xml")),
      events(fixture("events.jsonl")), links(fixture("links.csv"));
  auto so = parse_stackoverflow(posts, &votes);
  auto gh = parse_github_events(events);
  write_corpus(link_accounts(read_links(links), gh, so), dir / "lib");
  for (const char* f : {"items.jsonl", "activities.jsonl", "links.jsonl"})
    EXPECT_EQ(slurp(dir / "corpus" / f), slurp(dir / "lib" / f)) << f;
  EXPECT_TRUE(fs::exists(dir / "corpus" / "manifest.json"));
  auto diag = nlohmann::json::parse(slurp(dir / "corpus" / "diagnostics.json"));
  EXPECT_EQ(diag["items"], 5);
  EXPECT_EQ(diag["activities"], 8);
  auto manifest = nlohmann::json::parse(slurp(dir / "corpus" / "manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "ingest");
  EXPECT_TRUE(manifest.contains("tool_version"));
  EXPECT_TRUE(manifest.contains("duration_seconds"));
}

TEST(Cli, IngestWithoutLinksWarns) {
  auto dir = temp_dir("cli_nolinks");
  write_file(dir / "empty.csv", "");
  auto r = run("ingest --posts " + q(fixture("Posts.xml")) + " --events " + q(fixture("events.jsonl")) +
                   " --links " + q(dir / "empty.csv") + " --out " + q(dir / "corpus"),
               dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Cli, MissingInputFails) {
  auto dir = temp_dir("cli_missing");
  auto r = run("ingest --posts " + q(dir / "nope.xml") + " --events " + q(dir / "nope.jsonl") +
                   " --out " + q(dir / "corpus"),
               dir);
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  EXPECT_NE(run("interests --corpus " + q(dir / "absent") + " --out " + q(dir / "i.jsonl"), dir).code, 0);
  EXPECT_NE(run("frobnicate", dir).code, 0);
}

TEST(Cli, SynthInterestsStatsExperimentMatchLibrary) {
  auto dir = temp_dir("cli_pipeline");
  write_file(dir / "spec.cfg", kSpec);
  write_file(dir / "exp.cfg", kExperiment);
  ASSERT_EQ(run("synth --spec " + q(dir / "spec.cfg") + " --out " + q(dir / "corpus"), dir).code, 0);

  std::istringstream spec_in(kSpec);
  auto synth = generate_corpus(parse_synth_spec(KeyValueConfig::parse(spec_in)));
  write_corpus(synth.corpus, dir / "lib");
  write_ground_truth(synth, dir / "lib");
  for (const char* f : {"items.jsonl", "activities.jsonl", "links.jsonl", "ground_truth.jsonl",
                        "item_topics.jsonl"})
    EXPECT_EQ(slurp(dir / "corpus" / f), slurp(dir / "lib" / f)) << f;

  auto corpus = read_corpus(dir / "corpus");
  auto interests = item_interests(corpus, build_vocabulary(corpus));

  auto r = run("interests --corpus " + q(dir / "corpus") + " --out " + q(dir / "interests.jsonl"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("vocabulary"), std::string::npos);
  std::ostringstream want_interests;
  write_interests(interests, want_interests);
  EXPECT_EQ(slurp(dir / "interests.jsonl"), want_interests.str());
  EXPECT_TRUE(fs::exists(dir / "interests.jsonl.manifest.json"));

  ASSERT_EQ(run("stats --corpus " + q(dir / "corpus") + " --top-k 3 --out " + q(dir / "tags.tsv"), dir).code, 0);
  std::ostringstream want_tags;
  write_tag_usage(tag_usage_stats(corpus.view(), interests, 3), want_tags);
  EXPECT_EQ(slurp(dir / "tags.tsv"), want_tags.str());

  ASSERT_EQ(run("experiment --corpus " + q(dir / "corpus") + " --config " + q(dir / "exp.cfg") +
                    " --out " + q(dir / "report"),
                dir)
                .code,
            0);
  std::istringstream exp_in(kExperiment);
  write_report(run_experiment(corpus, parse_experiment_config(KeyValueConfig::parse(exp_in))),
               dir / "lib_report");
  for (const char* f : {"report.json", "summary.txt", "roc.csv"})
    EXPECT_EQ(slurp(dir / "report" / f), slurp(dir / "lib_report" / f)) << f;
  auto summary = slurp(dir / "report" / "summary.txt");
  for (const char* name : {"GH_Act", "SO_Act", "ALL"}) EXPECT_NE(summary.find(name), std::string::npos);
  auto manifest = nlohmann::json::parse(slurp(dir / "report" / "manifest.json"));
  EXPECT_EQ(manifest["seeds"], nlohmann::json::array({1, 2}));
}

TEST(Cli, SeedFlagOverridesRunSeeds) {
  auto dir = temp_dir("cli_seed");
  write_file(dir / "spec.cfg", kSpec);
  write_file(dir / "exp.cfg", kExperiment);
  ASSERT_EQ(run("synth --spec " + q(dir / "spec.cfg") + " --out " + q(dir / "corpus"), dir).code, 0);
  ASSERT_EQ(run("--seed 10 --threads 2 experiment --corpus " + q(dir / "corpus") + " --config " +
                    q(dir / "exp.cfg") + " --out " + q(dir / "report"),
                dir)
                .code,
            0);
  auto manifest = nlohmann::json::parse(slurp(dir / "report" / "manifest.json"));
  EXPECT_EQ(manifest["seeds"], nlohmann::json::array({10, 11}));
  auto report = nlohmann::json::parse(slurp(dir / "report" / "report.json"));
  EXPECT_EQ(report["results"][0]["runs"][0]["seed"], 10);
}
