#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "kv_config.hpp"
#include "util.hpp"

namespace crossact {

/// Parameters of a planted two-platform corpus.
struct SynthSpec {
  std::size_t n_users = 200;
  std::size_t n_repos = 400;
  std::size_t n_questions = 400;
  std::size_t n_topics = 8;
  std::size_t tags_per_topic = 5;
  double user_affinity_sharpness = 10.0;  // softmax temperature over topic scores; inf = one topic
  double activity_rate = 20.0;            // mean activities per user per type
  double noise_rate = 0.1;
  TimeWindow window{parse_timestamp("2013-10-01T00:00:00Z"), parse_timestamp("2015-04-01T00:00:00Z")};
  std::uint64_t seed = 7;
  std::size_t n_cold_users = 0;  // extra linked users with GitHub activity only
};

struct SynthCorpus {
  Corpus corpus;
  std::vector<std::string> users;                // canonical ids, regular users then cold ones
  std::vector<std::vector<double>> preferences;  // per user, topic weights summing to 1
  std::vector<std::string> cold_users;
  std::vector<std::vector<std::string>> topic_tags;
  std::map<std::string, std::size_t> item_topic;
  std::map<std::string, std::vector<std::string>> planted_tags;  // sorted
};

inline SynthSpec parse_synth_spec(const KeyValueConfig& kv) {
  static const std::vector<std::string> known{
      "n_users", "n_repos", "n_questions", "n_topics", "tags_per_topic", "user_affinity_sharpness",
      "activity_rate", "noise_rate", "window", "seed", "n_cold_users"};
  if (auto bad = kv.unknown_keys(known); !bad.empty())
    throw std::invalid_argument("synth spec: unknown key '" + bad.front() + "'");
  SynthSpec s;
  s.n_users = kv.get_number("n_users", s.n_users);
  s.n_repos = kv.get_number("n_repos", s.n_repos);
  s.n_questions = kv.get_number("n_questions", s.n_questions);
  s.n_topics = kv.get_number("n_topics", s.n_topics);
  s.tags_per_topic = kv.get_number("tags_per_topic", s.tags_per_topic);
  if (kv.get("user_affinity_sharpness", "") == "inf")
    s.user_affinity_sharpness = std::numeric_limits<double>::infinity();
  else
    s.user_affinity_sharpness = kv.get_number("user_affinity_sharpness", s.user_affinity_sharpness);
  s.activity_rate = kv.get_number("activity_rate", s.activity_rate);
  s.noise_rate = kv.get_number("noise_rate", s.noise_rate);
  if (kv.has("window")) s.window = parse_window(kv.get("window", ""));
  s.seed = kv.get_number("seed", s.seed);
  s.n_cold_users = kv.get_number("n_cold_users", s.n_cold_users);
  return s;
}

namespace detail {

inline constexpr std::array<std::string_view, 16> kSyllables = {
    "ka", "lo", "mi", "nu", "pe", "ra", "si", "tu", "vo", "ze", "bi", "da", "fe", "go", "hu", "jy"};

inline constexpr std::array<std::string_view, 20> kFillerWords = {
    "a", "simple", "fast", "library", "for", "tools", "toolkit", "lightweight", "framework", "with",
    "support", "and", "utilities", "collection", "of", "scripts", "experimental", "minimal",
    "plugin", "bindings"};

inline constexpr std::size_t kTagSyllables = 3;
inline constexpr std::size_t kTagCapacity = 16 * 16 * 16;

inline std::string tag_name(std::size_t index) {
  std::string s;
  for (std::size_t i = 0; i < kTagSyllables; ++i) {
    s += kSyllables[index % kSyllables.size()];
    index /= kSyllables.size();
  }
  return s;
}

// Sum of Knuth draws over chunks of mean <= 30 (sums of Poissons are Poisson).
inline std::size_t poisson(Rng& rng, double mean) {
  std::size_t total = 0;
  while (mean > 0) {
    double m = std::min(mean, 30.0);
    mean -= m;
    const double limit = std::exp(-m);
    double p = uniform_real(rng);
    while (p > limit) {
      ++total;
      p *= uniform_real(rng);
    }
  }
  return total;
}

inline std::size_t draw_weighted(Rng& rng, const std::vector<double>& weights) {
  double x = uniform_real(rng);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (x < weights[i]) return i;
    x -= weights[i];
  }
  return weights.size() - 1;
}

}  // namespace detail

inline void validate(const SynthSpec& s) {
  if (s.n_users < 1 || s.n_repos < 1 || s.n_questions < 1 || s.n_topics < 1 || s.tags_per_topic < 1)
    throw std::invalid_argument("synth spec: all counts must be >= 1");
  if (!(s.noise_rate >= 0.0 && s.noise_rate <= 1.0))
    throw std::invalid_argument("synth spec: noise_rate must be in [0, 1]");
  if (!(s.user_affinity_sharpness >= 0.0))
    throw std::invalid_argument("synth spec: user_affinity_sharpness must be >= 0");
  if (!(s.activity_rate >= 0.0) || !std::isfinite(s.activity_rate))
    throw std::invalid_argument("synth spec: activity_rate must be finite and >= 0");
  if (!(s.window.start < s.window.end)) throw std::invalid_argument("synth spec: empty window");
  if (s.n_topics * s.tags_per_topic > detail::kTagCapacity)
    throw std::invalid_argument("synth spec: " + std::to_string(s.n_topics * s.tags_per_topic) +
                                " tags requested but only " + std::to_string(detail::kTagCapacity) +
                                " distinct tag names can be generated");
}

/// Generates a corpus whose users share one topic preference across both
/// platforms. Every item belongs to one topic and carries all of its tags;
/// repository descriptions contain those tags verbatim among filler words
/// that are never tags.
inline SynthCorpus generate_corpus(const SynthSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, 0x517));
  SynthCorpus out;

  // Tag names: a seeded permutation of the name space.
  std::vector<std::size_t> name_ids(detail::kTagCapacity);
  for (std::size_t i = 0; i < name_ids.size(); ++i) name_ids[i] = i;
  shuffle(name_ids, rng);
  std::size_t next_name = 0;
  out.topic_tags.resize(spec.n_topics);
  for (auto& tags : out.topic_tags)
    while (tags.size() < spec.tags_per_topic) tags.push_back(detail::tag_name(name_ids[next_name++]));

  const auto dur = static_cast<std::uint64_t>((spec.window.end - spec.window.start).count());
  auto random_time = [&] { return spec.window.start + std::chrono::seconds(uniform_index(rng, dur)); };

  std::vector<ItemRecord> items;
  std::array<std::vector<std::vector<std::uint32_t>>, 2> items_by_topic;  // [platform][topic]
  std::array<std::vector<std::uint32_t>, 2> all_items;
  for (auto& v : items_by_topic) v.resize(spec.n_topics);

  std::vector<std::vector<std::string>> sorted_tags = out.topic_tags;
  for (auto& t : sorted_tags) std::sort(t.begin(), t.end());

  // Questions. The first n_topics cover one topic each so every tag enters
  // the vocabulary.
  for (std::size_t i = 0; i < spec.n_questions; ++i) {
    std::size_t topic = i < spec.n_topics ? i : uniform_index(rng, spec.n_topics);
    const auto& tags = sorted_tags[topic];
    ItemRecord q;
    q.item_id = "so:" + std::to_string(i + 1);
    q.platform = PlatformId::StackOverflow;
    q.text = "question about " + tags.front();
    for (const auto& t : tags) q.text += " " + t;
    q.raw_tags = tags;
    q.created_at = spec.window.start;
    out.item_topic[q.item_id] = topic;
    out.planted_tags[q.item_id] = tags;
    items_by_topic[1][topic].push_back(static_cast<std::uint32_t>(items.size()));
    all_items[1].push_back(static_cast<std::uint32_t>(items.size()));
    items.push_back(std::move(q));
  }
  const std::size_t covered_topics = std::min(spec.n_topics, spec.n_questions);

  for (std::size_t i = 0; i < spec.n_repos; ++i) {
    std::size_t topic = uniform_index(rng, spec.n_topics);
    std::vector<std::string> words;
    std::size_t fillers = 2 + uniform_index(rng, 3);
    for (std::size_t f = 0; f < fillers; ++f)
      words.emplace_back(detail::kFillerWords[uniform_index(rng, detail::kFillerWords.size())]);
    for (const auto& t : out.topic_tags[topic])
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, words.size() + 1)), t);
    ItemRecord r;
    r.item_id = "gh:" + std::to_string(i + 1);
    r.platform = PlatformId::GitHub;
    for (const auto& w : words) r.text += (r.text.empty() ? "" : " ") + w;
    r.created_at = spec.window.start;
    out.item_topic[r.item_id] = topic;
    // tags of a topic without any question never reach the vocabulary
    out.planted_tags[r.item_id] = topic < covered_topics ? sorted_tags[topic] : std::vector<std::string>{};
    items_by_topic[0][topic].push_back(static_cast<std::uint32_t>(items.size()));
    all_items[0].push_back(static_cast<std::uint32_t>(items.size()));
    items.push_back(std::move(r));
  }

  // Users and activities.
  std::vector<ActivityRecord> acts;
  std::vector<AccountLink> links;
  const std::size_t total_users = spec.n_users + spec.n_cold_users;
  for (std::size_t u = 0; u < total_users; ++u) {
    char id[32];
    std::snprintf(id, sizeof id, "u%05zu", u + 1);
    const bool cold = u >= spec.n_users;
    out.users.push_back(id);
    if (cold) out.cold_users.push_back(id);
    links.push_back({id, "dev" + std::string(id + 1), std::to_string(100000 + u + 1)});

    std::vector<double> pref(spec.n_topics, 0.0);
    std::vector<double> score(spec.n_topics);
    for (auto& s : score) s = uniform_real(rng);
    if (std::isinf(spec.user_affinity_sharpness)) {
      pref[static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin())] = 1.0;
    } else {
      double top = *std::max_element(score.begin(), score.end()), z = 0.0;
      for (std::size_t t = 0; t < spec.n_topics; ++t)
        z += pref[t] = std::exp(spec.user_affinity_sharpness * (score[t] - top));
      for (auto& p : pref) p /= z;
    }

    for (auto a : kActivityTypes) {
      const auto p = platform_of(a) == PlatformId::GitHub ? 0 : 1;
      if (cold && p == 1) continue;
      std::size_t count = detail::poisson(rng, spec.activity_rate);
      for (std::size_t n = 0; n < count; ++n) {
        const std::vector<std::uint32_t>* pool = &all_items[p];
        if (uniform_real(rng) >= spec.noise_rate) {
          const auto& topical = items_by_topic[p][detail::draw_weighted(rng, pref)];
          if (!topical.empty()) pool = &topical;
        }
        const auto& item = items[(*pool)[uniform_index(rng, pool->size())]];
        acts.push_back({id, item.item_id, a, random_time()});
      }
    }
    out.preferences.push_back(std::move(pref));
  }

  out.corpus = Corpus(std::move(items), std::move(acts), std::move(links), spec.window);
  return out;
}

/// ground_truth.jsonl ({user_id, topic_weights, cold}) and item_topics.jsonl
/// ({item_id, topic, tags}).
inline void write_ground_truth(const SynthCorpus& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "ground_truth.jsonl", std::ios::binary);
    for (std::size_t u = 0; u < s.users.size(); ++u) {
      bool cold = std::find(s.cold_users.begin(), s.cold_users.end(), s.users[u]) != s.cold_users.end();
      out << nlohmann::json{{"user_id", s.users[u]}, {"topic_weights", s.preferences[u]}, {"cold", cold}}
                 .dump()
          << '\n';
    }
  }
  std::ofstream out(dir / "item_topics.jsonl", std::ios::binary);
  for (const auto& [id, topic] : s.item_topic)
    out << nlohmann::json{{"item_id", id}, {"topic", topic}, {"tags", s.planted_tags.at(id)}}.dump()
        << '\n';
}

}  // namespace crossact
