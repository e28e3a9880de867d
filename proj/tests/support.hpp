// Test-only helpers: random corpora and brute-force oracles that share no
// code path with the library implementations they check.
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <crossact/crossact.hpp>

namespace testing_support {

using namespace crossact;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(CROSSACT_FIXTURE_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("crossact_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Timestamp ts(const char* s) { return parse_timestamp(s); }

/// Small random two-platform corpus with tag-bearing items.
inline Corpus random_corpus(std::uint64_t seed, std::size_t users, std::size_t items,
                            std::size_t activities, std::size_t n_tags = 12) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::vector<std::string> vocab;
  for (std::size_t t = 0; t < n_tags; ++t) vocab.push_back("tag" + std::to_string(t));
  std::vector<ItemRecord> recs;
  for (std::size_t i = 0; i < items; ++i) {
    ItemRecord r;
    bool question = i % 2 == 0;
    r.item_id = (question ? "so:" : "gh:") + std::to_string(i);
    r.platform = question ? PlatformId::StackOverflow : PlatformId::GitHub;
    std::size_t k = pick(3);  // 0..2 tags, so some items are empty
    std::vector<std::string> tags;
    for (std::size_t j = 0; j < k; ++j) tags.push_back(vocab[pick(n_tags)]);
    if (question) {
      r.raw_tags = tags;
    } else {
      r.text = "repo";
      for (const auto& t : tags) r.text += " " + t + " stuff";
    }
    r.created_at = ts("2014-01-01T00:00:00Z");
    recs.push_back(std::move(r));
  }
  // make sure the vocabulary is non-empty
  recs[0].raw_tags = {vocab[0], vocab[1]};
  std::vector<ActivityRecord> acts;
  const auto base = ts("2014-01-01T00:00:00Z");
  for (std::size_t a = 0; a < activities; ++a) {
    const auto& item = recs[pick(items)];
    auto type = kActivityTypes[pick(2) + (item.platform == PlatformId::GitHub ? 0 : 2)];
    acts.push_back({"user" + std::to_string(pick(users)), item.item_id, type,
                    base + std::chrono::seconds(pick(86400 * 300))});
  }
  return Corpus(std::move(recs), std::move(acts), {});
}

// ---------------------------------------------------------------------------
// Feature oracle: direct evaluation of the similarity definitions over the
// raw activity records of a window, using string sets throughout.
// ---------------------------------------------------------------------------

class BruteForceFeatures {
 public:
  BruteForceFeatures(const Corpus& corpus, TimeWindow window,
                     const std::map<std::string, std::set<std::string>>& interests)
      : interests_(interests) {
    for (const auto& a : corpus.activities())
      if (window.start <= a.timestamp && a.timestamp < window.end)
        acts_[{a.user_id, a.activity}].insert(a.item_id);
    for (const auto& u : corpus.users()) users_.push_back(u);
    std::sort(users_.begin(), users_.end());
  }

  double sim(const std::string& u, const std::string& k, ActivityType a) const {
    std::size_t size = 0, hits = 0;
    for (const auto& x : items_of(u, a)) {
      if (x == k) continue;
      ++size;
      if (overlap(x, k)) ++hits;
    }
    return size == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(size);
  }

  std::vector<std::string> co_participants(const std::string& u, const std::string& k,
                                           ActivityType a) const {
    std::vector<std::string> out;
    const auto& mine = items_of(u, a);
    for (const auto& v : users_) {
      if (v == u) continue;
      const auto& theirs = items_of(v, a);
      for (const auto& x : mine)
        if (x != k && theirs.count(x)) {
          out.push_back(v);
          break;
        }
    }
    return out;
  }

  double co_sim(const std::string& u, const std::string& k, ActivityType a) const {
    auto co = co_participants(u, k, a);
    if (co.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& v : co) sum += sim(v, k, a);
    return sum / static_cast<double>(co.size());
  }

  FeatureVector all(const std::string& u, const std::string& k) const {
    FeatureVector f;
    for (auto a : kActivityTypes) {
      f.values[slot(a)] = sim(u, k, a);
      f.values[4 + slot(a)] = co_sim(u, k, a);
    }
    return f;
  }

 private:
  const std::set<std::string>& items_of(const std::string& u, ActivityType a) const {
    static const std::set<std::string> none;
    auto it = acts_.find({u, a});
    return it == acts_.end() ? none : it->second;
  }

  bool overlap(const std::string& x, const std::string& k) const {
    auto ix = interests_.find(x), ik = interests_.find(k);
    if (ix == interests_.end() || ik == interests_.end()) return false;
    for (const auto& t : ix->second)
      if (ik->second.count(t)) return true;
    return false;
  }

  std::map<std::pair<std::string, ActivityType>, std::set<std::string>> acts_;
  std::vector<std::string> users_;
  const std::map<std::string, std::set<std::string>>& interests_;
};

inline std::map<std::string, std::set<std::string>> interest_map(const ItemInterests& ii) {
  std::map<std::string, std::set<std::string>> m;
  const auto& items = ii.corpus().items();
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& s = ii[static_cast<std::uint32_t>(i)].tags;
    m[items[i].item_id] = {s.begin(), s.end()};
  }
  return m;
}

/// O(P·N) Mann-Whitney count, exact in doubled integer units.
inline double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  std::uint64_t twice = 0;
  for (double p : pos)
    for (double n : neg) twice += p > n ? 2 : (p == n ? 1 : 0);
  return static_cast<double>(twice) /
         (2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

}  // namespace testing_support
