#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "interests.hpp"
#include "util.hpp"

namespace crossact {

inline constexpr std::uint32_t kNoUser = std::numeric_limits<std::uint32_t>::max();

/// Distinct items a user forked, watched, answered and favorited (u.RF,
/// u.RW, u.QA, u.QF), each sorted by item index.
struct ActivitySets {
  std::array<std::vector<std::uint32_t>, 4> items;

  const std::vector<std::uint32_t>& operator[](ActivityType a) const { return items[slot(a)]; }
  bool contains(ActivityType a, std::uint32_t item) const {
    const auto& s = items[slot(a)];
    return std::binary_search(s.begin(), s.end(), item);
  }
};

/// Per-user activity sets over a corpus view, indexed by corpus user index.
class ActivitySetTable {
 public:
  explicit ActivitySetTable(std::size_t users = 0) : sets_(users) {}

  std::size_t size() const { return sets_.size(); }
  const ActivitySets& operator[](std::uint32_t user) const {
    return user < sets_.size() ? sets_[user] : empty_;
  }
  ActivitySets& mutable_at(std::uint32_t user) { return sets_[user]; }

 private:
  std::vector<ActivitySets> sets_;
  ActivitySets empty_;
};

inline ActivitySetTable build_activity_sets(const CorpusView& view) {
  ActivitySetTable table(view.corpus().users().size());
  for (const auto& r : view.refs()) table.mutable_at(r.user).items[slot(r.activity)].push_back(r.item);
  for (std::uint32_t u = 0; u < table.size(); ++u)
    for (auto& s : table.mutable_at(u).items) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
  return table;
}

/// A co-participant and the number of items of the activity type shared with
/// the owning user.
struct CoEntry {
  std::uint32_t user;
  std::uint32_t shared;
  friend bool operator==(const CoEntry&, const CoEntry&) = default;
};

/// Optional per-user cap on co-participant lists; 0 keeps them exact.
struct CoCap {
  std::size_t max_per_user = 0;
  std::uint64_t seed = 1;
};

/// Co^A(u) for each activity type: users sharing at least one item of type A
/// with u. Symmetric and irreflexive when uncapped.
class CoParticipationIndex {
 public:
  CoParticipationIndex() = default;
  explicit CoParticipationIndex(std::size_t users) {
    for (auto& t : lists_) t.resize(users);
  }

  const std::vector<CoEntry>& operator()(ActivityType a, std::uint32_t user) const {
    const auto& t = lists_[slot(a)];
    return user < t.size() ? t[user] : empty_;
  }
  std::vector<CoEntry>& mutable_at(ActivityType a, std::uint32_t user) {
    return lists_[slot(a)][user];
  }
  std::size_t users() const { return lists_[0].size(); }

 private:
  std::array<std::vector<std::vector<CoEntry>>, 4> lists_;
  std::vector<CoEntry> empty_;
};

inline CoParticipationIndex build_co_index(const ActivitySetTable& sets, CoCap cap = {}) {
  const auto n = static_cast<std::uint32_t>(sets.size());
  CoParticipationIndex index(n);
  for (auto a : kActivityTypes) {
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> participants;
    for (std::uint32_t u = 0; u < n; ++u)
      for (auto item : sets[u][a]) participants[item].push_back(u);
    std::vector<std::vector<std::uint32_t>> partners(n);
    for (const auto& [_, users] : participants)
      for (auto u : users)
        for (auto v : users)
          if (u != v) partners[u].push_back(v);
    for (std::uint32_t u = 0; u < n; ++u) {
      auto& p = partners[u];
      std::sort(p.begin(), p.end());
      auto& out = index.mutable_at(a, u);
      for (std::size_t i = 0; i < p.size();) {
        std::size_t j = i;
        while (j < p.size() && p[j] == p[i]) ++j;
        out.push_back({p[i], static_cast<std::uint32_t>(j - i)});
        i = j;
      }
      if (cap.max_per_user > 0 && out.size() > cap.max_per_user) {
        Rng rng(derive_seed(cap.seed, (std::uint64_t{u} << 3) | slot(a)));
        shuffle(out, rng);
        out.resize(cap.max_per_user);
        std::sort(out.begin(), out.end(),
                  [](const CoEntry& x, const CoEntry& y) { return x.user < y.user; });
      }
      p = {};
    }
  }
  return index;
}

/// Item interest sets as sorted integer tag ids, for fast intersection.
class InterestIndex {
 public:
  InterestIndex() = default;
  explicit InterestIndex(const ItemInterests& interests) {
    std::unordered_map<std::string, std::uint32_t> ids;
    sets_.reserve(interests.size());
    for (const auto& s : interests.sets()) {
      std::vector<std::uint32_t> v;
      for (const auto& t : s.tags)
        v.push_back(ids.try_emplace(t, static_cast<std::uint32_t>(ids.size())).first->second);
      std::sort(v.begin(), v.end());
      sets_.push_back(std::move(v));
    }
  }

  std::size_t size() const { return sets_.size(); }

  /// I(a) ∩ I(b) ≠ ∅
  bool intersects(std::uint32_t a, std::uint32_t b) const {
    const auto& x = sets_[a];
    const auto& y = sets_[b];
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
      if (x[i] == y[j]) return true;
      if (x[i] < y[j]) ++i;
      else ++j;
    }
    return false;
  }

 private:
  std::vector<std::vector<std::uint32_t>> sets_;
};

/// Eight similarity scores for one (user, item) query, in fixed order.
struct FeatureVector {
  static constexpr std::size_t kSize = 8;
  std::array<double, kSize> values{};

  double& direct(ActivityType a) { return values[slot(a)]; }
  double& co(ActivityType a) { return values[4 + slot(a)]; }
  double direct(ActivityType a) const { return values[slot(a)]; }
  double co(ActivityType a) const { return values[4 + slot(a)]; }

  double sim_fork() const { return values[0]; }
  double sim_watch() const { return values[1]; }
  double sim_ans() const { return values[2]; }
  double sim_fav() const { return values[3]; }
  double sim_cofork() const { return values[4]; }
  double sim_cowatch() const { return values[5]; }
  double sim_coans() const { return values[6]; }
  double sim_cofav() const { return values[7]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline constexpr std::array<std::string_view, FeatureVector::kSize> kFeatureNames = {
    "sim_fork", "sim_watch", "sim_ans", "sim_fav",
    "sim_cofork", "sim_cowatch", "sim_coans", "sim_cofav"};

/// Everything needed to featurize queries against one corpus view.
struct FeatureContext {
  CorpusView view;
  ActivitySetTable sets;
  CoParticipationIndex co;
  std::shared_ptr<const InterestIndex> interests;

  const Corpus& corpus() const { return view.corpus(); }
};

inline FeatureContext make_feature_context(const CorpusView& view, const ItemInterests& interests,
                                           CoCap cap = {}) {
  auto sets = build_activity_sets(view);
  auto co = build_co_index(sets, cap);
  return {view, std::move(sets), std::move(co), std::make_shared<InterestIndex>(interests)};
}

namespace detail {

// |{x ∈ S \ {k} : I(x) ∩ I(k) ≠ ∅}| / |S \ {k}|, or 0 when S \ {k} is empty.
inline double evidence_ratio(const std::vector<std::uint32_t>& items, std::uint32_t k,
                             const InterestIndex& interests) {
  std::size_t size = 0, hits = 0;
  for (auto x : items) {
    if (x == k) continue;
    ++size;
    hits += interests.intersects(x, k);
  }
  return size == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(size);
}

// Macro average of per-co-participant ratios. A co-participant whose only
// shared item with u is k itself does not count. `ratio(v)` supplies the
// per-user evidence ratio.
template <class RatioFn>
double co_average(const FeatureContext& ctx, std::uint32_t u, std::uint32_t k, ActivityType a,
                  RatioFn&& ratio) {
  if (u == kNoUser) return 0.0;
  const bool u_has_k = ctx.sets[u].contains(a, k);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& e : ctx.co(a, u)) {
    std::uint32_t shared = e.shared;
    if (u_has_k && ctx.sets[e.user].contains(a, k)) --shared;
    if (shared == 0) continue;
    sum += ratio(e.user);
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace detail

/// Share of u's type-A items (excluding k) whose interests overlap k's.
inline double sim_activity(const FeatureContext& ctx, std::uint32_t u, std::uint32_t k,
                           ActivityType a) {
  if (k >= ctx.interests->size()) throw std::invalid_argument("sim_activity: unknown item index");
  if (u == kNoUser) return 0.0;
  return detail::evidence_ratio(ctx.sets[u][a], k, *ctx.interests);
}

/// Average of sim_activity(v, k, a) over co-participants v ∈ Co^A(u).
inline double sim_co_activity(const FeatureContext& ctx, std::uint32_t u, std::uint32_t k,
                              ActivityType a) {
  if (k >= ctx.interests->size())
    throw std::invalid_argument("sim_co_activity: unknown item index");
  return detail::co_average(ctx, u, k, a, [&](std::uint32_t v) {
    return detail::evidence_ratio(ctx.sets[v][a], k, *ctx.interests);
  });
}

namespace detail {

inline std::uint32_t resolve_item(const FeatureContext& ctx, const std::string& item_id) {
  auto k = ctx.corpus().item_index(item_id);
  if (!k) throw std::invalid_argument("unknown item: " + item_id);
  return *k;
}

inline std::uint32_t resolve_user(const FeatureContext& ctx, const std::string& user_id) {
  return ctx.corpus().user_index(user_id).value_or(kNoUser);
}

}  // namespace detail

inline double sim_activity(const FeatureContext& ctx, const std::string& user_id,
                           const std::string& item_id, ActivityType a) {
  return sim_activity(ctx, detail::resolve_user(ctx, user_id), detail::resolve_item(ctx, item_id), a);
}

inline double sim_co_activity(const FeatureContext& ctx, const std::string& user_id,
                              const std::string& item_id, ActivityType a) {
  return sim_co_activity(ctx, detail::resolve_user(ctx, user_id),
                         detail::resolve_item(ctx, item_id), a);
}

inline FeatureVector featurize_pair(const FeatureContext& ctx, std::uint32_t u, std::uint32_t k) {
  FeatureVector f;
  for (auto a : kActivityTypes) {
    f.direct(a) = sim_activity(ctx, u, k, a);
    f.co(a) = sim_co_activity(ctx, u, k, a);
  }
  return f;
}

/// Unknown users get the all-zero vector; unknown items throw.
inline FeatureVector featurize_pair(const FeatureContext& ctx, const std::string& user_id,
                                    const std::string& item_id) {
  return featurize_pair(ctx, detail::resolve_user(ctx, user_id), detail::resolve_item(ctx, item_id));
}

struct QueryPair {
  std::uint32_t user;  // kNoUser for users absent from the corpus
  std::uint32_t item;
};

/// Same values as featurize_pair for each query, computed item by item so
/// every co-participant's ratio is evaluated once per query item.
inline std::vector<FeatureVector> featurize_batch(const FeatureContext& ctx,
                                                  std::span<const QueryPair> queries,
                                                  unsigned threads = 1) {
  std::vector<FeatureVector> out(queries.size());
  std::unordered_map<std::uint32_t, std::vector<std::size_t>> by_item;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (queries[i].item >= ctx.interests->size())
      throw std::invalid_argument("featurize_batch: unknown item index");
    by_item[queries[i].item].push_back(i);
  }
  std::vector<std::uint32_t> items;
  items.reserve(by_item.size());
  for (const auto& [k, _] : by_item) items.push_back(k);
  std::sort(items.begin(), items.end());

  const auto n_users = static_cast<std::uint32_t>(ctx.sets.size());
  parallel_for(items.size(), threads, [&](std::size_t g) {
    const auto k = items[g];
    std::array<std::vector<double>, 4> column;
    for (auto a : kActivityTypes) {
      auto& col = column[slot(a)];
      col.resize(n_users);
      for (std::uint32_t v = 0; v < n_users; ++v)
        col[v] = detail::evidence_ratio(ctx.sets[v][a], k, *ctx.interests);
    }
    for (auto qi : by_item.at(k)) {
      auto u = queries[qi].user;
      auto& f = out[qi];
      for (auto a : kActivityTypes) {
        const auto& col = column[slot(a)];
        f.direct(a) = (u == kNoUser || u >= n_users) ? 0.0 : col[u];
        f.co(a) = detail::co_average(ctx, u, k, a, [&](std::uint32_t v) { return col[v]; });
      }
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Feature configurations
// ---------------------------------------------------------------------------

enum class FeatureConfig : std::uint8_t { SO_Act, SO_CoAct, GH_Act, GH_CoAct, ALL };

inline constexpr std::array<FeatureConfig, 5> kFeatureConfigs = {
    FeatureConfig::SO_Act, FeatureConfig::SO_CoAct, FeatureConfig::GH_Act, FeatureConfig::GH_CoAct,
    FeatureConfig::ALL};

inline std::string_view to_string(FeatureConfig c) {
  switch (c) {
    case FeatureConfig::SO_Act: return "SO_Act";
    case FeatureConfig::SO_CoAct: return "SO_CoAct";
    case FeatureConfig::GH_Act: return "GH_Act";
    case FeatureConfig::GH_CoAct: return "GH_CoAct";
    case FeatureConfig::ALL: return "ALL";
  }
  return "?";
}

inline FeatureConfig parse_feature_config(std::string_view s) {
  for (auto c : kFeatureConfigs)
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown feature configuration: " + std::string(s));
}

/// Positions within FeatureVector used by a configuration.
inline std::vector<std::size_t> config_columns(FeatureConfig c) {
  switch (c) {
    case FeatureConfig::SO_Act: return {2, 3};
    case FeatureConfig::SO_CoAct: return {6, 7};
    case FeatureConfig::GH_Act: return {0, 1};
    case FeatureConfig::GH_CoAct: return {4, 5};
    case FeatureConfig::ALL: return {0, 1, 2, 3, 4, 5, 6, 7};
  }
  return {};
}

inline std::vector<double> select_config(const FeatureVector& v, FeatureConfig c) {
  std::vector<double> out;
  for (auto i : config_columns(c)) out.push_back(v.values[i]);
  return out;
}

}  // namespace crossact
