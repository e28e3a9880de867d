#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"

namespace crossact {

/// Lowercased, whitespace-trimmed tag.
inline std::string normalize_tag(std::string_view raw) {
  auto is_ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!raw.empty() && is_ws(raw.front())) raw.remove_prefix(1);
  while (!raw.empty() && is_ws(raw.back())) raw.remove_suffix(1);
  std::string out(raw);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct TagVocabulary {
  std::vector<std::string> tags;  // sorted, unique
  std::size_t built_from = 0;     // questions contributing at least one tag

  bool contains(std::string_view tag) const {
    return std::binary_search(tags.begin(), tags.end(), tag, std::less<>{});
  }
  std::size_t size() const { return tags.size(); }
};

/// Sorted set of tags drawn from a vocabulary.
struct InterestSet {
  std::vector<std::string> tags;

  bool empty() const { return tags.empty(); }
  bool contains(std::string_view t) const {
    return std::binary_search(tags.begin(), tags.end(), t, std::less<>{});
  }
  friend bool operator==(const InterestSet&, const InterestSet&) = default;
};

/// Union of normalized tags over every Stack Overflow question.
inline TagVocabulary build_vocabulary(std::span<const ItemRecord> items) {
  std::set<std::string> tags;
  std::size_t questions = 0, contributing = 0;
  for (const auto& it : items) {
    if (it.platform != PlatformId::StackOverflow) continue;
    ++questions;
    bool any = false;
    for (const auto& raw : it.raw_tags) {
      auto t = normalize_tag(raw);
      if (t.empty()) continue;
      tags.insert(std::move(t));
      any = true;
    }
    contributing += any;
  }
  if (questions == 0)
    throw std::invalid_argument("build_vocabulary: corpus has no Stack Overflow questions");
  return {{tags.begin(), tags.end()}, contributing};
}

inline TagVocabulary build_vocabulary(const Corpus& corpus) {
  return build_vocabulary(corpus.items());
}

namespace detail {

inline bool token_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '#' || c == '.' ||
         c == '-';
}

inline bool is_alnum(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

// Trailing '.' and '-' go; '+' and '#' stay ("c++", "c#"). Leading '-', '+'
// and '#' go; a leading dot survives only in front of a letter (".net").
inline std::string strip_token(std::string_view t) {
  while (!t.empty() && (t.back() == '.' || t.back() == '-')) t.remove_suffix(1);
  while (!t.empty() && (t.front() == '-' || t.front() == '+' || t.front() == '#'))
    t.remove_prefix(1);
  bool dotted = false;
  while (!t.empty() && t.front() == '.') {
    t.remove_prefix(1);
    dotted = true;
  }
  // stripping dots can expose more leading symbols, e.g. ".-x"
  while (!t.empty() && !is_alnum(t.front())) {
    t.remove_prefix(1);
    dotted = false;
  }
  if (t.empty()) return {};
  std::string out;
  if (dotted && t.front() >= 'a' && t.front() <= 'z') out += '.';
  out += t;
  return out;
}

}  // namespace detail

/// Candidate keywords of a free-text description: lowercased tokens over
/// [a-z0-9+#.-] with edge punctuation stripped, followed by hyphen-joined
/// bigrams of adjacent tokens ("objective c" -> "objective-c").
inline std::vector<std::string> normalize_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    auto t = detail::strip_token(cur);
    if (!t.empty()) tokens.push_back(std::move(t));
    cur.clear();
  };
  for (char raw : text) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
    if (detail::token_char(c)) cur += c;
    else flush();
  }
  flush();
  std::size_t n = tokens.size();
  for (std::size_t i = 0; i + 1 < n; ++i) tokens.push_back(tokens[i] + "-" + tokens[i + 1]);
  return tokens;
}

/// A question's interests are its normalized tags.
inline InterestSet infer_question_interests(const ItemRecord& item) {
  if (item.platform != PlatformId::StackOverflow)
    throw std::invalid_argument("infer_question_interests: not a Stack Overflow item: " +
                                item.item_id);
  std::set<std::string> tags;
  for (const auto& raw : item.raw_tags) {
    auto t = normalize_tag(raw);
    if (!t.empty()) tags.insert(std::move(t));
  }
  return {{tags.begin(), tags.end()}};
}

/// Vocabulary tags that appear as keywords in the repository description.
inline InterestSet infer_repo_interests(const ItemRecord& item, const TagVocabulary& vocab) {
  if (item.platform != PlatformId::GitHub)
    throw std::invalid_argument("infer_repo_interests: not a GitHub item: " + item.item_id);
  std::set<std::string> matched;
  for (auto& tok : normalize_tokenize(item.text))
    if (vocab.contains(tok)) matched.insert(std::move(tok));
  return {{matched.begin(), matched.end()}};
}

/// Interest sets for every corpus item, indexed like `Corpus::items()`.
class ItemInterests {
 public:
  ItemInterests() = default;
  ItemInterests(const Corpus& corpus, const TagVocabulary& vocab) : corpus_(corpus) {
    sets_.reserve(corpus.items().size());
    for (const auto& it : corpus.items())
      sets_.push_back(it.platform == PlatformId::StackOverflow ? infer_question_interests(it)
                                                               : infer_repo_interests(it, vocab));
  }

  std::size_t size() const { return sets_.size(); }
  const InterestSet& operator[](std::uint32_t item_index) const { return sets_[item_index]; }
  const InterestSet& at(const std::string& item_id) const {
    auto idx = corpus_.item_index(item_id);
    if (!idx) throw std::invalid_argument("unknown item: " + item_id);
    return sets_[*idx];
  }
  std::span<const InterestSet> sets() const { return sets_; }
  const Corpus& corpus() const { return corpus_; }

 private:
  Corpus corpus_;
  std::vector<InterestSet> sets_;
};

inline ItemInterests item_interests(const Corpus& corpus, const TagVocabulary& vocab) {
  return ItemInterests(corpus, vocab);
}

/// One line per item: {"item_id": ..., "tags": [...]} in item order.
inline void write_interests(const ItemInterests& interests, std::ostream& out) {
  const auto& items = interests.corpus().items();
  for (std::size_t i = 0; i < items.size(); ++i)
    out << nlohmann::json{{"item_id", items[i].item_id},
                          {"tags", interests[static_cast<std::uint32_t>(i)].tags}}
               .dump()
        << '\n';
}

}  // namespace crossact
