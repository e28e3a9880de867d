#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "interests.hpp"

namespace crossact {

struct TagUsageRow {
  std::string tag;
  std::size_t items = 0;  // distinct participated items carrying the tag
  double percent = 0.0;

  friend bool operator==(const TagUsageRow&, const TagUsageRow&) = default;
};

/// Per activity type: how often each tag occurs among the distinct items
/// participated in, as a percentage of those items.
struct TagUsageTable {
  std::array<std::size_t, 4> item_totals{};
  std::array<std::vector<TagUsageRow>, 4> rows;

  const std::vector<TagUsageRow>& operator[](ActivityType a) const { return rows[slot(a)]; }
};

/// Rows are sorted by count descending, then tag ascending; top_k == 0 keeps
/// every tag.
inline TagUsageTable tag_usage_stats(const CorpusView& view, const ItemInterests& interests,
                                     std::size_t top_k = 10) {
  TagUsageTable table;
  for (auto a : kActivityTypes) {
    std::vector<std::uint32_t> items;
    for (const auto& r : view.refs())
      if (r.activity == a) items.push_back(r.item);
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    std::map<std::string, std::size_t> counts;
    for (auto k : items)
      for (const auto& t : interests[k].tags) ++counts[t];
    auto& rows = table.rows[slot(a)];
    table.item_totals[slot(a)] = items.size();
    for (const auto& [tag, c] : counts)
      rows.push_back({tag, c, 100.0 * static_cast<double>(c) / static_cast<double>(items.size())});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const TagUsageRow& x, const TagUsageRow& y) { return x.items > y.items; });
    if (top_k > 0 && rows.size() > top_k) rows.resize(top_k);
  }
  return table;
}

/// TSV: activity, rank, tag, items, total, percent (3 decimals).
inline void write_tag_usage(const TagUsageTable& table, std::ostream& out) {
  out << "activity\trank\ttag\titems\ttotal\tpercent\n";
  char pct[32];
  for (auto a : kActivityTypes) {
    const auto& rows = table[a];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::snprintf(pct, sizeof pct, "%.3f", rows[i].percent);
      out << to_string(a) << '\t' << i + 1 << '\t' << rows[i].tag << '\t' << rows[i].items << '\t'
          << table.item_totals[slot(a)] << '\t' << pct << '\n';
    }
  }
}

}  // namespace crossact
