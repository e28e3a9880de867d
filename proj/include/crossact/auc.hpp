#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crossact {

namespace detail {

// Sorted (score, is_positive) pairs, descending by score.
inline std::vector<std::pair<double, bool>> merged_desc(std::span<const double> pos,
                                                       std::span<const double> neg) {
  std::vector<std::pair<double, bool>> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.emplace_back(s, true);
  for (double s : neg) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return all;
}

inline void require_both(std::span<const double> pos, std::span<const double> neg, const char* who) {
  if (pos.empty() || neg.empty())
    throw std::invalid_argument(std::string(who) + ": both score lists must be non-empty");
}

}  // namespace detail

/// Mann-Whitney AUC: P(pos > neg) + 0.5 P(pos == neg), via tie-corrected
/// midranks. Doubled ranks are integers so the result is exactly the
/// pairwise count divided by |pos|*|neg|.
inline double compute_auc(std::span<const double> pos, std::span<const double> neg) {
  detail::require_both(pos, neg, "compute_auc");
  std::vector<std::pair<double, bool>> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.emplace_back(s, true);
  for (double s : neg) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  // Sum of doubled midranks over positives. Group [i, j) gets ranks i+1..j,
  // whose doubled mean is i + j + 1.
  std::uint64_t rank_sum2 = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::uint64_t group_pos = 0;
    while (j < all.size() && all[j].first == all[i].first) group_pos += all[j++].second;
    rank_sum2 += group_pos * (i + j + 1);
    i = j;
  }
  const std::uint64_t p = pos.size(), n = neg.size();
  const std::uint64_t u2 = rank_sum2 - p * (p + 1);  // 2 * U statistic
  return static_cast<double>(u2) / (2.0 * static_cast<double>(p) * static_cast<double>(n));
}

struct RocPoint {
  double fpr;
  double tpr;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// ROC path from (0,0) to (1,1) with one point per distinct score threshold;
/// tied scores move diagonally.
inline std::vector<RocPoint> roc_points(std::span<const double> pos, std::span<const double> neg) {
  detail::require_both(pos, neg, "roc_points");
  auto all = detail::merged_desc(pos, neg);
  const double p = static_cast<double>(pos.size()), n = static_cast<double>(neg.size());
  std::vector<RocPoint> out{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) {
      (all[j].second ? tp : fp) += 1;
      ++j;
    }
    out.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p});
    i = j;
  }
  return out;
}

inline double trapezoid_area(std::span<const RocPoint> pts) {
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) * 0.5;
  return area;
}

}  // namespace crossact
