#pragma once

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

// Independent reference implementation of exact ShufflEval under the
// ascending-tag oracle: every ordering of the segments, both slot arrangements,
// ties to slot 1.
namespace bruteforce {

inline std::optional<long long> tag(const std::string& s) {
  std::size_t i = 0;
  while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == s.size()) return std::nullopt;
  long long v = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) v = v * 10 + (s[i++] - '0');
  return v;
}

inline int coherence(const std::vector<std::string>& segs) {
  int c = 0;
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const auto a = tag(segs[i]), b = tag(segs[i + 1]);
    if (a && b && *a < *b) ++c;
  }
  return c;
}

// Per-ordering preferences in lexicographic order of the index permutation.
inline std::vector<double> preferences(const std::vector<std::string>& segs) {
  std::vector<std::size_t> idx(segs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> out;
  const int c_orig = coherence(segs);
  while (std::next_permutation(idx.begin(), idx.end())) {
    std::vector<std::string> shuffled;
    for (auto i : idx) shuffled.push_back(segs[i]);
    const int c_perm = coherence(shuffled);
    const double original_in_slot1 = c_orig >= c_perm ? 1.0 : 0.0;  // tie -> slot 1 = original
    const double original_in_slot2 = c_perm >= c_orig ? 0.0 : 1.0;  // tie -> slot 1 = permuted
    out.push_back((original_in_slot1 + original_in_slot2) / 2.0);
  }
  return out;
}

inline double score(const std::vector<std::string>& segs) {
  const auto prefs = preferences(segs);
  return std::accumulate(prefs.begin(), prefs.end(), 0.0) / static_cast<double>(prefs.size());
}

}  // namespace bruteforce
