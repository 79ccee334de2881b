#include "shuffleval/permute.hpp"

#include <algorithm>
#include <numeric>

#include "shuffleval/rng.hpp"

namespace shuffleval {
namespace {

bool is_identity(const std::vector<std::size_t>& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] != i) return false;
  return true;
}

}  // namespace

SegmentPermutation::SegmentPermutation(std::vector<std::size_t> mapping) : mapping_(std::move(mapping)) {
  std::vector<bool> seen(mapping_.size(), false);
  for (auto v : mapping_) {
    if (v >= mapping_.size() || seen[v]) throw ArgumentError("permutation mapping is not a bijection");
    seen[v] = true;
  }
  if (is_identity(mapping_)) throw ArgumentError("permutation mapping is the identity");
}

SegmentPermutation SegmentPermutation::inverse() const {
  std::vector<std::size_t> inv(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i) inv[mapping_[i]] = i;
  return SegmentPermutation(std::move(inv));
}

std::vector<SegmentPermutation> enumerate_nonidentity(std::size_t k) {
  if (k < 2) throw ArgumentError("enumerate_nonidentity: k must be >= 2 (got " + std::to_string(k) + ")");
  if (k > kEnumerationCeiling)
    throw CapacityError("enumerate_nonidentity: k=" + std::to_string(k) + " exceeds the exact-mode ceiling of " +
                        std::to_string(kEnumerationCeiling) + "; use sampling");
  std::vector<std::size_t> m(k);
  std::iota(m.begin(), m.end(), 0);
  std::vector<SegmentPermutation> out;
  while (std::next_permutation(m.begin(), m.end())) out.emplace_back(m);
  return out;
}

std::vector<SegmentPermutation> sample_nonidentity(std::size_t k, std::size_t n_samples, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("sample_nonidentity: k must be >= 2 (got " + std::to_string(k) + ")");
  Rng rng(seed);
  std::vector<SegmentPermutation> out;
  out.reserve(n_samples);
  std::vector<std::size_t> m(k);
  while (out.size() < n_samples) {
    std::iota(m.begin(), m.end(), 0);
    for (std::size_t i = k - 1; i > 0; --i) std::swap(m[i], m[uniform_index(rng, i + 1)]);
    if (!is_identity(m)) out.emplace_back(m);
  }
  return out;
}

}  // namespace shuffleval
