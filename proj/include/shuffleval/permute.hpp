#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shuffleval/errors.hpp"

namespace shuffleval {

// Largest k for which every non-identity permutation is enumerated (7! - 1 = 5039).
inline constexpr std::size_t kEnumerationCeiling = 7;

// Non-identity bijection on [0, k). Index convention: applying it to a list
// puts input[mapping[i]] at output position i.
class SegmentPermutation {
 public:
  // Throws ArgumentError unless mapping is a non-identity bijection.
  explicit SegmentPermutation(std::vector<std::size_t> mapping);

  std::size_t k() const noexcept { return mapping_.size(); }
  const std::vector<std::size_t>& mapping() const noexcept { return mapping_; }
  std::size_t operator[](std::size_t i) const { return mapping_[i]; }

  SegmentPermutation inverse() const;

  friend bool operator==(const SegmentPermutation&, const SegmentPermutation&) = default;
  friend auto operator<=>(const SegmentPermutation& a, const SegmentPermutation& b) {
    return a.mapping_ <=> b.mapping_;
  }

 private:
  std::vector<std::size_t> mapping_;
};

// All k! - 1 non-identity permutations in lexicographic order.
// k < 2 -> ArgumentError; k > kEnumerationCeiling -> CapacityError.
std::vector<SegmentPermutation> enumerate_nonidentity(std::size_t k);

// n_samples i.i.d. uniform draws from S_k minus the identity (with
// replacement), by Fisher-Yates plus rejection of the identity.
std::vector<SegmentPermutation> sample_nonidentity(std::size_t k, std::size_t n_samples,
                                                   std::uint64_t seed);

template <typename T>
std::vector<T> apply_permutation(const SegmentPermutation& perm, std::span<const T> items) {
  if (items.size() != perm.k())
    throw ArgumentError("apply: permutation of size " + std::to_string(perm.k()) +
                        " applied to " + std::to_string(items.size()) + " items");
  std::vector<T> out;
  out.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) out.push_back(items[perm[i]]);
  return out;
}

template <typename T>
std::vector<T> apply_permutation(const SegmentPermutation& perm, const std::vector<T>& items) {
  return apply_permutation(perm, std::span<const T>(items));
}

}  // namespace shuffleval
