#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sentinel {

/// Splits indices into k disjoint, covering folds that preserve class proportions.
/// Each class is shuffled with its own seeded stream, then dealt round-robin with the
/// fold counter carried across classes. Returns the test indices of each fold, sorted.
/// Throws Error(InvalidArgument) for k < 2 and Error(ClassTooSmall) when a present
/// class has fewer than k members.
std::vector<std::vector<std::size_t>> stratified_k_fold(std::span<const int> labels, std::size_t k,
                                                         std::uint64_t seed);

/// Complement of one fold, sorted.
std::vector<std::size_t> fold_complement(std::size_t n, std::span<const std::size_t> fold);

} // namespace sentinel
