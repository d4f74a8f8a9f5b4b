#include "sentinel/folds.hpp"

#include "sentinel/error.hpp"
#include "sentinel/rng.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace sentinel {

std::vector<std::vector<std::size_t>> stratified_k_fold(std::span<const int> labels, std::size_t k,
                                                         std::uint64_t seed) {
  if (k < 2) {
    throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(i);
  }
  for (const auto& [cls, members] : by_class) {
    if (members.size() < k) {
      throw Error(ErrorCode::ClassTooSmall, "class " + std::to_string(cls) + " has " +
                                                std::to_string(members.size()) + " examples, fewer than k=" +
                                                std::to_string(k));
    }
  }
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t dealt = 0;
  for (auto& [cls, members] : by_class) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(static_cast<std::int64_t>(cls))}));
    rng.shuffle(members);
    for (auto idx : members) {
      folds[dealt++ % k].push_back(idx);
    }
  }
  for (auto& f : folds) {
    std::sort(f.begin(), f.end());
  }
  return folds;
}

std::vector<std::size_t> fold_complement(std::size_t n, std::span<const std::size_t> fold) {
  std::vector<bool> held(n, false);
  for (auto i : fold) {
    held.at(i) = true;
  }
  std::vector<std::size_t> out;
  out.reserve(n - fold.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!held[i]) {
      out.push_back(i);
    }
  }
  return out;
}

} // namespace sentinel
