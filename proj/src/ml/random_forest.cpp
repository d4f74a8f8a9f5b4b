#include "sentinel/error.hpp"
#include "sentinel/ml/learners.hpp"

#include <algorithm>
#include <cmath>

namespace sentinel::ml {

RandomForest RandomForest::fit(const Matrix& x, std::span<const int> y, const ForestOptions& opts,
                               std::uint64_t seed) {
  check_training_data(x, y);
  if (opts.n_trees == 0) {
    throw Error(ErrorCode::InvalidArgument, "a forest needs at least one tree");
  }
  TreeOptions tree_opts;
  tree_opts.max_depth = opts.max_depth;
  tree_opts.max_features = opts.max_features;
  if (tree_opts.max_features == 0) {
    tree_opts.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(x.cols()))));
  }
  tree_opts.max_features = std::min(tree_opts.max_features, x.cols());

  RandomForest forest;
  const std::size_t n = x.rows();
  for (std::size_t t = 0; t < opts.n_trees; ++t) {
    Rng rng(derive_seed(seed, {0x7265, t}));
    std::vector<std::uint32_t> counts(n, 1);
    if (opts.bootstrap) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        counts[static_cast<std::size_t>(rng.below(n))] += 1;
      }
    }
    // a bootstrap sample holding one class simply grows a single leaf
    forest.trees_.push_back(DecisionTree::fit(x, y, tree_opts, counts, &rng));
  }
  return forest;
}

double RandomForest::score(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : trees_) {
    sum += t.score(x);
  }
  return sum / static_cast<double>(trees_.size());
}

void RandomForest::write(ByteWriter& w) const {
  w.u32(static_cast<std::uint32_t>(trees_.size()));
  for (const auto& t : trees_) {
    t.write(w);
  }
}

RandomForest RandomForest::read(ByteReader& r) {
  RandomForest forest;
  auto count = r.u32();
  if (count == 0 || count > r.remaining()) {
    throw Error(ErrorCode::Corrupt, "bad forest tree count");
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    forest.trees_.push_back(DecisionTree::read(r));
  }
  return forest;
}

} // namespace sentinel::ml
