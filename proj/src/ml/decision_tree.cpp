#include "sentinel/error.hpp"
#include "sentinel/ml/learners.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sentinel::ml {

namespace {

double gini(double w0, double w1) {
  double w = w0 + w1;
  if (w <= 0) {
    return 0.0;
  }
  double p0 = w0 / w;
  double p1 = w1 / w;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

class TreeBuilder {
public:
  TreeBuilder(const Matrix& x, std::span<const int> y, const TreeOptions& opts, std::span<const std::uint32_t> weights,
              Rng* rng)
      : y_(y), opts_(opts), rng_(rng), n_(x.rows()), d_(x.cols()), cols_(x.rows() * x.cols()), w_(x.rows(), 1.0) {
    for (std::size_t r = 0; r < n_; ++r) {
      for (auto c : x.nonzeros(r)) {
        cols_[c * n_ + r] = x.at(r, c);
      }
    }
    if (!weights.empty()) {
      if (weights.size() != n_) {
        throw Error(ErrorCode::LengthMismatch, "sample weight count differs from row count");
      }
      std::transform(weights.begin(), weights.end(), w_.begin(), [](std::uint32_t v) { return double(v); });
    }
    subsample_ = opts_.max_features > 0 && opts_.max_features < d_;
    if (subsample_ && rng_ == nullptr) {
      throw Error(ErrorCode::InvalidArgument, "feature subsampling needs a random stream");
    }
    perm_.resize(d_);
  }

  std::vector<DecisionTree::Node> build() {
    std::vector<std::size_t> samples;
    for (std::size_t i = 0; i < n_; ++i) {
      if (w_[i] > 0) {
        samples.push_back(i);
      }
    }
    grow(samples, 0);
    return std::move(nodes_);
  }

private:
  double value(std::size_t feature, std::size_t sample) const { return cols_[feature * n_ + sample]; }

  std::int32_t grow(const std::vector<std::size_t>& samples, std::size_t depth) {
    double c0 = 0;
    double c1 = 0;
    for (auto i : samples) {
      (y_[i] == 1 ? c1 : c0) += w_[i];
    }
    auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_[id].score = c1 / (c0 + c1);
    bool stop = c0 == 0 || c1 == 0 || (opts_.max_depth > 0 && depth >= opts_.max_depth) ||
                c0 + c1 < static_cast<double>(opts_.min_samples_split);
    if (stop) {
      return id;
    }
    Split best = find_split(samples, c0, c1);
    if (best.feature < 0) {
      return id;
    }
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto i : samples) {
      (value(static_cast<std::size_t>(best.feature), i) <= best.threshold ? left : right).push_back(i);
    }
    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    auto l = grow(left, depth + 1);
    auto r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  Split find_split(const std::vector<std::size_t>& samples, double c0, double c1) {
    const double total = c0 + c1;
    const double parent = gini(c0, c1);
    Split best;
    std::size_t budget = subsample_ ? opts_.max_features : d_;
    std::size_t evaluated = 0;
    if (subsample_) {
      std::iota(perm_.begin(), perm_.end(), 0);
    }
    std::vector<std::pair<double, std::size_t>> vals;
    vals.reserve(samples.size());
    for (std::size_t k = 0; k < d_ && evaluated < budget; ++k) {
      std::size_t j = k;
      if (subsample_) {
        // Lazy Fisher-Yates: pick the next feature uniformly from the unvisited ones.
        std::size_t pick = k + static_cast<std::size_t>(rng_->below(d_ - k));
        std::swap(perm_[k], perm_[pick]);
        j = perm_[k];
      }
      double lo = value(j, samples.front());
      double hi = lo;
      for (auto i : samples) {
        double v = value(j, i);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo == hi) {
        continue;
      }
      ++evaluated;
      vals.clear();
      for (auto i : samples) {
        vals.emplace_back(value(j, i), i);
      }
      std::sort(vals.begin(), vals.end());
      double l0 = 0;
      double l1 = 0;
      for (std::size_t p = 0; p + 1 < vals.size(); ++p) {
        (y_[vals[p].second] == 1 ? l1 : l0) += w_[vals[p].second];
        double a = vals[p].first;
        double b = vals[p + 1].first;
        if (a == b) {
          continue;
        }
        double wl = l0 + l1;
        double wr = total - wl;
        double gain = parent - (wl / total) * gini(l0, l1) - (wr / total) * gini(c0 - l0, c1 - l1);
        if (gain > best.gain + 1e-12) {
          double t = a + (b - a) / 2;
          if (!(t < b)) {
            t = a;
          }
          best = {static_cast<std::int32_t>(j), t, gain};
        }
      }
    }
    return best;
  }

  std::span<const int> y_;
  const TreeOptions& opts_;
  Rng* rng_;
  bool subsample_ = false;
  std::size_t n_;
  std::size_t d_;
  std::vector<double> cols_; ///< column-major copy
  std::vector<double> w_;
  std::vector<std::size_t> perm_;
  std::vector<DecisionTree::Node> nodes_;
};

} // namespace

DecisionTree DecisionTree::fit(const Matrix& x, std::span<const int> y, const TreeOptions& opts,
                               std::span<const std::uint32_t> weights, Rng* rng) {
  check_training_data(x, y);
  DecisionTree tree;
  tree.nodes_ = TreeBuilder(x, y, opts, weights, rng).build();
  return tree;
}

double DecisionTree::score(std::span<const double> x) const {
  std::int32_t id = 0;
  while (nodes_[id].feature >= 0) {
    const auto& node = nodes_[id];
    id = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[id].score;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (nodes_[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

void DecisionTree::write(ByteWriter& w) const {
  w.u32(static_cast<std::uint32_t>(nodes_.size()));
  for (const auto& n : nodes_) {
    w.i32(n.feature);
    w.f64(n.threshold);
    w.i32(n.left);
    w.i32(n.right);
    w.f64(n.score);
  }
}

DecisionTree DecisionTree::read(ByteReader& r) {
  DecisionTree tree;
  auto count = r.u32();
  if (count == 0 || count > r.remaining() / 28) {
    throw Error(ErrorCode::Corrupt, "bad decision tree node count");
  }
  tree.nodes_.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto& n = tree.nodes_[i];
    n.feature = r.i32();
    n.threshold = r.f64();
    n.left = r.i32();
    n.right = r.i32();
    n.score = r.f64();
    // children always follow their parent, which rules out cycles
    if (n.feature >= 0 && (n.left <= static_cast<std::int32_t>(i) || n.right <= static_cast<std::int32_t>(i) ||
                           n.left >= static_cast<std::int32_t>(count) || n.right >= static_cast<std::int32_t>(count))) {
      throw Error(ErrorCode::Corrupt, "decision tree child index out of range");
    }
  }
  return tree;
}

} // namespace sentinel::ml
