#include "sentinel/error.hpp"
#include "sentinel/ml/learners.hpp"

#include <algorithm>
#include <numeric>

namespace sentinel::ml {

LinearSvm LinearSvm::fit(const Matrix& x, std::span<const int> y, const SvmOptions& opts, std::uint64_t seed) {
  check_training_data(x, y);
  if (!(opts.c > 0) || opts.epochs == 0) {
    throw Error(ErrorCode::InvalidArgument, "SVM needs C > 0 and at least one epoch");
  }
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const double lambda = 1.0 / (opts.c * static_cast<double>(n));
  // w = scale * v; the last slot of v is the bias weight on a constant 1 input
  std::vector<double> v(d + 1, 0.0);
  double scale = 1.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    Rng rng(derive_seed(seed, {0x5356, epoch}));
    rng.shuffle(order);
    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double yi = y[i] == 1 ? 1.0 : -1.0;
      double m = v[d];
      for (auto j : x.nonzeros(i)) {
        m += v[j] * x.at(i, j);
      }
      m *= scale;
      const double shrink = 1.0 - eta * lambda;
      if (shrink <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      if (yi * m < 1.0) {
        const double step = eta * yi / scale;
        for (auto j : x.nonzeros(i)) {
          v[j] += step * x.at(i, j);
        }
        v[d] += step;
      }
      if (scale < 1e-9) {
        for (auto& e : v) {
          e *= scale;
        }
        scale = 1.0;
      }
    }
  }
  LinearSvm svm;
  svm.w_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    svm.w_[j] = v[j] * scale;
  }
  svm.b_ = v[d] * scale;
  return svm;
}

double LinearSvm::margin(std::span<const double> x) const {
  double m = b_;
  for (std::size_t j = 0; j < w_.size(); ++j) {
    m += w_[j] * x[j];
  }
  return m;
}

double LinearSvm::score(std::span<const double> x) const { return logistic(margin(x)); }

double LinearSvm::hinge_loss(const Matrix& x, std::span<const int> y) const {
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double yi = y[i] == 1 ? 1.0 : -1.0;
    total += std::max(0.0, 1.0 - yi * margin(x.row(i)));
  }
  return x.rows() ? total / static_cast<double>(x.rows()) : 0.0;
}

void LinearSvm::write(ByteWriter& w) const {
  w.f64s(w_);
  w.f64(b_);
}

LinearSvm LinearSvm::read(ByteReader& r) {
  LinearSvm svm;
  svm.w_ = r.f64s();
  svm.b_ = r.f64();
  return svm;
}

} // namespace sentinel::ml
