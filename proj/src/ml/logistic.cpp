#include "sentinel/error.hpp"
#include "sentinel/ml/learners.hpp"

#include <algorithm>

namespace sentinel::ml {

LogisticRegression LogisticRegression::fit(const Matrix& x, std::span<const int> y, const LogisticOptions& opts) {
  check_training_data(x, y);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  LogisticRegression lr;
  lr.w_.assign(d, 0.0);
  std::vector<double> gw(d);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t it = 0; it < opts.iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double err = lr.score(x.row(i)) - (y[i] == 1 ? 1.0 : 0.0);
      for (std::size_t j = 0; j < d; ++j) {
        gw[j] += err * x.at(i, j);
      }
      gb += err;
    }
    for (std::size_t j = 0; j < d; ++j) {
      lr.w_[j] -= opts.learning_rate * (gw[j] * inv + opts.l2 * lr.w_[j]);
    }
    lr.b_ -= opts.learning_rate * gb * inv;
  }
  return lr;
}

double LogisticRegression::score(std::span<const double> x) const {
  double z = b_;
  for (std::size_t j = 0; j < w_.size(); ++j) {
    z += w_[j] * x[j];
  }
  return logistic(z);
}

void LogisticRegression::write(ByteWriter& w) const {
  w.f64s(w_);
  w.f64(b_);
}

LogisticRegression LogisticRegression::read(ByteReader& r) {
  LogisticRegression lr;
  lr.w_ = r.f64s();
  lr.b_ = r.f64();
  return lr;
}

} // namespace sentinel::ml
