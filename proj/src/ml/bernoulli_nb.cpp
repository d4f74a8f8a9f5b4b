#include "sentinel/error.hpp"
#include "sentinel/ml/learners.hpp"

#include <cmath>

namespace sentinel::ml {

BernoulliNb BernoulliNb::fit(const Matrix& x, std::span<const int> y, double alpha) {
  check_training_data(x, y);
  if (!(alpha > 0)) {
    throw Error(ErrorCode::InvalidArgument, "smoothing alpha must be positive");
  }
  const std::size_t d = x.cols();
  std::array<double, 2> class_count{};
  std::array<std::vector<double>, 2> present{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < x.rows(); ++r) {
    int c = y[r];
    class_count[c] += 1;
    for (auto j : x.nonzeros(r)) {
      if (x.at(r, j) > 0) {
        present[c][j] += 1;
      }
    }
  }
  BernoulliNb nb;
  for (int c = 0; c < 2; ++c) {
    nb.prior_[c] = class_count[c] / static_cast<double>(x.rows());
    nb.prob_[c].resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      nb.prob_[c][j] = (present[c][j] + alpha) / (class_count[c] + 2 * alpha);
    }
  }
  nb.prepare();
  return nb;
}

void BernoulliNb::prepare() {
  for (int c = 0; c < 2; ++c) {
    absent_sum_[c] = 0.0;
    present_delta_[c].resize(prob_[c].size());
    for (std::size_t j = 0; j < prob_[c].size(); ++j) {
      double p = prob_[c][j];
      absent_sum_[c] += std::log1p(-p);
      present_delta_[c][j] = std::log(p) - std::log1p(-p);
    }
  }
}

std::array<double, 2> BernoulliNb::joint_log_likelihood(std::span<const double> x) const {
  std::array<double, 2> out{};
  for (int c = 0; c < 2; ++c) {
    double s = std::log(prior_[c]) + absent_sum_[c];
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] > 0) {
        s += present_delta_[c][j];
      }
    }
    out[c] = s;
  }
  return out;
}

double BernoulliNb::score(std::span<const double> x) const {
  auto jll = joint_log_likelihood(x);
  return logistic(jll[1] - jll[0]);
}

void BernoulliNb::write(ByteWriter& w) const {
  w.f64(prior_[0]);
  w.f64(prior_[1]);
  w.f64s(prob_[0]);
  w.f64s(prob_[1]);
}

BernoulliNb BernoulliNb::read(ByteReader& r) {
  BernoulliNb nb;
  nb.prior_[0] = r.f64();
  nb.prior_[1] = r.f64();
  nb.prob_[0] = r.f64s();
  nb.prob_[1] = r.f64s();
  if (nb.prob_[0].size() != nb.prob_[1].size()) {
    throw Error(ErrorCode::Corrupt, "naive Bayes class tables differ in width");
  }
  for (int c = 0; c < 2; ++c) {
    if (!(nb.prior_[c] > 0 && nb.prior_[c] < 1)) {
      throw Error(ErrorCode::Corrupt, "naive Bayes prior out of range");
    }
    for (double p : nb.prob_[c]) {
      if (!(p > 0 && p < 1)) {
        throw Error(ErrorCode::Corrupt, "naive Bayes probability out of range");
      }
    }
  }
  nb.prepare();
  return nb;
}

} // namespace sentinel::ml
