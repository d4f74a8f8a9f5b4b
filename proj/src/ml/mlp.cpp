#include "sentinel/error.hpp"
#include "sentinel/ml/learners.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace sentinel::ml {

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

} // namespace

Mlp Mlp::initialize(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
  if (inputs == 0 || hidden == 0) {
    throw Error(ErrorCode::InvalidArgument, "MLP needs at least one input and one hidden unit");
  }
  Mlp net;
  net.inputs_ = inputs;
  net.hidden_ = hidden;
  Rng rng(derive_seed(seed, {0x4d4c50}));
  const double lim1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
  const double lim2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  net.w1_.resize(inputs * hidden);
  for (auto& w : net.w1_) {
    w = rng.uniform(-lim1, lim1);
  }
  net.b1_.assign(hidden, 0.0);
  net.w2_.resize(hidden);
  for (auto& w : net.w2_) {
    w = rng.uniform(-lim2, lim2);
  }
  net.b2_ = 0.0;
  return net;
}

std::vector<double> Mlp::parameters() const {
  std::vector<double> p;
  p.reserve(w1_.size() + 2 * hidden_ + 1);
  p.insert(p.end(), w1_.begin(), w1_.end());
  p.insert(p.end(), b1_.begin(), b1_.end());
  p.insert(p.end(), w2_.begin(), w2_.end());
  p.push_back(b2_);
  return p;
}

void Mlp::set_parameters(std::span<const double> params) {
  if (params.size() != w1_.size() + 2 * hidden_ + 1) {
    throw Error(ErrorCode::WidthMismatch, "parameter vector has the wrong length");
  }
  auto it = params.begin();
  std::copy(it, it + static_cast<std::ptrdiff_t>(w1_.size()), w1_.begin());
  it += static_cast<std::ptrdiff_t>(w1_.size());
  std::copy(it, it + static_cast<std::ptrdiff_t>(hidden_), b1_.begin());
  it += static_cast<std::ptrdiff_t>(hidden_);
  std::copy(it, it + static_cast<std::ptrdiff_t>(hidden_), w2_.begin());
  it += static_cast<std::ptrdiff_t>(hidden_);
  b2_ = *it;
}

double Mlp::loss(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                 std::vector<double>* grad) const {
  const std::size_t H = hidden_;
  const std::size_t off_b1 = w1_.size();
  const std::size_t off_w2 = off_b1 + H;
  const std::size_t off_b2 = off_w2 + H;
  if (grad) {
    grad->assign(off_b2 + 1, 0.0);
  }
  std::vector<double> h(H);
  std::vector<double> da(H);
  const double inv = 1.0 / static_cast<double>(rows.size());
  double total = 0.0;
  for (auto r : rows) {
    const auto& nz = x.nonzeros(r);
    std::copy(b1_.begin(), b1_.end(), h.begin());
    for (auto j : nz) {
      const double xj = x.at(r, j);
      const double* wj = &w1_[j * H];
      for (std::size_t k = 0; k < H; ++k) {
        h[k] += xj * wj[k];
      }
    }
    double z = b2_;
    for (std::size_t k = 0; k < H; ++k) {
      h[k] = logistic(h[k]);
      z += w2_[k] * h[k];
    }
    const double yr = y[r] == 1 ? 1.0 : 0.0;
    total += softplus(z) - yr * z;
    if (!grad) {
      continue;
    }
    auto& g = *grad;
    const double dz = (logistic(z) - yr) * inv;
    g[off_b2] += dz;
    for (std::size_t k = 0; k < H; ++k) {
      g[off_w2 + k] += dz * h[k];
      da[k] = dz * w2_[k] * h[k] * (1.0 - h[k]);
      g[off_b1 + k] += da[k];
    }
    for (auto j : nz) {
      const double xj = x.at(r, j);
      double* gj = &g[j * H];
      for (std::size_t k = 0; k < H; ++k) {
        gj[k] += xj * da[k];
      }
    }
  }
  return total * inv;
}

Mlp Mlp::fit(const Matrix& x, std::span<const int> y, const MlpOptions& opts, std::uint64_t seed) {
  check_training_data(x, y);
  if (opts.epochs == 0 || opts.batch_size == 0 || opts.hidden_units == 0 || !(opts.learning_rate > 0)) {
    throw Error(ErrorCode::InvalidArgument, "MLP needs positive epochs, batch size, hidden units and learning rate");
  }
  Mlp net = initialize(x.cols(), opts.hidden_units, seed);
  auto params = net.parameters();
  const std::size_t P = params.size();
  std::vector<double> m(P, 0.0);
  std::vector<double> v(P, 0.0);
  std::vector<double> grad;
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  double b1t = 1.0;
  double b2t = 1.0;
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    Rng rng(derive_seed(seed, {0x4550, epoch}));
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
      std::size_t end = std::min(order.size(), start + opts.batch_size);
      std::span<const std::size_t> batch(order.data() + start, end - start);
      double l = net.loss(x, y, batch, &grad);
      epoch_loss += l * static_cast<double>(batch.size());
      b1t *= opts.beta1;
      b2t *= opts.beta2;
      const double c1 = 1.0 - b1t;
      const double c2 = 1.0 - b2t;
      for (std::size_t p = 0; p < P; ++p) {
        m[p] = opts.beta1 * m[p] + (1.0 - opts.beta1) * grad[p];
        v[p] = opts.beta2 * v[p] + (1.0 - opts.beta2) * grad[p] * grad[p];
        params[p] -= opts.learning_rate * (m[p] / c1) / (std::sqrt(v[p] / c2) + opts.epsilon);
      }
      net.set_parameters(params);
    }
    if (!std::isfinite(epoch_loss)) {
      throw Error(ErrorCode::NonfiniteLoss, "MLP loss diverged in epoch " + std::to_string(epoch + 1));
    }
  }
  return net;
}

double Mlp::score(std::span<const double> x) const {
  std::vector<double> h(b1_);
  for (std::size_t j = 0; j < inputs_; ++j) {
    if (x[j] != 0.0) {
      const double* wj = &w1_[j * hidden_];
      for (std::size_t k = 0; k < hidden_; ++k) {
        h[k] += x[j] * wj[k];
      }
    }
  }
  double z = b2_;
  for (std::size_t k = 0; k < hidden_; ++k) {
    z += w2_[k] * logistic(h[k]);
  }
  return logistic(z);
}

void Mlp::write(ByteWriter& w) const {
  w.u32(static_cast<std::uint32_t>(inputs_));
  w.u32(static_cast<std::uint32_t>(hidden_));
  w.f64s(w1_);
  w.f64s(b1_);
  w.f64s(w2_);
  w.f64(b2_);
}

Mlp Mlp::read(ByteReader& r) {
  Mlp net;
  net.inputs_ = r.u32();
  net.hidden_ = r.u32();
  net.w1_ = r.f64s();
  net.b1_ = r.f64s();
  net.w2_ = r.f64s();
  net.b2_ = r.f64();
  if (net.hidden_ == 0 || net.w1_.size() != net.inputs_ * net.hidden_ || net.b1_.size() != net.hidden_ ||
      net.w2_.size() != net.hidden_) {
    throw Error(ErrorCode::Corrupt, "MLP parameter blocks have inconsistent sizes");
  }
  return net;
}

} // namespace sentinel::ml
