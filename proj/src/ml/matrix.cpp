#include "sentinel/error.hpp"
#include "sentinel/ml/learners.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sentinel::ml {

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0), nz_(rows) {}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(ErrorCode::WidthMismatch, "row " + std::to_string(r) + " has width " +
                                                std::to_string(rows[r].size()) + ", expected " +
                                                std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (rows[r][c] != 0.0) {
        m.set(r, c, rows[r][c]);
      }
    }
  }
  return m;
}

void Matrix::set(std::size_t r, std::size_t c, double v) {
  double& cell = data_.at(r * cols_ + c);
  auto& nz = nz_[r];
  auto it = std::lower_bound(nz.begin(), nz.end(), static_cast<std::uint32_t>(c));
  bool listed = it != nz.end() && *it == c;
  if (v != 0.0 && !listed) {
    nz.insert(it, static_cast<std::uint32_t>(c));
  } else if (v == 0.0 && listed) {
    nz.erase(it);
  }
  cell = v;
}

Matrix Matrix::select(std::span<const std::size_t> rows) const {
  Matrix m;
  m.rows_ = rows.size();
  m.cols_ = cols_;
  m.data_.resize(rows.size() * cols_);
  m.nz_.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
    m.nz_[i] = nz_[rows[i]];
  }
  return m;
}

void check_training_data(const Matrix& x, std::span<const int> y) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "feature matrix has " + std::to_string(x.rows()) + " rows but " +
                                               std::to_string(y.size()) + " labels");
  }
  bool seen[2] = {false, false};
  for (int label : y) {
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    }
    seen[label] = true;
  }
  if (!seen[0] || !seen[1]) {
    throw Error(ErrorCode::SingleClassData, "training data must contain both classes");
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (auto c : x.nonzeros(r)) {
      if (!std::isfinite(x.at(r, c))) {
        throw Error(ErrorCode::InvalidArgument, "non-finite feature value");
      }
    }
  }
}

} // namespace sentinel::ml
