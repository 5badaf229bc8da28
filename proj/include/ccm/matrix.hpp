#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace ccm {

/// Minimal dense row-major matrix. Sized for desk-scale network data,
/// not for large-scale linear algebra.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Mat& a, const Mat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

inline std::vector<double> matvec(const Mat& m, const std::vector<double>& v) {
  assert(static_cast<int>(v.size()) == m.cols());
  std::vector<double> out(m.rows(), 0.0);
  for (int r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (int c = 0; c < m.cols(); ++c) acc += m(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

}  // namespace ccm
