#include "tensor.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace mtcs {

std::size_t num_elements(const std::vector<std::size_t>& dims) {
  if (dims.empty()) throw ShapeError("tensor order must be at least 1");
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive");
    if (d > std::numeric_limits<std::size_t>::max() / n)
      throw ShapeError("tensor element count overflows size_t");
    n *= d;
  }
  return n;
}

DenseTensor::DenseTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), data_(num_elements(dims_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (data_.size() != num_elements(dims_))
    throw ShapeError("payload length does not match tensor dimensions");
}

std::size_t DenseTensor::dim(std::size_t mode) const {
  if (mode >= dims_.size()) throw ShapeError("mode index out of range");
  return dims_[mode];
}

std::size_t DenseTensor::offset(std::initializer_list<std::size_t> idx) const {
  if (idx.size() != dims_.size()) throw ShapeError("multi-index arity mismatch");
  std::size_t off = 0;
  std::size_t stride = 1;
  std::size_t mode = 0;
  for (std::size_t i : idx) {
    if (i >= dims_[mode]) throw ShapeError("index out of range");
    off += i * stride;
    stride *= dims_[mode];
    ++mode;
  }
  return off;
}

namespace {

// Sizes of the index groups below and above `mode` in the flat layout.
void split_sizes(const std::vector<std::size_t>& dims, std::size_t mode,
                 std::size_t& left, std::size_t& right) {
  left = 1;
  right = 1;
  for (std::size_t m = 0; m < mode; ++m) left *= dims[m];
  for (std::size_t m = mode + 1; m < dims.size(); ++m) right *= dims[m];
}

}  // namespace

Matrix unfold(const DenseTensor& t, std::size_t mode) {
  if (mode >= t.order()) throw ShapeError("unfold: mode index out of range");
  const auto& dims = t.dims();
  std::size_t left, right;
  split_sizes(dims, mode, left, right);
  const std::size_t rows = dims[mode];

  Matrix out(rows, left * right);
  const double* src = t.data();
  for (std::size_t r = 0; r < right; ++r) {
    for (std::size_t i = 0; i < rows; ++i) {
      const double* block = src + left * (i + rows * r);
      double* col = out.data() + i;  // column-major, stride = rows
      for (std::size_t l = 0; l < left; ++l) col[(l + left * r) * rows] = block[l];
    }
  }
  return out;
}

DenseTensor fold(const Matrix& m, std::size_t mode, const std::vector<std::size_t>& dims) {
  if (mode >= dims.size()) throw ShapeError("fold: mode index out of range");
  std::size_t left, right;
  split_sizes(dims, mode, left, right);
  const std::size_t rows = dims[mode];
  if (static_cast<std::size_t>(m.rows()) != rows ||
      static_cast<std::size_t>(m.cols()) != left * right)
    throw ShapeError("fold: matrix shape does not match target dimensions");

  DenseTensor out(dims);
  double* dst = out.data();
  for (std::size_t r = 0; r < right; ++r) {
    for (std::size_t i = 0; i < rows; ++i) {
      double* block = dst + left * (i + rows * r);
      const double* col = m.data() + i;
      for (std::size_t l = 0; l < left; ++l) block[l] = col[(l + left * r) * rows];
    }
  }
  return out;
}

DenseTensor mode_product(const DenseTensor& t, const Matrix& m, std::size_t mode) {
  if (mode >= t.order()) throw ShapeError("mode_product: mode index out of range");
  if (static_cast<std::size_t>(m.cols()) != t.dim(mode))
    throw ShapeError("mode_product: matrix columns must match tensor dimension " +
                     std::to_string(mode));
  if (m.rows() == 0) throw ShapeError("mode_product: matrix must have rows");
  std::vector<std::size_t> new_dims = t.dims();
  new_dims[mode] = static_cast<std::size_t>(m.rows());
  return fold(m * unfold(t, mode), mode, new_dims);
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double frobenius_norm(const DenseTensor& t) {
  double s = 0.0;
  for (double v : t.values()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const DenseTensor& t) {
  double m = 0.0;
  for (double v : t.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_entry(const DenseTensor& t) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : t.values()) m = std::max(m, v);
  return m;
}

double frobenius_distance(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims() != b.dims()) throw ShapeError("frobenius_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double relative_error(const DenseTensor& approx, const DenseTensor& ref) {
  const double denom = frobenius_norm(ref);
  if (denom == 0.0) throw NumericalError("relative_error: reference tensor is zero");
  return frobenius_distance(approx, ref) / denom;
}

DenseTensor add_scaled(const DenseTensor& a, double s, const DenseTensor& b) {
  if (a.dims() != b.dims()) throw ShapeError("add_scaled: dimension mismatch");
  DenseTensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * b[i];
  return out;
}

void scale(DenseTensor& t, double s) {
  for (double& v : t.values()) v *= s;
}

DenseTensor tensor_from_matrix(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw ShapeError("tensor_from_matrix: empty matrix");
  std::vector<double> data(m.data(), m.data() + m.size());
  return DenseTensor({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                     std::move(data));
}

Matrix matrix_from_tensor(const DenseTensor& t) {
  if (t.order() != 2) throw ShapeError("matrix_from_tensor: tensor must have order 2");
  return Eigen::Map<const Matrix>(t.data(), t.dim(0), t.dim(1));
}

}  // namespace mtcs
