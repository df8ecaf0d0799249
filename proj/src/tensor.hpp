#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace mtcs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Number of elements of a dense tensor with the given dimensions; throws on
// empty dims, zero extents and size_t overflow.
std::size_t num_elements(const std::vector<std::size_t>& dims);

// Dense N-way array of doubles stored first-index-fastest: element
// (i_0, ..., i_{N-1}) lives at flat offset  sum_n i_n * prod_{m<n} dim_m.
// For order 2 this coincides with column-major storage, so the mode-0
// unfolding of a matrix is the matrix itself.
class DenseTensor {
 public:
  DenseTensor() = default;

  // Zero-filled tensor.
  explicit DenseTensor(std::vector<std::size_t> dims);

  // Takes ownership of a flat payload; data.size() must equal the element
  // count implied by dims.
  DenseTensor(std::vector<std::size_t> dims, std::vector<double> data);

  std::size_t order() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(std::size_t mode) const;
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double operator[](std::size_t flat) const { return data_[flat]; }
  double& operator[](std::size_t flat) { return data_[flat]; }

  // Flat offset of a full multi-index (0-based, first index fastest).
  std::size_t offset(std::initializer_list<std::size_t> idx) const;
  double at(std::initializer_list<std::size_t> idx) const { return data_[offset(idx)]; }
  double& at(std::initializer_list<std::size_t> idx) { return data_[offset(idx)]; }

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> data_;
};

// Mode-n unfolding: I_n x prod_{m != n} I_m matrix whose columns enumerate
// the remaining indices in increasing mode order, first mode fastest.
Matrix unfold(const DenseTensor& t, std::size_t mode);

// Inverse of unfold; m must be shaped (dims[mode], prod of the others).
DenseTensor fold(const Matrix& m, std::size_t mode, const std::vector<std::size_t>& dims);

// Mode-n tensor-by-matrix product: unfold(result, mode) = m * unfold(t, mode);
// dims[mode] is replaced by m.rows().
DenseTensor mode_product(const DenseTensor& t, const Matrix& m, std::size_t mode);

// Kronecker product, block (i, j) = a(i, j) * b.
Matrix kronecker(const Matrix& a, const Matrix& b);

double frobenius_norm(const DenseTensor& t);
// Largest entry in absolute value.
double max_abs(const DenseTensor& t);
// Largest (signed) entry; this is the max(X) of the PSNR definition.
double max_entry(const DenseTensor& t);

// ||a - b||_F; dims must match.
double frobenius_distance(const DenseTensor& a, const DenseTensor& b);
// ||approx - ref||_F / ||ref||_F.
double relative_error(const DenseTensor& approx, const DenseTensor& ref);

// a + s * b, elementwise.
DenseTensor add_scaled(const DenseTensor& a, double s, const DenseTensor& b);
void scale(DenseTensor& t, double s);

// Order-2 bridges.
DenseTensor tensor_from_matrix(const Matrix& m);
Matrix matrix_from_tensor(const DenseTensor& t);

}  // namespace mtcs
