#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dra {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

// Dense row-major matrix. Used for Laplacians, Gram systems, and the
// symmetric eigensolver; the simulation hot path never touches it.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const Vec& data() const { return a_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  Vec a_;
};

// Solves A x = b by Gaussian elimination with partial pivoting.
// Returns false if A is singular to working precision. A and b are copied;
// intended for the tiny systems arising in active-set projection (order <= 4).
bool solve_linear(Mat a, Vec b, Vec& x);

// All eigenvalues of a symmetric matrix, ascending. Householder
// tridiagonalization followed by QL iteration with implicit shifts
// (the classic tred2/tql2 pair, eigenvalues only).
Vec symmetric_eigenvalues(const Mat& a);

}  // namespace dra
