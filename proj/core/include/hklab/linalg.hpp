#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hklab {

/// Square matrix in compressed-row form. Rows are stored in full (both triangles) so that a
/// row-wise product has a fixed summation order and is bit-reproducible.
class CsrMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  CsrMatrix() = default;
  CsrMatrix(std::size_t n, std::vector<Triplet> triplets);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }

  void multiply(std::span<const double> x, std::span<double> y) const;
  double diagonal(std::size_t i) const;
  double row_sum(std::size_t i) const;

  template <typename Fn>
  void for_each_in_row(std::size_t i, Fn&& fn) const {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) fn(cols_[k], values_[k]);
  }

  /// max |a_ij - a_ji|.
  double asymmetry() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradient for a symmetric positive definite operator; x holds the initial guess.
CgResult conjugate_gradient(const LinearOperator& op, std::span<const double> b, std::span<double> x,
                            double rel_tol = 1e-12, int max_iter = 10000);

/// Dense row-major symmetric matrix used by the small-problem paths.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  explicit DenseMatrix(std::size_t size = 0) : n(size), a(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Symmetric eigendecomposition: eigenvalues ascending, eigenvectors as columns (row-major n x n).
void symmetric_eigen(const DenseMatrix& m, std::vector<double>& values, DenseMatrix& vectors);

/// Solves m x = b with a dense Cholesky-type factorization; m must be SPD.
std::vector<double> dense_spd_solve(const DenseMatrix& m, std::span<const double> b);

struct RayleighResult {
  double value = 0.0;
  std::vector<double> vector;
  int iterations = 0;
  std::string method;
  bool converged = true;
};

/// sup over f not constant of (f' N f) / (f' D f), where both forms are positive semidefinite
/// and the kernel of D is exactly the constants (a connected Dirichlet form). N must also
/// annihilate constants. The constant direction is deflated by adding a rank-one term to D.
RayleighResult max_generalized_rayleigh_dense(const DenseMatrix& numerator, const DenseMatrix& denominator);

/// Same quotient via power iteration on D^{-1} N with inner CG solves.
RayleighResult max_generalized_rayleigh_iterative(std::size_t n, const LinearOperator& numerator,
                                                  const LinearOperator& denominator, double rel_tol = 1e-10,
                                                  int max_iter = 10000);

}  // namespace hklab
