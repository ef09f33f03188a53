#include "hklab/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hklab {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> view(const DenseMatrix& m) {
  return Eigen::Map<const RowMatrix>(m.a.data(), static_cast<Eigen::Index>(m.n), static_cast<Eigen::Index>(m.n));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CsrMatrix::CsrMatrix(std::size_t n, std::vector<Triplet> triplets) : n_(n) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(n + 1, 0);
  cols_.reserve(triplets.size());
  values_.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size();) {
    const auto& t = triplets[k];
    if (t.row >= n || t.col >= n) throw std::out_of_range("CsrMatrix triplet outside matrix");
    double v = 0.0;
    std::size_t j = k;
    while (j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col) v += triplets[j++].value;
    cols_.push_back(t.col);
    values_.push_back(v);
    ++row_ptr_[t.row + 1];
    k = j;
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] += row_ptr_[i];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[cols_[k]];
    y[i] = s;
  }
}

double CsrMatrix::diagonal(std::size_t i) const {
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    if (cols_[k] == i) return values_[k];
  return 0.0;
}

double CsrMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k];
  return s;
}

double CsrMatrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t j = cols_[k];
      double back = 0.0;
      for (std::size_t m = row_ptr_[j]; m < row_ptr_[j + 1]; ++m)
        if (cols_[m] == i) back = values_[m];
      worst = std::max(worst, std::abs(values_[k] - back));
    }
  }
  return worst;
}

CgResult conjugate_gradient(const LinearOperator& op, std::span<const double> b, std::span<double> x, double rel_tol,
                            int max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), p(n), ap(n);
  op(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  const double bnorm = std::sqrt(dot(b, b));
  CgResult res;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  p = r;
  double rr = dot(r, r);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    res.relative_residual = std::sqrt(rr) / bnorm;
    if (res.relative_residual <= rel_tol) {
      res.converged = true;
      return res;
    }
    op(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double step = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * ap[i];
    }
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  res.relative_residual = std::sqrt(rr) / bnorm;
  res.converged = res.relative_residual <= rel_tol;
  return res;
}

void symmetric_eigen(const DenseMatrix& m, std::vector<double>& values, DenseMatrix& vectors) {
  Eigen::SelfAdjointEigenSolver<RowMatrix> es(view(m));
  if (es.info() != Eigen::Success) throw std::runtime_error("symmetric eigendecomposition failed");
  values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  vectors = DenseMatrix(m.n);
  const auto& v = es.eigenvectors();
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) vectors(i, j) = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

std::vector<double> dense_spd_solve(const DenseMatrix& m, std::span<const double> b) {
  Eigen::LDLT<RowMatrix> ldlt(view(m));
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("dense factorization failed");
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = ldlt.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

RayleighResult max_generalized_rayleigh_dense(const DenseMatrix& numerator, const DenseMatrix& denominator) {
  const std::size_t n = numerator.n;
  if (n < 2) return {0.0, std::vector<double>(n, 0.0), 0, "dense", true};
  RowMatrix dp = view(denominator);
  const double shift = std::max(dp.trace() / static_cast<double>(n), 1e-300);
  dp.array() += shift / static_cast<double>(n);
  Eigen::GeneralizedSelfAdjointEigenSolver<RowMatrix> ges(view(numerator), dp, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) throw std::runtime_error("generalized eigensolver failed (denominator not definite)");
  const Eigen::Index top = static_cast<Eigen::Index>(n) - 1;
  RayleighResult out;
  out.value = ges.eigenvalues()(top);
  Eigen::VectorXd v = ges.eigenvectors().col(top);
  v.array() -= v.mean();
  // Fix the sign so the witness is reproducible.
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
  out.vector.assign(v.data(), v.data() + v.size());
  out.method = "dense";
  return out;
}

RayleighResult max_generalized_rayleigh_iterative(std::size_t n, const LinearOperator& numerator,
                                                  const LinearOperator& denominator, double rel_tol, int max_iter) {
  RayleighResult out;
  out.method = "power-cg";
  if (n < 2) {
    out.vector.assign(n, 0.0);
    return out;
  }
  std::vector<double> ones(n, 1.0), dones(n);
  denominator(ones, dones);
  // Rank-one deflation shift, same as the dense path.
  std::vector<double> probe(n, 0.0), dprobe(n);
  double trace = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(n, 64); ++i) {
    std::fill(probe.begin(), probe.end(), 0.0);
    probe[i] = 1.0;
    denominator(probe, dprobe);
    trace += dprobe[i];
  }
  const double shift = trace / static_cast<double>(std::min<std::size_t>(n, 64));
  LinearOperator deflated = [&](std::span<const double> x, std::span<double> y) {
    denominator(x, y);
    double s = 0.0;
    for (double v : x) s += v;
    const double add = shift * s / static_cast<double>(n);
    for (double& v : y) v += add;
  };

  std::vector<double> f(n), nf(n), df(n), g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::cos(3.0 * static_cast<double>(i) + 0.5) + 1e-3 * static_cast<double>(i);
  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(n);
    double norm = 0.0;
    for (double& v : f) {
      v -= mean;
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : f) v /= norm;
    numerator(f, nf);
    denominator(f, df);
    const double q = dot(f, nf) / dot(f, df);
    out.iterations = it + 1;
    if (it > 0 && std::abs(q - prev) <= rel_tol * std::abs(q)) {
      out.value = q;
      out.vector = f;
      return out;
    }
    prev = q;
    std::fill(g.begin(), g.end(), 0.0);
    conjugate_gradient(deflated, nf, g, 1e-13, static_cast<int>(std::max<std::size_t>(10 * n, 1000)));
    f = g;
  }
  out.value = prev;
  out.vector = f;
  out.converged = false;
  return out;
}

}  // namespace hklab
