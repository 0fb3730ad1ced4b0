#include "symcurv/symfun.hpp"

#include <cmath>

namespace symcurv {

Eigen::MatrixXd sigma_hess(std::span<const double> x, int k) {
  const int n = static_cast<int>(x.size());
  if (k < 1 || k > n) throw DomainError("sigma_hess: need 1 <= k <= n");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  if (k == 1) return h;
  std::vector<double> reduced(x.size() >= 2 ? x.size() - 2 : 0);
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      std::size_t w = 0;
      for (int j = 0; j < n; ++j) {
        if (j != p && j != q) reduced[w++] = x[static_cast<std::size_t>(j)];
      }
      const double v = sigma_ext(std::span<const double>(reduced), k - 2);
      h(p, q) = v;
      h(q, p) = v;
    }
  }
  return h;
}

double matrix_symfun_second_derivative(int k, std::span<const double> a_diag,
                                       const Eigen::MatrixXd& b) {
  const int n = static_cast<int>(a_diag.size());
  if (b.rows() != n || b.cols() != n) {
    throw DomainError("matrix_symfun_second_derivative: B must be n x n");
  }
  const double b_scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * b_scale) {
    throw DomainError("matrix_symfun_second_derivative: B must be symmetric");
  }
  double scale = 0.0;
  for (double a : a_diag) scale = std::max(scale, std::abs(a));
  if (scale == 0.0) scale = 1.0;
  for (int j = 0; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) {
      if (std::abs(a_diag[j] - a_diag[l]) < 1e-8 * scale) {
        throw DegenerateInputError(
            "matrix_symfun_second_derivative: eigenvalues " + std::to_string(j) + " and " +
            std::to_string(l) + " coincide; the formula needs distinct eigenvalues");
      }
    }
  }

  const auto grad = sigma_grad(a_diag, k);
  const Eigen::MatrixXd hess = sigma_hess(a_diag, k);

  double result = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) result += hess(j, l) * b(j, j) * b(l, l);
  }
  for (int j = 0; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) {
      result += 2.0 * (grad[j] - grad[l]) / (a_diag[j] - a_diag[l]) * b(j, l) * b(j, l);
    }
  }
  return result;
}

}  // namespace symcurv
