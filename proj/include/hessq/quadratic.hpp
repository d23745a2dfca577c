#pragma once

#include <Eigen/Dense>

#include "hessq/errors.hpp"

namespace hessq {

/// phi(x) = x^T M x / 2 + b . x + c0, with M symmetric.
struct QuadraticData {
  Eigen::MatrixXd M;
  Eigen::VectorXd b;
  double c0 = 0;

  QuadraticData() = default;
  QuadraticData(Eigen::MatrixXd m, Eigen::VectorXd bv, double c) : M(std::move(m)), b(std::move(bv)), c0(c) {
    if (M.rows() != M.cols() || M.rows() != b.size()) throw argument_error("QuadraticData: inconsistent sizes");
    M = 0.5 * (M + M.transpose()).eval();
  }

  static QuadraticData constant(int n, double c) {
    return {Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), c};
  }

  int dim() const { return static_cast<int>(b.size()); }
  double operator()(const Eigen::VectorXd& x) const { return 0.5 * x.dot(M * x) + b.dot(x) + c0; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return M * x + b; }
  const Eigen::MatrixXd& hessian() const { return M; }
};

}  // namespace hessq
