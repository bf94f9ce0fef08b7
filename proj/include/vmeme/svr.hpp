#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vmeme::svr {

enum class KernelType { Linear, Polynomial, Rbf };

struct Kernel {
  KernelType type = KernelType::Linear;
  int degree = 2;       // polynomial
  double gamma = 1.0;   // polynomial scale and RBF width
  double coef0 = 1.0;   // polynomial

  std::string describe() const;
  // Kernel value from a dot product and the two squared norms.
  double eval(double dot, double norm_a, double norm_b) const;
};

struct SvrParams {
  Kernel kernel;
  double c = 1.0;
  double epsilon = 0.1;
  double tol = 1e-3;
  std::size_t max_iter = 10'000'000;
};

// Epsilon-insensitive support vector regression solved in the dual with
// second-order working set selection. Training takes a precomputed Gram
// matrix so several kernels can share one dot-product pass.
class SvrModel {
 public:
  // gram(i, j) = K(x_i, x_j).
  static SvrModel fit(const Eigen::MatrixXd& gram, const std::vector<double>& target, const SvrParams& params);

  // cross(i, j) = K(x_train_i, x_j) -> one prediction per column.
  std::vector<double> predict(const Eigen::MatrixXd& cross) const;

  const std::vector<double>& coefficients() const { return coef_; }
  double bias() const { return bias_; }
  std::size_t iterations() const { return iterations_; }
  std::size_t support_vectors() const;

 private:
  std::vector<double> coef_;  // alpha_i - alpha_i^*
  double bias_ = 0.0;
  std::size_t iterations_ = 0;
};

// Row-major samples -> dot products and squared norms; kernels applied on top.
Eigen::MatrixXd kernel_matrix(const Kernel& k, const Eigen::MatrixXd& dots, const Eigen::VectorXd& norms_rows,
                              const Eigen::VectorXd& norms_cols);

}  // namespace vmeme::svr
