#include "vmeme/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vmeme/util.hpp"

namespace vmeme::svr {

std::string Kernel::describe() const {
  std::ostringstream s;
  switch (type) {
    case KernelType::Linear:
      s << "linear";
      break;
    case KernelType::Polynomial:
      s << "poly(d=" << degree << ",g=" << gamma << ",c0=" << coef0 << ")";
      break;
    case KernelType::Rbf:
      s << "rbf(g=" << gamma << ")";
      break;
  }
  return s.str();
}

double Kernel::eval(double dot, double na, double nb) const {
  switch (type) {
    case KernelType::Linear:
      return dot;
    case KernelType::Polynomial:
      return std::pow(gamma * dot + coef0, degree);
    case KernelType::Rbf:
      return std::exp(-gamma * std::max(0.0, na + nb - 2 * dot));
  }
  return 0.0;
}

Eigen::MatrixXd kernel_matrix(const Kernel& k, const Eigen::MatrixXd& dots, const Eigen::VectorXd& nr,
                              const Eigen::VectorXd& nc) {
  if (k.type == KernelType::Linear) return dots;
  Eigen::MatrixXd out(dots.rows(), dots.cols());
  for (Eigen::Index j = 0; j < dots.cols(); ++j)
    for (Eigen::Index i = 0; i < dots.rows(); ++i) out(i, j) = k.eval(dots(i, j), nr(i), nc(j));
  return out;
}

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SvrModel SvrModel::fit(const Eigen::MatrixXd& gram, const std::vector<double>& target, const SvrParams& p) {
  const std::size_t l = target.size();
  if (l == 0) throw InvalidArgument("svr: empty training set");
  if (static_cast<std::size_t>(gram.rows()) != l || static_cast<std::size_t>(gram.cols()) != l)
    throw InvalidArgument("svr: Gram matrix shape does not match targets");
  if (!(p.c > 0) || p.epsilon < 0) throw InvalidArgument("svr: need C > 0 and epsilon >= 0");

  // Variables 0..l-1 carry alpha (y=+1), l..2l-1 carry alpha* (y=-1).
  const std::size_t n = 2 * l;
  auto y = [l](std::size_t t) { return t < l ? 1.0 : -1.0; };
  auto base = [l](std::size_t t) { return t < l ? t : t - l; };
  auto Q = [&](std::size_t i, std::size_t j) { return y(i) * y(j) * gram(base(i), base(j)); };
  std::vector<double> alpha(n, 0.0), G(n), QD(n);
  for (std::size_t t = 0; t < l; ++t) {
    G[t] = p.epsilon - target[t];
    G[t + l] = p.epsilon + target[t];
    QD[t] = QD[t + l] = gram(t, t);
  }
  const double C = p.c;
  auto upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0; };

  SvrModel m;
  std::size_t iter = 0;
  for (; iter < p.max_iter; ++iter) {
    double gmax = -kInf, gmax2 = -kInf;
    std::ptrdiff_t gi = -1, gj = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y(t) > 0) {
        if (!upper(t) && -G[t] >= gmax) {
          gmax = -G[t];
          gi = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!lower(t) && G[t] >= gmax) {
        gmax = G[t];
        gi = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (gi < 0) break;
    const std::size_t i = static_cast<std::size_t>(gi);
    double best = kInf;
    for (std::size_t t = 0; t < n; ++t) {
      if (y(t) > 0) {
        if (lower(t)) continue;
        gmax2 = std::max(gmax2, G[t]);
        const double diff = gmax + G[t];
        if (diff > 0) {
          double quad = QD[i] + QD[t] - 2.0 * y(i) * Q(i, t);
          const double obj = -(diff * diff) / (quad > 0 ? quad : kTau);
          if (obj <= best) {
            best = obj;
            gj = static_cast<std::ptrdiff_t>(t);
          }
        }
      } else {
        if (upper(t)) continue;
        gmax2 = std::max(gmax2, -G[t]);
        const double diff = gmax - G[t];
        if (diff > 0) {
          double quad = QD[i] + QD[t] + 2.0 * y(i) * Q(i, t);
          const double obj = -(diff * diff) / (quad > 0 ? quad : kTau);
          if (obj <= best) {
            best = obj;
            gj = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    if (gmax + gmax2 < p.tol || gj < 0) break;
    const std::size_t j = static_cast<std::size_t>(gj);

    const double old_i = alpha[i], old_j = alpha[j];
    const double qij = Q(i, j);
    if (y(i) != y(j)) {
      double quad = QD[i] + QD[j] + 2 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = QD[i] + QD[j] - 2 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) G[t] += Q(i, t) * di + Q(j, t) * dj;
  }
  if (iter == p.max_iter) log_warn("svr: iteration limit reached before convergence");

  double ub = kInf, lb = -kInf, free_sum = 0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y(t) * G[t];
    if (upper(t)) {
      if (y(t) < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y(t) > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2;

  m.coef_.resize(l);
  for (std::size_t t = 0; t < l; ++t) m.coef_[t] = alpha[t] - alpha[t + l];
  m.bias_ = -rho;
  m.iterations_ = iter;
  return m;
}

std::vector<double> SvrModel::predict(const Eigen::MatrixXd& cross) const {
  if (static_cast<std::size_t>(cross.rows()) != coef_.size()) throw InvalidArgument("svr: kernel rows != training size");
  std::vector<double> out(static_cast<std::size_t>(cross.cols()), bias_);
  for (Eigen::Index j = 0; j < cross.cols(); ++j)
    for (std::size_t i = 0; i < coef_.size(); ++i)
      if (coef_[i] != 0) out[static_cast<std::size_t>(j)] += coef_[i] * cross(static_cast<Eigen::Index>(i), j);
  return out;
}

std::size_t SvrModel::support_vectors() const {
  return static_cast<std::size_t>(std::count_if(coef_.begin(), coef_.end(), [](double c) { return c != 0; }));
}

}  // namespace vmeme::svr
