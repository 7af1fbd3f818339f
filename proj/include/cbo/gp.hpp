// SPDX-License-Identifier: Apache-2.0
//
// Gaussian-process surrogate with an isotropic Matern-5/2 kernel.
//
// Inputs are mapped affinely from their box into the unit cube; outputs are
// standardized to zero mean and unit variance over the dataset at model
// construction time, and the standardization stays frozen for every query
// against that model. The prior mean is zero in standardized space.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace cbo::gp {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct GpHyper {
  Scalar lengthscale = Scalar(0.3);
  Scalar signal_var = Scalar(1);
  Scalar noise_var = Scalar(0.05);

  Vector<Scalar> log_params() const {
    Vector<Scalar> t(3);
    t << std::log(lengthscale), std::log(signal_var), std::log(noise_var);
    return t;
  }
  static GpHyper from_log(const Vector<Scalar>& t) {
    return {std::exp(t[0]), std::exp(t[1]), std::exp(t[2])};
  }
};

/// Matern-5/2 correlation as a function of the scaled distance t = r / lengthscale.
template <typename Scalar>
inline Scalar matern52(Scalar t) {
  const Scalar s5t = std::sqrt(Scalar(5)) * t;
  return (Scalar(1) + s5t + s5t * s5t / Scalar(3)) * std::exp(-s5t);
}

/// -t * dM/dt, the derivative of matern52(r / l) with respect to log l.
template <typename Scalar>
inline Scalar matern52_dlog_lengthscale(Scalar t) {
  const Scalar s5t = std::sqrt(Scalar(5)) * t;
  return Scalar(5) / Scalar(3) * t * t * (Scalar(1) + s5t) * std::exp(-s5t);
}

template <typename Scalar, typename DerivedU, typename DerivedV>
Scalar kernel_matern52(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v,
                       const GpHyper<Scalar>& h) {
  const Scalar r = (u - v).norm();
  return h.signal_var * matern52(r / h.lengthscale);
}

/// Affine map between an axis-aligned box and the unit cube.
template <typename Scalar>
struct InputBox {
  Vector<Scalar> lower;
  Vector<Scalar> upper;

  Eigen::Index dim() const { return lower.size(); }

  template <typename Derived>
  Vector<Scalar> normalize(const Eigen::MatrixBase<Derived>& x) const {
    return ((x - lower).array() / (upper - lower).array()).matrix();
  }
  template <typename Derived>
  Vector<Scalar> denormalize(const Eigen::MatrixBase<Derived>& u) const {
    return (lower.array() + u.array() * (upper - lower).array()).matrix();
  }
  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
};

template <typename Scalar>
struct Standardization {
  Scalar mean = Scalar(0);
  Scalar stddev = Scalar(1);

  Scalar forward(Scalar y) const { return (y - mean) / stddev; }
  Scalar inverse(Scalar z) const { return mean + z * stddev; }
};

/// Evaluated points X and their noisy objective values. Keeps the pairwise
/// squared-distance matrix of the normalized inputs up to date on append;
/// the kernel is isotropic, so this is all the hyperparameter fit needs.
template <typename Scalar>
class ObservationDataset {
 public:
  explicit ObservationDataset(InputBox<Scalar> box) : box_(std::move(box)) {}

  const InputBox<Scalar>& box() const { return box_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(values_.size()); }
  Eigen::Index dim() const { return box_.dim(); }

  template <typename Derived>
  void append(const Eigen::MatrixBase<Derived>& x, Scalar value) {
    if (x.size() != dim()) throw std::invalid_argument("point dimension does not match the dataset");
    if (!box_.contains(x)) throw std::invalid_argument("point outside the input box");
    if (!std::isfinite(value)) throw std::invalid_argument("observation must be finite");
    const Vector<Scalar> u = box_.normalize(x);
    const Eigen::Index n = size();
    inputs_.conservativeResize(dim(), n + 1);
    inputs_.col(n) = u;
    sq_dist_.conservativeResize(n + 1, n + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar d2 = (inputs_.col(i) - u).squaredNorm();
      sq_dist_(i, n) = d2;
      sq_dist_(n, i) = d2;
    }
    sq_dist_(n, n) = Scalar(0);
    raw_.push_back(x);
    values_.push_back(value);
  }

  const Matrix<Scalar>& normalized_inputs() const { return inputs_; }
  const Matrix<Scalar>& squared_distances() const { return sq_dist_; }
  const Vector<Scalar>& point(Eigen::Index i) const { return raw_[static_cast<std::size_t>(i)]; }
  Scalar value(Eigen::Index i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<Scalar>& values() const { return values_; }

  /// Sample mean and standard deviation of the values; a zero spread maps to 1.
  Standardization<Scalar> standardization() const {
    Standardization<Scalar> s;
    const Eigen::Index n = size();
    if (n == 0) return s;
    Scalar sum = 0;
    for (Scalar v : values_) sum += v;
    s.mean = sum / Scalar(n);
    Scalar ss = 0;
    for (Scalar v : values_) ss += (v - s.mean) * (v - s.mean);
    const Scalar sd = n > 1 ? std::sqrt(ss / Scalar(n - 1)) : Scalar(0);
    s.stddev = sd > Scalar(0) ? sd : Scalar(1);
    return s;
  }

  Vector<Scalar> standardized_values(const Standardization<Scalar>& s) const {
    Vector<Scalar> z(size());
    for (Eigen::Index i = 0; i < size(); ++i) z[i] = s.forward(values_[static_cast<std::size_t>(i)]);
    return z;
  }

 private:
  InputBox<Scalar> box_;
  Matrix<Scalar> inputs_;   // dim x N, normalized
  Matrix<Scalar> sq_dist_;  // N x N
  std::vector<Vector<Scalar>> raw_;
  std::vector<Scalar> values_;
};

/// Log-normal priors on the three hyperparameters and their admissible range.
template <typename Scalar>
struct HyperPrior {
  GpHyper<Scalar> center{Scalar(0.3), Scalar(1), Scalar(0.05)};
  Scalar sigma_log = Scalar(1);
  GpHyper<Scalar> lower{Scalar(1e-3), Scalar(1e-6), Scalar(1e-6)};
  GpHyper<Scalar> upper{Scalar(1e2), Scalar(1e3), Scalar(1e3)};

  Scalar log_density(const Vector<Scalar>& t, Vector<Scalar>* grad) const {
    const Vector<Scalar> c = center.log_params();
    const Scalar inv = Scalar(1) / (sigma_log * sigma_log);
    if (grad) *grad = -(t - c) * inv;
    return Scalar(-0.5) * (t - c).squaredNorm() * inv;
  }
  Vector<Scalar> clamp(const Vector<Scalar>& t) const {
    return t.cwiseMax(lower.log_params()).cwiseMin(upper.log_params());
  }
};

namespace detail {

/// Cholesky of s * M + (noise + jitter) * I, escalating the jitter tenfold
/// from 1e-8 * s up to 1e-4 * s. Returns the jitter used, or nullopt.
template <typename Scalar>
std::optional<Scalar> factorize(const Matrix<Scalar>& corr, const GpHyper<Scalar>& h,
                                Eigen::LLT<Matrix<Scalar>>& llt) {
  const Eigen::Index n = corr.rows();
  for (Scalar jitter = Scalar(1e-8) * h.signal_var; jitter <= Scalar(1.0001e-4) * h.signal_var;
       jitter *= Scalar(10)) {
    Matrix<Scalar> k = h.signal_var * corr;
    k.diagonal().array() += h.noise_var + jitter;
    llt.compute(k);
    if (llt.info() == Eigen::Success) return jitter;
  }
  (void)n;
  return std::nullopt;
}

template <typename Scalar>
Matrix<Scalar> correlation(const Matrix<Scalar>& sq_dist, Scalar lengthscale) {
  return sq_dist.unaryExpr([lengthscale](Scalar d2) { return matern52(std::sqrt(d2) / lengthscale); });
}

}  // namespace detail

/// Log marginal likelihood of the standardized values plus the log prior, as a
/// function of the log hyperparameters. Optionally returns the gradient.
/// Returns -inf when the covariance cannot be factorized.
template <typename Scalar>
Scalar log_marginal_posterior(const Matrix<Scalar>& sq_dist, const Vector<Scalar>& y, const Vector<Scalar>& t,
                              const HyperPrior<Scalar>& prior, Vector<Scalar>* grad = nullptr) {
  const GpHyper<Scalar> h = GpHyper<Scalar>::from_log(t);
  const Eigen::Index n = y.size();
  const Matrix<Scalar> corr = detail::correlation(sq_dist, h.lengthscale);
  Eigen::LLT<Matrix<Scalar>> llt;
  if (!detail::factorize(corr, h, llt)) return -std::numeric_limits<Scalar>::infinity();
  const Vector<Scalar> alpha = llt.solve(y);
  const Matrix<Scalar>& lmat = llt.matrixLLT();
  Scalar logdet = 0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(lmat(i, i));
  Vector<Scalar> prior_grad;
  const Scalar lp = prior.log_density(t, grad ? &prior_grad : nullptr);
  const Scalar value =
      Scalar(-0.5) * y.dot(alpha) - logdet - Scalar(0.5) * Scalar(n) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>) + lp;
  if (grad) {
    // d/dt_j = 0.5 * tr((alpha alpha^T - K^-1) dK/dt_j)
    Matrix<Scalar> w = -llt.solve(Matrix<Scalar>::Identity(n, n));
    w.noalias() += alpha * alpha.transpose();
    const Matrix<Scalar> dlen = sq_dist.unaryExpr([&](Scalar d2) {
      return h.signal_var * matern52_dlog_lengthscale(std::sqrt(d2) / h.lengthscale);
    });
    grad->resize(3);
    (*grad)[0] = Scalar(0.5) * (w.array() * dlen.array()).sum();
    (*grad)[1] = Scalar(0.5) * h.signal_var * (w.array() * corr.array()).sum();
    (*grad)[2] = Scalar(0.5) * h.noise_var * w.trace();
    *grad += prior_grad;
  }
  return value;
}

struct FitOptions {
  int random_starts = 2;
  int max_iterations = 60;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct FitResult {
  GpHyper<Scalar> hyper;
  Scalar log_posterior = -std::numeric_limits<Scalar>::infinity();
  bool converged = false;  // false: every start failed, `hyper` is the fallback
  bool degenerate = false;  // constant outputs
};

namespace detail {

// Projected BFGS ascent on the log hyperparameters inside the prior box.
template <typename Scalar, typename F>
std::pair<Vector<Scalar>, Scalar> bfgs_maximize(const F& f, Vector<Scalar> x, const HyperPrior<Scalar>& prior,
                                                int max_iterations) {
  x = prior.clamp(x);
  Vector<Scalar> g;
  Scalar fx = f(x, &g);
  if (!std::isfinite(fx)) return {x, fx};
  const Eigen::Index n = x.size();
  Matrix<Scalar> hinv = Matrix<Scalar>::Identity(n, n);
  for (int it = 0; it < max_iterations; ++it) {
    Vector<Scalar> p = hinv * g;
    if (p.dot(g) <= Scalar(0)) {
      hinv.setIdentity();
      p = g;
    }
    const Scalar pmax = p.cwiseAbs().maxCoeff();
    if (pmax > Scalar(2)) p *= Scalar(2) / pmax;

    Scalar step = 1;
    Vector<Scalar> xn, gn;
    Scalar fn = -std::numeric_limits<Scalar>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      xn = prior.clamp(x + step * p);
      fn = f(xn, &gn);
      if (std::isfinite(fn) && fn >= fx + Scalar(1e-4) * g.dot(xn - x)) {
        accepted = true;
        break;
      }
      step *= Scalar(0.5);
    }
    if (!accepted) break;
    const Vector<Scalar> s = xn - x;
    const Vector<Scalar> yv = g - gn;  // gradient of the minimized -f
    const Scalar sy = s.dot(yv);
    const Scalar gain = fn - fx;
    x = xn;
    fx = fn;
    g = gn;
    if (sy > Scalar(1e-12)) {
      const Scalar rho = Scalar(1) / sy;
      const Matrix<Scalar> id = Matrix<Scalar>::Identity(n, n);
      hinv = (id - rho * s * yv.transpose()) * hinv * (id - rho * yv * s.transpose()) + rho * s * s.transpose();
    }
    if (gain < Scalar(1e-9) * (Scalar(1) + std::abs(fx)) || s.cwiseAbs().maxCoeff() < Scalar(1e-8)) break;
  }
  return {x, fx};
}

}  // namespace detail

/// MAP hyperparameters by multi-start projected BFGS over the log parameters.
/// Starts: `warm` (if any), the prior centre, then `random_starts` draws from the prior.
template <typename Scalar>
FitResult<Scalar> fit(const ObservationDataset<Scalar>& data, const HyperPrior<Scalar>& prior = {},
                      const FitOptions& opt = {}, std::optional<GpHyper<Scalar>> warm = std::nullopt) {
  if (data.size() < 2) throw std::invalid_argument("fitting needs at least two observations");
  FitResult<Scalar> out;
  out.hyper = warm.value_or(prior.center);

  const Standardization<Scalar> st = data.standardization();
  const Vector<Scalar> y = data.standardized_values(st);
  if (y.cwiseAbs().maxCoeff() == Scalar(0)) {
    // No spread at all: nothing to explain, both variances go to their floors.
    out.hyper = {prior.center.lengthscale, prior.lower.signal_var, prior.lower.noise_var};
    out.converged = true;
    out.degenerate = true;
    return out;
  }

  const auto& d2 = data.squared_distances();
  auto objective = [&](const Vector<Scalar>& t, Vector<Scalar>* g) {
    return log_marginal_posterior(d2, y, t, prior, g);
  };

  std::vector<Vector<Scalar>> starts;
  if (warm) starts.push_back(warm->log_params());
  starts.push_back(prior.center.log_params());
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < opt.random_starts; ++i) {
    Vector<Scalar> t = prior.center.log_params();
    for (Eigen::Index j = 0; j < t.size(); ++j) t[j] += prior.sigma_log * Scalar(normal(rng));
    starts.push_back(t);
  }

  for (const auto& s : starts) {
    auto [t, val] = detail::bfgs_maximize<Scalar>(objective, s, prior, opt.max_iterations);
    if (std::isfinite(val) && val > out.log_posterior) {
      out.log_posterior = val;
      out.hyper = GpHyper<Scalar>::from_log(t);
      out.converged = true;
    }
  }
  return out;
}

template <typename Scalar>
struct Posterior {
  Scalar mean;
  Scalar variance;
};

/// Fitted surrogate: hyperparameters, frozen standardization and the Cholesky
/// factor of K + noise * I. Immutable after construction.
template <typename Scalar>
class GpModel {
 public:
  GpModel(const ObservationDataset<Scalar>& data, const GpHyper<Scalar>& hyper)
      : box_(data.box()), hyper_(hyper), standardization_(data.standardization()), inputs_(data.normalized_inputs()) {
    if (data.size() < 1) throw std::invalid_argument("model needs at least one observation");
    const Matrix<Scalar> corr = detail::correlation(data.squared_distances(), hyper.lengthscale);
    auto jitter = detail::factorize(corr, hyper, llt_);
    if (!jitter) throw std::runtime_error("covariance matrix is not positive definite");
    jitter_ = *jitter;
    alpha_ = llt_.solve(data.standardized_values(standardization_));
  }

  const GpHyper<Scalar>& hyper() const { return hyper_; }
  const Standardization<Scalar>& standardization() const { return standardization_; }
  const InputBox<Scalar>& box() const { return box_; }
  Scalar jitter() const { return jitter_; }
  Eigen::Index size() const { return alpha_.size(); }
  /// Lower Cholesky factor of the noisy covariance (standardized units).
  Matrix<Scalar> cholesky_factor() const { return llt_.matrixL(); }
  const Vector<Scalar>& alpha() const { return alpha_; }

  /// Covariance vector between a normalized query and every training input.
  template <typename Derived>
  Vector<Scalar> cross_covariance(const Eigen::MatrixBase<Derived>& u) const {
    Vector<Scalar> k(inputs_.cols());
    for (Eigen::Index i = 0; i < inputs_.cols(); ++i)
      k[i] = hyper_.signal_var * matern52((inputs_.col(i) - u).norm() / hyper_.lengthscale);
    return k;
  }

  /// Posterior in standardized units at a normalized input.
  template <typename Derived>
  Posterior<Scalar> posterior_standardized(const Eigen::MatrixBase<Derived>& u) const {
    const Vector<Scalar> k = cross_covariance(u);
    const Scalar mean = k.dot(alpha_);
    const Vector<Scalar> v = llt_.matrixL().solve(k);
    Scalar var = hyper_.signal_var - v.squaredNorm();
    if (var < Scalar(0)) var = var > Scalar(-1e-10) ? Scalar(0) : var;
    return {mean, std::max(var, Scalar(0))};
  }

  /// Posterior mean (dB) and variance (dB^2) of the latent objective at a raw input.
  template <typename Derived>
  Posterior<Scalar> posterior(const Eigen::MatrixBase<Derived>& x) const {
    const Posterior<Scalar> z = posterior_standardized(box_.normalize(x));
    const Scalar sd = standardization_.stddev;
    return {standardization_.inverse(z.mean), z.variance * sd * sd};
  }

  /// Batched posterior for raw inputs stored as columns.
  std::vector<Posterior<Scalar>> posterior_batch(const Matrix<Scalar>& xs) const {
    const Eigen::Index m = xs.cols();
    Matrix<Scalar> kq(inputs_.cols(), m);
    for (Eigen::Index j = 0; j < m; ++j) kq.col(j) = cross_covariance(box_.normalize(xs.col(j)));
    const Vector<Scalar> means = kq.transpose() * alpha_;
    llt_.matrixL().solveInPlace(kq);
    const Vector<Scalar> reduction = kq.colwise().squaredNorm().transpose();
    std::vector<Posterior<Scalar>> out(static_cast<std::size_t>(m));
    const Scalar sd = standardization_.stddev;
    for (Eigen::Index j = 0; j < m; ++j) {
      const Scalar var = std::max(hyper_.signal_var - reduction[j], Scalar(0));
      out[static_cast<std::size_t>(j)] = {standardization_.inverse(means[j]), var * sd * sd};
    }
    return out;
  }

 private:
  InputBox<Scalar> box_;
  GpHyper<Scalar> hyper_;
  Standardization<Scalar> standardization_;
  Matrix<Scalar> inputs_;
  Eigen::LLT<Matrix<Scalar>> llt_;
  Vector<Scalar> alpha_;
  Scalar jitter_ = Scalar(0);
};

}  // namespace cbo::gp
