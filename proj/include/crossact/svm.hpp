#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "features.hpp"
#include "util.hpp"

namespace crossact {

/// Dense row-major matrix of feature rows.
struct Matrix {
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : cols(cols), data(rows * cols, 0.0) {}

  std::size_t rows() const { return cols == 0 ? 0 : data.size() / cols; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  void push_row(std::span<const double> r) {
    if (cols == 0 && data.empty()) cols = r.size();
    if (r.size() != cols) throw std::invalid_argument("Matrix::push_row: width mismatch");
    data.insert(data.end(), r.begin(), r.end());
  }
};

struct Standardization {
  std::vector<double> means;
  std::vector<double> stddevs;
};

/// Per-column mean and population standard deviation; columns with zero
/// spread get stddev 1.
inline Standardization standardize_fit(const Matrix& x) {
  if (x.rows() < 2) throw std::invalid_argument("standardize_fit: need at least 2 rows");
  const std::size_t m = x.rows(), d = x.cols;
  Standardization s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < d; ++c) s.means[c] += x.row(r)[c];
  for (auto& mu : s.means) mu /= static_cast<double>(m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      double dv = x.row(r)[c] - s.means[c];
      s.stddevs[c] += dv * dv;
    }
  for (auto& sd : s.stddevs) {
    sd = std::sqrt(sd / static_cast<double>(m));
    if (!(sd > 1e-12)) sd = 1.0;
  }
  return s;
}

inline void standardize_apply(std::span<const double> x, const Standardization& s,
                              std::span<double> out) {
  for (std::size_t c = 0; c < x.size(); ++c) out[c] = (x[c] - s.means[c]) / s.stddevs[c];
}

inline Matrix standardize_apply(const Matrix& x, const Standardization& s) {
  Matrix out(x.rows(), x.cols);
  for (std::size_t r = 0; r < x.rows(); ++r) standardize_apply(x.row(r), s, out.row(r));
  return out;
}

struct SvmParams {
  double lambda = 1e-4;
  std::size_t epochs = 200;
  std::uint64_t seed = 1;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  Standardization scaling;  // identity when means are 0 and stddevs 1
  FeatureConfig config = FeatureConfig::ALL;
  SvmParams params;
};

/// λ/2·‖w‖² + mean hinge loss; the bias is not regularized.
inline double svm_objective(const Matrix& x, std::span<const int> y, std::span<const double> w,
                            double b, double lambda) {
  double reg = 0.0;
  for (double wi : w) reg += wi * wi;
  double loss = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto xr = x.row(r);
    double margin = y[r] * (std::inner_product(xr.begin(), xr.end(), w.begin(), 0.0) + b);
    loss += std::max(0.0, 1.0 - margin);
  }
  return 0.5 * lambda * reg + loss / static_cast<double>(x.rows());
}

/// Stochastic subgradient descent on the primal (Pegasos). Each epoch visits
/// the rows in a seeded random order; step t uses 1/(λ(t + t0)) with
/// t0 = 1/λ, and the returned model is the average of all iterates. Labels
/// are ±1; `x` should already be standardized.
inline LinearModel train_linear_svm(const Matrix& x, std::span<const int> y, SvmParams params = {}) {
  const std::size_t m = x.rows(), d = x.cols;
  if (y.size() != m) throw std::invalid_argument("train_linear_svm: label count mismatch");
  if (!(params.lambda > 0)) throw std::invalid_argument("train_linear_svm: lambda must be positive");
  bool has_pos = false, has_neg = false;
  for (int l : y) {
    if (l == 1) has_pos = true;
    else if (l == -1) has_neg = true;
    else throw std::invalid_argument("train_linear_svm: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("train_linear_svm: need both classes");

  // w is kept as scale * v so the shrink step is O(1).
  std::vector<double> v(d, 0.0), avg_w(d, 0.0);
  double scale = 1.0, b = 0.0, avg_b = 0.0;
  const double t0 = std::ceil(1.0 / params.lambda);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(params.seed, 0x5f3));
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle(order, rng);
    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (params.lambda * (static_cast<double>(t) + t0));
      auto xi = x.row(i);
      double margin = y[i] * (scale * std::inner_product(xi.begin(), xi.end(), v.begin(), 0.0) + b);
      scale *= 1.0 - eta * params.lambda;
      if (margin < 1.0) {
        const double step = eta * y[i] / scale;
        for (std::size_t c = 0; c < d; ++c) v[c] += step * xi[c];
        b += eta * y[i];
      }
      if (scale < 1e-9) {
        for (auto& vc : v) vc *= scale;
        scale = 1.0;
      }
      // running mean of iterates
      const double w_new = 1.0 / static_cast<double>(t);
      for (std::size_t c = 0; c < d; ++c) avg_w[c] += (scale * v[c] - avg_w[c]) * w_new;
      avg_b += (b - avg_b) * w_new;
    }
  }
  LinearModel model;
  model.weights = std::move(avg_w);
  model.bias = avg_b;
  model.scaling = {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  model.params = params;
  return model;
}

/// Standardizes the raw rows, trains, and stores the scaling in the model.
inline LinearModel fit_linear_model(const Matrix& raw, std::span<const int> y, FeatureConfig config,
                                    SvmParams params = {}) {
  auto scaling = standardize_fit(raw);
  auto model = train_linear_svm(standardize_apply(raw, scaling), y, params);
  model.scaling = std::move(scaling);
  model.config = config;
  return model;
}

/// w · standardize(x) + b
inline double predict_score(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.weights.size())
    throw std::invalid_argument("predict_score: dimension mismatch");
  double s = model.bias;
  for (std::size_t c = 0; c < x.size(); ++c)
    s += model.weights[c] * ((x[c] - model.scaling.means[c]) / model.scaling.stddevs[c]);
  return s;
}

}  // namespace crossact
