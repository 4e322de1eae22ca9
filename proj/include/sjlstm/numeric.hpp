// Copyright 2026 The sjlstm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SJLSTM_NUMERIC_HPP_
#define SJLSTM_NUMERIC_HPP_

// Dense tensors, parameter storage, the differentiable primitives shared by
// the reader and its trainers, seeded sampling and a finite-difference
// gradient checker. Linear algebra is delegated to Eigen through Map views.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sjlstm/status.hpp"

namespace sjlstm {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Vector>;
using ConstVectorMap = Eigen::Map<const Vector>;

// Row-major rank-1 or rank-2 block of doubles.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
      : shape_(std::move(shape)) {
    SJ_CHECK_MSG(shape_.size() == 1 || shape_.size() == 2,
                 "rank " << shape_.size());
    std::size_t n = 1;
    for (std::size_t s : shape_) {
      SJ_CHECK_MSG(s > 0, "tensor dimensions must be positive");
      n *= s;
    }
    values_.assign(n, fill);
  }

  static Tensor FromValues(std::vector<std::size_t> shape,
                           std::vector<double> values) {
    Tensor t(std::move(shape));
    SJ_CHECK_MSG(values.size() == t.size(),
                 "expected " << t.size() << " values, got " << values.size());
    t.values_ = std::move(values);
    return t;
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t cols() const { return shape_.size() == 2 ? shape_[1] : 1; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }

  MatrixMap matrix() {
    return MatrixMap(values_.data(), static_cast<Eigen::Index>(rows()),
                     static_cast<Eigen::Index>(cols()));
  }
  ConstMatrixMap matrix() const {
    return ConstMatrixMap(values_.data(), static_cast<Eigen::Index>(rows()),
                          static_cast<Eigen::Index>(cols()));
  }
  VectorMap vector() {
    return VectorMap(values_.data(), static_cast<Eigen::Index>(size()));
  }
  ConstVectorMap vector() const {
    return ConstVectorMap(values_.data(), static_cast<Eigen::Index>(size()));
  }

  // Row r of a rank-2 tensor as a vector view.
  VectorMap row(std::size_t r) {
    return VectorMap(values_.data() + r * cols(),
                     static_cast<Eigen::Index>(cols()));
  }
  ConstVectorMap row(std::size_t r) const {
    return ConstVectorMap(values_.data() + r * cols(),
                          static_cast<Eigen::Index>(cols()));
  }

  void fill(double v) { std::fill(values_.begin(), values_.end(), v); }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  void check_finite(std::string_view what) const {
    if (!all_finite()) {
      throw Error("non_finite",
                  "non-finite value in tensor '" + std::string(what) + "'");
    }
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

// Named parameters, each with a gradient buffer of identical shape. Order of
// insertion is the declared order used by serialization and optimizers.
class ParamStore {
 public:
  std::size_t add(std::string name, Tensor value) {
    SJ_CHECK_MSG(find(name) == npos, "duplicate parameter " << name);
    Tensor grad(value.shape());
    params_.push_back({std::move(name), std::move(value), std::move(grad)});
    return params_.size() - 1;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t find(std::string_view name) const {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (params_[i].name == name) return i;
    }
    return npos;
  }

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad() {
    for (auto& p : params_) p.grad.fill(0.0);
  }

  std::size_t num_values() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  // Name of the first parameter holding a non-finite value, empty if none.
  std::string first_non_finite() const {
    for (const auto& p : params_) {
      if (!p.value.all_finite()) return p.name;
    }
    return {};
  }

 private:
  std::vector<Parameter> params_;
};

// splitmix64 finalizer; used to derive independent per-episode seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t global_seed,
                                 std::uint64_t document_index,
                                 std::uint64_t epoch,
                                 std::uint64_t stream = 0) {
  std::uint64_t h = mix64(global_seed);
  h = mix64(h ^ document_index);
  h = mix64(h ^ epoch);
  return mix64(h ^ stream);
}

// Seeded uniform source. Same seed, same build: same draws, bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling keeps it exact.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    SJ_CHECK(lo <= hi);
    const std::uint64_t span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max()) return engine_();
    const std::uint64_t range = span + 1;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return lo + v % range;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Fisher-Yates with the exact integer sampler above.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, i - 1));
    std::swap(items[i - 1], items[j]);
  }
}

inline void check_logits(std::span<const double> logits) {
  SJ_CHECK_MSG(!logits.empty(), "softmax of an empty vector");
  for (double v : logits) {
    if (!std::isfinite(v)) {
      throw Error("non_finite", "softmax received a non-finite logit");
    }
  }
}

inline std::vector<double> log_softmax(std::span<const double> logits) {
  check_logits(logits);
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

inline std::vector<double> softmax(std::span<const double> logits) {
  check_logits(logits);
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

inline std::vector<double> softmax(const Vector& logits) {
  return softmax(std::span<const double>(logits.data(),
                                         static_cast<std::size_t>(logits.size())));
}

// First index of the maximum; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> values) {
  SJ_CHECK(!values.empty());
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

inline std::size_t sample_categorical(std::span<const double> dist, Rng& rng) {
  SJ_CHECK(!dist.empty());
  double total = 0.0;
  for (double p : dist) {
    SJ_CHECK_MSG(p >= 0.0 && std::isfinite(p), "invalid probability " << p);
    total += p;
  }
  if (total == 0.0) {
    throw Error("degenerate_distribution",
                "cannot sample from an all-zero distribution");
  }
  SJ_CHECK_MSG(std::abs(total - 1.0) <= 1e-9, "distribution sums to " << total);
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > 0.0) last_positive = i;
    cumulative += dist[i];
    if (u < cumulative && dist[i] > 0.0) return i;
  }
  return last_positive;
}

inline constexpr double kCrossEntropyEpsilon = 1e-12;

inline double cross_entropy(std::span<const double> pred, std::size_t label) {
  SJ_CHECK_MSG(label < pred.size(), "label " << label << " out of range");
  return -std::log(pred[label] + kCrossEntropyEpsilon);
}

// d CE / d logits for pred = softmax(logits), including the epsilon.
inline Vector cross_entropy_logit_grad(std::span<const double> pred,
                                       std::size_t label) {
  SJ_CHECK(label < pred.size());
  const double py = pred[label];
  const double scale = -py / (py + kCrossEntropyEpsilon);
  Vector g(static_cast<Eigen::Index>(pred.size()));
  for (std::size_t k = 0; k < pred.size(); ++k) {
    g[static_cast<Eigen::Index>(k)] = scale * ((k == label ? 1.0 : 0.0) - pred[k]);
  }
  return g;
}

// Shannon entropy from log-probabilities.
inline double entropy(std::span<const double> log_probs) {
  double h = 0.0;
  for (double lp : log_probs) h -= std::exp(lp) * lp;
  return h;
}

// Gradient w.r.t. logits of  -advantage * log p[action] - beta * H(p).
inline Vector policy_logit_grad(std::span<const double> log_probs,
                                std::size_t action, double advantage,
                                double beta) {
  const double h = entropy(log_probs);
  Vector g(static_cast<Eigen::Index>(log_probs.size()));
  for (std::size_t k = 0; k < log_probs.size(); ++k) {
    const double p = std::exp(log_probs[k]);
    const double onehot = k == action ? 1.0 : 0.0;
    g[static_cast<Eigen::Index>(k)] =
        -advantage * (onehot - p) + beta * p * (log_probs[k] + h);
  }
  return g;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Objective evaluated at the current parameter values. When want_grad is
// set it must accumulate its analytic gradient into the (pre-zeroed) grads.
using Objective = std::function<double(ParamStore&, bool want_grad)>;

// Compares analytic gradients to central differences for every entry of
// every parameter. Error per entry is |a - n| / max(1, |n|).
inline GradCheckResult grad_check(const Objective& f, ParamStore& params,
                                  double eps = 1e-5) {
  params.zero_grad();
  f(params, true);
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p.grad);

  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& value = params[k].value;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + eps;
      const double plus = f(params, false);
      value[i] = saved - eps;
      const double minus = f(params, false);
      value[i] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double a = analytic[k][i];
      const double err = std::abs(a - numeric) / std::max(1.0, std::abs(numeric));
      if (err > result.max_relative_error || result.worst_parameter.empty()) {
        result.max_relative_error = err;
        result.worst_parameter = params[k].name;
        result.worst_index = i;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  params.zero_grad();
  return result;
}

// grad_check that raises with the offending parameter when over tolerance.
inline GradCheckResult require_gradients(const Objective& f, ParamStore& params,
                                         double tolerance, double eps = 1e-5) {
  GradCheckResult r = grad_check(f, params, eps);
  if (!(r.max_relative_error < tolerance)) {
    std::ostringstream os;
    os << "gradient mismatch in '" << r.worst_parameter << "'[" << r.worst_index
       << "]: analytic " << r.analytic << " vs numeric " << r.numeric
       << " (relative error " << r.max_relative_error << ")";
    throw Error("gradient_check", os.str());
  }
  return r;
}

}  // namespace sjlstm

#endif  // SJLSTM_NUMERIC_HPP_
