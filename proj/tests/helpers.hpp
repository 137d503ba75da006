#pragma once

#include <algorithm>
#include <cstring>
#include <span>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fencenet/ops.hpp"
#include "fencenet/param_io.hpp"
#include "fencenet/random.hpp"
#include "fencenet/tensor.hpp"

namespace fencenet::testing {

template <typename T>
Tensor<T> random_tensor(const Shape& shape, Rng& rng, bool requires_grad = false, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<T> v(shape_numel(shape));
  for (auto& x : v) x = static_cast<T>(u(rng));
  return Tensor<T>::from(shape, std::move(v), requires_grad);
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over every
// element of every tensor in `wrt`, with central differences of step eps.
inline double max_gradient_error(const std::function<Tensor<double>(Tape<double>&)>& loss_fn,
                                 std::vector<Tensor<double>> wrt, double eps = 1e-4, double floor = 1e-6) {
  for (auto& t : wrt) t.zero_grad();
  {
    Tape<double> tape;
    const auto loss = loss_fn(tape);
    tape.backward(loss);
  }
  double worst = 0.0;
  for (auto& t : wrt) {
    const std::vector<double> analytic(t.grad().begin(), t.grad().end());
    auto values = t.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      Tape<double> plus_tape(false);
      const double plus = loss_fn(plus_tape).item();
      values[i] = saved - eps;
      Tape<double> minus_tape(false);
      const double minus = loss_fn(minus_tape).item();
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
      worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
    }
  }
  return worst;
}

// Weighted sum with fixed random weights, so every output element gets a distinct gradient.
inline Tensor<double> weighted_sum(Tape<double>& tape, const Tensor<double>& x, const Tensor<double>& weights) {
  return ops::sum(tape, ops::mul(tape, x, weights));
}

template <typename T>
void copy_parameter_values(const ParameterList<T>& from, ParameterList<T>& to) {
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto src = from[i].tensor.data();
    auto dst = to[i].tensor.mutable_data();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

template <typename T>
bool bitwise_equal(std::span<const T> a, std::span<const T> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

}  // namespace fencenet::testing
