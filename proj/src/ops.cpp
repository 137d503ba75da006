#include "fencenet/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "fencenet/errors.hpp"

namespace fencenet::ops {
namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

template <typename T>
using NodePtr = std::shared_ptr<detail::TensorNode<T>>;

template <typename T>
bool wants_grad(const Tape<T>& tape, std::initializer_list<const Tensor<T>*> inputs) {
  if (!tape.recording()) return false;
  return std::any_of(inputs.begin(), inputs.end(),
                     [](const Tensor<T>* t) { return t->requires_grad(); });
}

void require(bool condition, const std::string& message) {
  if (!condition) throw DimensionError(message);
}

// Batch and channel/time extents of a [C, T] or [B, C, T] sequence tensor.
struct SequenceDims {
  std::size_t batch;
  std::size_t channels;
  std::size_t length;
};

template <typename T>
SequenceDims sequence_dims(const Tensor<T>& t, const char* op) {
  if (t.rank() == 2) return {1, t.dim(0), t.dim(1)};
  if (t.rank() == 3) return {t.dim(0), t.dim(1), t.dim(2)};
  throw DimensionError(std::string(op) + ": expected [C, T] or [B, C, T], got " +
                       shape_string(t.shape()));
}

template <typename T>
Shape sequence_shape(const Tensor<T>& like, std::size_t batch, std::size_t channels, std::size_t length) {
  if (like.rank() == 2) return {channels, length};
  return {batch, channels, length};
}

}  // namespace

template <typename T>
Tensor<T> conv1d(Tape<T>& tape, const Tensor<T>& input, const Tensor<T>& weight,
                 const Tensor<T>& bias, int dilation, ConvPadding padding) {
  const auto [batch, in_channels, length] = sequence_dims(input, "conv1d");
  require(weight.rank() == 3, "conv1d: weight must be [C_out, C_in, k], got " + shape_string(weight.shape()));
  const std::size_t out_channels = weight.dim(0);
  const std::size_t kernel = weight.dim(2);
  require(weight.dim(1) == in_channels,
          "conv1d: input has " + std::to_string(in_channels) + " channels but weight expects " +
              std::to_string(weight.dim(1)));
  require(bias.rank() == 1 && bias.dim(0) == out_channels,
          "conv1d: bias must be [" + std::to_string(out_channels) + "], got " + shape_string(bias.shape()));
  if (dilation < 1) throw ArgumentError("conv1d: dilation must be >= 1");

  const auto d = static_cast<std::ptrdiff_t>(dilation);
  const std::ptrdiff_t shift =
      padding == ConvPadding::causal ? 0 : d * static_cast<std::ptrdiff_t>((kernel - 1) / 2);
  const std::size_t rows = in_channels * kernel;
  const std::size_t cols = batch * length;
  const auto len = static_cast<std::ptrdiff_t>(length);

  // im2col: column (b, t) holds every tap that feeds output position t of sample b.
  RowMatrix<T> col = RowMatrix<T>::Zero(rows, cols);
  const T* x = input.data().data();
  for (std::size_t ci = 0; ci < in_channels; ++ci) {
    for (std::size_t i = 0; i < kernel; ++i) {
      const std::ptrdiff_t offset = shift - d * static_cast<std::ptrdiff_t>(i);
      T* dst = col.data() + (ci * kernel + i) * cols;
      for (std::size_t b = 0; b < batch; ++b) {
        const T* src = x + (b * in_channels + ci) * length;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -offset);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len, len - offset);
        for (std::ptrdiff_t t = lo; t < hi; ++t) dst[b * length + t] = src[t + offset];
      }
    }
  }

  ConstMatrixMap<T> w(weight.data().data(), out_channels, rows);
  RowMatrix<T> y = w * col;

  std::vector<T> out(batch * out_channels * length);
  const T* bias_data = bias.data().data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < out_channels; ++c) {
      const T* src = y.data() + c * cols + b * length;
      T* dst = out.data() + (b * out_channels + c) * length;
      for (std::size_t t = 0; t < length; ++t) dst[t] = src[t] + bias_data[c];
    }
  }

  const bool grad = wants_grad(tape, {&input, &weight, &bias});
  auto result = Tensor<T>::from(sequence_shape(input, batch, out_channels, length), std::move(out), grad);
  if (!grad) return result;

  tape.record([in = input.shared_node(), wn = weight.shared_node(), bn = bias.shared_node(),
               on = result.shared_node(), col = std::move(col), batch, in_channels, out_channels,
               kernel, length, rows, cols, d, shift, len]() {
    RowMatrix<T> dy(out_channels, cols);
    const T* g = on->ensure_grad().data();
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t c = 0; c < out_channels; ++c) {
        std::copy_n(g + (b * out_channels + c) * length, length, dy.data() + c * cols + b * length);
      }
    }
    if (bn->requires_grad) {
      auto& db = bn->ensure_grad();
      for (std::size_t c = 0; c < out_channels; ++c) {
        double acc = 0.0;
        const T* row = dy.data() + c * cols;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j];
        db[c] += static_cast<T>(acc);
      }
    }
    if (wn->requires_grad) {
      MatrixMap<T> dw(wn->ensure_grad().data(), out_channels, rows);
      dw.noalias() += dy * col.transpose();
    }
    if (in->requires_grad) {
      ConstMatrixMap<T> w(wn->data.data(), out_channels, rows);
      RowMatrix<T> dcol = w.transpose() * dy;
      T* dx = in->ensure_grad().data();
      for (std::size_t ci = 0; ci < in_channels; ++ci) {
        for (std::size_t i = 0; i < kernel; ++i) {
          const std::ptrdiff_t offset = shift - d * static_cast<std::ptrdiff_t>(i);
          const T* src = dcol.data() + (ci * kernel + i) * cols;
          for (std::size_t b = 0; b < batch; ++b) {
            T* dst = dx + (b * in_channels + ci) * length;
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -offset);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len, len - offset);
            for (std::ptrdiff_t t = lo; t < hi; ++t) dst[t + offset] += src[b * length + t];
          }
        }
      }
    }
  });
  return result;
}

template <typename T>
Tensor<T> dense(Tape<T>& tape, const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias) {
  require(input.rank() == 1 || input.rank() == 2,
          "dense: input must be [N] or [B, N], got " + shape_string(input.shape()));
  require(weight.rank() == 2, "dense: weight must be [M, N], got " + shape_string(weight.shape()));
  const std::size_t batch = input.rank() == 1 ? 1 : input.dim(0);
  const std::size_t features = input.shape().back();
  const std::size_t outputs = weight.dim(0);
  require(weight.dim(1) == features, "dense: weight " + shape_string(weight.shape()) +
                                         " does not accept input " + shape_string(input.shape()));
  require(bias.rank() == 1 && bias.dim(0) == outputs,
          "dense: bias must be [" + std::to_string(outputs) + "], got " + shape_string(bias.shape()));

  ConstMatrixMap<T> x(input.data().data(), batch, features);
  ConstMatrixMap<T> w(weight.data().data(), outputs, features);
  RowMatrix<T> y = x * w.transpose();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t m = 0; m < outputs; ++m) y(b, m) += bias.data()[m];
  }
  std::vector<T> out(y.data(), y.data() + y.size());

  const bool grad = wants_grad(tape, {&input, &weight, &bias});
  Shape shape = input.rank() == 1 ? Shape{outputs} : Shape{batch, outputs};
  auto result = Tensor<T>::from(std::move(shape), std::move(out), grad);
  if (!grad) return result;

  tape.record([in = input.shared_node(), wn = weight.shared_node(), bn = bias.shared_node(),
               on = result.shared_node(), batch, features, outputs]() {
    ConstMatrixMap<T> dy(on->ensure_grad().data(), batch, outputs);
    if (bn->requires_grad) {
      auto& db = bn->ensure_grad();
      for (std::size_t m = 0; m < outputs; ++m) {
        double acc = 0.0;
        for (std::size_t b = 0; b < batch; ++b) acc += dy(b, m);
        db[m] += static_cast<T>(acc);
      }
    }
    if (wn->requires_grad) {
      ConstMatrixMap<T> x(in->data.data(), batch, features);
      MatrixMap<T> dw(wn->ensure_grad().data(), outputs, features);
      dw.noalias() += dy.transpose() * x;
    }
    if (in->requires_grad) {
      ConstMatrixMap<T> w(wn->data.data(), outputs, features);
      MatrixMap<T> dx(in->ensure_grad().data(), batch, features);
      dx.noalias() += dy * w;
    }
  });
  return result;
}

template <typename T>
Tensor<T> weight_norm(Tape<T>& tape, const Tensor<T>& direction, const Tensor<T>& magnitude) {
  require(direction.rank() >= 1, "weight_norm: direction must have rank >= 1");
  const std::size_t channels = direction.dim(0);
  require(magnitude.numel() == channels,
          "weight_norm: magnitude has " + std::to_string(magnitude.numel()) + " entries, expected " +
              std::to_string(channels));
  const std::size_t slice = direction.numel() / channels;

  std::vector<double> norms(channels);
  std::vector<T> out(direction.numel());
  const T* v = direction.data().data();
  const T* g = magnitude.data().data();
  for (std::size_t c = 0; c < channels; ++c) {
    double sq = 0.0;
    for (std::size_t j = 0; j < slice; ++j) sq += static_cast<double>(v[c * slice + j]) * v[c * slice + j];
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw NumericalError("weight_norm: direction slice " + std::to_string(c) + " has norm " +
                           std::to_string(norm));
    }
    norms[c] = norm;
    const double scale = static_cast<double>(g[c]) / norm;
    for (std::size_t j = 0; j < slice; ++j) out[c * slice + j] = static_cast<T>(scale * v[c * slice + j]);
  }

  const bool grad = wants_grad(tape, {&direction, &magnitude});
  auto result = Tensor<T>::from(direction.shape(), std::move(out), grad);
  if (!grad) return result;

  tape.record([vn = direction.shared_node(), gn = magnitude.shared_node(), on = result.shared_node(),
               norms = std::move(norms), channels, slice]() {
    const T* dw = on->ensure_grad().data();
    const T* v = vn->data.data();
    const T* g = gn->data.data();
    for (std::size_t c = 0; c < channels; ++c) {
      // projection of the upstream gradient onto the unit direction
      double proj = 0.0;
      for (std::size_t j = 0; j < slice; ++j) proj += static_cast<double>(dw[c * slice + j]) * v[c * slice + j];
      proj /= norms[c];
      if (gn->requires_grad) gn->ensure_grad()[c] += static_cast<T>(proj);
      if (vn->requires_grad) {
        T* dv = vn->ensure_grad().data();
        const double scale = static_cast<double>(g[c]) / norms[c];
        for (std::size_t j = 0; j < slice; ++j) {
          const double unit = v[c * slice + j] / norms[c];
          dv[c * slice + j] += static_cast<T>(scale * (dw[c * slice + j] - unit * proj));
        }
      }
    }
  });
  return result;
}

template <typename T>
Tensor<T> relu(Tape<T>& tape, const Tensor<T>& input) {
  std::vector<T> out(input.data().begin(), input.data().end());
  for (auto& value : out) value = value > T(0) ? value : T(0);
  const bool grad = wants_grad(tape, {&input});
  auto result = Tensor<T>::from(input.shape(), std::move(out), grad);
  if (!grad) return result;
  tape.record([in = input.shared_node(), on = result.shared_node()]() {
    auto& dx = in->ensure_grad();
    const auto& dy = on->ensure_grad();
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (in->data[i] > T(0)) dx[i] += dy[i];
    }
  });
  return result;
}

template <typename T>
Tensor<T> add(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  require(a.shape() == b.shape(),
          "add: shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  const bool grad = wants_grad(tape, {&a, &b});
  auto result = Tensor<T>::from(a.shape(), std::move(out), grad);
  if (!grad) return result;
  tape.record([an = a.shared_node(), bn = b.shared_node(), on = result.shared_node()]() {
    const auto& dy = on->ensure_grad();
    for (auto* n : {an.get(), bn.get()}) {
      if (!n->requires_grad) continue;
      auto& dx = n->ensure_grad();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
    }
  });
  return result;
}

template <typename T>
Tensor<T> mul(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  require(a.shape() == b.shape(),
          "mul: shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  const bool grad = wants_grad(tape, {&a, &b});
  auto result = Tensor<T>::from(a.shape(), std::move(out), grad);
  if (!grad) return result;
  tape.record([an = a.shared_node(), bn = b.shared_node(), on = result.shared_node()]() {
    const auto& dy = on->ensure_grad();
    if (an->requires_grad) {
      auto& da = an->ensure_grad();
      for (std::size_t i = 0; i < da.size(); ++i) da[i] += dy[i] * bn->data[i];
    }
    if (bn->requires_grad) {
      auto& db = bn->ensure_grad();
      for (std::size_t i = 0; i < db.size(); ++i) db[i] += dy[i] * an->data[i];
    }
  });
  return result;
}

template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& input) {
  double acc = 0.0;
  for (T value : input.data()) acc += value;
  const bool grad = wants_grad(tape, {&input});
  auto result = Tensor<T>::scalar(static_cast<T>(acc), grad);
  if (!grad) return result;
  tape.record([in = input.shared_node(), on = result.shared_node()]() {
    const T dy = on->ensure_grad()[0];
    for (auto& g : in->ensure_grad()) g += dy;
  });
  return result;
}

template <typename T>
Tensor<T> scale_channels(Tape<T>& tape, const Tensor<T>& input, std::span<const T> scale) {
  const auto [batch, channels, length] = sequence_dims(input, "scale_channels");
  require(scale.size() == batch * channels,
          "scale_channels: expected " + std::to_string(batch * channels) + " scales, got " +
              std::to_string(scale.size()));
  std::vector<T> factors(scale.begin(), scale.end());
  std::vector<T> out(input.numel());
  const T* x = input.data().data();
  for (std::size_t row = 0; row < batch * channels; ++row) {
    for (std::size_t t = 0; t < length; ++t) out[row * length + t] = x[row * length + t] * factors[row];
  }
  const bool grad = wants_grad(tape, {&input});
  auto result = Tensor<T>::from(input.shape(), std::move(out), grad);
  if (!grad) return result;
  tape.record([in = input.shared_node(), on = result.shared_node(), factors = std::move(factors), length]() {
    auto& dx = in->ensure_grad();
    const auto& dy = on->ensure_grad();
    for (std::size_t row = 0; row < factors.size(); ++row) {
      for (std::size_t t = 0; t < length; ++t) dx[row * length + t] += dy[row * length + t] * factors[row];
    }
  });
  return result;
}

template <typename T>
Tensor<T> reverse_time(Tape<T>& tape, const Tensor<T>& input) {
  require(input.rank() >= 1, "reverse_time: rank-0 tensor");
  const std::size_t length = input.shape().back();
  const std::size_t rows = input.numel() / length;
  std::vector<T> out(input.numel());
  const T* x = input.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t t = 0; t < length; ++t) out[r * length + t] = x[r * length + (length - 1 - t)];
  }
  const bool grad = wants_grad(tape, {&input});
  auto result = Tensor<T>::from(input.shape(), std::move(out), grad);
  if (!grad) return result;
  tape.record([in = input.shared_node(), on = result.shared_node(), rows, length]() {
    auto& dx = in->ensure_grad();
    const auto& dy = on->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t t = 0; t < length; ++t) dx[r * length + (length - 1 - t)] += dy[r * length + t];
    }
  });
  return result;
}

template <typename T>
Tensor<T> last_step(Tape<T>& tape, const Tensor<T>& input) {
  const auto [batch, channels, length] = sequence_dims(input, "last_step");
  std::vector<T> out(batch * channels);
  for (std::size_t row = 0; row < batch * channels; ++row) out[row] = input.data()[row * length + length - 1];
  Shape shape = input.rank() == 2 ? Shape{channels} : Shape{batch, channels};
  const bool grad = wants_grad(tape, {&input});
  auto result = Tensor<T>::from(std::move(shape), std::move(out), grad);
  if (!grad) return result;
  tape.record([in = input.shared_node(), on = result.shared_node(), length]() {
    auto& dx = in->ensure_grad();
    const auto& dy = on->ensure_grad();
    for (std::size_t row = 0; row < dy.size(); ++row) dx[row * length + length - 1] += dy[row];
  });
  return result;
}

template <typename T>
Tensor<T> flatten(Tape<T>& tape, const Tensor<T>& input) {
  const auto [batch, channels, length] = sequence_dims(input, "flatten");
  Shape shape = input.rank() == 2 ? Shape{channels * length} : Shape{batch, channels * length};
  std::vector<T> out(input.data().begin(), input.data().end());
  const bool grad = wants_grad(tape, {&input});
  auto result = Tensor<T>::from(std::move(shape), std::move(out), grad);
  if (!grad) return result;
  tape.record([in = input.shared_node(), on = result.shared_node()]() {
    auto& dx = in->ensure_grad();
    const auto& dy = on->ensure_grad();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
  });
  return result;
}

template <typename T>
Tensor<T> concat(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  require(a.rank() == b.rank() && (a.rank() == 1 || a.rank() == 2),
          "concat: expected matching [N] or [B, N] tensors, got " + shape_string(a.shape()) + " and " +
              shape_string(b.shape()));
  const std::size_t batch = a.rank() == 1 ? 1 : a.dim(0);
  require(a.rank() == 1 || b.dim(0) == batch, "concat: batch mismatch");
  const std::size_t na = a.shape().back();
  const std::size_t nb = b.shape().back();
  std::vector<T> out(batch * (na + nb));
  for (std::size_t r = 0; r < batch; ++r) {
    std::copy_n(a.data().data() + r * na, na, out.data() + r * (na + nb));
    std::copy_n(b.data().data() + r * nb, nb, out.data() + r * (na + nb) + na);
  }
  Shape shape = a.rank() == 1 ? Shape{na + nb} : Shape{batch, na + nb};
  const bool grad = wants_grad(tape, {&a, &b});
  auto result = Tensor<T>::from(std::move(shape), std::move(out), grad);
  if (!grad) return result;
  tape.record([an = a.shared_node(), bn = b.shared_node(), on = result.shared_node(), batch, na, nb]() {
    const auto& dy = on->ensure_grad();
    if (an->requires_grad) {
      auto& da = an->ensure_grad();
      for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t j = 0; j < na; ++j) da[r * na + j] += dy[r * (na + nb) + j];
      }
    }
    if (bn->requires_grad) {
      auto& db = bn->ensure_grad();
      for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t j = 0; j < nb; ++j) db[r * nb + j] += dy[r * (na + nb) + na + j];
      }
    }
  });
  return result;
}

template <typename T>
Tensor<T> softmax_cross_entropy(Tape<T>& tape, const Tensor<T>& logits, std::span<const int> labels) {
  require(logits.rank() == 1 || logits.rank() == 2,
          "softmax_cross_entropy: logits must be [K] or [B, K], got " + shape_string(logits.shape()));
  const std::size_t batch = logits.rank() == 1 ? 1 : logits.dim(0);
  const std::size_t classes = logits.shape().back();
  if (labels.size() != batch) {
    throw ArgumentError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for batch of " +
                        std::to_string(batch));
  }
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw ArgumentError("softmax_cross_entropy: label " + std::to_string(label) + " outside [0, " +
                          std::to_string(classes) + ")");
    }
  }

  std::vector<double> probs(batch * classes);
  double total = 0.0;
  const T* z = logits.data().data();
  for (std::size_t b = 0; b < batch; ++b) {
    const T* row = z + b * classes;
    const double peak = *std::max_element(row, row + classes);
    double denom = 0.0;
    for (std::size_t k = 0; k < classes; ++k) denom += std::exp(row[k] - peak);
    const double log_denom = std::log(denom) + peak;
    for (std::size_t k = 0; k < classes; ++k) probs[b * classes + k] = std::exp(row[k] - log_denom);
    total += log_denom - row[labels[b]];
  }
  const double mean = total / static_cast<double>(batch);
  if (!std::isfinite(mean)) throw NumericalError("softmax_cross_entropy: non-finite loss");

  const bool grad = wants_grad(tape, {&logits});
  auto result = Tensor<T>::scalar(static_cast<T>(mean), grad);
  if (!grad) return result;
  tape.record([ln = logits.shared_node(), on = result.shared_node(), probs = std::move(probs),
               targets = std::vector<int>(labels.begin(), labels.end()), batch, classes]() {
    const double dy = on->ensure_grad()[0] / static_cast<double>(batch);
    auto& dz = ln->ensure_grad();
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t k = 0; k < classes; ++k) {
        const double onehot = static_cast<int>(k) == targets[b] ? 1.0 : 0.0;
        dz[b * classes + k] += static_cast<T>(dy * (probs[b * classes + k] - onehot));
      }
    }
  });
  return result;
}

#define FENCENET_INSTANTIATE_OPS(T)                                                                   \
  template Tensor<T> conv1d(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, int,    \
                            ConvPadding);                                                             \
  template Tensor<T> dense(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);         \
  template Tensor<T> weight_norm(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> relu(Tape<T>&, const Tensor<T>&);                                               \
  template Tensor<T> add(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                              \
  template Tensor<T> mul(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                              \
  template Tensor<T> sum(Tape<T>&, const Tensor<T>&);                                                \
  template Tensor<T> scale_channels(Tape<T>&, const Tensor<T>&, std::span<const T>);                 \
  template Tensor<T> reverse_time(Tape<T>&, const Tensor<T>&);                                       \
  template Tensor<T> last_step(Tape<T>&, const Tensor<T>&);                                          \
  template Tensor<T> flatten(Tape<T>&, const Tensor<T>&);                                            \
  template Tensor<T> concat(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> softmax_cross_entropy(Tape<T>&, const Tensor<T>&, std::span<const int>);

FENCENET_INSTANTIATE_OPS(float)
FENCENET_INSTANTIATE_OPS(double)

#undef FENCENET_INSTANTIATE_OPS

}  // namespace fencenet::ops
