#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#if defined(__SSE2__) || defined(__x86_64__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#define TOPOMUSE_HAS_MXCSR 1
#endif

#include "topomuse/overlap.hpp"
#include "topomuse/rng.hpp"

namespace topomuse {

namespace detail {

/// Flushes subnormal floats to zero while alive. Late in training the
/// per-class probabilities underflow and subnormal operands drop GEMM
/// throughput by an order of magnitude; flushing is applied for the whole
/// run, so results stay reproducible.
class DenormalFlushGuard {
 public:
  DenormalFlushGuard() {
#ifdef TOPOMUSE_HAS_MXCSR
    saved_ = _mm_getcsr();
    _MM_SET_FLUSH_ZERO_MODE(_MM_FLUSH_ZERO_ON);
    _MM_SET_DENORMALS_ZERO_MODE(_MM_DENORMALS_ZERO_ON);
#endif
  }
  ~DenormalFlushGuard() {
#ifdef TOPOMUSE_HAS_MXCSR
    _mm_setcsr(saved_);
#endif
  }
  DenormalFlushGuard(const DenormalFlushGuard&) = delete;
  DenormalFlushGuard& operator=(const DenormalFlushGuard&) = delete;

 private:
#ifdef TOPOMUSE_HAS_MXCSR
  unsigned int saved_ = 0;
#endif
};

}  // namespace detail

enum class OverlapEncoding { kBinary, kInteger };
enum class GenerateMode { kArgmax, kSample };

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One supervised example: a flattened Overlap-matrix window and the class
/// index (node id - 1) of each of the d positions. The target is logically
/// the one-hot d x q matrix with a 1 at (j, target[j]).
template <typename Scalar>
struct TrainingPair {
  VectorX<Scalar> input;
  std::vector<int> target;
};

/// Flattens an Overlap matrix row-major into the network input encoding:
/// binary entries stay 0/1, integer entries are scaled by 1/classes into
/// [0, 1].
template <typename Scalar>
VectorX<Scalar> encodeOverlap(const OverlapMatrix& m, OverlapEncoding encoding, int classes) {
  const int k = m.cycleCount();
  const int d = m.length();
  VectorX<Scalar> input(static_cast<Eigen::Index>(k) * d);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < d; ++j) {
      const std::int64_t raw = m.at(i, j);
      Scalar value;
      if (encoding == OverlapEncoding::kBinary) {
        value = raw != 0 ? Scalar(1) : Scalar(0);
      } else {
        value = static_cast<Scalar>(raw) / static_cast<Scalar>(classes);
      }
      input[static_cast<Eigen::Index>(i) * d + j] = value;
    }
  }
  return input;
}

/// Periodic-extension augmentation: window i of [M M] paired with window i of
/// the doubled flow, for i = 1..d. Window 1 is the original pair and window
/// d+1 would wrap around to window 1 again.
template <typename Scalar>
std::vector<TrainingPair<Scalar>> augment(const std::vector<int>& flow_ids, const OverlapMatrix& m,
                                          OverlapEncoding encoding, int classes) {
  const int d = m.length();
  if (static_cast<int>(flow_ids.size()) != d) {
    throw ParseError("flow length " + std::to_string(flow_ids.size()) +
                     " does not match overlap matrix length " + std::to_string(d));
  }
  for (const int id : flow_ids) {
    if (id < 1 || id > classes) {
      throw ParseError("flow node id " + std::to_string(id) + " outside [1, " +
                       std::to_string(classes) + "]");
    }
  }
  const int k = m.cycleCount();
  std::vector<TrainingPair<Scalar>> pairs;
  pairs.reserve(static_cast<std::size_t>(d));
  const VectorX<Scalar> base = encodeOverlap<Scalar>(m, encoding, classes);
  for (int shift = 0; shift < d; ++shift) {
    TrainingPair<Scalar> pair;
    pair.input.resize(static_cast<Eigen::Index>(k) * d);
    for (int i = 0; i < k; ++i) {
      for (int t = 0; t < d; ++t) {
        pair.input[static_cast<Eigen::Index>(i) * d + t] =
            base[static_cast<Eigen::Index>(i) * d + (shift + t) % d];
      }
    }
    pair.target.resize(static_cast<std::size_t>(d));
    for (int t = 0; t < d; ++t) {
      pair.target[static_cast<std::size_t>(t)] = flow_ids[static_cast<std::size_t>((shift + t) % d)] - 1;
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

/// Multilayer perceptron mapping a flattened k*d Overlap matrix to d
/// probability rows over q classes: affine + ReLU hidden layers, a linear
/// d*q output layer, and a softmax over each length-q slice. Output entry
/// (j, c) sits at flat index j*q + c.
template <typename Scalar>
class Mlp {
 public:
  struct Layer {
    MatrixX<Scalar> weights;  // out x in
    VectorX<Scalar> bias;
    bool relu = true;
  };

  Mlp() = default;

  Mlp(int input_dim, std::vector<int> hidden_dims, int positions, int classes)
      : input_dim_(input_dim), positions_(positions), classes_(classes) {
    if (input_dim < 1 || positions < 1 || classes < 1) {
      throw ParseError("mlp: dimensions must be positive");
    }
    int in = input_dim;
    for (const int h : hidden_dims) {
      if (h < 1) throw ParseError("mlp: hidden dimension must be positive");
      layers_.push_back(Layer{MatrixX<Scalar>::Zero(h, in), VectorX<Scalar>::Zero(h), true});
      in = h;
    }
    layers_.push_back(Layer{MatrixX<Scalar>::Zero(static_cast<Eigen::Index>(positions) * classes, in),
                            VectorX<Scalar>::Zero(static_cast<Eigen::Index>(positions) * classes),
                            false});
  }

  /// Fan-in-scaled uniform init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for both
  /// weights and biases. Keeps the initial softmax close to uniform.
  void initialize(Rng& rng) {
    for (Layer& layer : layers_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weights.cols()));
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
          layer.weights(r, c) = static_cast<Scalar>(rng.symmetric(bound));
        }
      }
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
        layer.bias[r] = static_cast<Scalar>(rng.symmetric(bound));
      }
    }
  }

  int inputDim() const { return input_dim_; }
  int positions() const { return positions_; }
  int classes() const { return classes_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  /// Batched pre-softmax output: inputs are rows of X (n x input_dim), the
  /// result is n x (positions*classes).
  MatrixX<Scalar> logitsBatch(const MatrixX<Scalar>& inputs) const {
    if (inputs.cols() != input_dim_) throw ParseError("mlp: input dimension mismatch");
    MatrixX<Scalar> activation = inputs;
    for (const Layer& layer : layers_) {
      MatrixX<Scalar> z = activation * layer.weights.transpose();
      z.rowwise() += layer.bias.transpose();
      if (layer.relu) z = z.cwiseMax(Scalar(0));
      activation = std::move(z);
    }
    return activation;
  }

  /// Pre-softmax output for one input, reshaped to positions x classes.
  MatrixX<Scalar> logits(const VectorX<Scalar>& input) const {
    MatrixX<Scalar> flat = logitsBatch(input.transpose());
    MatrixX<Scalar> shaped(positions_, classes_);
    for (int j = 0; j < positions_; ++j) {
      for (int c = 0; c < classes_; ++c) {
        shaped(j, c) = flat(0, static_cast<Eigen::Index>(j) * classes_ + c);
      }
    }
    return shaped;
  }

  /// Probability matrix (positions x classes); each row sums to 1.
  MatrixX<Scalar> forward(const VectorX<Scalar>& input) const {
    MatrixX<Scalar> shaped = logits(input);
    for (int j = 0; j < positions_; ++j) {
      const Scalar row_max = shaped.row(j).maxCoeff();
      shaped.row(j) = (shaped.row(j).array() - row_max).exp();
      shaped.row(j) /= shaped.row(j).sum();
    }
    return shaped;
  }

 private:
  int input_dim_ = 0;
  int positions_ = 0;
  int classes_ = 0;
  std::vector<Layer> layers_;
};

/// Mean cross entropy over positions, -(1/d) sum_j log p(target_j), with the
/// log argument clamped at 1e-12.
template <typename Scalar>
double crossEntropy(const MatrixX<Scalar>& probabilities, const std::vector<int>& target) {
  if (probabilities.rows() != static_cast<Eigen::Index>(target.size())) {
    throw ParseError("cross entropy: row/target count mismatch");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < probabilities.rows(); ++j) {
    const double p = std::max(static_cast<double>(probabilities(j, target[static_cast<std::size_t>(j)])),
                              1e-12);
    total -= std::log(p);
  }
  return total / static_cast<double>(probabilities.rows());
}

template <typename Scalar>
struct Gradients {
  std::vector<MatrixX<Scalar>> weights;
  std::vector<VectorX<Scalar>> bias;
};

/// Mean cross entropy of a batch without materializing probability matrices.
template <typename Scalar>
double batchLoss(const Mlp<Scalar>& model, const MatrixX<Scalar>& inputs,
                 const std::vector<const std::vector<int>*>& targets) {
  if (inputs.rows() == 0) return 0.0;
  const int positions = model.positions();
  const int classes = model.classes();
  const MatrixX<Scalar> logits = model.logitsBatch(inputs);
  double total = 0.0;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> buffer(classes);
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    for (int j = 0; j < positions; ++j) {
      const Eigen::Index base = static_cast<Eigen::Index>(j) * classes;
      const auto segment = logits.row(r).segment(base, classes).transpose();
      const Scalar row_max = segment.maxCoeff();
      buffer = (segment.array() - row_max).exp();
      const int t = (*targets[static_cast<std::size_t>(r)])[static_cast<std::size_t>(j)];
      const double p = static_cast<double>(buffer[t]) / static_cast<double>(buffer.sum());
      total -= std::log(std::max(p, 1e-12));
    }
  }
  return total / (static_cast<double>(logits.rows()) * positions);
}

/// Batched forward + backward pass. Returns the mean cross-entropy loss over
/// the batch and fills the parameter gradients of that mean.
template <typename Scalar>
Gradients<Scalar> backward(const Mlp<Scalar>& model, const MatrixX<Scalar>& inputs,
                           const std::vector<const std::vector<int>*>& targets, double& loss_out) {
  const Eigen::Index n = inputs.rows();
  if (n == 0 || static_cast<std::size_t>(n) != targets.size()) {
    throw ParseError("backward: batch/target count mismatch");
  }
  const int positions = model.positions();
  const int classes = model.classes();
  const auto& layers = model.layers();

  std::vector<MatrixX<Scalar>> activations;  // activations[l] = input to layer l
  activations.reserve(layers.size() + 1);
  activations.push_back(inputs);
  for (const auto& layer : layers) {
    MatrixX<Scalar> z = activations.back() * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    if (layer.relu) z = z.cwiseMax(Scalar(0));
    activations.push_back(std::move(z));
  }

  // Softmax over each length-q slice of the output, loss, and dL/dlogits.
  MatrixX<Scalar>& output = activations.back();
  MatrixX<Scalar> delta(n, output.cols());
  double loss = 0.0;
  const double scale = 1.0 / (static_cast<double>(positions) * static_cast<double>(n));
  Eigen::Array<Scalar, Eigen::Dynamic, 1> buffer(classes);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int j = 0; j < positions; ++j) {
      const Eigen::Index base = static_cast<Eigen::Index>(j) * classes;
      const auto segment = output.row(r).segment(base, classes).transpose();
      const Scalar row_max = segment.maxCoeff();
      buffer = (segment.array() - row_max).exp();
      buffer /= buffer.sum();
      const int t = (*targets[static_cast<std::size_t>(r)])[static_cast<std::size_t>(j)];
      loss -= std::log(std::max(static_cast<double>(buffer[t]), 1e-12)) * scale;
      delta.row(r).segment(base, classes) =
          (buffer * static_cast<Scalar>(scale)).matrix().transpose();
      delta(r, base + t) -= static_cast<Scalar>(scale);
    }
  }
  loss_out = loss;

  Gradients<Scalar> grads;
  grads.weights.resize(layers.size());
  grads.bias.resize(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    grads.weights[l] = delta.transpose() * activations[l];
    grads.bias[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      MatrixX<Scalar> upstream = delta * layers[l].weights;
      // ReLU mask of the previous layer's output.
      delta = upstream.cwiseProduct(
          (activations[l].array() > Scalar(0)).template cast<Scalar>().matrix());
    }
  }
  return grads;
}

struct TrainConfig {
  double learning_rate = 0.001;
  int epochs = 500;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double split = 0.7;  // training fraction, in (0, 1]
  std::uint64_t seed = 0;
  int batch_size = 0;       // 0 = full batch
  std::vector<int> hidden;  // empty = two hidden layers of width d
  int classes = 0;          // 0 = infer from the targets
};

template <typename Scalar>
struct TrainResult {
  Mlp<Scalar> model;
  std::vector<double> train_loss;  // entry e = loss entering epoch e; last entry = final loss
  std::vector<double> eval_loss;   // aligned with train_loss; empty when the eval set is empty
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> eval_indices;
};

/// Trains an MLP on augmented pairs with Adam: seeded shuffle-split, then
/// `epochs` passes of full-batch (or mini-batch) updates. Aborts with
/// diagnostics if the loss stops being finite.
template <typename Scalar>
TrainResult<Scalar> train(const std::vector<TrainingPair<Scalar>>& pairs, const TrainConfig& cfg) {
  if (pairs.size() < 2) throw ParseError("train: need at least 2 pairs");
  if (cfg.split <= 0.0 || cfg.split > 1.0) throw ParseError("train: split must be in (0, 1]");
  if (cfg.learning_rate <= 0.0) throw ParseError("train: learning rate must be > 0");
  if (cfg.epochs < 0) throw ParseError("train: epochs must be >= 0");
  const detail::DenormalFlushGuard flush_guard;

  const Eigen::Index input_dim = pairs.front().input.size();
  const int positions = static_cast<int>(pairs.front().target.size());
  int classes = cfg.classes;
  for (const auto& pair : pairs) {
    if (pair.input.size() != input_dim || static_cast<int>(pair.target.size()) != positions) {
      throw ParseError("train: inconsistent pair shapes");
    }
    for (const int t : pair.target) {
      if (t < 0) throw ParseError("train: negative target class");
      classes = std::max(classes, t + 1);
    }
  }

  Rng rng(cfg.seed);

  // Seeded shuffle, then split.
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i-- > 1;) {
    std::swap(order[i], order[rng.index(i + 1)]);
  }
  std::size_t train_count =
      static_cast<std::size_t>(std::llround(cfg.split * static_cast<double>(pairs.size())));
  train_count = std::clamp<std::size_t>(train_count, 1, pairs.size());

  TrainResult<Scalar> result;
  result.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
  result.eval_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count), order.end());

  std::vector<int> hidden = cfg.hidden;
  if (hidden.empty()) hidden = {positions, positions};
  result.model = Mlp<Scalar>(static_cast<int>(input_dim), hidden, positions, classes);
  result.model.initialize(rng);

  auto gather = [&](const std::vector<std::size_t>& indices, MatrixX<Scalar>& x,
                    std::vector<const std::vector<int>*>& t) {
    x.resize(static_cast<Eigen::Index>(indices.size()), input_dim);
    t.clear();
    for (std::size_t r = 0; r < indices.size(); ++r) {
      x.row(static_cast<Eigen::Index>(r)) = pairs[indices[r]].input.transpose();
      t.push_back(&pairs[indices[r]].target);
    }
  };

  MatrixX<Scalar> train_x;
  std::vector<const std::vector<int>*> train_t;
  gather(result.train_indices, train_x, train_t);
  MatrixX<Scalar> eval_x;
  std::vector<const std::vector<int>*> eval_t;
  gather(result.eval_indices, eval_x, eval_t);

  // Adam state.
  auto& layers = result.model.layers();
  std::vector<MatrixX<Scalar>> m_w, v_w;
  std::vector<VectorX<Scalar>> m_b, v_b;
  for (const auto& layer : layers) {
    m_w.push_back(MatrixX<Scalar>::Zero(layer.weights.rows(), layer.weights.cols()));
    v_w.push_back(MatrixX<Scalar>::Zero(layer.weights.rows(), layer.weights.cols()));
    m_b.push_back(VectorX<Scalar>::Zero(layer.bias.size()));
    v_b.push_back(VectorX<Scalar>::Zero(layer.bias.size()));
  }
  std::int64_t step = 0;

  auto adamUpdate = [&](const Gradients<Scalar>& grads) {
    ++step;
    const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    const Scalar b1 = static_cast<Scalar>(cfg.beta1);
    const Scalar b2 = static_cast<Scalar>(cfg.beta2);
    const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
    const Scalar eps = static_cast<Scalar>(cfg.epsilon);
    const Scalar c1 = static_cast<Scalar>(correction1);
    const Scalar c2 = static_cast<Scalar>(correction2);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      m_w[l] = b1 * m_w[l] + (Scalar(1) - b1) * grads.weights[l];
      v_w[l] = b2 * v_w[l] + (Scalar(1) - b2) * grads.weights[l].cwiseProduct(grads.weights[l]);
      layers[l].weights.array() -=
          lr * (m_w[l].array() / c1) / ((v_w[l].array() / c2).sqrt() + eps);
      m_b[l] = b1 * m_b[l] + (Scalar(1) - b1) * grads.bias[l];
      v_b[l] = b2 * v_b[l] + (Scalar(1) - b2) * grads.bias[l].cwiseProduct(grads.bias[l]);
      layers[l].bias.array() -= lr * (m_b[l].array() / c1) / ((v_b[l].array() / c2).sqrt() + eps);
    }
  };

  const std::size_t batch =
      cfg.batch_size <= 0 ? result.train_indices.size()
                          : std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size),
                                                  result.train_indices.size());

  std::vector<std::size_t> epoch_order(result.train_indices.size());
  for (std::size_t i = 0; i < epoch_order.size(); ++i) epoch_order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    if (batch == result.train_indices.size()) {
      double loss = 0.0;
      const Gradients<Scalar> grads = backward(result.model, train_x, train_t, loss);
      epoch_loss = loss;
      if (!std::isfinite(loss)) {
        throw InternalError("train: non-finite loss at epoch " + std::to_string(epoch));
      }
      if (!eval_t.empty()) result.eval_loss.push_back(batchLoss(result.model, eval_x, eval_t));
      result.train_loss.push_back(epoch_loss);
      adamUpdate(grads);
    } else {
      if (!eval_t.empty()) result.eval_loss.push_back(batchLoss(result.model, eval_x, eval_t));
      for (std::size_t i = epoch_order.size(); i-- > 1;) {
        std::swap(epoch_order[i], epoch_order[rng.index(i + 1)]);
      }
      double sum = 0.0;
      std::size_t chunks = 0;
      for (std::size_t begin = 0; begin < epoch_order.size(); begin += batch) {
        const std::size_t end = std::min(begin + batch, epoch_order.size());
        MatrixX<Scalar> x(static_cast<Eigen::Index>(end - begin), input_dim);
        std::vector<const std::vector<int>*> t;
        for (std::size_t r = begin; r < end; ++r) {
          x.row(static_cast<Eigen::Index>(r - begin)) =
              pairs[result.train_indices[epoch_order[r]]].input.transpose();
          t.push_back(&pairs[result.train_indices[epoch_order[r]]].target);
        }
        double loss = 0.0;
        const Gradients<Scalar> grads = backward(result.model, x, t, loss);
        if (!std::isfinite(loss)) {
          throw InternalError("train: non-finite loss at epoch " + std::to_string(epoch));
        }
        sum += loss;
        ++chunks;
        adamUpdate(grads);
      }
      epoch_loss = sum / static_cast<double>(chunks);
      result.train_loss.push_back(epoch_loss);
    }
  }

  // Final losses after the last update.
  result.train_loss.push_back(batchLoss(result.model, train_x, train_t));
  if (!eval_t.empty()) result.eval_loss.push_back(batchLoss(result.model, eval_x, eval_t));

  return result;
}

/// Generates a flow from a seed Overlap matrix: one forward pass, then per
/// position either the argmax class or a draw from the temperature-scaled
/// softmax. Returns 1-based node ids.
template <typename Scalar>
std::vector<int> generate(const Mlp<Scalar>& model, const OverlapMatrix& seed,
                          OverlapEncoding encoding, GenerateMode mode, double temperature,
                          Rng& rng) {
  const VectorX<Scalar> input = encodeOverlap<Scalar>(seed, encoding, model.classes());
  if (input.size() != model.inputDim()) {
    throw ParseError("seed matrix dimensions do not match the model input");
  }
  if (mode == GenerateMode::kSample && temperature <= 0.0) {
    throw ParseError("sampling temperature must be > 0");
  }
  const MatrixX<Scalar> shaped = model.logits(input);
  std::vector<int> flow;
  flow.reserve(static_cast<std::size_t>(model.positions()));
  for (int j = 0; j < model.positions(); ++j) {
    if (mode == GenerateMode::kArgmax) {
      int best = 0;
      for (int c = 1; c < model.classes(); ++c) {
        if (shaped(j, c) > shaped(j, best)) best = c;
      }
      flow.push_back(best + 1);
      continue;
    }
    std::vector<double> probabilities(static_cast<std::size_t>(model.classes()));
    double row_max = static_cast<double>(shaped.row(j).maxCoeff());
    double denom = 0.0;
    for (int c = 0; c < model.classes(); ++c) {
      probabilities[static_cast<std::size_t>(c)] =
          std::exp((static_cast<double>(shaped(j, c)) - row_max) / temperature);
      denom += probabilities[static_cast<std::size_t>(c)];
    }
    const double ticket = rng.unit() * denom;
    double cumulative = 0.0;
    int chosen = model.classes() - 1;
    for (int c = 0; c < model.classes(); ++c) {
      cumulative += probabilities[static_cast<std::size_t>(c)];
      if (ticket < cumulative) {
        chosen = c;
        break;
      }
    }
    flow.push_back(chosen + 1);
  }
  return flow;
}

}  // namespace topomuse
