#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdradar/mds.hpp"
#include "mdradar/rng.hpp"
#include "mdradar/threading.hpp"

namespace mdradar {

/// One convolutional stage: square filter, zero padding, stride, output
/// depth; each stage is followed by ReLU and 2x2/stride-2 max pooling.
struct ConvSpec {
  Eigen::Index kernel = 0;
  Eigen::Index pad = 1;
  Eigen::Index stride = 1;
  Eigen::Index depth = 0;
};

/// The three stages of the light network.
std::vector<ConvSpec> canonical_conv_specs();

inline Eigen::Index conv_output_size(Eigen::Index in, const ConvSpec& spec) {
  const Eigen::Index out = (in + 2 * spec.pad - spec.kernel) / spec.stride + 1;
  if (out <= 0 || (in + 2 * spec.pad - spec.kernel) % spec.stride != 0)
    throw std::invalid_argument("convolution does not tile the input");
  return out;
}

/// Feature map: (rows*cols) x channels, pixel index p = y*cols + x. Each
/// channel occupies one contiguous (column-major) Eigen column.
template <typename Scalar>
struct Tensor {
  Eigen::Index rows = 0, cols = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> data;

  Eigen::Index channels() const { return data.cols(); }
};

template <typename Scalar>
Tensor<Scalar> tensor_from_image(const MdsImage& image) {
  Tensor<Scalar> t;
  t.rows = image.size;
  t.cols = image.size;
  t.data.resize(image.size * image.size, 3);
  const Scalar scale = Scalar(1) / Scalar(255);
  for (Eigen::Index p = 0; p < image.size * image.size; ++p)
    for (Eigen::Index c = 0; c < 3; ++c)
      t.data(p, c) = scale * Scalar(image.pixels[3 * static_cast<std::size_t>(p) + c]);
  return t;
}

/// Weights and biases of the light CNN. Conv weights are stored as
/// (in_ch * k * k) x out_ch with row index (ci * k + ky) * k + kx; the FC
/// weight is (flatten_dim x classes). Flattening follows the feature-map
/// storage order (channel-major).
template <typename Scalar>
struct CnnModel {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  struct ConvLayer {
    ConvSpec spec;
    Eigen::Index in_channels = 0;
    Mat weights;  // (in_ch*k*k) x out_ch
    RowVec bias;  // 1 x out_ch
  };
  struct FcLayer {
    Mat weights;  // flatten_dim x classes
    Vec bias;
  };

  Eigen::Index input_size = 0;
  Eigen::Index input_channels = 0;
  Eigen::Index class_count = 0;
  std::vector<ConvLayer> conv;
  FcLayer fc;

  /// Feature-map side lengths after each conv and each pool, ending with the
  /// flatten dimension; fixed by the architecture.
  std::vector<Eigen::Index> feature_sides() const {
    std::vector<Eigen::Index> sides;
    Eigen::Index side = input_size;
    for (const auto& layer : conv) {
      side = conv_output_size(side, layer.spec);
      sides.push_back(side);
      if (side % 2 != 0) throw std::invalid_argument("pool input side must be even");
      side /= 2;
      sides.push_back(side);
    }
    return sides;
  }

  Eigen::Index flatten_dim() const {
    const auto sides = feature_sides();
    return sides.back() * sides.back() * conv.back().spec.depth;
  }

  Eigen::Index conv_param_count() const {
    Eigen::Index n = 0;
    for (const auto& layer : conv) n += layer.weights.size() + layer.bias.size();
    return n;
  }
  Eigen::Index fc_param_count() const { return fc.weights.size() + fc.bias.size(); }
  Eigen::Index param_count() const { return conv_param_count() + fc_param_count(); }
};

/// Mutable flat views over every parameter block, in the fixed order
/// conv0.W, conv0.b, ..., fc.W, fc.b (the Adam state uses the same order).
template <typename Scalar>
std::vector<Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>> param_blocks(
    CnnModel<Scalar>& model) {
  std::vector<Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>> blocks;
  for (auto& layer : model.conv) {
    blocks.emplace_back(layer.weights.data(), layer.weights.size());
    blocks.emplace_back(layer.bias.data(), layer.bias.size());
  }
  blocks.emplace_back(model.fc.weights.data(), model.fc.weights.size());
  blocks.emplace_back(model.fc.bias.data(), model.fc.bias.size());
  return blocks;
}

/// Sizes of the parameter blocks in the fixed order above.
template <typename Scalar>
std::vector<Eigen::Index> param_block_sizes(const CnnModel<Scalar>& model) {
  std::vector<Eigen::Index> sizes;
  for (const auto& layer : model.conv) {
    sizes.push_back(layer.weights.size());
    sizes.push_back(layer.bias.size());
  }
  sizes.push_back(model.fc.weights.size());
  sizes.push_back(model.fc.bias.size());
  return sizes;
}

/// Per-parameter gradient, one flat block per parameter block.
template <typename Scalar>
struct Gradients {
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> blocks;

  static Gradients zeros_like(const CnnModel<Scalar>& model) {
    Gradients g;
    for (Eigen::Index n : param_block_sizes(model))
      g.blocks.emplace_back(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n));
    return g;
  }
  void set_zero() {
    for (auto& b : blocks) b.setZero();
  }
};

/// First/second Adam moments per parameter plus the step counter.
template <typename Scalar>
struct AdamState {
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> first, second;
  std::int64_t step = 0;

  static AdamState zeros_like(const CnnModel<Scalar>& model) {
    AdamState s;
    for (Eigen::Index n : param_block_sizes(model)) {
      s.first.emplace_back(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n));
      s.second.emplace_back(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n));
    }
    return s;
  }
};

struct TrainConfig {
  double learning_rate = 1e-4;
  Eigen::Index batch_size = 70;
  Eigen::Index epochs = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
};

/// He-normal weights, zero biases, deterministic per seed.
template <typename Scalar>
CnnModel<Scalar> make_cnn(Eigen::Index input_size, Eigen::Index input_channels,
                          const std::vector<ConvSpec>& specs, Eigen::Index class_count,
                          std::uint64_t seed) {
  CnnModel<Scalar> model;
  model.input_size = input_size;
  model.input_channels = input_channels;
  model.class_count = class_count;
  Eigen::Index channels = input_channels;
  for (std::size_t li = 0; li < specs.size(); ++li) {
    typename CnnModel<Scalar>::ConvLayer layer;
    layer.spec = specs[li];
    layer.in_channels = channels;
    const Eigen::Index fan_in = channels * specs[li].kernel * specs[li].kernel;
    layer.weights.resize(fan_in, specs[li].depth);
    layer.bias = CnnModel<Scalar>::RowVec::Zero(specs[li].depth);
    Rng rng = Rng::derive(seed, {10, li});
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (Eigen::Index j = 0; j < layer.weights.size(); ++j)
      layer.weights.data()[j] = Scalar(stddev * rng.normal());
    model.conv.push_back(std::move(layer));
    channels = specs[li].depth;
  }
  const Eigen::Index flat = model.flatten_dim();
  model.fc.weights.resize(flat, class_count);
  model.fc.bias = CnnModel<Scalar>::Vec::Zero(class_count);
  Rng rng = Rng::derive(seed, {11});
  const double stddev = std::sqrt(2.0 / static_cast<double>(flat));
  for (Eigen::Index j = 0; j < model.fc.weights.size(); ++j)
    model.fc.weights.data()[j] = Scalar(stddev * rng.normal());
  return model;
}

/// The Table-style light network: 128x128x3 input, three conv stages, one FC
/// layer, five classes. Shape chain and parameter counts are asserted.
template <typename Scalar>
CnnModel<Scalar> make_light_cnn(std::uint64_t seed) {
  CnnModel<Scalar> model = make_cnn<Scalar>(128, 3, canonical_conv_specs(), 5, seed);
  const auto sides = model.feature_sides();
  const std::vector<Eigen::Index> expected = {110, 55, 42, 21, 20, 10};
  if (sides != expected) throw std::logic_error("light CNN shape chain mismatch");
  if (model.flatten_dim() != 6400) throw std::logic_error("light CNN flatten dim mismatch");
  if (model.param_count() != 217125 || model.conv_param_count() != 185120 ||
      model.fc_param_count() != 32005)
    throw std::logic_error("light CNN parameter count mismatch");
  return model;
}

namespace detail {

/// Patch matrix for GEMM convolution: (out_h*out_w) x (in_ch*k*k), column
/// q = (ci*k + ky)*k + kx holding the correspondingly shifted input channel.
template <typename Scalar>
void im2col(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& input,
            Eigen::Index in_h, Eigen::Index in_w, const ConvSpec& spec, Eigen::Index out_h,
            Eigen::Index out_w,
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& patches) {
  const Eigen::Index in_ch = input.cols();
  patches.resize(out_h * out_w, in_ch * spec.kernel * spec.kernel);
  for (Eigen::Index ci = 0; ci < in_ch; ++ci) {
    const Scalar* chan = input.col(ci).data();
    for (Eigen::Index ky = 0; ky < spec.kernel; ++ky) {
      for (Eigen::Index kx = 0; kx < spec.kernel; ++kx) {
        Scalar* dst = patches.col((ci * spec.kernel + ky) * spec.kernel + kx).data();
        for (Eigen::Index oy = 0; oy < out_h; ++oy, dst += out_w) {
          const Eigen::Index iy = oy * spec.stride + ky - spec.pad;
          if (iy < 0 || iy >= in_h) {
            std::fill(dst, dst + out_w, Scalar(0));
            continue;
          }
          if (spec.stride == 1) {
            const Eigen::Index ix0 = kx - spec.pad;
            const Eigen::Index lo = std::max<Eigen::Index>(0, -ix0);
            const Eigen::Index hi = std::min<Eigen::Index>(out_w, in_w - ix0);
            if (lo > 0) std::fill(dst, dst + lo, Scalar(0));
            if (hi > lo)
              std::copy(chan + iy * in_w + ix0 + lo, chan + iy * in_w + ix0 + hi, dst + lo);
            if (hi < out_w) std::fill(dst + std::max(lo, hi), dst + out_w, Scalar(0));
          } else {
            for (Eigen::Index ox = 0; ox < out_w; ++ox) {
              const Eigen::Index ix = ox * spec.stride + kx - spec.pad;
              dst[ox] = (ix >= 0 && ix < in_w) ? chan[iy * in_w + ix] : Scalar(0);
            }
          }
        }
      }
    }
  }
}

/// Reverse of im2col: scatter-adds patch gradients back onto the input grid.
template <typename Scalar>
void col2im(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& patches,
            Eigen::Index in_h, Eigen::Index in_w, const ConvSpec& spec, Eigen::Index out_h,
            Eigen::Index out_w, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& input) {
  const Eigen::Index in_ch = input.cols();
  input.setZero();
  for (Eigen::Index ci = 0; ci < in_ch; ++ci) {
    Scalar* chan = input.col(ci).data();
    for (Eigen::Index ky = 0; ky < spec.kernel; ++ky) {
      for (Eigen::Index kx = 0; kx < spec.kernel; ++kx) {
        const Scalar* src = patches.col((ci * spec.kernel + ky) * spec.kernel + kx).data();
        for (Eigen::Index oy = 0; oy < out_h; ++oy, src += out_w) {
          const Eigen::Index iy = oy * spec.stride + ky - spec.pad;
          if (iy < 0 || iy >= in_h) continue;
          for (Eigen::Index ox = 0; ox < out_w; ++ox) {
            const Eigen::Index ix = ox * spec.stride + kx - spec.pad;
            if (ix >= 0 && ix < in_w) chan[iy * in_w + ix] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace detail

/// 2x2 stride-2 max pooling. argmax records the winning input pixel per
/// (output pixel, channel); ties go to the first cell in (y, x) scan order.
template <typename Scalar>
void maxpool_forward(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& input,
                     Eigen::Index in_h, Eigen::Index in_w,
                     Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& output,
                     Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic>& argmax) {
  if (in_h % 2 != 0 || in_w % 2 != 0)
    throw std::invalid_argument("maxpool_forward: input sides must be even");
  const Eigen::Index out_h = in_h / 2, out_w = in_w / 2;
  const Eigen::Index channels = input.cols();
  output.resize(out_h * out_w, channels);
  argmax.resize(out_h * out_w, channels);
  for (Eigen::Index c = 0; c < channels; ++c) {
    const Scalar* chan = input.col(c).data();
    for (Eigen::Index oy = 0; oy < out_h; ++oy) {
      for (Eigen::Index ox = 0; ox < out_w; ++ox) {
        Eigen::Index best_idx = (2 * oy) * in_w + 2 * ox;
        Scalar best = chan[best_idx];
        const Eigen::Index candidates[3] = {(2 * oy) * in_w + 2 * ox + 1,
                                            (2 * oy + 1) * in_w + 2 * ox,
                                            (2 * oy + 1) * in_w + 2 * ox + 1};
        for (Eigen::Index idx : candidates) {
          if (chan[idx] > best) {
            best = chan[idx];
            best_idx = idx;
          }
        }
        output(oy * out_w + ox, c) = best;
        argmax(oy * out_w + ox, c) = best_idx;
      }
    }
  }
}

/// Routes each output gradient to exactly the recorded argmax cell.
template <typename Scalar>
void maxpool_backward(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& grad_out,
                      const Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic>& argmax,
                      Eigen::Index in_pixels,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& grad_in) {
  grad_in.resize(in_pixels, grad_out.cols());
  grad_in.setZero();
  for (Eigen::Index c = 0; c < grad_out.cols(); ++c)
    for (Eigen::Index p = 0; p < grad_out.rows(); ++p)
      grad_in(argmax(p, c), c) += grad_out(p, c);
}

/// Scratch for one sample's forward/backward pass; reusable across samples.
template <typename Scalar>
struct Workspace {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  struct Stage {
    Mat patches;      // im2col of the stage input
    Mat activation;   // post-ReLU conv output
    Mat pooled;       // post-pool output
    Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> argmax;
    Eigen::Index conv_h = 0, conv_w = 0, in_h = 0, in_w = 0;
  };
  std::vector<Stage> stages;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> logits, probs;
  Mat grad_feature, grad_patches, grad_feature_next;
};

/// Forward pass; caches everything backward needs in the workspace.
/// Returns class probabilities (softmax of the FC logits).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> forward(const CnnModel<Scalar>& model,
                                                 const Tensor<Scalar>& image,
                                                 Workspace<Scalar>& ws) {
  if (image.rows != model.input_size || image.cols != model.input_size ||
      image.channels() != model.input_channels)
    throw std::invalid_argument("forward: input shape mismatch");
  ws.stages.resize(model.conv.size());

  const typename Workspace<Scalar>::Mat* current = &image.data;
  Eigen::Index h = image.rows, w = image.cols;
  for (std::size_t li = 0; li < model.conv.size(); ++li) {
    const auto& layer = model.conv[li];
    auto& stage = ws.stages[li];
    stage.in_h = h;
    stage.in_w = w;
    stage.conv_h = conv_output_size(h, layer.spec);
    stage.conv_w = stage.conv_h;
    detail::im2col(*current, h, w, layer.spec, stage.conv_h, stage.conv_w, stage.patches);
    stage.activation.noalias() = stage.patches * layer.weights;
    stage.activation.rowwise() += layer.bias;
    stage.activation = stage.activation.cwiseMax(Scalar(0));
    maxpool_forward(stage.activation, stage.conv_h, stage.conv_w, stage.pooled, stage.argmax);
    h = stage.conv_h / 2;
    w = stage.conv_w / 2;
    current = &stage.pooled;
  }

  const Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> flat(current->data(),
                                                                        current->size());
  ws.logits.noalias() = model.fc.weights.transpose() * flat;
  ws.logits += model.fc.bias;

  const Scalar peak = ws.logits.maxCoeff();
  ws.probs = (ws.logits.array() - peak).exp();
  ws.probs /= ws.probs.sum();
  return ws.probs;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> forward(const CnnModel<Scalar>& model,
                                                 const Tensor<Scalar>& image) {
  Workspace<Scalar> ws;
  return forward(model, image, ws);
}

/// Cross-entropy of the cached forward pass and backpropagation into `grads`
/// (accumulated, caller-scaled). Gradient of the input image is not formed.
template <typename Scalar>
Scalar backward(const CnnModel<Scalar>& model, const Tensor<Scalar>& image, int label,
                Workspace<Scalar>& ws, Gradients<Scalar>& grads, Scalar scale) {
  if (label < 0 || label >= model.class_count)
    throw std::invalid_argument("backward: label out of range");

  // loss = logsumexp(logits) - logits[label]; d(loss)/d(logits) = probs - onehot
  const Scalar peak = ws.logits.maxCoeff();
  const Scalar loss =
      peak + std::log((ws.logits.array() - peak).exp().sum()) - ws.logits[label];
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> grad_logits = ws.probs;
  grad_logits[label] -= Scalar(1);
  grad_logits *= scale;

  const auto& last = ws.stages.back();
  const Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> flat(last.pooled.data(),
                                                                        last.pooled.size());
  const std::size_t fc_w = 2 * model.conv.size();
  Eigen::Map<typename Workspace<Scalar>::Mat> fc_grad(grads.blocks[fc_w].data(),
                                                      model.fc.weights.rows(),
                                                      model.fc.weights.cols());
  fc_grad.noalias() += flat * grad_logits.transpose();
  grads.blocks[fc_w + 1] += grad_logits;

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> grad_flat = model.fc.weights * grad_logits;
  ws.grad_feature =
      Eigen::Map<typename Workspace<Scalar>::Mat>(grad_flat.data(), last.pooled.rows(),
                                                  last.pooled.cols());

  for (std::size_t li = model.conv.size(); li-- > 0;) {
    const auto& layer = model.conv[li];
    auto& stage = ws.stages[li];
    // pool backward, then ReLU mask
    maxpool_backward(ws.grad_feature, stage.argmax, stage.conv_h * stage.conv_w,
                     ws.grad_feature_next);
    ws.grad_feature_next =
        (stage.activation.array() > Scalar(0)).select(ws.grad_feature_next, Scalar(0));

    Eigen::Map<typename Workspace<Scalar>::Mat> w_grad(grads.blocks[2 * li].data(),
                                                       layer.weights.rows(),
                                                       layer.weights.cols());
    w_grad.noalias() += stage.patches.transpose() * ws.grad_feature_next;
    Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> b_grad(grads.blocks[2 * li + 1].data(),
                                                                layer.bias.size());
    b_grad += ws.grad_feature_next.colwise().sum().transpose();

    if (li == 0) break;  // input-image gradient is never used
    ws.grad_patches.noalias() = ws.grad_feature_next * layer.weights.transpose();
    ws.grad_feature.resize(stage.in_h * stage.in_w, layer.in_channels);
    detail::col2im(ws.grad_patches, stage.in_h, stage.in_w, layer.spec, stage.conv_h,
                   stage.conv_w, ws.grad_feature);
  }
  return loss;
}

/// One labeled batch: mean cross-entropy plus gradients of the mean loss.
/// Samples are evaluated independently (in parallel when workers allow) and
/// reduced in index order, so results do not depend on scheduling.
template <typename Scalar>
struct BatchResult {
  Scalar loss = 0;
  Eigen::Index correct = 0;
};

template <typename Scalar>
BatchResult<Scalar> loss_and_gradients(const CnnModel<Scalar>& model,
                                       std::span<const Tensor<Scalar>> images,
                                       std::span<const int> labels, Gradients<Scalar>& grads) {
  if (images.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
  if (images.size() != labels.size())
    throw std::invalid_argument("loss_and_gradients: image/label count mismatch");
  for (int label : labels)
    if (label < 0 || label >= model.class_count)
      throw std::invalid_argument("loss_and_gradients: label out of range");

  const std::size_t batch = images.size();
  const Scalar scale = Scalar(1) / Scalar(batch);
  std::vector<Gradients<Scalar>> slots(batch);
  std::vector<Scalar> losses(batch);
  std::vector<int> predicted(batch);

  parallel_for(batch, [&](std::size_t i) {
    static thread_local Workspace<Scalar> ws;
    slots[i] = Gradients<Scalar>::zeros_like(model);
    const auto probs = forward(model, images[i], ws);
    Eigen::Index arg = 0;
    probs.maxCoeff(&arg);
    predicted[i] = static_cast<int>(arg);
    losses[i] = backward(model, images[i], labels[i], ws, slots[i], scale);
  });

  grads = Gradients<Scalar>::zeros_like(model);
  BatchResult<Scalar> result;
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t b = 0; b < grads.blocks.size(); ++b) grads.blocks[b] += slots[i].blocks[b];
    result.loss += losses[i];
    if (predicted[i] == labels[i]) ++result.correct;
  }
  result.loss *= scale;
  return result;
}

/// Bias-corrected Adam update.
template <typename Scalar>
void adam_step(CnnModel<Scalar>& model, const Gradients<Scalar>& grads, AdamState<Scalar>& state,
               const TrainConfig& config) {
  ++state.step;
  auto blocks = param_blocks(model);
  const Scalar b1 = Scalar(config.beta1), b2 = Scalar(config.beta2);
  const Scalar bias1 = Scalar(1) - std::pow(b1, Scalar(state.step));
  const Scalar bias2 = Scalar(1) - std::pow(b2, Scalar(state.step));
  const Scalar lr = Scalar(config.learning_rate);
  const Scalar eps = Scalar(config.epsilon);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto& m = state.first[i];
    auto& v = state.second[i];
    const auto& g = grads.blocks[i];
    m = b1 * m + (Scalar(1) - b1) * g;
    v = (b2 * v.array() + (Scalar(1) - b2) * g.array().square()).matrix();
    blocks[i].array() -= lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + eps);
  }
}

}  // namespace mdradar
