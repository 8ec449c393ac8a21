#include "mdradar/train.hpp"

#include <array>
#include <fstream>
#include <json.hpp>

#include "mdradar/error.hpp"

namespace mdradar {

namespace {

/// Forward-only pass over a set: per-sample loss and prediction, reduced in
/// index order.
void predict_set(const CnnModel<float>& model, const std::vector<Sample>& samples,
                 std::vector<int>& predictions, std::vector<float>& losses) {
  predictions.resize(samples.size());
  losses.resize(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    static thread_local Workspace<float> ws;
    const Tensor<float> input = tensor_from_image<float>(*samples[i].image);
    const auto probs = forward(model, input, ws);
    Eigen::Index arg = 0;
    probs.maxCoeff(&arg);
    predictions[i] = static_cast<int>(arg);
    const float peak = ws.logits.maxCoeff();
    losses[i] = peak + std::log((ws.logits.array() - peak).exp().sum()) -
                ws.logits[samples[i].label];
  });
}

void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng) {
  for (std::size_t i = indices.size(); i > 1; --i)
    std::swap(indices[i - 1], indices[rng.uniform_below(i)]);
}

}  // namespace

std::vector<EpochStats> train(CnnModel<float>& model, AdamState<float>& adam,
                              const std::vector<Sample>& train_set,
                              const std::vector<Sample>& validation_set,
                              const TrainConfig& config, Eigen::Index start_epoch) {
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (config.batch_size < 1 || config.epochs < 0)
    throw std::invalid_argument("train: bad batch size or epoch count");

  std::vector<std::size_t> order(train_set.size());
  std::vector<EpochStats> history;
  Gradients<float> grads;
  for (Eigen::Index epoch = start_epoch; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng = Rng::derive(config.seed, {100, static_cast<std::uint64_t>(epoch)});
    shuffle_indices(order, rng);

    double epoch_loss = 0;
    Eigen::Index epoch_correct = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<Tensor<float>> images;
      std::vector<int> labels;
      images.reserve(end - begin);
      labels.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        images.push_back(tensor_from_image<float>(*train_set[order[i]].image));
        labels.push_back(train_set[order[i]].label);
      }
      const auto result = loss_and_gradients<float>(model, images, labels, grads);
      adam_step(model, grads, adam, config);
      epoch_loss += static_cast<double>(result.loss) * static_cast<double>(end - begin);
      epoch_correct += result.correct;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(train_set.size());
    stats.train_accuracy =
        static_cast<double>(epoch_correct) / static_cast<double>(train_set.size());
    if (!validation_set.empty()) {
      std::vector<int> predictions;
      std::vector<float> losses;
      predict_set(model, validation_set, predictions, losses);
      double loss_sum = 0;
      Eigen::Index correct = 0;
      for (std::size_t i = 0; i < validation_set.size(); ++i) {
        loss_sum += losses[i];
        if (predictions[i] == validation_set[i].label) ++correct;
      }
      stats.val_loss = loss_sum / static_cast<double>(validation_set.size());
      stats.val_accuracy = static_cast<double>(correct) / static_cast<double>(validation_set.size());
    }
    history.push_back(stats);
  }
  return history;
}

Evaluation evaluate_predictions(const std::vector<int>& labels, const std::vector<int>& predictions,
                                int class_count) {
  if (labels.size() != predictions.size())
    throw std::invalid_argument("evaluate_predictions: size mismatch");
  Evaluation eval;
  eval.confusion = Eigen::MatrixXi::Zero(class_count, class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count || predictions[i] < 0 ||
        predictions[i] >= class_count)
      throw std::invalid_argument("evaluate_predictions: class out of range");
    eval.confusion(labels[i], predictions[i]) += 1;
  }
  const int total = static_cast<int>(labels.size());
  eval.accuracy = total > 0 ? static_cast<double>(eval.confusion.trace()) / total : 0.0;
  return eval;
}

Evaluation evaluate(const CnnModel<float>& model, const std::vector<Sample>& samples) {
  if (samples.empty()) throw std::invalid_argument("evaluate: empty test set");
  std::vector<int> predictions;
  std::vector<float> losses;
  predict_set(model, samples, predictions, losses);
  std::vector<int> labels(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) labels[i] = samples[i].label;
  Evaluation eval = evaluate_predictions(labels, predictions, static_cast<int>(model.class_count));
  double loss_sum = 0;
  for (float l : losses) loss_sum += l;
  eval.mean_loss = loss_sum / static_cast<double>(samples.size());
  return eval;
}

namespace {

constexpr std::array<char, 8> kModelMagic = {'M', 'D', 'S', 'C', 'N', 'N', '1', '\0'};
constexpr std::uint32_t kModelVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
void put_floats(std::ofstream& out, const float* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
}
void get_floats(std::ifstream& in, float* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
}

}  // namespace

void save_model(const std::filesystem::path& path, const CnnModel<float>& model,
                const AdamState<float>& adam, Eigen::Index epochs_completed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(kModelMagic.data(), kModelMagic.size());
  put_u32(out, kModelVersion);
  put_u32(out, static_cast<std::uint32_t>(model.input_size));
  put_u32(out, static_cast<std::uint32_t>(model.input_channels));
  put_u32(out, static_cast<std::uint32_t>(model.class_count));
  put_u32(out, static_cast<std::uint32_t>(model.conv.size()));
  for (const auto& layer : model.conv) {
    put_u32(out, static_cast<std::uint32_t>(layer.spec.kernel));
    put_u32(out, static_cast<std::uint32_t>(layer.spec.pad));
    put_u32(out, static_cast<std::uint32_t>(layer.spec.stride));
    put_u32(out, static_cast<std::uint32_t>(layer.spec.depth));
  }
  for (const auto& layer : model.conv) {
    put_floats(out, layer.weights.data(), static_cast<std::size_t>(layer.weights.size()));
    put_floats(out, layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  put_floats(out, model.fc.weights.data(), static_cast<std::size_t>(model.fc.weights.size()));
  put_floats(out, model.fc.bias.data(), static_cast<std::size_t>(model.fc.bias.size()));
  put_u64(out, static_cast<std::uint64_t>(adam.step));
  for (const auto& m : adam.first) put_floats(out, m.data(), static_cast<std::size_t>(m.size()));
  for (const auto& v : adam.second) put_floats(out, v.data(), static_cast<std::size_t>(v.size()));
  put_u64(out, static_cast<std::uint64_t>(epochs_completed));
  if (!out) throw FormatError("short write to " + path.string());
}

Checkpoint load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kModelMagic) throw FormatError(path.string() + ": bad checkpoint magic");
  if (get_u32(in) != kModelVersion) throw FormatError(path.string() + ": unsupported version");

  Checkpoint ckpt;
  auto& model = ckpt.model;
  model.input_size = get_u32(in);
  model.input_channels = get_u32(in);
  model.class_count = get_u32(in);
  const std::uint32_t conv_count = get_u32(in);
  if (!in || conv_count == 0 || conv_count > 64)
    throw FormatError(path.string() + ": bad layer table");
  Eigen::Index channels = model.input_channels;
  for (std::uint32_t i = 0; i < conv_count; ++i) {
    typename CnnModel<float>::ConvLayer layer;
    layer.spec.kernel = get_u32(in);
    layer.spec.pad = get_u32(in);
    layer.spec.stride = get_u32(in);
    layer.spec.depth = get_u32(in);
    layer.in_channels = channels;
    if (!in || layer.spec.kernel <= 0 || layer.spec.depth <= 0)
      throw FormatError(path.string() + ": bad conv shape");
    layer.weights.resize(channels * layer.spec.kernel * layer.spec.kernel, layer.spec.depth);
    layer.bias.resize(layer.spec.depth);
    channels = layer.spec.depth;
    model.conv.push_back(std::move(layer));
  }
  model.fc.weights.resize(model.flatten_dim(), model.class_count);
  model.fc.bias.resize(model.class_count);
  for (auto& layer : model.conv) {
    get_floats(in, layer.weights.data(), static_cast<std::size_t>(layer.weights.size()));
    get_floats(in, layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  get_floats(in, model.fc.weights.data(), static_cast<std::size_t>(model.fc.weights.size()));
  get_floats(in, model.fc.bias.data(), static_cast<std::size_t>(model.fc.bias.size()));

  ckpt.adam = AdamState<float>::zeros_like(model);
  ckpt.adam.step = static_cast<std::int64_t>(get_u64(in));
  for (auto& m : ckpt.adam.first) get_floats(in, m.data(), static_cast<std::size_t>(m.size()));
  for (auto& v : ckpt.adam.second) get_floats(in, v.data(), static_cast<std::size_t>(v.size()));
  ckpt.epochs_completed = static_cast<Eigen::Index>(get_u64(in));
  if (!in) throw FormatError(path.string() + ": truncated checkpoint");
  return ckpt;
}

void write_history_jsonl(const std::filesystem::path& path, const std::vector<EpochStats>& history,
                         bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const auto& e : history) {
    nlohmann::json record = {{"epoch", e.epoch},
                             {"train_loss", e.train_loss},
                             {"train_accuracy", e.train_accuracy},
                             {"val_loss", e.val_loss},
                             {"val_accuracy", e.val_accuracy}};
    out << record.dump() << '\n';
  }
}

}  // namespace mdradar
