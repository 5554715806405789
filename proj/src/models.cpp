#include "trexd/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "trexd/errors.hpp"
#include "trexd/io.hpp"

namespace trexd {

namespace {

constexpr char kCheckpointMagic[8] = {'T', 'R', 'E', 'X', 'M', 'D', 'L', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::uint8_t kKindClassifier = 0;
constexpr std::uint8_t kKindVae = 1;

DenseLayer init_layer(std::size_t in, std::size_t out, Rng& rng) {
    // He-style scaling, fine for relu/tanh at this depth
    const double s = std::sqrt(2.0 / static_cast<double>(in));
    std::vector<double> w(in * out);
    for (double& x : w) x = s * rng.normal();
    return DenseLayer{Tensor({in, out}, std::move(w)), Tensor::zeros({out})};
}

std::vector<double> forward_dense(const std::vector<double>& x, const DenseLayer& layer) {
    const std::size_t in = layer.weight.rows(), out = layer.weight.cols();
    if (x.size() != in) {
        throw DimensionError("dense layer input size " + std::to_string(x.size()) + ", expected " +
                             std::to_string(in));
    }
    std::vector<double> y(layer.bias.vec());
    const double* w = layer.weight.data().data();
    for (std::size_t i = 0; i < in; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* wrow = w + i * out;
        for (std::size_t j = 0; j < out; ++j) y[j] += xi * wrow[j];
    }
    return y;
}

double apply_activation(double x, Activation a) {
    switch (a) {
        case Activation::kRelu: return x > 0.0 ? x : 0.0;
        case Activation::kTanh: return std::tanh(x);
        case Activation::kSigmoid:
            return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    }
    throw ContractError("unknown activation");
}

}  // namespace

MlpClassifier MlpClassifier::init(const std::vector<std::size_t>& widths, Activation act, Rng& rng) {
    if (widths.size() < 2) throw ContractError("classifier needs at least input and output widths");
    MlpClassifier m;
    m.activation_ = act;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i)
        m.layers_.push_back(init_layer(widths[i], widths[i + 1], rng));
    return m;
}

MlpClassifier MlpClassifier::from_layers(std::vector<DenseLayer> layers, Activation act) {
    if (layers.empty()) throw ContractError("classifier needs at least one layer");
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
        if (layers[i].weight.cols() != layers[i + 1].weight.rows())
            throw DimensionError("adjacent layer widths disagree");
    }
    MlpClassifier m;
    m.layers_ = std::move(layers);
    m.activation_ = act;
    return m;
}

std::size_t MlpClassifier::input_dim() const {
    if (layers_.empty()) throw ContractError("uninitialized classifier");
    return layers_.front().weight.rows();
}

std::size_t MlpClassifier::num_classes() const {
    if (layers_.empty()) throw ContractError("uninitialized classifier");
    return layers_.back().weight.cols();
}

Tensor MlpClassifier::logits(const Tensor& x) const {
    if (x.size() != input_dim()) {
        throw DimensionError("classifier input size " + std::to_string(x.size()) + ", expected " +
                             std::to_string(input_dim()));
    }
    std::vector<double> h(x.vec());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        h = forward_dense(h, layers_[l]);
        if (l + 1 < layers_.size())
            for (double& v : h) v = apply_activation(v, activation_);
    }
    return Tensor({num_classes()}, std::move(h));
}

Tensor MlpClassifier::classify(const Tensor& x) const { return softmax_vec(logits(x)); }

Value MlpClassifier::trace_logits(Tape& tape, Value x) const {
    Value rows = tape.reshape(x, {1, input_dim()});
    rows = trace_logits_rows(tape, rows);
    return tape.reshape(rows, {num_classes()});
}

Value MlpClassifier::trace_confidences(Tape& tape, Value x) const {
    return tape.softmax(trace_logits(tape, x));
}

Value MlpClassifier::trace_logits_rows(Tape& tape, Value rows) const {
    Value h = rows;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        h = tape.add_rowvec(tape.matmul(h, tape.leaf(layers_[l].weight)), tape.leaf(layers_[l].bias));
        if (l + 1 < layers_.size()) h = tape.activation(h, activation_);
    }
    return h;
}

std::size_t MlpClassifier::parameter_count() const {
    std::size_t n = 0;
    for (const DenseLayer& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
}

AnalyticGenerator AnalyticGenerator::identity(std::size_t dim) {
    AnalyticGenerator g;
    g.kind_ = Kind::kIdentity;
    g.latent_dim_ = g.output_dim_ = dim;
    return g;
}

AnalyticGenerator AnalyticGenerator::affine(Tensor a, Tensor b) {
    AnalyticGenerator g;
    g.kind_ = Kind::kAffine;
    g.latent_dim_ = a.rows();
    g.output_dim_ = a.cols();
    if (b.size() != g.output_dim_) throw DimensionError("affine generator bias size mismatch");
    g.a_ = std::move(a);
    g.b_ = std::move(b);
    return g;
}

AnalyticGenerator AnalyticGenerator::logistic_warp(Tensor w, Tensor b) {
    if (!w.same_shape(b)) throw DimensionError("logistic warp w/b shape mismatch");
    AnalyticGenerator g;
    g.kind_ = Kind::kLogisticWarp;
    g.latent_dim_ = g.output_dim_ = w.size();
    g.a_ = std::move(w);
    g.b_ = std::move(b);
    return g;
}

Tensor AnalyticGenerator::generate(const Tensor& z) const {
    if (z.size() != latent_dim_) throw DimensionError("generator latent size mismatch");
    switch (kind_) {
        case Kind::kIdentity:
            return z;
        case Kind::kAffine: {
            std::vector<double> out(b_.vec());
            for (std::size_t i = 0; i < latent_dim_; ++i)
                for (std::size_t j = 0; j < output_dim_; ++j) out[j] += z[i] * a_.at(i, j);
            return Tensor({output_dim_}, std::move(out));
        }
        case Kind::kLogisticWarp: {
            std::vector<double> out(output_dim_);
            for (std::size_t i = 0; i < output_dim_; ++i)
                out[i] = apply_activation(a_[i] * z[i] + b_[i], Activation::kSigmoid);
            return Tensor({output_dim_}, std::move(out));
        }
    }
    throw ContractError("unknown generator kind");
}

Value AnalyticGenerator::trace(Tape& tape, Value z) const {
    switch (kind_) {
        case Kind::kIdentity:
            return z;
        case Kind::kAffine: {
            Value rows = tape.reshape(z, {1, latent_dim_});
            Value out = tape.add_rowvec(tape.matmul(rows, tape.leaf(a_)), tape.leaf(b_));
            return tape.reshape(out, {output_dim_});
        }
        case Kind::kLogisticWarp:
            return tape.sigmoid(tape.add(tape.mul(z, tape.leaf(a_)), tape.leaf(b_)));
    }
    throw ContractError("unknown generator kind");
}

VaeModel VaeModel::init(std::size_t side, std::size_t hidden, Rng& rng) {
    VaeModel m;
    m.side_ = side;
    const std::size_t d = side * side;
    m.enc_.push_back(init_layer(d, hidden, rng));
    m.mean_head_ = init_layer(hidden, kLatentDim, rng);
    m.logvar_head_ = init_layer(hidden, kLatentDim, rng);
    m.dec_.push_back(init_layer(kLatentDim, hidden, rng));
    m.dec_.push_back(init_layer(hidden, d, rng));
    return m;
}

std::pair<Tensor, Tensor> VaeModel::encode(const Tensor& x) const {
    if (x.size() != input_dim()) throw DimensionError("VAE encoder input size mismatch");
    std::vector<double> h(x.vec());
    for (const DenseLayer& l : enc_) {
        h = forward_dense(h, l);
        for (double& v : h) v = apply_activation(v, Activation::kRelu);
    }
    std::vector<double> mean = forward_dense(h, mean_head_);
    std::vector<double> logvar = forward_dense(h, logvar_head_);
    return {Tensor({kLatentDim}, std::move(mean)), Tensor({kLatentDim}, std::move(logvar))};
}

Tensor VaeModel::decode(const Tensor& z) const {
    if (z.size() != kLatentDim) throw DimensionError("VAE latent size mismatch");
    std::vector<double> h(z.vec());
    for (std::size_t l = 0; l < dec_.size(); ++l) {
        h = forward_dense(h, dec_[l]);
        const Activation act = l + 1 < dec_.size() ? Activation::kRelu : Activation::kSigmoid;
        for (double& v : h) v = apply_activation(v, act);
    }
    return Tensor({input_dim()}, std::move(h));
}

Value VaeModel::trace_decode(Tape& tape, Value z) const {
    Value rows = tape.reshape(z, {1, kLatentDim});
    Value logits = trace_decode_logits_rows(tape, rows);
    return tape.reshape(tape.sigmoid(logits), {input_dim()});
}

Value VaeModel::trace_decode_logits_rows(Tape& tape, Value z_rows) const {
    Value h = z_rows;
    for (std::size_t l = 0; l < dec_.size(); ++l) {
        h = tape.add_rowvec(tape.matmul(h, tape.leaf(dec_[l].weight)), tape.leaf(dec_[l].bias));
        if (l + 1 < dec_.size()) h = tape.relu(h);
    }
    return h;
}

namespace {

class DecoderGenerator : public Generator {
  public:
    explicit DecoderGenerator(VaeModel vae) : vae_(std::move(vae)) {}
    std::size_t latent_dim() const override { return VaeModel::kLatentDim; }
    std::size_t output_dim() const override { return vae_.input_dim(); }
    bool differentiable() const override { return true; }
    Tensor generate(const Tensor& z) const override { return vae_.decode(z); }
    Value trace(Tape& tape, Value z) const override { return vae_.trace_decode(tape, z); }

  private:
    VaeModel vae_;
};

}  // namespace

std::shared_ptr<const Generator> VaeModel::decoder_generator() const {
    return std::make_shared<DecoderGenerator>(*this);
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0,1)");
}

namespace {

// Momentum SGD over a list of tensors updated in lockstep with per-batch
// tapes.
class SgdState {
  public:
    SgdState(std::size_t n_params, double lr, double momentum) : lr_(lr), mu_(momentum) {
        velocity_.resize(n_params);
    }

    Tensor update(std::size_t param_index, const Tensor& value, const Tensor& grad) {
        auto& v = velocity_[param_index];
        if (v.empty()) v.assign(value.size(), 0.0);
        std::vector<double> out(value.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            v[i] = mu_ * v[i] - lr_ * grad[i];
            out[i] = value[i] + v[i];
        }
        return Tensor(value.shape(), std::move(out));
    }

  private:
    double lr_, mu_;
    std::vector<std::vector<double>> velocity_;
};

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

Tensor batch_rows(const SyntheticDataset& data, const std::vector<std::size_t>& idx,
                  std::size_t begin, std::size_t end) {
    const std::size_t d = data.items.front().size();
    std::vector<double> rows((end - begin) * d);
    for (std::size_t r = begin; r < end; ++r) {
        const auto& item = data.items[idx[r]].vec();
        std::copy(item.begin(), item.end(), rows.begin() + (r - begin) * d);
    }
    return Tensor({end - begin, d}, std::move(rows));
}

}  // namespace

MlpClassifier train_mlp_impl(const SyntheticDataset& data, const TrainConfig& cfg, bool kl_target,
                             TrainStats* stats = nullptr) {
    cfg.validate();
    if (data.size() == 0) throw ConfigError("empty dataset");
    const std::size_t k = static_cast<std::size_t>(data.num_classes);
    if (kl_target && k < 2) throw ConfigError("KL-target loss requires K >= 2");
    const std::size_t d = data.items.front().size();

    Rng rng(cfg.seed);
    std::vector<std::size_t> widths = {d};
    widths.insert(widths.end(), cfg.hidden_widths.begin(), cfg.hidden_widths.end());
    widths.push_back(k);
    MlpClassifier model = MlpClassifier::init(widths, Activation::kRelu, rng);

    SgdState sgd(model.layers_.size() * 2, cfg.learning_rate, cfg.momentum);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto idx = shuffled_indices(data.size(), rng);
        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < data.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(begin + cfg.batch_size, data.size());
            Tape tape;
            std::vector<Value> params;
            Value h = tape.leaf(batch_rows(data, idx, begin, end));
            for (std::size_t l = 0; l < model.layers_.size(); ++l) {
                Value w = tape.leaf(model.layers_[l].weight);
                Value b = tape.leaf(model.layers_[l].bias);
                params.push_back(w);
                params.push_back(b);
                h = tape.add_rowvec(tape.matmul(h, w), b);
                if (l + 1 < model.layers_.size()) h = tape.activation(h, Activation::kRelu);
            }
            Value ls = tape.log_softmax_rows(h);
            std::vector<std::size_t> y(end - begin);
            for (std::size_t r = begin; r < end; ++r)
                y[r - begin] = static_cast<std::size_t>(data.labels[idx[r]]);
            Value loss;
            if (!kl_target) {
                loss = tape.affine(tape.mean(tape.gather_rows(ls, y)), -1.0, 0.0);
            } else {
                std::vector<std::size_t> y_next(y);
                for (auto& c : y_next) c = (c + 1) % k;
                Value g1 = tape.gather_rows(ls, y);
                Value g2 = tape.gather_rows(ls, std::move(y_next));
                loss = tape.affine(tape.mean(tape.add(g1, g2)), -0.5, -std::log(2.0));
            }
            loss_sum += tape.value(loss).item() * static_cast<double>(end - begin);
            Gradients grads = tape.backward(loss);
            for (std::size_t l = 0; l < model.layers_.size(); ++l) {
                model.layers_[l].weight =
                    sgd.update(2 * l, model.layers_[l].weight, grads.at(params[2 * l]));
                model.layers_[l].bias =
                    sgd.update(2 * l + 1, model.layers_[l].bias, grads.at(params[2 * l + 1]));
            }
        }
        if (stats) stats->epoch_loss.push_back(loss_sum / static_cast<double>(data.size()));
    }
    return model;
}

MlpClassifier train_classifier(const SyntheticDataset& data, const TrainConfig& cfg,
                               TrainStats* stats) {
    if (cfg.loss != LossKind::kCrossEntropy)
        throw ConfigError("train_classifier requires cross-entropy loss");
    return train_mlp_impl(data, cfg, false, stats);
}

MlpClassifier train_ambiguous_classifier(const SyntheticDataset& data, const TrainConfig& cfg,
                                         TrainStats* stats) {
    if (cfg.loss != LossKind::kKlTarget)
        throw ConfigError("train_ambiguous_classifier requires KL-target loss");
    return train_mlp_impl(data, cfg, true, stats);
}

double kl_target_loss(int label, const Tensor& conf, int num_classes) {
    if (num_classes < 2) throw ContractError("KL-target loss requires K >= 2");
    const std::size_t y = static_cast<std::size_t>(label);
    const std::size_t y1 = (y + 1) % static_cast<std::size_t>(num_classes);
    return -std::log(2.0) - 0.5 * (std::log(conf[y]) + std::log(conf[y1]));
}

double gaussian_kl_to_standard(const Tensor& mean, const Tensor& logvar) {
    if (!mean.same_shape(logvar)) throw DimensionError("mean/logvar shape mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i)
        kl += -0.5 * (1.0 + logvar[i] - mean[i] * mean[i] - std::exp(logvar[i]));
    return kl;
}

VaeModel train_vae(const SyntheticDataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (cfg.loss != LossKind::kElbo) throw ConfigError("train_vae requires ELBO loss");
    if (data.size() == 0) throw ConfigError("empty dataset");
    for (const Tensor& x : data.items) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < 0.0 || x[i] > 1.0) throw ConfigError("VAE inputs must lie in [0,1]");
    }
    const std::size_t d = data.items.front().size();
    const std::size_t side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(d))));
    if (side * side != d) throw ConfigError("VAE expects square images");

    Rng rng(cfg.seed);
    const std::size_t hidden = cfg.hidden_widths.empty() ? 96 : cfg.hidden_widths.front();
    VaeModel model = VaeModel::init(side, hidden, rng);

    // parameter order: enc layers, mean head, logvar head, dec layers
    auto param_list = [&model]() {
        std::vector<DenseLayer*> ps;
        for (auto& l : model.enc_) ps.push_back(&l);
        ps.push_back(&model.mean_head_);
        ps.push_back(&model.logvar_head_);
        for (auto& l : model.dec_) ps.push_back(&l);
        return ps;
    };

    SgdState sgd(param_list().size() * 2, cfg.learning_rate, cfg.momentum);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto idx = shuffled_indices(data.size(), rng);
        for (std::size_t begin = 0; begin < data.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(begin + cfg.batch_size, data.size());
            const std::size_t b = end - begin;
            Tape tape;
            auto ps = param_list();
            std::vector<Value> leaves;
            leaves.reserve(ps.size() * 2);
            for (DenseLayer* l : ps) {
                leaves.push_back(tape.leaf(l->weight));
                leaves.push_back(tape.leaf(l->bias));
            }
            std::size_t li = 0;
            auto dense = [&](Value in) {
                Value w = leaves[li++];
                Value bv = leaves[li++];
                return tape.add_rowvec(tape.matmul(in, w), bv);
            };

            Value x = tape.leaf(batch_rows(data, idx, begin, end));
            Value h = x;
            for (std::size_t l = 0; l < model.enc_.size(); ++l) h = tape.relu(dense(h));
            Value mean = dense(h);
            Value logvar = dense(h);
            std::vector<double> noise(b * VaeModel::kLatentDim);
            for (double& e : noise) e = rng.normal();
            Value eps = tape.leaf(Tensor({b, VaeModel::kLatentDim}, std::move(noise)));
            Value z = tape.add(mean, tape.mul(tape.exp(tape.affine(logvar, 0.5, 0.0)), eps));
            Value g = z;
            for (std::size_t l = 0; l < model.dec_.size(); ++l) {
                g = dense(g);
                if (l + 1 < model.dec_.size()) g = tape.relu(g);
            }
            // bce-with-logits summed over pixels, plus analytic gaussian KL
            Value bce = tape.sum(tape.sub(tape.softplus(g), tape.mul(x, g)));
            Value klt = tape.sum(
                tape.sub(tape.sub(tape.affine(logvar, 1.0, 1.0), tape.square(mean)), tape.exp(logvar)));
            Value loss = tape.affine(tape.add(bce, tape.affine(klt, -0.5, 0.0)),
                                     1.0 / static_cast<double>(b), 0.0);
            Gradients grads = tape.backward(loss);
            for (std::size_t p = 0; p < ps.size(); ++p) {
                ps[p]->weight = sgd.update(2 * p, ps[p]->weight, grads.at(leaves[2 * p]));
                ps[p]->bias = sgd.update(2 * p + 1, ps[p]->bias, grads.at(leaves[2 * p + 1]));
            }
        }
    }
    return model;
}

double vae_reconstruction_bce(const VaeModel& vae, const SyntheticDataset& data) {
    if (data.size() == 0) throw ContractError("empty dataset");
    double total = 0.0;
    for (const Tensor& x : data.items) {
        const auto [mean, logvar] = vae.encode(x);
        const Tensor recon = vae.decode(mean);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double p = std::clamp(recon[i], 1e-12, 1.0 - 1e-12);
            total += -x[i] * std::log(p) - (1.0 - x[i]) * std::log(1.0 - p);
        }
    }
    return total / static_cast<double>(data.size());
}

namespace {

void write_layer_table(ByteWriter& w, const std::vector<DenseLayer>& layers) {
    w.u32(static_cast<std::uint32_t>(layers.size()));
    for (const DenseLayer& l : layers) {
        w.u32(static_cast<std::uint32_t>(l.weight.rows()));
        w.u32(static_cast<std::uint32_t>(l.weight.cols()));
    }
}

void write_layer_payload(ByteWriter& w, const std::vector<DenseLayer>& layers) {
    for (const DenseLayer& l : layers) {
        for (double v : l.weight.vec()) w.f64(v);
        for (double v : l.bias.vec()) w.f64(v);
    }
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> read_layer_table(ByteReader& r) {
    const std::uint32_t n = r.u32();
    if (n == 0 || n > 64) throw CorruptFileError("implausible layer count");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> dims(n);
    for (auto& d : dims) {
        d.first = r.u32();
        d.second = r.u32();
        if (d.first == 0 || d.second == 0) throw CorruptFileError("zero layer extent");
    }
    return dims;
}

std::vector<DenseLayer> read_layer_payload(ByteReader& r,
                                           const std::vector<std::pair<std::uint32_t, std::uint32_t>>& dims) {
    std::vector<DenseLayer> layers;
    for (const auto& [in, out] : dims) {
        std::vector<double> w(static_cast<std::size_t>(in) * out), b(out);
        for (double& v : w) v = r.f64();
        for (double& v : b) v = r.f64();
        layers.push_back(DenseLayer{Tensor({in, out}, std::move(w)), Tensor({out}, std::move(b))});
    }
    return layers;
}

void finalize_checkpoint(ByteWriter& w, const std::filesystem::path& path) {
    const std::uint64_t checksum = fnv1a64(w.buffer().data(), w.buffer().size());
    w.u64(checksum);
    w.save(path);
}

ByteReader open_checkpoint(const std::filesystem::path& path, std::uint8_t expected_kind) {
    ByteReader r = ByteReader::load(path);
    if (r.size() < 21) throw CorruptFileError(path.string() + ": truncated checkpoint");
    const std::uint64_t stored_sum = [&r]() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(r.buffer()[r.size() - 8 + i]) << (8 * i);
        return v;
    }();
    const std::uint64_t computed = fnv1a64(r.buffer().data(), r.size() - 8);
    if (stored_sum != computed) throw CorruptFileError(path.string() + ": checksum mismatch");
    char magic[8];
    r.bytes(magic, 8);
    if (std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw CorruptFileError(path.string() + ": bad magic");
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        throw CorruptFileError(path.string() + ": unsupported checkpoint version " +
                               std::to_string(version));
    const std::uint8_t kind = r.u8();
    if (kind != expected_kind) throw CorruptFileError(path.string() + ": wrong model kind");
    return r;
}

}  // namespace

void save_classifier(const MlpClassifier& model, const std::filesystem::path& path) {
    ByteWriter w;
    w.bytes(kCheckpointMagic, 8);
    w.u32(kCheckpointVersion);
    w.u8(kKindClassifier);
    w.u8(static_cast<std::uint8_t>(model.activation_kind()));
    write_layer_table(w, model.layers());
    write_layer_payload(w, model.layers());
    finalize_checkpoint(w, path);
}

MlpClassifier load_classifier(const std::filesystem::path& path) {
    ByteReader r = open_checkpoint(path, kKindClassifier);
    const auto act = static_cast<Activation>(r.u8());
    const auto dims = read_layer_table(r);
    return MlpClassifier::from_layers(read_layer_payload(r, dims), act);
}

void save_vae(const VaeModel& model, const std::filesystem::path& path) {
    ByteWriter w;
    w.bytes(kCheckpointMagic, 8);
    w.u32(kCheckpointVersion);
    w.u8(kKindVae);
    w.u32(static_cast<std::uint32_t>(model.side()));
    write_layer_table(w, model.encoder_layers());
    write_layer_table(w, {model.mean_head(), model.logvar_head()});
    write_layer_table(w, model.decoder_layers());
    write_layer_payload(w, model.encoder_layers());
    write_layer_payload(w, {model.mean_head(), model.logvar_head()});
    write_layer_payload(w, model.decoder_layers());
    finalize_checkpoint(w, path);
}

VaeModel load_vae(const std::filesystem::path& path) {
    ByteReader r = open_checkpoint(path, kKindVae);
    VaeModel m;
    m.side_ = r.u32();
    const auto enc_dims = read_layer_table(r);
    const auto head_dims = read_layer_table(r);
    const auto dec_dims = read_layer_table(r);
    if (head_dims.size() != 2) throw CorruptFileError("VAE checkpoint needs two heads");
    m.enc_ = read_layer_payload(r, enc_dims);
    auto heads = read_layer_payload(r, head_dims);
    m.mean_head_ = std::move(heads[0]);
    m.logvar_head_ = std::move(heads[1]);
    m.dec_ = read_layer_payload(r, dec_dims);
    if (m.dec_.back().weight.cols() != m.side_ * m.side_)
        throw CorruptFileError("VAE checkpoint side/decoder mismatch");
    return m;
}

}  // namespace trexd
