#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "trexd/autodiff.hpp"
#include "trexd/datasets.hpp"
#include "trexd/rng.hpp"
#include "trexd/tensor.hpp"

namespace trexd {

struct DenseLayer {
    Tensor weight;  // [in x out]
    Tensor bias;    // [out]
};

// Softmax MLP classifier over flattened inputs. Immutable once trained;
// shareable read-only across chains.
class MlpClassifier {
  public:
    MlpClassifier() = default;
    // widths: input, hidden..., K
    static MlpClassifier init(const std::vector<std::size_t>& widths, Activation act, Rng& rng);
    static MlpClassifier from_layers(std::vector<DenseLayer> layers, Activation act);

    std::size_t input_dim() const;
    std::size_t num_classes() const;
    Activation activation_kind() const { return activation_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    // Probability simplex output; accepts any tensor of matching total size.
    Tensor classify(const Tensor& x) const;
    Tensor logits(const Tensor& x) const;

    // Traced single-example paths; x is a [d] value on the tape.
    Value trace_logits(Tape& tape, Value x) const;
    Value trace_confidences(Tape& tape, Value x) const;

    // Traced batched path; rows is a [n x d] value.
    Value trace_logits_rows(Tape& tape, Value rows) const;

    std::size_t parameter_count() const;

  private:
    friend MlpClassifier train_mlp_impl(const SyntheticDataset&, const struct TrainConfig&, bool);
    std::vector<DenseLayer> layers_;
    Activation activation_ = Activation::kRelu;
};

// Deterministic latent-to-data maps with a standard normal latent prior.
class Generator {
  public:
    virtual ~Generator() = default;
    virtual std::size_t latent_dim() const = 0;
    virtual std::size_t output_dim() const = 0;
    virtual bool differentiable() const = 0;
    virtual Tensor generate(const Tensor& z) const = 0;
    virtual Value trace(Tape& tape, Value z) const = 0;
};

class AnalyticGenerator : public Generator {
  public:
    enum class Kind { kIdentity, kAffine, kLogisticWarp };

    static AnalyticGenerator identity(std::size_t dim);
    static AnalyticGenerator affine(Tensor a, Tensor b);         // x = z A + b, A: [d x m]
    static AnalyticGenerator logistic_warp(Tensor w, Tensor b);  // x = sigmoid(w*z + b), elementwise

    Kind kind() const { return kind_; }
    std::size_t latent_dim() const override { return latent_dim_; }
    std::size_t output_dim() const override { return output_dim_; }
    bool differentiable() const override { return true; }
    Tensor generate(const Tensor& z) const override;
    Value trace(Tape& tape, Value z) const override;

  private:
    Kind kind_ = Kind::kIdentity;
    std::size_t latent_dim_ = 0;
    std::size_t output_dim_ = 0;
    Tensor a_, b_;
};

// Small VAE over side x side images in [0,1]; latent dimension fixed at 5.
class VaeModel {
  public:
    static constexpr std::size_t kLatentDim = 5;

    VaeModel() = default;
    static VaeModel init(std::size_t side, std::size_t hidden, Rng& rng);

    std::size_t side() const { return side_; }
    std::size_t input_dim() const { return side_ * side_; }

    // mean and log-variance of q(z|x)
    std::pair<Tensor, Tensor> encode(const Tensor& x) const;
    // sigmoid decoder output in [0,1]
    Tensor decode(const Tensor& z) const;
    Value trace_decode(Tape& tape, Value z) const;
    Value trace_decode_logits_rows(Tape& tape, Value z_rows) const;

    const std::vector<DenseLayer>& encoder_layers() const { return enc_; }
    const DenseLayer& mean_head() const { return mean_head_; }
    const DenseLayer& logvar_head() const { return logvar_head_; }
    const std::vector<DenseLayer>& decoder_layers() const { return dec_; }

    std::shared_ptr<const Generator> decoder_generator() const;

  private:
    friend VaeModel train_vae(const SyntheticDataset&, const struct TrainConfig&);
    friend VaeModel load_vae(const std::filesystem::path&);
    std::size_t side_ = 0;
    std::vector<DenseLayer> enc_;  // input -> hidden (relu)
    DenseLayer mean_head_, logvar_head_;
    std::vector<DenseLayer> dec_;  // latent -> hidden (relu) -> input (sigmoid via logits)
};

enum class LossKind { kCrossEntropy, kKlTarget, kElbo };

struct TrainConfig {
    int epochs = 20;
    int batch_size = 32;
    double learning_rate = 0.05;
    double momentum = 0.9;
    std::uint64_t seed = 1;
    LossKind loss = LossKind::kCrossEntropy;
    std::vector<std::size_t> hidden_widths = {64, 32};

    void validate() const;
};

struct TrainStats {
    std::vector<double> epoch_loss;  // mean per-example loss per epoch
};

// Cross-entropy training with SGD + momentum; deterministic for a fixed
// config.
MlpClassifier train_classifier(const SyntheticDataset& data, const TrainConfig& cfg,
                               TrainStats* stats = nullptr);

// KL-to-target training: class y's target puts 0.5 on y and 0.5 on
// (y+1) mod K.
MlpClassifier train_ambiguous_classifier(const SyntheticDataset& data, const TrainConfig& cfg,
                                         TrainStats* stats = nullptr);

// KL(p_y, f) for the wrapped two-class target; >= 0, zero iff f equals the
// target exactly.
double kl_target_loss(int label, const Tensor& conf, int num_classes);

VaeModel train_vae(const SyntheticDataset& data, const TrainConfig& cfg);

// Closed-form KL(N(mean, diag(exp(logvar))) || N(0, I)).
double gaussian_kl_to_standard(const Tensor& mean, const Tensor& logvar);

// Mean per-image binary cross-entropy of the VAE reconstruction (via the
// encoder mean, no sampling).
double vae_reconstruction_bce(const VaeModel& vae, const SyntheticDataset& data);

// Checkpoint format: magic "TREXMDL1", version, layer table, little-endian
// f64 payload, trailing FNV-1a checksum. Round-trips are bit-exact.
void save_classifier(const MlpClassifier& model, const std::filesystem::path& path);
MlpClassifier load_classifier(const std::filesystem::path& path);
void save_vae(const VaeModel& model, const std::filesystem::path& path);
VaeModel load_vae(const std::filesystem::path& path);

}  // namespace trexd
