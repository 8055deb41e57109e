#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace fdlsd {

enum class Activation { relu, tanh };

/// weight is (out x in); the layer maps a row batch H to H * weight^T + bias^T.
struct Layer {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;

    [[nodiscard]] int in_dim() const { return static_cast<int>(weight.cols()); }
    [[nodiscard]] int out_dim() const { return static_cast<int>(weight.rows()); }
};

/// Feed-forward encoder. Hidden layers apply `activation`; the last layer is
/// linear and its output is L2-normalized row-wise.
struct EncoderParams {
    std::vector<Layer> layers;
    Activation activation = Activation::relu;

    [[nodiscard]] int input_dim() const { return layers.front().in_dim(); }
    [[nodiscard]] int output_dim() const { return layers.back().out_dim(); }
    [[nodiscard]] std::size_t num_scalars() const;
};

/// EMA copy of an encoder; always shape-identical to its partner.
using MeanEncoderParams = EncoderParams;

/// One softmax head (num_classes x feature_dim).
struct LinearHead {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;

    [[nodiscard]] int num_classes() const { return static_cast<int>(weight.rows()); }
    [[nodiscard]] int feature_dim() const { return static_cast<int>(weight.cols()); }
};

/// Per-branch classifier: a persistent head over the source identities plus
/// a head over the current epoch's pseudo classes, rebuilt every epoch.
struct Classifier {
    LinearHead source;
    LinearHead target;
};

struct DualBranchModel {
    EncoderParams f1;
    EncoderParams f2;
    MeanEncoderParams mean_f1;
    MeanEncoderParams mean_f2;
    Classifier c1;
    Classifier c2;
};

struct ForwardCache {
    std::vector<Eigen::MatrixXd> layer_inputs;    // input to layer l
    std::vector<Eigen::MatrixXd> pre_activations; // H W^T + b for layer l
    Eigen::VectorXd norms;                        // row norms of the last pre-activation
    Eigen::MatrixXd features;                     // normalized output
};

struct EncoderOutput {
    Eigen::MatrixXd features;
    ForwardCache cache;
};

struct LayerGrad {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
};

struct EncoderGrads {
    std::vector<LayerGrad> layers;
    Eigen::MatrixXd input;  // gradient w.r.t. the input batch
};

struct HeadGrads {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
    Eigen::MatrixXd features;  // gradient w.r.t. the head's input features
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
/// `arch` lists layer widths including the input: {d_in, 64, 32}.
EncoderParams init_encoder(const std::vector<int>& arch, Activation activation, std::uint64_t seed);
LinearHead init_head(int num_classes, int feature_dim, std::uint64_t seed);

/// f1 and f2 get independent sub-seeds; mean encoders start as exact copies.
/// The target heads start empty until the first rebuild.
DualBranchModel init_model(const std::vector<int>& arch, int num_source_classes, std::uint64_t seed,
                           Activation activation = Activation::relu);

EncoderOutput encode(const EncoderParams& params, const Eigen::MatrixXd& batch);

/// Features only; skips building the cache.
Eigen::MatrixXd encode_features(const EncoderParams& params, const Eigen::MatrixXd& batch);

/// Exact gradient of <grad_features, features> through the normalization and
/// every layer.
EncoderGrads encoder_backward(const EncoderParams& params, const ForwardCache& cache,
                              const Eigen::MatrixXd& grad_features);

/// theta_mean <- alpha * theta_mean + (1 - alpha) * theta, elementwise.
MeanEncoderParams ema_update(const MeanEncoderParams& mean, const EncoderParams& current, double alpha);

Eigen::MatrixXd logits(const LinearHead& head, const Eigen::MatrixXd& features);
/// Row-wise softmax of the head's logits, max-shifted.
Eigen::MatrixXd classify(const LinearHead& head, const Eigen::MatrixXd& features);
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

/// Gradient of the head given dL/dlogits.
HeadGrads head_backward(const LinearHead& head, const Eigen::MatrixXd& features,
                        const Eigen::MatrixXd& grad_logits);

/// Replace both target heads: rows are that branch's cluster centroids, bias
/// zero. Source heads are untouched.
DualBranchModel rebuild_target_classifier(const DualBranchModel& model,
                                          const Eigen::MatrixXd& centroids_branch1,
                                          const Eigen::MatrixXd& centroids_branch2);

void check_same_shape(const EncoderParams& a, const EncoderParams& b);

}  // namespace fdlsd
