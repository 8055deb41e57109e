#include "fdlsd/encoder.hpp"

#include <cmath>
#include <string>

#include "fdlsd/errors.hpp"
#include "fdlsd/rng.hpp"

namespace fdlsd {
namespace {

void fill_uniform(Rng& rng, Eigen::MatrixXd& m, double bound) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = bound * (2.0 * uniform_unit(rng) - 1.0);
}

void fill_uniform(Rng& rng, Eigen::VectorXd& v, double bound) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = bound * (2.0 * uniform_unit(rng) - 1.0);
}

Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& z) {
    if (act == Activation::relu) return z.cwiseMax(0.0);
    return z.array().tanh().matrix();
}

// d activation / dz evaluated at z, times upstream.
Eigen::MatrixXd activate_backward(Activation act, const Eigen::MatrixXd& z, const Eigen::MatrixXd& upstream) {
    if (act == Activation::relu) {
        return (z.array() > 0.0).select(upstream, 0.0);
    }
    const Eigen::ArrayXXd t = z.array().tanh();
    return (upstream.array() * (1.0 - t * t)).matrix();
}

Eigen::MatrixXd affine(const Layer& layer, const Eigen::MatrixXd& h) {
    Eigen::MatrixXd z = h * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    return z;
}

void check_input(const EncoderParams& params, const Eigen::MatrixXd& batch) {
    if (params.layers.empty()) throw ShapeError("encoder has no layers");
    if (batch.cols() != params.input_dim()) {
        throw ShapeError("encoder expects input dimension " + std::to_string(params.input_dim()) +
                         ", got " + std::to_string(batch.cols()));
    }
}

}  // namespace

std::size_t EncoderParams::num_scalars() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

EncoderParams init_encoder(const std::vector<int>& arch, Activation activation, std::uint64_t seed) {
    if (arch.size() < 2) throw ConfigError("architecture needs an input width and at least one layer");
    for (int w : arch) {
        if (w < 1) throw ConfigError("layer widths must be >= 1");
    }
    Rng rng{seed};
    EncoderParams p;
    p.activation = activation;
    for (std::size_t l = 0; l + 1 < arch.size(); ++l) {
        Layer layer{Eigen::MatrixXd(arch[l + 1], arch[l]), Eigen::VectorXd(arch[l + 1])};
        const double bound = 1.0 / std::sqrt(static_cast<double>(arch[l]));
        fill_uniform(rng, layer.weight, bound);
        fill_uniform(rng, layer.bias, bound);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

LinearHead init_head(int num_classes, int feature_dim, std::uint64_t seed) {
    if (num_classes < 0 || feature_dim < 1) throw ConfigError("invalid head shape");
    Rng rng{seed};
    LinearHead h{Eigen::MatrixXd(num_classes, feature_dim), Eigen::VectorXd::Zero(num_classes)};
    fill_uniform(rng, h.weight, 1.0 / std::sqrt(static_cast<double>(feature_dim)));
    return h;
}

DualBranchModel init_model(const std::vector<int>& arch, int num_source_classes, std::uint64_t seed,
                           Activation activation) {
    if (num_source_classes < 1) throw ConfigError("num_source_classes must be >= 1");
    DualBranchModel m;
    m.f1 = init_encoder(arch, activation, derive_seed(seed, "init.f1"));
    m.f2 = init_encoder(arch, activation, derive_seed(seed, "init.f2"));
    m.mean_f1 = m.f1;
    m.mean_f2 = m.f2;
    const int feat = arch.back();
    m.c1.source = init_head(num_source_classes, feat, derive_seed(seed, "init.c1"));
    m.c2.source = init_head(num_source_classes, feat, derive_seed(seed, "init.c2"));
    m.c1.target = LinearHead{Eigen::MatrixXd(0, feat), Eigen::VectorXd(0)};
    m.c2.target = m.c1.target;
    return m;
}

EncoderOutput encode(const EncoderParams& params, const Eigen::MatrixXd& batch) {
    check_input(params, batch);
    ForwardCache cache;
    Eigen::MatrixXd h = batch;
    const auto n_layers = params.layers.size();
    for (std::size_t l = 0; l < n_layers; ++l) {
        cache.layer_inputs.push_back(h);
        Eigen::MatrixXd z = affine(params.layers[l], h);
        h = (l + 1 < n_layers) ? activate(params.activation, z) : z;
        cache.pre_activations.push_back(std::move(z));
    }
    cache.norms = h.rowwise().norm();
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
        if (cache.norms(r) <= 0.0) throw NumericError("encoder output has zero norm; cannot normalize");
        h.row(r) /= cache.norms(r);
    }
    cache.features = h;
    return {std::move(h), std::move(cache)};
}

Eigen::MatrixXd encode_features(const EncoderParams& params, const Eigen::MatrixXd& batch) {
    check_input(params, batch);
    Eigen::MatrixXd h = batch;
    const auto n_layers = params.layers.size();
    for (std::size_t l = 0; l < n_layers; ++l) {
        Eigen::MatrixXd z = affine(params.layers[l], h);
        h = (l + 1 < n_layers) ? activate(params.activation, z) : std::move(z);
    }
    // Same reduction as encode() so both paths agree bit for bit.
    const Eigen::VectorXd norms = h.rowwise().norm();
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
        if (norms(r) <= 0.0) throw NumericError("encoder output has zero norm; cannot normalize");
        h.row(r) /= norms(r);
    }
    return h;
}

EncoderGrads encoder_backward(const EncoderParams& params, const ForwardCache& cache,
                              const Eigen::MatrixXd& grad_features) {
    if (grad_features.rows() != cache.features.rows() || grad_features.cols() != cache.features.cols()) {
        throw ShapeError("grad_features shape does not match the cached features");
    }
    if (cache.pre_activations.size() != params.layers.size()) {
        throw ShapeError("forward cache does not belong to these parameters");
    }

    // y = u / |u|  =>  du = (g - y (y . g)) / |u|
    const Eigen::MatrixXd& y = cache.features;
    const Eigen::VectorXd proj = (y.array() * grad_features.array()).rowwise().sum();
    Eigen::MatrixXd upstream = grad_features - y.cwiseProduct(proj.replicate(1, y.cols()));
    upstream.array().colwise() /= cache.norms.array();

    EncoderGrads grads;
    grads.layers.resize(params.layers.size());
    for (std::size_t k = params.layers.size(); k-- > 0;) {
        const Layer& layer = params.layers[k];
        if (k + 1 < params.layers.size()) {
            upstream = activate_backward(params.activation, cache.pre_activations[k], upstream);
        }
        grads.layers[k].weight = upstream.transpose() * cache.layer_inputs[k];
        grads.layers[k].bias = upstream.colwise().sum().transpose();
        upstream = upstream * layer.weight;
    }
    grads.input = std::move(upstream);
    return grads;
}

void check_same_shape(const EncoderParams& a, const EncoderParams& b) {
    if (a.layers.size() != b.layers.size()) throw ShapeError("encoders have different depths");
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (a.layers[l].weight.rows() != b.layers[l].weight.rows() ||
            a.layers[l].weight.cols() != b.layers[l].weight.cols() ||
            a.layers[l].bias.size() != b.layers[l].bias.size()) {
            throw ShapeError("encoder layer " + std::to_string(l) + " shapes differ");
        }
    }
}

MeanEncoderParams ema_update(const MeanEncoderParams& mean, const EncoderParams& current, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("EMA alpha must lie in [0, 1]");
    check_same_shape(mean, current);
    MeanEncoderParams out = mean;
    for (std::size_t l = 0; l < out.layers.size(); ++l) {
        out.layers[l].weight = alpha * mean.layers[l].weight + (1.0 - alpha) * current.layers[l].weight;
        out.layers[l].bias = alpha * mean.layers[l].bias + (1.0 - alpha) * current.layers[l].bias;
    }
    return out;
}

Eigen::MatrixXd logits(const LinearHead& head, const Eigen::MatrixXd& features) {
    if (features.cols() != head.feature_dim()) {
        throw ShapeError("classifier expects feature dimension " + std::to_string(head.feature_dim()) +
                         ", got " + std::to_string(features.cols()));
    }
    Eigen::MatrixXd z = features * head.weight.transpose();
    z.rowwise() += head.bias.transpose();
    return z;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& z) {
    Eigen::MatrixXd p(z.rows(), z.cols());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double m = z.row(r).maxCoeff();
        p.row(r) = (z.row(r).array() - m).exp().matrix();
        p.row(r) /= p.row(r).sum();
    }
    return p;
}

Eigen::MatrixXd classify(const LinearHead& head, const Eigen::MatrixXd& features) {
    if (head.num_classes() < 1) throw ShapeError("classifier head has no classes");
    return softmax_rows(logits(head, features));
}

HeadGrads head_backward(const LinearHead& head, const Eigen::MatrixXd& features,
                        const Eigen::MatrixXd& grad_logits) {
    if (grad_logits.rows() != features.rows() || grad_logits.cols() != head.num_classes()) {
        throw ShapeError("grad_logits shape does not match the head");
    }
    return {grad_logits.transpose() * features, grad_logits.colwise().sum().transpose(),
            grad_logits * head.weight};
}

DualBranchModel rebuild_target_classifier(const DualBranchModel& model,
                                          const Eigen::MatrixXd& centroids_branch1,
                                          const Eigen::MatrixXd& centroids_branch2) {
    if (centroids_branch1.rows() == 0 || centroids_branch2.rows() == 0) {
        throw EmptyClusteringError("cannot rebuild target heads from zero centroids");
    }
    if (centroids_branch1.rows() != centroids_branch2.rows()) {
        throw ShapeError("branches disagree on the number of pseudo classes");
    }
    if (centroids_branch1.cols() != model.f1.output_dim() || centroids_branch2.cols() != model.f2.output_dim()) {
        throw ShapeError("centroid dimension does not match the feature dimension");
    }
    DualBranchModel out = model;
    out.c1.target = LinearHead{centroids_branch1, Eigen::VectorXd::Zero(centroids_branch1.rows())};
    out.c2.target = LinearHead{centroids_branch2, Eigen::VectorXd::Zero(centroids_branch2.rows())};
    return out;
}

}  // namespace fdlsd
