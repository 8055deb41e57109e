#include "generators.hpp"

namespace fdlsd::testing {

Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * standard_normal(rng);
    }
    return m;
}

Eigen::MatrixXd unit_rows(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m = gaussian_matrix(rng, rows, cols);
    m.rowwise().normalize();
    return m;
}

std::vector<Label> pk_labels(int identities, int instances) {
    std::vector<Label> labels;
    for (int p = 0; p < identities; ++p) {
        for (int k = 0; k < instances; ++k) labels.push_back(p);
    }
    return labels;
}

Eigen::MatrixXd clumped_points(Rng& rng, int n, int dims) {
    const int blobs = 1 + static_cast<int>(uniform_index(rng, 4));
    Eigen::MatrixXd centers(blobs, dims);
    for (Eigen::Index i = 0; i < centers.size(); ++i) centers.data()[i] = 10.0 * uniform_unit(rng);
    Eigen::MatrixXd pts(n, dims);
    for (int i = 0; i < n; ++i) {
        const double u = uniform_unit(rng);
        if (i > 0 && u < 0.05) {
            pts.row(i) = pts.row(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(i))));
        } else if (u < 0.25) {
            for (int c = 0; c < dims; ++c) pts(i, c) = 10.0 * uniform_unit(rng);
        } else {
            const auto b = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(blobs)));
            const double spread = 0.3 + uniform_unit(rng);
            for (int c = 0; c < dims; ++c) pts(i, c) = centers(b, c) + spread * standard_normal(rng);
        }
    }
    return pts;
}

DualBranchModel small_model(std::uint64_t seed, int d_in, const std::vector<int>& widths, int source_classes,
                            int target_classes, Activation activation) {
    std::vector<int> arch{d_in};
    arch.insert(arch.end(), widths.begin(), widths.end());
    DualBranchModel m = init_model(arch, source_classes, seed, activation);
    Rng rng = make_rng(seed, "test.centroids");
    const int fd = widths.back();
    return rebuild_target_classifier(m, unit_rows(rng, target_classes, fd), unit_rows(rng, target_classes, fd));
}

namespace {

void push_matrix(std::vector<double*>& out, Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back(m.data() + i);
}

void push_vector(std::vector<double*>& out, Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v.data() + i);
}

void push_head(std::vector<double*>& out, LinearHead& h) {
    push_matrix(out, h.weight);
    push_vector(out, h.bias);
}

void append(std::vector<double>& out, const Eigen::MatrixXd& m) {
    out.insert(out.end(), m.data(), m.data() + m.size());
}

void append(std::vector<double>& out, const Eigen::VectorXd& v) {
    out.insert(out.end(), v.data(), v.data() + v.size());
}

void append(std::vector<double>& out, const EncoderGrads& g) {
    for (const auto& l : g.layers) {
        append(out, l.weight);
        append(out, l.bias);
    }
}

void append(std::vector<double>& out, const HeadGrads& g) {
    append(out, g.weight);
    append(out, g.bias);
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::vector<double*> encoder_scalars(EncoderParams& params) {
    std::vector<double*> out;
    for (auto& l : params.layers) {
        push_matrix(out, l.weight);
        push_vector(out, l.bias);
    }
    return out;
}

std::vector<double*> trainable_scalars(DualBranchModel& model) {
    std::vector<double*> out = encoder_scalars(model.f1);
    const auto f2 = encoder_scalars(model.f2);
    out.insert(out.end(), f2.begin(), f2.end());
    push_head(out, model.c1.source);
    push_head(out, model.c2.source);
    push_head(out, model.c1.target);
    push_head(out, model.c2.target);
    return out;
}

Eigen::VectorXd flatten(const EncoderGrads& grads) {
    std::vector<double> v;
    append(v, grads);
    return to_vector(v);
}

Eigen::VectorXd flatten(const ModelGrads& grads) {
    std::vector<double> v;
    append(v, grads.f1);
    append(v, grads.f2);
    append(v, grads.c1_source);
    append(v, grads.c2_source);
    append(v, grads.c1_target);
    append(v, grads.c2_target);
    return to_vector(v);
}

}  // namespace fdlsd::testing
