#include "fdlsd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fdlsd/errors.hpp"
#include "fdlsd/rng.hpp"

namespace fdlsd {
namespace {

Eigen::MatrixXd gaussian_matrix(Rng& rng, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    // Fill row-major so the draw order does not depend on Eigen's storage.
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = standard_normal(rng);
    return m;
}

Eigen::MatrixXd class_means(const LabeledDataset& dataset) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(dataset.num_identities, dataset.dim);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(dataset.num_identities);
    for (const auto& s : dataset.samples) {
        sums.row(s.true_label) += s.input.transpose();
        counts(s.true_label) += 1.0;
    }
    for (int k = 0; k < dataset.num_identities; ++k) {
        if (counts(k) > 0) sums.row(k) /= counts(k);
    }
    return sums;
}

}  // namespace

AffineShift AffineShift::identity(int dim) {
    return {Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim)};
}

AffineShift AffineShift::translation(const Eigen::VectorXd& offset) {
    const auto d = static_cast<int>(offset.size());
    return {Eigen::MatrixXd::Identity(d, d), offset};
}

AffineShift AffineShift::random_rotation(int dim, std::uint64_t seed) {
    return random_domain_gap(dim, 1.0, 0.0, seed);
}

AffineShift AffineShift::random_domain_gap(int dim, double anisotropy, double translation_norm,
                                           std::uint64_t seed) {
    if (dim < 1) throw ConfigError("domain shift dimension must be >= 1");
    if (!(anisotropy >= 1.0)) throw ConfigError("domain shift anisotropy must be >= 1");
    if (!(translation_norm >= 0.0)) throw ConfigError("domain shift translation must be >= 0");

    Rng rng = make_rng(seed, "domain_shift");
    const Eigen::MatrixXd g = gaussian_matrix(rng, dim, dim);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < dim; ++c) {
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    }

    Eigen::VectorXd scales(dim);
    const double log_a = std::log(anisotropy);
    for (int i = 0; i < dim; ++i) scales(i) = std::exp((2.0 * uniform_unit(rng) - 1.0) * log_a);

    Eigen::VectorXd offset(dim);
    for (int i = 0; i < dim; ++i) offset(i) = standard_normal(rng);
    const double n = offset.norm();
    offset = n > 0 ? Eigen::VectorXd(offset * (translation_norm / n)) : Eigen::VectorXd::Zero(dim);

    return {scales.asDiagonal() * q, offset};
}

void validate(const DomainGenConfig& config) {
    if (config.num_identities < 1) throw ConfigError("num_identities must be >= 1");
    if (config.samples_per_identity < 1) throw ConfigError("samples_per_identity must be >= 1");
    if (config.dim < 1) throw ConfigError("dim must be >= 1");
    if (!(config.intra_class_spread >= 0.0) || !std::isfinite(config.intra_class_spread)) {
        throw ConfigError("intra_class_spread must be finite and >= 0");
    }
    if (!(config.inter_class_separation >= 0.0) || !std::isfinite(config.inter_class_separation)) {
        throw ConfigError("inter_class_separation must be finite and >= 0");
    }
}

Eigen::MatrixXd identity_centers(const DomainGenConfig& config) {
    validate(config);
    Rng rng = make_rng(config.seed, "datagen.centers");
    Eigen::MatrixXd centers = gaussian_matrix(rng, config.num_identities, config.dim);
    for (int k = 0; k < config.num_identities; ++k) {
        const double n = centers.row(k).norm();
        if (n > 0) centers.row(k) /= n;
    }
    if (config.num_identities == 1) {
        return centers * (config.inter_class_separation / 2.0);
    }
    double total = 0.0;
    int pairs = 0;
    for (int a = 0; a < config.num_identities; ++a)
        for (int b = a + 1; b < config.num_identities; ++b) {
            total += (centers.row(a) - centers.row(b)).norm();
            ++pairs;
        }
    const double mean_unit = total / pairs;
    // Coincident directions (dim 1, two identities on the same side) would
    // make the scale blow up; that config is degenerate anyway.
    if (mean_unit <= 0.0) throw ConfigError("identity centers coincide; increase dim");
    return centers * (config.inter_class_separation / mean_unit);
}

LabeledDataset generate_domain(const DomainGenConfig& config) {
    const Eigen::MatrixXd centers = identity_centers(config);
    Rng rng = make_rng(config.seed, "datagen.noise");

    LabeledDataset out;
    out.num_identities = config.num_identities;
    out.dim = config.dim;
    out.samples.reserve(static_cast<std::size_t>(config.num_identities) *
                        static_cast<std::size_t>(config.samples_per_identity));
    SampleId next = config.first_id;
    for (int k = 0; k < config.num_identities; ++k) {
        for (int j = 0; j < config.samples_per_identity; ++j) {
            Sample s;
            s.id = next++;
            s.true_label = k;
            s.domain = config.domain;
            s.input = centers.row(k).transpose();
            if (config.intra_class_spread > 0.0) {
                for (int i = 0; i < config.dim; ++i) {
                    s.input(i) += config.intra_class_spread * standard_normal(rng);
                }
            }
            out.samples.push_back(std::move(s));
        }
    }
    return out;
}

LabeledDataset apply_domain_shift(const LabeledDataset& dataset, const AffineShift& shift) {
    if (shift.linear.rows() != dataset.dim || shift.linear.cols() != dataset.dim ||
        shift.offset.size() != dataset.dim) {
        throw ConfigError("domain shift of dimension " + std::to_string(shift.offset.size()) +
                          " does not match dataset dimension " + std::to_string(dataset.dim));
    }
    LabeledDataset out = dataset;
    for (auto& s : out.samples) s.input = shift.linear * s.input + shift.offset;
    return out;
}

double hard_interpolation_weight(double hard_overlap) {
    return hard_overlap / (1.0 + hard_overlap);
}

HardInjection inject_hard_samples(const LabeledDataset& dataset, double hard_fraction,
                                  double hard_overlap, std::uint64_t seed) {
    if (!(hard_fraction >= 0.0 && hard_fraction <= 1.0)) {
        throw ConfigError("hard_fraction must lie in [0, 1]");
    }
    if (!(hard_overlap >= 1.0) || !std::isfinite(hard_overlap)) {
        throw ConfigError("hard_overlap must be finite and >= 1");
    }

    HardInjection result{dataset, {}};
    const auto n = dataset.samples.size();
    // The guard keeps products such as 0.29 * 100 from flooring to 28.
    const auto count =
        static_cast<std::size_t>(std::floor(hard_fraction * static_cast<double>(n) * (1.0 + 1e-12)));
    if (count == 0) return result;
    if (dataset.num_identities < 2) {
        throw ConfigError("hard samples need at least two identities");
    }

    const Eigen::MatrixXd centers = class_means(dataset);
    const double w = hard_interpolation_weight(hard_overlap);

    // Partial Fisher-Yates: the first `count` positions are the chosen ones.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(seed, "datagen.hard");
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(order[i], order[j]);
    }

    for (std::size_t i = 0; i < count; ++i) {
        Sample& s = result.dataset.samples[order[i]];
        int foreign = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < dataset.num_identities; ++k) {
            if (k == s.true_label) continue;
            const double d = (centers.row(k).transpose() - s.input).squaredNorm();
            if (d < best) {
                best = d;
                foreign = k;
            }
        }
        s.input = (1.0 - w) * s.input + w * centers.row(foreign).transpose();
        result.hard_ids.insert(s.id);
    }
    return result;
}

}  // namespace fdlsd
