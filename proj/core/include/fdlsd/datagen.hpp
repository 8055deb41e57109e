#pragma once

#include <cstdint>
#include <set>

#include "fdlsd/dataset.hpp"

namespace fdlsd {

/// x -> linear * x + offset, applied to every sample input.
struct AffineShift {
    Eigen::MatrixXd linear;
    Eigen::VectorXd offset;

    static AffineShift identity(int dim);
    static AffineShift translation(const Eigen::VectorXd& offset);
    /// Haar-random rotation (QR of a Gaussian matrix, sign-corrected).
    static AffineShift random_rotation(int dim, std::uint64_t seed);
    /// Rotation, then per-axis scaling drawn log-uniformly in
    /// [1/anisotropy, anisotropy], then a Gaussian translation of norm
    /// `translation_norm`. anisotropy = 1 and translation_norm = 0 give a
    /// pure rotation.
    static AffineShift random_domain_gap(int dim, double anisotropy, double translation_norm,
                                         std::uint64_t seed);

    [[nodiscard]] int dim() const { return static_cast<int>(offset.size()); }
};

struct DomainGenConfig {
    int num_identities = 20;
    int samples_per_identity = 30;
    int dim = 16;
    double intra_class_spread = 0.3;
    double inter_class_separation = 2.0;
    Domain domain = Domain::source;
    SampleId first_id = 0;
    std::uint64_t seed = 0;
};

void validate(const DomainGenConfig& config);

/// Identity centers on a hypersphere whose radius is scaled so the mean
/// pairwise center distance equals inter_class_separation exactly. Samples
/// are centers plus isotropic Gaussian noise; ids are consecutive from
/// first_id in identity-major order.
LabeledDataset generate_domain(const DomainGenConfig& config);

/// The center matrix generate_domain uses (num_identities x dim).
Eigen::MatrixXd identity_centers(const DomainGenConfig& config);

LabeledDataset apply_domain_shift(const LabeledDataset& dataset, const AffineShift& shift);

struct HardInjection {
    LabeledDataset dataset;
    std::set<SampleId> hard_ids;
};

/// Interpolation weight toward the foreign center for a given overlap:
/// overlap / (1 + overlap). overlap = 1 lands on the midpoint of the sample
/// and the foreign center; larger overlaps land closer to the foreign center.
double hard_interpolation_weight(double hard_overlap);

/// Moves floor(hard_fraction * N) uniformly chosen samples toward the center
/// (class mean) of the nearest foreign identity. True labels are kept.
HardInjection inject_hard_samples(const LabeledDataset& dataset, double hard_fraction,
                                  double hard_overlap, std::uint64_t seed);

}  // namespace fdlsd
