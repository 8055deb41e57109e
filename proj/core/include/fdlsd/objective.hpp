#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fdlsd/encoder.hpp"
#include "fdlsd/losses.hpp"

namespace fdlsd {

/// Inputs of one domain's mini-batch with the labels training may see: true
/// identities for the source, pseudo labels for the target.
struct DomainBatch {
    Eigen::MatrixXd inputs;
    std::vector<Label> labels;
};

struct ModelGrads {
    EncoderGrads f1;
    EncoderGrads f2;
    HeadGrads c1_source;
    HeadGrads c2_source;
    HeadGrads c1_target;
    HeadGrads c2_target;
};

struct ObjectiveResult {
    LossBreakdown loss;
    ModelGrads grads;
};

/// The full training objective beta * L_CE + gamma * L_TRI + delta * L_FDL.
/// CE and triplet terms are per-batch means summed over the source batch
/// and, when present, the target batch; FDL is handled the same way. The
/// source batch uses the source heads, the target batch the target heads.
/// Mean encoders only supply constant FDL partners.
ObjectiveResult evaluate_objective(const DualBranchModel& model, const DomainBatch& source,
                                   const std::optional<DomainBatch>& target,
                                   const LossCoefficients& coefficients, double tau);

/// Plain gradient step on encoders and heads; mean encoders are untouched.
void apply_gradients(DualBranchModel& model, const ModelGrads& grads, double lr);

}  // namespace fdlsd
