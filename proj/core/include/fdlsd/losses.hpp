#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fdlsd/dataset.hpp"

namespace fdlsd {

/// ln(1 + exp(x)) in a form that neither overflows nor loses the tail.
double softplus(double x);
/// d softplus / dx.
double sigmoid(double x);

struct FdlResult {
    double value = 0.0;
    Eigen::MatrixXd grad_f1;
    Eigen::MatrixXd grad_f2;
};

/// Batch mean over rows i of S(f1_i . mean_f2_i) + S(f2_i . mean_f1_i).
/// The mean-encoder features are constants: no gradient flows into them.
FdlResult fdl_loss(const Eigen::MatrixXd& f1, const Eigen::MatrixXd& f2, const Eigen::MatrixXd& mean_f1,
                   const Eigen::MatrixXd& mean_f2);

struct CrossEntropyResult {
    double value = 0.0;
    Eigen::MatrixXd grad_logits_c1;
    Eigen::MatrixXd grad_logits_c2;
};

/// Batch mean of -(log p1[i, y_i] + log p2[i, y_i]). Gradients are with
/// respect to the logits that produced the softmax probabilities.
CrossEntropyResult cross_entropy_loss(const Eigen::MatrixXd& probs_c1, const Eigen::MatrixXd& probs_c2,
                                      const std::vector<Label>& labels);

/// Hardest positive / negative per anchor.
struct TripletSelection {
    std::vector<Eigen::Index> positive;
    std::vector<Eigen::Index> negative;
    std::vector<double> positive_sq_dist;
    std::vector<double> negative_sq_dist;
};

/// Hardest positive: same label, largest squared distance. Hardest negative:
/// other label, smallest squared distance. Ties go to the lowest index.
TripletSelection mine_hardest(const Eigen::MatrixXd& features, const std::vector<Label>& labels);

/// [tau + d_p - d_n]_+ with a zero subgradient at the kink.
double triplet_hinge(double tau, double positive_sq_dist, double negative_sq_dist);

struct TripletResult {
    double value = 0.0;
    Eigen::MatrixXd grad_features;
    TripletSelection selection;
    int active_anchors = 0;
};

/// Batch mean of per-anchor hinges on squared Euclidean distances.
TripletResult triplet_loss(const Eigen::MatrixXd& features, const std::vector<Label>& labels, double tau);

struct LossCoefficients {
    double beta = 1.0;
    double gamma = 1.0;
    double delta = 0.5;
};

struct LossBreakdown {
    double ce = 0.0;
    double tri = 0.0;
    double fdl = 0.0;
    double total = 0.0;
    LossCoefficients coefficients;
};

/// total = beta * ce + gamma * tri + delta * fdl.
LossBreakdown total_loss(double ce, double tri, double fdl, const LossCoefficients& coefficients);

/// The same weighting applied to gradients of the three components.
Eigen::MatrixXd weighted_gradient(const LossCoefficients& coefficients, const Eigen::MatrixXd& grad_ce,
                                  const Eigen::MatrixXd& grad_tri, const Eigen::MatrixXd& grad_fdl);

}  // namespace fdlsd
