#include "fdlsd/losses.hpp"

#include <cmath>
#include <string>

#include "fdlsd/errors.hpp"

namespace fdlsd {
namespace {

void require_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " differ");
    }
}

}  // namespace

double softplus(double x) {
    if (!std::isfinite(x)) throw NumericError("softplus of a non-finite value");
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

FdlResult fdl_loss(const Eigen::MatrixXd& f1, const Eigen::MatrixXd& f2, const Eigen::MatrixXd& mean_f1,
                   const Eigen::MatrixXd& mean_f2) {
    require_same_shape(f1, f2, "fdl_loss");
    require_same_shape(f1, mean_f1, "fdl_loss");
    require_same_shape(f1, mean_f2, "fdl_loss");
    const auto n = f1.rows();
    if (n == 0) throw ShapeError("fdl_loss: empty batch");

    FdlResult r;
    r.grad_f1 = Eigen::MatrixXd::Zero(n, f1.cols());
    r.grad_f2 = Eigen::MatrixXd::Zero(n, f1.cols());
    const double inv_n = 1.0 / static_cast<double>(n);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s12 = f1.row(i).dot(mean_f2.row(i));
        const double s21 = f2.row(i).dot(mean_f1.row(i));
        sum += softplus(s12) + softplus(s21);
        r.grad_f1.row(i) = sigmoid(s12) * inv_n * mean_f2.row(i);
        r.grad_f2.row(i) = sigmoid(s21) * inv_n * mean_f1.row(i);
    }
    r.value = sum * inv_n;
    return r;
}

CrossEntropyResult cross_entropy_loss(const Eigen::MatrixXd& probs_c1, const Eigen::MatrixXd& probs_c2,
                                      const std::vector<Label>& labels) {
    require_same_shape(probs_c1, probs_c2, "cross_entropy_loss");
    const auto n = probs_c1.rows();
    if (static_cast<std::size_t>(n) != labels.size()) {
        throw ShapeError("cross_entropy_loss: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(n) + " rows");
    }
    if (n == 0) throw ShapeError("cross_entropy_loss: empty batch");
    const auto k = probs_c1.cols();

    CrossEntropyResult r;
    r.grad_logits_c1 = probs_c1;
    r.grad_logits_c2 = probs_c2;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Label y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || y >= k) {
            throw LabelError("label " + std::to_string(y) + " outside [0, " + std::to_string(k) + ")");
        }
        const double p1 = probs_c1(i, y);
        const double p2 = probs_c2(i, y);
        if (!(p1 > 0.0) || !(p2 > 0.0)) {
            throw NumericError("cross_entropy_loss: non-positive probability on the label");
        }
        sum -= std::log(p1) + std::log(p2);
        r.grad_logits_c1(i, y) -= 1.0;
        r.grad_logits_c2(i, y) -= 1.0;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    r.grad_logits_c1 *= inv_n;
    r.grad_logits_c2 *= inv_n;
    // -log(1) is exactly 0, so perfect predictions give an exact zero here.
    r.value = sum * inv_n;
    return r;
}

TripletSelection mine_hardest(const Eigen::MatrixXd& features, const std::vector<Label>& labels) {
    const auto n = features.rows();
    if (static_cast<std::size_t>(n) != labels.size()) {
        throw ShapeError("mine_hardest: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(n) + " rows");
    }
    TripletSelection sel;
    sel.positive.assign(static_cast<std::size_t>(n), -1);
    sel.negative.assign(static_cast<std::size_t>(n), -1);
    sel.positive_sq_dist.assign(static_cast<std::size_t>(n), 0.0);
    sel.negative_sq_dist.assign(static_cast<std::size_t>(n), 0.0);

    for (Eigen::Index a = 0; a < n; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == a) continue;
            const double d = (features.row(a) - features.row(j)).squaredNorm();
            if (labels[static_cast<std::size_t>(j)] == labels[ua]) {
                if (sel.positive[ua] < 0 || d > sel.positive_sq_dist[ua]) {
                    sel.positive[ua] = j;
                    sel.positive_sq_dist[ua] = d;
                }
            } else if (sel.negative[ua] < 0 || d < sel.negative_sq_dist[ua]) {
                sel.negative[ua] = j;
                sel.negative_sq_dist[ua] = d;
            }
        }
        if (sel.positive[ua] < 0) {
            throw BatchCompositionError("anchor " + std::to_string(a) + " (label " + std::to_string(labels[ua]) +
                                        ") has no positive in the batch");
        }
        if (sel.negative[ua] < 0) {
            throw BatchCompositionError("anchor " + std::to_string(a) + " has no negative in the batch");
        }
    }
    return sel;
}

double triplet_hinge(double tau, double positive_sq_dist, double negative_sq_dist) {
    const double h = tau + positive_sq_dist - negative_sq_dist;
    return h > 0.0 ? h : 0.0;
}

TripletResult triplet_loss(const Eigen::MatrixXd& features, const std::vector<Label>& labels, double tau) {
    const auto n = features.rows();
    if (n == 0) throw ShapeError("triplet_loss: empty batch");

    TripletResult r;
    r.selection = mine_hardest(features, labels);
    r.grad_features = Eigen::MatrixXd::Zero(n, features.cols());
    const double inv_n = 1.0 / static_cast<double>(n);
    double sum = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const double h = triplet_hinge(tau, r.selection.positive_sq_dist[ua], r.selection.negative_sq_dist[ua]);
        if (h <= 0.0) continue;
        sum += h;
        ++r.active_anchors;
        const auto p = r.selection.positive[ua];
        const auto q = r.selection.negative[ua];
        const Eigen::RowVectorXd to_pos = 2.0 * inv_n * (features.row(a) - features.row(p));
        const Eigen::RowVectorXd to_neg = 2.0 * inv_n * (features.row(a) - features.row(q));
        r.grad_features.row(a) += to_pos - to_neg;
        r.grad_features.row(p) -= to_pos;
        r.grad_features.row(q) += to_neg;
    }
    r.value = sum * inv_n;
    return r;
}

LossBreakdown total_loss(double ce, double tri, double fdl, const LossCoefficients& c) {
    if (!std::isfinite(c.beta) || !std::isfinite(c.gamma) || !std::isfinite(c.delta)) {
        throw ConfigError("loss coefficients must be finite");
    }
    return {ce, tri, fdl, c.beta * ce + c.gamma * tri + c.delta * fdl, c};
}

Eigen::MatrixXd weighted_gradient(const LossCoefficients& c, const Eigen::MatrixXd& grad_ce,
                                  const Eigen::MatrixXd& grad_tri, const Eigen::MatrixXd& grad_fdl) {
    require_same_shape(grad_ce, grad_tri, "weighted_gradient");
    require_same_shape(grad_ce, grad_fdl, "weighted_gradient");
    return c.beta * grad_ce + c.gamma * grad_tri + c.delta * grad_fdl;
}

}  // namespace fdlsd
