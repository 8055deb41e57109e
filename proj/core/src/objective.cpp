#include "fdlsd/objective.hpp"

namespace fdlsd {
namespace {

struct DomainTerms {
    double ce = 0.0;
    double tri = 0.0;
    double fdl = 0.0;
};

// Accumulates one domain's contribution into the branch feature gradients
// and the two heads' gradients.
DomainTerms domain_terms(const DualBranchModel& model, const DomainBatch& batch, const LinearHead& head1,
                         const LinearHead& head2, const LossCoefficients& c, double tau, EncoderGrads& g1,
                         EncoderGrads& g2, HeadGrads& h1, HeadGrads& h2) {
    const EncoderOutput e1 = encode(model.f1, batch.inputs);
    const EncoderOutput e2 = encode(model.f2, batch.inputs);
    const Eigen::MatrixXd m1 = encode_features(model.mean_f1, batch.inputs);
    const Eigen::MatrixXd m2 = encode_features(model.mean_f2, batch.inputs);

    const CrossEntropyResult ce =
        cross_entropy_loss(classify(head1, e1.features), classify(head2, e2.features), batch.labels);
    h1 = head_backward(head1, e1.features, c.beta * ce.grad_logits_c1);
    h2 = head_backward(head2, e2.features, c.beta * ce.grad_logits_c2);

    const TripletResult t1 = triplet_loss(e1.features, batch.labels, tau);
    const TripletResult t2 = triplet_loss(e2.features, batch.labels, tau);
    const FdlResult fdl = fdl_loss(e1.features, e2.features, m1, m2);

    // h1.features already carries beta.
    const Eigen::MatrixXd d1 = h1.features + c.gamma * t1.grad_features + c.delta * fdl.grad_f1;
    const Eigen::MatrixXd d2 = h2.features + c.gamma * t2.grad_features + c.delta * fdl.grad_f2;
    const EncoderGrads b1 = encoder_backward(model.f1, e1.cache, d1);
    const EncoderGrads b2 = encoder_backward(model.f2, e2.cache, d2);
    for (std::size_t l = 0; l < g1.layers.size(); ++l) {
        g1.layers[l].weight += b1.layers[l].weight;
        g1.layers[l].bias += b1.layers[l].bias;
        g2.layers[l].weight += b2.layers[l].weight;
        g2.layers[l].bias += b2.layers[l].bias;
    }
    return {ce.value, t1.value + t2.value, fdl.value};
}

EncoderGrads zero_grads(const EncoderParams& p) {
    EncoderGrads g;
    for (const auto& l : p.layers) {
        g.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                            Eigen::VectorXd::Zero(l.bias.size())});
    }
    return g;
}

HeadGrads zero_grads(const LinearHead& h) {
    return {Eigen::MatrixXd::Zero(h.weight.rows(), h.weight.cols()), Eigen::VectorXd::Zero(h.bias.size()), {}};
}

void step(Layer& layer, const LayerGrad& g, double lr) {
    layer.weight -= lr * g.weight;
    layer.bias -= lr * g.bias;
}

void step(LinearHead& head, const HeadGrads& g, double lr) {
    head.weight -= lr * g.weight;
    head.bias -= lr * g.bias;
}

}  // namespace

ObjectiveResult evaluate_objective(const DualBranchModel& model, const DomainBatch& source,
                                   const std::optional<DomainBatch>& target,
                                   const LossCoefficients& coefficients, double tau) {
    ObjectiveResult r;
    r.grads.f1 = zero_grads(model.f1);
    r.grads.f2 = zero_grads(model.f2);
    r.grads.c1_target = zero_grads(model.c1.target);
    r.grads.c2_target = zero_grads(model.c2.target);

    DomainTerms total = domain_terms(model, source, model.c1.source, model.c2.source, coefficients, tau,
                                     r.grads.f1, r.grads.f2, r.grads.c1_source, r.grads.c2_source);
    if (target) {
        const DomainTerms t = domain_terms(model, *target, model.c1.target, model.c2.target, coefficients, tau,
                                           r.grads.f1, r.grads.f2, r.grads.c1_target, r.grads.c2_target);
        total.ce += t.ce;
        total.tri += t.tri;
        total.fdl += t.fdl;
    }
    r.loss = total_loss(total.ce, total.tri, total.fdl, coefficients);
    return r;
}

void apply_gradients(DualBranchModel& model, const ModelGrads& grads, double lr) {
    for (std::size_t l = 0; l < model.f1.layers.size(); ++l) {
        step(model.f1.layers[l], grads.f1.layers[l], lr);
        step(model.f2.layers[l], grads.f2.layers[l], lr);
    }
    step(model.c1.source, grads.c1_source, lr);
    step(model.c2.source, grads.c2_source, lr);
    step(model.c1.target, grads.c1_target, lr);
    step(model.c2.target, grads.c2_target, lr);
}

}  // namespace fdlsd
