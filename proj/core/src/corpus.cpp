#include "fdlsd/corpus.hpp"

#include <cmath>
#include <string>

#include "fdlsd/errors.hpp"
#include "fdlsd/rng.hpp"

namespace fdlsd {
namespace {

DomainGenConfig gen_config(const CorpusConfig& c, const DomainSpec& spec, int per_identity, Domain domain,
                           SampleId first_id, std::string_view stream) {
    DomainGenConfig g;
    g.num_identities = spec.identities;
    g.samples_per_identity = per_identity;
    g.dim = c.dim;
    g.intra_class_spread = spec.spread;
    g.inter_class_separation = spec.separation;
    g.domain = domain;
    g.first_id = first_id;
    g.seed = derive_seed(c.seed, stream);
    return g;
}

}  // namespace

void validate(const CorpusConfig& c) {
    if (c.dim < 1) throw ConfigError("corpus.dim must be >= 1");
    if (c.target.identities < 2) throw ConfigError("corpus.target.identities must be >= 2");
    if (c.source.identities < 2) throw ConfigError("corpus.source.identities must be >= 2");
    for (const auto* side : {&c.source, &c.target}) {
        const std::string name = side == &c.source ? "corpus.source." : "corpus.target.";
        if (side->samples_per_identity < 1) throw ConfigError(name + "samples_per_identity must be >= 1");
        if (!(side->spread >= 0.0) || !std::isfinite(side->spread)) throw ConfigError(name + "spread must be >= 0");
        if (!(side->separation >= 0.0) || !std::isfinite(side->separation)) {
            throw ConfigError(name + "separation must be >= 0");
        }
    }
    if (c.query_per_identity < 1) throw ConfigError("corpus.query_per_identity must be >= 1");
    if (c.gallery_per_identity < 1) throw ConfigError("corpus.gallery_per_identity must be >= 1");
    if (!(c.hard_fraction >= 0.0 && c.hard_fraction <= 1.0)) {
        throw ConfigError("corpus.hard_fraction must lie in [0, 1]");
    }
    if (!(c.eval_hard_fraction >= 0.0 && c.eval_hard_fraction <= 1.0)) {
        throw ConfigError("corpus.eval_hard_fraction must lie in [0, 1]");
    }
    if (!(c.hard_overlap >= 1.0)) throw ConfigError("corpus.hard_overlap must be >= 1");
    if (!(c.shift_anisotropy >= 1.0)) throw ConfigError("corpus.shift.anisotropy must be >= 1");
    if (!(c.shift_translation >= 0.0)) throw ConfigError("corpus.shift.translation must be >= 0");
}

Corpus make_corpus(const CorpusConfig& c) {
    validate(c);
    Corpus corpus;

    DomainGenConfig src = gen_config(c, c.source, c.source.samples_per_identity, Domain::source, 0, "datagen.source");
    validate(src);
    corpus.source = generate_domain(src);

    // One draw per target identity covering train, query and gallery, split
    // afterwards so all three share identity centers.
    const int train_n = c.target.samples_per_identity;
    const int per_identity = train_n + c.query_per_identity + c.gallery_per_identity;
    DomainGenConfig tgt = gen_config(c, c.target, per_identity, Domain::target,
                                     static_cast<SampleId>(corpus.source.size()), "datagen.target");
    validate(tgt);
    const AffineShift gap = AffineShift::random_domain_gap(c.dim, c.shift_anisotropy, c.shift_translation,
                                                           derive_seed(c.seed, "datagen.shift"));
    const LabeledDataset all = apply_domain_shift(generate_domain(tgt), gap);

    std::vector<std::size_t> train_pos, query_pos, gallery_pos;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto j = static_cast<int>(i % static_cast<std::size_t>(per_identity));
        if (j < train_n) train_pos.push_back(i);
        else if (j < train_n + c.query_per_identity) query_pos.push_back(i);
        else gallery_pos.push_back(i);
    }

    HardInjection train = inject_hard_samples(all.subset(train_pos), c.hard_fraction, c.hard_overlap,
                                              derive_seed(c.seed, "datagen.hard"));
    corpus.target = std::move(train.dataset);
    corpus.hard_ids = std::move(train.hard_ids);
    corpus.retrieval.query = inject_hard_samples(all.subset(query_pos), c.eval_hard_fraction, c.hard_overlap,
                                                 derive_seed(c.seed, "datagen.hard.query"))
                                 .dataset;
    corpus.retrieval.gallery = inject_hard_samples(all.subset(gallery_pos), c.eval_hard_fraction, c.hard_overlap,
                                                   derive_seed(c.seed, "datagen.hard.gallery"))
                                   .dataset;
    return corpus;
}

}  // namespace fdlsd
