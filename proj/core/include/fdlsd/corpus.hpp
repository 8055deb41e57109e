#pragma once

#include <cstdint>
#include <set>

#include "fdlsd/datagen.hpp"
#include "fdlsd/trainer.hpp"

namespace fdlsd {

struct DomainSpec {
    int identities = 20;
    int samples_per_identity = 30;
    double spread = 0.3;
    double separation = 2.0;
};

/// Everything needed to regenerate a source/target pair plus the held-out
/// retrieval split of the target identities.
struct CorpusConfig {
    int dim = 16;
    DomainSpec source;
    DomainSpec target;
    double shift_anisotropy = 1.0;
    double shift_translation = 0.0;
    double hard_fraction = 0.1;
    double hard_overlap = 1.5;
    int query_per_identity = 2;
    int gallery_per_identity = 8;
    /// Hard-sample fraction injected into the query and gallery sets.
    double eval_hard_fraction = 0.0;
    std::uint64_t seed = 7;
};

void validate(const CorpusConfig& config);

struct Corpus {
    LabeledDataset source;
    LabeledDataset target;
    RetrievalSplit retrieval;
    std::set<SampleId> hard_ids;
};

/// Source: clean identity clusters. Target: fresh identities drawn the same
/// way, passed through a random affine domain gap, then hard samples are
/// injected into the training part. Query and gallery are further samples of
/// the target identities. Ids are unique across all four sets.
Corpus make_corpus(const CorpusConfig& config);

}  // namespace fdlsd
