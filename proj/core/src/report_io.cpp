#include "fdlsd/report_io.hpp"

#include <ostream>

#include <json.hpp>

#include "fdlsd/text.hpp"

namespace fdlsd {
namespace {

using nlohmann::json;

json opt(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json loss_json(const LossBreakdown& l) {
    return json{{"ce", l.ce}, {"tri", l.tri}, {"fdl", l.fdl}, {"total", l.total}};
}

json config_json(const ExperimentConfig& c) {
    return json{
        {"rho", c.rho},
        {"alpha", c.alpha},
        {"beta", c.coefficients.beta},
        {"gamma", c.coefficients.gamma},
        {"delta", c.coefficients.delta},
        {"tau", c.tau},
        {"lr_initial", c.lr_initial},
        {"lr_decay_every", c.lr_decay_every},
        {"lr_decay_factor", c.lr_decay_factor},
        {"epochs_total", c.epochs_total},
        {"pretrain_epochs", c.pretrain_epochs},
        {"batch_identities", c.batch_identities},
        {"batch_instances", c.batch_instances},
        {"eps", c.clustering.eps},
        {"min_pts", c.clustering.min_pts},
        {"eps_retry_factor", c.eps_retry_factor},
        {"layers", c.layers},
        {"activation", c.activation == Activation::relu ? "relu" : "tanh"},
        {"seed", c.seed},
        {"fdl_enabled", c.fdl_enabled},
    };
}

std::string csv_real(const std::optional<double>& v) {
    return v ? text::format_real(*v) : std::string();
}

}  // namespace

std::string report_to_json(const TrainingReport& r, const ReportOptions& options) {
    json j;
    j["tool"] = {{"name", "fdlsd"}, {"version", options.tool_version}};
    j["optimizer"] = "mini-batch gradient descent without momentum";
    j["config"] = config_json(r.config);

    json pre = json::array();
    for (const auto& l : r.pretrain_losses) pre.push_back(loss_json(l));
    j["pretrain"] = pre;

    json epochs = json::array();
    for (const auto& e : r.epochs) {
        json je{
            {"epoch", e.epoch},
            {"lr", e.lr},
            {"selected", e.selected},
            {"dropped", e.dropped},
            {"num_clusters", e.num_clusters},
            {"num_outliers", e.num_outliers},
            {"eps_used", e.eps_used},
            {"aborted", e.aborted},
            {"steps", e.steps},
            {"loss", loss_json(e.mean_loss)},
            {"clustering_error_rate", opt(e.clustering_error_rate)},
        };
        if (e.aborted) je["abort_reason"] = e.abort_reason;
        if (e.selected_ids.size() <= options.max_logged_ids) je["selected_ids"] = e.selected_ids;
        epochs.push_back(std::move(je));
    }
    j["epochs"] = epochs;

    const auto& f = r.final;
    json fin{
        {"clustering_error_rate", opt(f.clustering_error_rate)},
        {"num_clusters", f.num_clusters},
        {"num_outliers", f.num_outliers},
        {"rel_err_10", opt(f.rel_err_10)},
        {"rel_err_20", opt(f.rel_err_20)},
        {"hardest_10_ids", f.hardest_10},
        {"cross_branch_similarity", f.cross_branch_similarity},
    };
    if (f.eval) {
        fin["eval"] = {{"mAP", f.eval->mAP}, {"rank1", f.eval->rank1}, {"rank5", f.eval->rank5},
                       {"rank10", f.eval->rank10}};
    } else {
        fin["eval"] = nullptr;
    }
    j["final"] = fin;

    json per_sample = json::array();
    int max_noisy = 0;
    std::size_t touched = 0;
    for (const auto& [id, c] : r.noise.counts()) {
        if (c.epochs_noisy > 0) {
            per_sample.push_back({id, c.epochs_participated, c.epochs_noisy});
            ++touched;
            max_noisy = std::max(max_noisy, c.epochs_noisy);
        }
    }
    j["noise_history"] = {
        {"target_samples", r.noise.size()},
        {"epochs_recorded", r.noise.epochs_recorded()},
        {"total_noisy", r.noise.total_noisy()},
        {"samples_ever_noisy", touched},
        {"max_noisy_per_sample", max_noisy},
        {"noisy_samples", per_sample},  // [sample_id, epochs_participated, epochs_noisy]
    };
    return j.dump(2) + "\n";
}

void write_curves_csv(std::ostream& out, const TrainingReport& r) {
    out << "epoch,ce,tri,fdl,total,num_clusters,num_outliers,clustering_error_rate\n";
    for (const auto& e : r.epochs) {
        out << e.epoch << ',' << text::format_real(e.mean_loss.ce) << ',' << text::format_real(e.mean_loss.tri)
            << ',' << text::format_real(e.mean_loss.fdl) << ',' << text::format_real(e.mean_loss.total) << ','
            << e.num_clusters << ',' << e.num_outliers << ',' << csv_real(e.clustering_error_rate) << '\n';
    }
}

void write_assignments_csv(std::ostream& out, const TrainingReport& r) {
    out << "epoch,sample_id,cluster_id\n";
    for (const auto& e : r.epochs) {
        for (const auto& [id, c] : e.pseudo_labels) {
            out << e.epoch << ',' << id << ',';
            if (c == kOutlier) out << "OUTLIER";
            else out << c;
            out << '\n';
        }
    }
}

SweepRow sweep_row(const std::string& value, const TrainingReport& r) {
    SweepRow row;
    row.value = value;
    row.clustering_error_rate = r.final.clustering_error_rate;
    row.rel_err_10 = r.final.rel_err_10;
    row.rel_err_20 = r.final.rel_err_20;
    if (r.final.eval) {
        row.mAP = r.final.eval->mAP;
        row.rank1 = r.final.eval->rank1;
    }
    return row;
}

void write_sweep_csv(std::ostream& out, const std::string& param, const std::vector<SweepRow>& rows) {
    out << param << ",clustering_error_rate,rel_err_10,rel_err_20,mAP,rank1\n";
    for (const auto& r : rows) {
        out << r.value << ',' << csv_real(r.clustering_error_rate) << ',' << csv_real(r.rel_err_10) << ','
            << csv_real(r.rel_err_20) << ',' << csv_real(r.mAP) << ',' << csv_real(r.rank1) << '\n';
    }
}

}  // namespace fdlsd
