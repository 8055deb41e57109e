#pragma once

#include <iosfwd>
#include <string>

#include "fdlsd/trainer.hpp"

namespace fdlsd {

struct ReportOptions {
    /// Per-epoch selected ids are written only when the selection is at most
    /// this large; counts are always present.
    std::size_t max_logged_ids = 200;
    std::string tool_version;
};

/// Deterministic JSON (sorted keys, shortest round-trip reals). Wall-clock
/// timings are left out so identical runs give identical bytes.
std::string report_to_json(const TrainingReport& report, const ReportOptions& options = {});

/// epoch,ce,tri,fdl,total,num_clusters,num_outliers,clustering_error_rate
void write_curves_csv(std::ostream& out, const TrainingReport& report);

/// epoch,sample_id,cluster_id|OUTLIER for every adaptation epoch.
void write_assignments_csv(std::ostream& out, const TrainingReport& report);

/// One row of the sweep aggregate.
struct SweepRow {
    std::string value;
    std::optional<double> clustering_error_rate;
    std::optional<double> rel_err_10;
    std::optional<double> rel_err_20;
    std::optional<double> mAP;
    std::optional<double> rank1;
};

SweepRow sweep_row(const std::string& value, const TrainingReport& report);

/// Header is `<param>,clustering_error_rate,rel_err_10,rel_err_20,mAP,rank1`;
/// rows keep the given order. Undefined values are written as empty fields.
void write_sweep_csv(std::ostream& out, const std::string& param, const std::vector<SweepRow>& rows);

}  // namespace fdlsd
