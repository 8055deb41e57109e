#include "commands.hpp"

#include <fstream>
#include <iostream>

#include "fdlsd/checkpoint.hpp"
#include "fdlsd/dataset_io.hpp"
#include "fdlsd/errors.hpp"
#include "fdlsd/report_io.hpp"
#include "fdlsd/text.hpp"
#include "fdlsd/version.hpp"

namespace fdlsd::cli {

namespace fs = std::filesystem;

namespace {

std::ostream& err_stream(const CommandOptions& o) { return o.err ? *o.err : std::cerr; }

RunConfig resolve_config(const CommandOptions& o) {
    RunConfig config = load_config(o.config_path);
    if (o.seed) {
        config.trainer.seed = *o.seed;
        validate(config);
    }
    return config;
}

void prepare_out_dir(const fs::path& dir) {
    if (dir.empty()) throw ConfigError("--out must name a directory");
    fs::create_directories(dir);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw Error("failed writing " + path.string());
}

template <class Body>
int guarded(const CommandOptions& o, Body body) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        err_stream(o) << "fdlsd: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err_stream(o) << "fdlsd: error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

std::string sub_run_name(const std::string& param, const std::string& value) {
    std::string name = param + "_" + value;
    for (char& ch : name) {
        if (ch == '/' || ch == '\\' || ch == ' ') ch = '_';
    }
    return name;
}

}  // namespace

void write_manifest(std::ostream& out, const RunConfig& config, const fs::path& out_dir) {
    out << "# fdlsd manifest\n";
    out << "# tool_version " << kVersion << '\n';
    out << "# out_dir " << out_dir.string() << '\n';
    write_config(out, config);
}

TrainingReport execute_run(const RunConfig& config, const fs::path& out_dir, std::ostream* log) {
    prepare_out_dir(out_dir);
    {
        const fs::path p = out_dir / "manifest.cfg";
        auto out = open_out(p);
        write_manifest(out, config, out_dir);
        close_checked(out, p);
    }

    const Corpus corpus = make_corpus(config.corpus);
    EpochObserver observer;
    if (log) {
        observer = [log](const EpochRecord& r) {
            *log << "epoch " << r.epoch << " selected " << r.selected << " clusters " << r.num_clusters
                 << " outliers " << r.num_outliers;
            if (r.aborted) {
                *log << " aborted: " << r.abort_reason;
            } else {
                *log << " loss " << text::format_real(r.mean_loss.total);
                if (r.clustering_error_rate) *log << " err " << text::format_real(*r.clustering_error_rate);
            }
            *log << '\n';
        };
    }
    TrainingReport report = run(corpus.source, corpus.target, config.trainer, corpus.retrieval, observer);

    ReportOptions ro;
    ro.max_logged_ids = config.max_logged_ids;
    ro.tool_version = kVersion;
    {
        const fs::path p = out_dir / "report.json";
        auto out = open_out(p);
        out << report_to_json(report, ro);
        close_checked(out, p);
    }
    {
        const fs::path p = out_dir / "curves.csv";
        auto out = open_out(p);
        write_curves_csv(out, report);
        close_checked(out, p);
    }
    {
        const fs::path p = out_dir / "assignments.csv";
        auto out = open_out(p);
        write_assignments_csv(out, report);
        close_checked(out, p);
    }
    save_checkpoint(out_dir / "model.ckpt", report.model);
    if (log && report.final.eval) {
        *log << "final mAP " << text::format_real(report.final.eval->mAP) << " rank1 "
             << text::format_real(report.final.eval->rank1) << '\n';
    }
    return report;
}

int cmd_gen(const CommandOptions& o) {
    return guarded(o, [&] {
        const RunConfig config = resolve_config(o);
        prepare_out_dir(o.out_dir);
        const Corpus corpus = make_corpus(config.corpus);
        save_dataset(o.out_dir / "source.csv", corpus.source);
        save_dataset(o.out_dir / "target.csv", corpus.target);
        save_id_set(o.out_dir / "hard_ids.txt", corpus.hard_ids);
    });
}

int cmd_run(const CommandOptions& o) {
    return guarded(o, [&] {
        const RunConfig config = resolve_config(o);
        execute_run(config, o.out_dir, o.quiet ? nullptr : (o.log ? o.log : &std::cerr));
    });
}

int cmd_sweep(const CommandOptions& o, const std::string& param, const std::vector<std::string>& values) {
    return guarded(o, [&] {
        const std::string key = sweep_key(param);
        if (key.empty()) throw ConfigError("parameter '" + param + "' is not sweepable");
        if (values.empty()) throw ConfigError("--values must list at least one value");
        const RunConfig base = resolve_config(o);

        std::vector<RunConfig> configs;
        for (const auto& v : values) {
            RunConfig c = base;
            set_field(c, key, v);
            validate(c);
            configs.push_back(std::move(c));
        }

        prepare_out_dir(o.out_dir);
        std::ostream* log = o.quiet ? nullptr : (o.log ? o.log : &std::cerr);
        std::vector<SweepRow> rows;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (log) *log << "[" << param << "=" << values[i] << "]\n";
            const TrainingReport report = execute_run(configs[i], o.out_dir / sub_run_name(param, values[i]), log);
            rows.push_back(sweep_row(values[i], report));
        }
        const fs::path p = o.out_dir / "sweep.csv";
        auto out = open_out(p);
        write_sweep_csv(out, param, rows);
        close_checked(out, p);
    });
}

}  // namespace fdlsd::cli
