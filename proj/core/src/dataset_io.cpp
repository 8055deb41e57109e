#include "fdlsd/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "fdlsd/errors.hpp"
#include "fdlsd/text.hpp"

namespace fdlsd {

void write_dataset(std::ostream& out, const LabeledDataset& dataset) {
    for (const auto& s : dataset.samples) {
        out << s.id << ',' << to_string(s.domain) << ',' << s.true_label;
        for (Eigen::Index i = 0; i < s.input.size(); ++i) out << ',' << text::format_real(s.input(i));
        out << '\n';
    }
}

LabeledDataset read_dataset(std::istream& in) {
    LabeledDataset out;
    out.dim = -1;
    std::string line;
    std::size_t line_no = 0;
    Label max_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto fields = text::split(line, ',');
        if (fields.size() < 4) {
            throw ParseError("line " + std::to_string(line_no) + ": expected at least 4 fields");
        }
        Sample s;
        s.id = text::parse_int(fields[0]);
        s.domain = domain_from_string(text::trim(fields[1]));
        s.true_label = static_cast<Label>(text::parse_int(fields[2]));
        const auto d = static_cast<int>(fields.size() - 3);
        if (out.dim == -1) out.dim = d;
        if (d != out.dim) {
            throw ParseError("line " + std::to_string(line_no) + ": dimension " + std::to_string(d) +
                             " differs from " + std::to_string(out.dim));
        }
        s.input.resize(d);
        for (int i = 0; i < d; ++i) s.input(i) = text::parse_real(fields[3 + static_cast<std::size_t>(i)]);
        if (s.true_label < 0) throw ParseError("line " + std::to_string(line_no) + ": negative label");
        max_label = std::max(max_label, s.true_label);
        out.samples.push_back(std::move(s));
    }
    if (out.dim == -1) out.dim = 0;
    out.num_identities = max_label + 1;
    validate(out);
    return out;
}

void save_dataset(const std::filesystem::path& path, const LabeledDataset& dataset) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_dataset(out, dataset);
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open corpus file " + path.string());
    return read_dataset(in);
}

void save_id_set(const std::filesystem::path& path, const std::set<SampleId>& ids) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    for (auto id : ids) out << id << '\n';
}

std::set<SampleId> load_id_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open id file " + path.string());
    std::set<SampleId> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        ids.insert(text::parse_int(line));
    }
    return ids;
}

}  // namespace fdlsd
