#include "fdlsd/checkpoint.hpp"

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "fdlsd/errors.hpp"
#include "fdlsd/text.hpp"

namespace fdlsd {
namespace {

void put(std::ostream& out, const std::string& key, const Eigen::MatrixXd& m) {
    out << key << ".shape " << m.rows() << ' ' << m.cols() << '\n' << key;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << ' ' << text::format_real(m(r, c));
    out << '\n';
}

void put_encoder(std::ostream& out, const std::string& branch, const EncoderParams& p) {
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const std::string base = branch + "." + std::to_string(l);
        put(out, base + ".weight", p.layers[l].weight);
        put(out, base + ".bias", Eigen::MatrixXd(p.layers[l].bias));
    }
}

void put_head(std::ostream& out, const std::string& name, const LinearHead& h) {
    put(out, name + ".weight", h.weight);
    put(out, name + ".bias", Eigen::MatrixXd(h.bias));
}

class Table {
public:
    explicit Table(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            auto tokens = text::split_whitespace(line);
            if (tokens.empty()) continue;
            std::vector<std::string> values(tokens.begin() + 1, tokens.end());
            entries_[std::string(tokens.front())] = std::move(values);
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key + ".shape") > 0; }

    [[nodiscard]] const std::vector<std::string>& raw(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ParseError("checkpoint is missing key '" + key + "'");
        return it->second;
    }

    [[nodiscard]] Eigen::MatrixXd matrix(const std::string& key) const {
        const auto& shape = raw(key + ".shape");
        if (shape.size() != 2) throw ParseError("bad shape for '" + key + "'");
        const auto rows = static_cast<Eigen::Index>(text::parse_int(shape[0]));
        const auto cols = static_cast<Eigen::Index>(text::parse_int(shape[1]));
        if (rows < 0 || cols < 0) throw ParseError("negative shape for '" + key + "'");
        const auto& values = entries_.count(key) ? raw(key) : empty_;
        if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
            throw ParseError("'" + key + "' holds " + std::to_string(values.size()) + " values, expected " +
                             std::to_string(rows * cols));
        }
        Eigen::MatrixXd m(rows, cols);
        std::size_t i = 0;
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = text::parse_real(values[i++]);
        return m;
    }

    [[nodiscard]] Eigen::VectorXd vector(const std::string& key) const {
        const Eigen::MatrixXd m = matrix(key);
        if (m.cols() != 1 && m.size() != 0) throw ParseError("'" + key + "' is not a column vector");
        return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    }

private:
    std::map<std::string, std::vector<std::string>> entries_;
    std::vector<std::string> empty_;
};

EncoderParams get_encoder(const Table& t, const std::string& branch, Activation act) {
    EncoderParams p;
    p.activation = act;
    for (std::size_t l = 0;; ++l) {
        const std::string base = branch + "." + std::to_string(l);
        if (!t.has(base + ".weight")) break;
        p.layers.push_back(Layer{t.matrix(base + ".weight"), t.vector(base + ".bias")});
        if (p.layers.back().bias.size() != p.layers.back().weight.rows()) {
            throw ParseError("bias size mismatch in " + base);
        }
        if (l > 0 && p.layers[l].in_dim() != p.layers[l - 1].out_dim()) {
            throw ParseError("layer dimensions do not chain in " + branch);
        }
    }
    if (p.layers.empty()) throw ParseError("checkpoint has no layers for " + branch);
    return p;
}

LinearHead get_head(const Table& t, const std::string& name) {
    LinearHead h{t.matrix(name + ".weight"), t.vector(name + ".bias")};
    if (h.bias.size() != h.weight.rows()) throw ParseError("bias size mismatch in " + name);
    return h;
}

}  // namespace

void write_checkpoint(std::ostream& out, const DualBranchModel& model) {
    out << "activation " << (model.f1.activation == Activation::relu ? "relu" : "tanh") << '\n';
    put_encoder(out, "f1", model.f1);
    put_encoder(out, "f2", model.f2);
    put_encoder(out, "mean_f1", model.mean_f1);
    put_encoder(out, "mean_f2", model.mean_f2);
    put_head(out, "c1.source", model.c1.source);
    put_head(out, "c1.target", model.c1.target);
    put_head(out, "c2.source", model.c2.source);
    put_head(out, "c2.target", model.c2.target);
}

DualBranchModel read_checkpoint(std::istream& in) {
    const Table t(in);
    const auto& act_tokens = t.raw("activation");
    if (act_tokens.size() != 1) throw ParseError("bad activation line");
    Activation act;
    if (act_tokens[0] == "relu") act = Activation::relu;
    else if (act_tokens[0] == "tanh") act = Activation::tanh;
    else throw ParseError("unknown activation '" + act_tokens[0] + "'");

    DualBranchModel m;
    m.f1 = get_encoder(t, "f1", act);
    m.f2 = get_encoder(t, "f2", act);
    m.mean_f1 = get_encoder(t, "mean_f1", act);
    m.mean_f2 = get_encoder(t, "mean_f2", act);
    check_same_shape(m.f1, m.f2);
    check_same_shape(m.f1, m.mean_f1);
    check_same_shape(m.f2, m.mean_f2);
    m.c1.source = get_head(t, "c1.source");
    m.c1.target = get_head(t, "c1.target");
    m.c2.source = get_head(t, "c2.source");
    m.c2.target = get_head(t, "c2.target");
    return m;
}

void save_checkpoint(const std::filesystem::path& path, const DualBranchModel& model) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_checkpoint(out, model);
}

DualBranchModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open checkpoint " + path.string());
    return read_checkpoint(in);
}

}  // namespace fdlsd
