#include "config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "fdlsd/errors.hpp"
#include "fdlsd/text.hpp"

namespace fdlsd::cli {

namespace {

struct Field {
    std::string key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class Ref>
Field real_field(std::string key, Ref ref) {
    return {std::move(key),
            [ref](RunConfig& c, std::string_view v) { ref(c) = text::parse_real(v); },
            [ref](const RunConfig& c) { return text::format_real(ref(const_cast<RunConfig&>(c))); }};
}

template <class Ref>
Field int_field(std::string key, Ref ref) {
    return {std::move(key),
            [ref](RunConfig& c, std::string_view v) {
                const long long x = text::parse_int(v);
                if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
                    throw ParseError("integer out of range: '" + std::string(v) + "'");
                }
                ref(c) = static_cast<int>(x);
            },
            [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

std::uint64_t parse_seed(std::string_view v) {
    const long long x = text::parse_int(v);
    if (x < 0) throw ParseError("seed must be non-negative: '" + std::string(v) + "'");
    return static_cast<std::uint64_t>(x);
}

std::vector<int> parse_layers(std::string_view v) {
    std::vector<int> widths;
    for (auto tok : text::split(v, ',')) {
        const long long w = text::parse_int(text::trim(tok));
        if (w < 1 || w > 1 << 20) throw ParseError("bad layer width: '" + std::string(tok) + "'");
        widths.push_back(static_cast<int>(w));
    }
    return widths;
}

std::string format_layers(const std::vector<int>& widths) {
    std::string s;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(widths[i]);
    }
    return s;
}

Activation parse_activation(std::string_view v) {
    if (v == "relu") return Activation::relu;
    if (v == "tanh") return Activation::tanh;
    throw ParseError("unknown activation: '" + std::string(v) + "'");
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back({"seed", [](RunConfig& c, std::string_view v) { c.trainer.seed = parse_seed(v); },
                     [](const RunConfig& c) { return std::to_string(c.trainer.seed); }});

        f.push_back({"corpus.seed", [](RunConfig& c, std::string_view v) { c.corpus.seed = parse_seed(v); },
                     [](const RunConfig& c) { return std::to_string(c.corpus.seed); }});
        f.push_back(int_field("corpus.dim", [](RunConfig& c) -> int& { return c.corpus.dim; }));
        for (const char* side : {"source", "target"}) {
            const bool src = std::string_view(side) == "source";
            auto spec = [src](RunConfig& c) -> DomainSpec& { return src ? c.corpus.source : c.corpus.target; };
            const std::string p = std::string("corpus.") + side + ".";
            f.push_back(int_field(p + "identities", [spec](RunConfig& c) -> int& { return spec(c).identities; }));
            f.push_back(int_field(p + "samples_per_identity",
                                  [spec](RunConfig& c) -> int& { return spec(c).samples_per_identity; }));
            f.push_back(real_field(p + "spread", [spec](RunConfig& c) -> double& { return spec(c).spread; }));
            f.push_back(
                real_field(p + "separation", [spec](RunConfig& c) -> double& { return spec(c).separation; }));
        }
        f.push_back(real_field("corpus.shift.anisotropy",
                               [](RunConfig& c) -> double& { return c.corpus.shift_anisotropy; }));
        f.push_back(real_field("corpus.shift.translation",
                               [](RunConfig& c) -> double& { return c.corpus.shift_translation; }));
        f.push_back(
            real_field("corpus.hard_fraction", [](RunConfig& c) -> double& { return c.corpus.hard_fraction; }));
        f.push_back(
            real_field("corpus.hard_overlap", [](RunConfig& c) -> double& { return c.corpus.hard_overlap; }));
        f.push_back(int_field("corpus.query_per_identity",
                              [](RunConfig& c) -> int& { return c.corpus.query_per_identity; }));
        f.push_back(int_field("corpus.gallery_per_identity",
                              [](RunConfig& c) -> int& { return c.corpus.gallery_per_identity; }));
        f.push_back(real_field("corpus.eval_hard_fraction",
                               [](RunConfig& c) -> double& { return c.corpus.eval_hard_fraction; }));

        f.push_back(real_field("trainer.rho", [](RunConfig& c) -> double& { return c.trainer.rho; }));
        f.push_back(real_field("trainer.alpha", [](RunConfig& c) -> double& { return c.trainer.alpha; }));
        f.push_back(
            real_field("trainer.beta", [](RunConfig& c) -> double& { return c.trainer.coefficients.beta; }));
        f.push_back(
            real_field("trainer.gamma", [](RunConfig& c) -> double& { return c.trainer.coefficients.gamma; }));
        f.push_back(
            real_field("trainer.delta", [](RunConfig& c) -> double& { return c.trainer.coefficients.delta; }));
        f.push_back(real_field("trainer.tau", [](RunConfig& c) -> double& { return c.trainer.tau; }));
        f.push_back({"trainer.fdl_enabled",
                     [](RunConfig& c, std::string_view v) { c.trainer.fdl_enabled = text::parse_bool(v); },
                     [](const RunConfig& c) { return std::string(c.trainer.fdl_enabled ? "true" : "false"); }});
        f.push_back(
            real_field("trainer.lr_initial", [](RunConfig& c) -> double& { return c.trainer.lr_initial; }));
        f.push_back(
            int_field("trainer.lr_decay_every", [](RunConfig& c) -> int& { return c.trainer.lr_decay_every; }));
        f.push_back(real_field("trainer.lr_decay_factor",
                               [](RunConfig& c) -> double& { return c.trainer.lr_decay_factor; }));
        f.push_back(
            int_field("trainer.epochs_total", [](RunConfig& c) -> int& { return c.trainer.epochs_total; }));
        f.push_back(
            int_field("trainer.pretrain_epochs", [](RunConfig& c) -> int& { return c.trainer.pretrain_epochs; }));
        f.push_back(int_field("trainer.batch_identities",
                              [](RunConfig& c) -> int& { return c.trainer.batch_identities; }));
        f.push_back(
            int_field("trainer.batch_instances", [](RunConfig& c) -> int& { return c.trainer.batch_instances; }));

        f.push_back(real_field("clustering.eps", [](RunConfig& c) -> double& { return c.trainer.clustering.eps; }));
        f.push_back(
            int_field("clustering.min_pts", [](RunConfig& c) -> int& { return c.trainer.clustering.min_pts; }));
        f.push_back(real_field("clustering.eps_retry_factor",
                               [](RunConfig& c) -> double& { return c.trainer.eps_retry_factor; }));

        f.push_back({"model.layers",
                     [](RunConfig& c, std::string_view v) { c.trainer.layers = parse_layers(v); },
                     [](const RunConfig& c) { return format_layers(c.trainer.layers); }});
        f.push_back({"model.activation",
                     [](RunConfig& c, std::string_view v) { c.trainer.activation = parse_activation(v); },
                     [](const RunConfig& c) {
                         return std::string(c.trainer.activation == Activation::relu ? "relu" : "tanh");
                     }});

        f.push_back({"report.max_logged_ids",
                     [](RunConfig& c, std::string_view v) {
                         const long long x = text::parse_int(v);
                         if (x < 0) throw ParseError("must be >= 0");
                         c.max_logged_ids = static_cast<std::size_t>(x);
                     },
                     [](const RunConfig& c) { return std::to_string(c.max_logged_ids); }});
        return f;
    }();
    return table;
}

const Field* find_field(std::string_view key) {
    for (const auto& f : fields()) {
        if (f.key == key) return &f;
    }
    return nullptr;
}

}  // namespace

void set_field(RunConfig& config, const std::string& key, const std::string& value) {
    const Field* f = find_field(key);
    if (!f) throw ConfigError("unknown config key '" + key + "'");
    try {
        f->set(config, text::trim(value));
    } catch (const ParseError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

void validate(const RunConfig& config) {
    validate(config.corpus);
    validate(config.trainer);
    if (config.trainer.batch_identities > config.corpus.source.identities) {
        throw ConfigError("trainer.batch_identities exceeds corpus.source.identities");
    }
}

RunConfig parse_config(std::istream& in) {
    RunConfig config;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = text::trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key(text::trim(body.substr(0, eq)));
        if (!seen.insert(key).second) throw ConfigError("duplicate config key '" + key + "'");
        set_field(config, key, std::string(body.substr(eq + 1)));
    }
    validate(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& config) {
    for (const auto& f : fields()) out << f.key << '=' << f.get(config) << '\n';
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.push_back(f.key);
    return keys;
}

const std::vector<std::string>& sweepable_params() {
    static const std::vector<std::string> names{"rho", "delta", "fdl_enabled", "alpha", "eps"};
    return names;
}

std::string sweep_key(const std::string& param) {
    static const std::map<std::string, std::string> keys{{"rho", "trainer.rho"},
                                                         {"delta", "trainer.delta"},
                                                         {"fdl_enabled", "trainer.fdl_enabled"},
                                                         {"alpha", "trainer.alpha"},
                                                         {"eps", "clustering.eps"}};
    const auto it = keys.find(param);
    return it == keys.end() ? std::string() : it->second;
}

}  // namespace fdlsd::cli
