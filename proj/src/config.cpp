#include "ou/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ou/field_ops.hpp"

namespace ou {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "model.N", "model.Q", "model.B", "model.s",
        "grid.L", "grid.n",
        "set.kind", "set.period", "set.width", "set.cell_side", "set.keep_prob",
        "set.seed",
        "run.T", "run.times", "run.noise_levels", "run.seeds", "run.slack",
        "run.trials", "run.eps", "run.bound_M", "run.p", "run.gamma",
        "run.alpha_grid", "run.cg_max", "run.cg_tol", "run.noise", "run.alpha",
        "run.seed", "run.kernel_quad_points", "run.upsample", "run.interp",
        "run.quad_tol", "run.k_cap", "run.time_samples", "run.sphere_samples",
        "output.dir", "output.formats",
    };
    return keys;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_string(ss.str());
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
}

std::string ExperimentConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

double ExperimentConfig::get_real(const std::string& key,
                                  std::optional<double> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing config key '" + key + "'");
    }
    return parse_real(key, it->second);
}

int ExperimentConfig::get_int(const std::string& key, std::optional<int> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing config key '" + key + "'");
    }
    const double v = parse_real(key, it->second);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config key '" + key + "': expected an integer");
    return i;
}

std::uint64_t ExperimentConfig::get_seed(const std::string& key,
                                         std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a nonnegative integer");
    }
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::vector<double> ExperimentConfig::get_reals(
    const std::string& key, std::optional<std::vector<double>> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing config key '" + key + "'");
    }
    std::vector<double> out;
    std::istringstream is(it->second);
    std::string token;
    while (is >> token) out.push_back(parse_real(key, token));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<std::uint64_t> ExperimentConfig::get_seeds(
    const std::string& key, std::vector<std::uint64_t> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::uint64_t> out;
    std::istringstream is(it->second);
    std::string token;
    while (is >> token) {
        try {
            out.push_back(std::stoull(token));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': expected integers");
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

OUModel ExperimentConfig::model() const {
    const int N = get_int("model.N");
    if (N != 1 && N != 2) throw ConfigError("config key 'model.N': must be 1 or 2");
    const std::vector<double> q = get_reals("model.Q");
    const std::vector<double> b = get_reals("model.B");
    if (static_cast<int>(q.size()) != N * N)
        throw ConfigError("config key 'model.Q': expected " + std::to_string(N * N) +
                          " row-major entries");
    if (static_cast<int>(b.size()) != N * N)
        throw ConfigError("config key 'model.B': expected " + std::to_string(N * N) +
                          " row-major entries");
    Eigen::MatrixXd Q(N, N), B(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            Q(i, j) = q[i * N + j];
            B(i, j) = b[i * N + j];
        }
    return OUModel(Q, B, get_real("model.s", 1.0));
}

GridSpec ExperimentConfig::grid(const OUModel& m) const {
    const int n = get_int("grid.n", 256);
    const std::string L_raw = get_string("grid.L", "auto");
    double L;
    if (L_raw == "auto") {
        L = auto_half_width(m, get_real("run.T", 1.0));
    } else {
        L = parse_real("grid.L", L_raw);
    }
    return GridSpec(m.dim(), L, n);
}

ThickSetSpec ExperimentConfig::observation_set() const {
    const std::string kind = get_string("set.kind", "full");
    if (kind == "full") return ThickSetSpec::all();
    if (kind == "periodic_slabs")
        return ThickSetSpec::slabs(get_real("set.period", 1.0), get_real("set.width", 0.5));
    if (kind == "periodic_cubes")
        return ThickSetSpec::cubes(get_real("set.period", 1.0), get_real("set.width", 0.5));
    if (kind == "bernoulli_cells")
        return ThickSetSpec::bernoulli(get_real("set.cell_side", 0.25),
                                       get_real("set.keep_prob", 0.5),
                                       get_seed("set.seed", 0));
    throw ConfigError("config key 'set.kind': unknown kind '" + kind + "'");
}

PropagatorConfig ExperimentConfig::propagator() const {
    PropagatorConfig cfg;
    cfg.quad_tol = get_real("run.quad_tol", 1e-10);
    cfg.kernel_quad_points = get_int("run.kernel_quad_points", 64);
    cfg.upsample = get_int("run.upsample", 8);
    const std::string interp = get_string("run.interp", "cubic-spline");
    if (interp == "nearest")
        cfg.interp = InterpKind::nearest;
    else if (interp == "linear")
        cfg.interp = InterpKind::linear;
    else if (interp == "cubic-spline" || interp == "cubic")
        cfg.interp = InterpKind::cubic;
    else
        throw ConfigError("config key 'run.interp': unknown kind '" + interp + "'");
    return cfg;
}

// ---- JSON writer ----------------------------------------------------------

std::string JsonWriter::number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void JsonWriter::comma() {
    if (need_comma_) out_ += ",";
    out_ += "\n";
}

JsonWriter& JsonWriter::begin_object() {
    out_ += "{";
    need_comma_ = false;
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += "\n}";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::begin_array(const std::string& key) {
    comma();
    out_ += "  \"" + key + "\": [";
    need_comma_ = false;
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += "]";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, double v) {
    comma();
    out_ += "  \"" + key + "\": " + number(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, int v) {
    comma();
    out_ += "  \"" + key + "\": " + std::to_string(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, std::uint64_t v) {
    comma();
    out_ += "  \"" + key + "\": " + std::to_string(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, bool v) {
    comma();
    out_ += "  \"" + key + "\": " + (v ? "true" : "false");
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, const std::string& v) {
    comma();
    out_ += "  \"" + key + "\": \"" + v + "\"";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, const std::vector<double>& v) {
    comma();
    out_ += "  \"" + key + "\": [";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out_ += ", ";
        out_ += number(v[i]);
    }
    out_ += "]";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::element(double v) {
    if (need_comma_) out_ += ", ";
    out_ += number(v);
    need_comma_ = true;
    return *this;
}

}  // namespace ou
