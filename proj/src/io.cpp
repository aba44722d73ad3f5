#include "anosov/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace anosov::io {

const Schema& default_schema() {
    static const Schema schema{
        {"model", {"type", "map", "roof", "potential", "generators", "max_word_len"}},
        {"numerics",
         {"horizon", "tol", "det_order", "anchor", "k_max", "quad_points", "min_diameter", "samples", "radius_min",
          "grid_per_cell", "K", "order_samples", "threads"}},
        {"experiment",
         {"box",    "radii",         "eps_list", "z",         "R",       "m",         "mode",     "lambdas",
          "delta",  "T0",            "T1",       "A",         "gamma",   "gamma1",    "cutoff_radius",
          "kappa_s", "kappa_0",      "bracket_stride", "dt",  "s",       "c",         "h",        "L",
          "variant", "x_range",      "xi_range", "n_xi",      "exponent", "threshold", "jumps",   "kinks",
          "control", "seed",         "J"}},
    };
    return schema;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::ConfigParse, "'" + what + "' is not a number: '" + s + "'");
    }
    return v;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) out.push_back(to_double(item, "list entry"));
    return out;
}

bool RunConfig::has(const std::string& sec, const std::string& key) const {
    const auto it = values.find(sec);
    return it != values.end() && it->second.count(key) > 0;
}

std::string RunConfig::get_string(const std::string& sec, const std::string& key, const std::string& def) const {
    return has(sec, key) ? values.at(sec).at(key) : def;
}

double RunConfig::get_double(const std::string& sec, const std::string& key, double def) const {
    return has(sec, key) ? to_double(values.at(sec).at(key), sec + "." + key) : def;
}

std::int64_t RunConfig::get_int(const std::string& sec, const std::string& key, std::int64_t def) const {
    if (!has(sec, key)) return def;
    const std::string t = trim(values.at(sec).at(key));
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw Error(ErrorCode::ConfigParse, "'" + sec + "." + key + "' is not an integer");
    }
    return v;
}

std::vector<double> RunConfig::get_list(const std::string& sec, const std::string& key,
                                        const std::vector<double>& def) const {
    if (!has(sec, key)) return def;
    try {
        return parse_list(values.at(sec).at(key));
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigParse, "'" + sec + "." + key + "': " + e.what());
    }
}

void RunConfig::set(const std::string& sec, const std::string& key, const std::string& value) {
    values[sec][key] = value;
}

Json RunConfig::to_json() const {
    Json j = Json::object();
    for (const auto& [sec, kv] : values) {
        Json s = Json::object();
        for (const auto& [k, v] : kv) s[k] = v;
        j[sec] = s;
    }
    return j;
}

RunConfig parse_config(const std::string& text, const Schema& schema) {
    RunConfig cfg;
    std::string section;
    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw Error(ErrorCode::ConfigParse, where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!schema.count(section)) throw Error(ErrorCode::ConfigParse, where + ": unknown section '" + section + "'");
            cfg.values[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ConfigParse, where + ": expected key = value");
        if (section.empty()) throw Error(ErrorCode::ConfigParse, where + ": key outside of a section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error(ErrorCode::ConfigParse, where + ": empty key");
        if (!schema.at(section).count(key)) {
            throw Error(ErrorCode::ConfigParse, where + ": unknown key '" + key + "' in [" + section + "]");
        }
        if (cfg.has(section, key)) throw Error(ErrorCode::ConfigParse, where + ": duplicate key '" + key + "'");
        cfg.values[section][key] = value;
    }
    return cfg;
}

RunConfig load_config(const std::string& path, const Schema& schema) { return parse_config(read_file(path), schema); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

bool is_fuchsian(const RunConfig& cfg) {
    const std::string t = cfg.get_string("model", "type", "cat");
    if (t == "cat" || t == "cat-suspension") return false;
    if (t == "fuchsian" || t == "geodesic") return true;
    throw Error(ErrorCode::ConfigParse, "model.type must be 'cat' or 'fuchsian'");
}

orbits::SuspensionModel suspension_model(const RunConfig& cfg) {
    const auto m = cfg.get_list("model", "map", {2, 1, 1, 1});
    if (m.size() != 4) throw Error(ErrorCode::ConfigParse, "model.map needs four integers");
    std::array<std::int64_t, 4> e{};
    for (std::size_t i = 0; i < 4; ++i) {
        if (m[i] != std::floor(m[i]) || std::abs(m[i]) > 1e15) {
            throw Error(ErrorCode::ConfigParse, "model.map entries must be integers");
        }
        e[i] = static_cast<std::int64_t>(m[i]);
    }
    orbits::SuspensionModel model;
    model.map = orbits::validate_cat_map(e[0], e[1], e[2], e[3]);
    model.roof = cfg.get_double("model", "roof", 1.0);
    model.potential_const = cfg.get_double("model", "potential", 0.0);
    return model;
}

orbits::FuchsianModel fuchsian_model(const RunConfig& cfg) {
    orbits::FuchsianModel model;
    const std::string g = cfg.get_string("model", "generators", "");
    std::stringstream ss(g);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (trim(item).empty()) continue;
        std::vector<double> v;
        try {
            v = parse_list(item);
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigParse, std::string("model.generators: ") + e.what());
        }
        if (v.size() != 4) throw Error(ErrorCode::ConfigParse, "each generator needs four entries");
        model.generators.push_back({v[0], v[1], v[2], v[3]});
    }
    model.max_word_len = static_cast<int>(cfg.get_int("model", "max_word_len", 6));
    model.potential_const = cfg.get_double("model", "potential", 0.0);
    return model;
}

orbits::OrbitCatalog catalog_from_config(const RunConfig& cfg) {
    if (is_fuchsian(cfg)) {
        return orbits::enumerate_geodesic_orbits(fuchsian_model(cfg), cfg.get_double("numerics", "horizon", 8.0));
    }
    return orbits::enumerate_suspension_orbits(suspension_model(cfg), cfg.get_double("numerics", "horizon", 30.0));
}

escape::EscapeParams escape_params(const RunConfig& cfg) {
    escape::EscapeParams p;
    p.delta = cfg.get_double("experiment", "delta", p.delta);
    p.T0 = cfg.get_double("experiment", "T0", p.T0);
    p.T1 = cfg.get_double("experiment", "T1", p.T1);
    p.A_const = cfg.get_double("experiment", "A", p.A_const);
    p.gamma = cfg.get_double("experiment", "gamma", p.gamma);
    p.gamma1 = cfg.get_double("experiment", "gamma1", p.gamma1);
    p.cutoff_radius = cfg.get_double("experiment", "cutoff_radius", p.cutoff_radius);
    escape::validate_params(p);
    return p;
}

Json catalog_to_json(const orbits::OrbitCatalog& cat) {
    Json j;
    j["model_id"] = cat.model_id;
    j["horizon_T"] = cat.horizon_T;
    j["complete"] = cat.complete;
    j["topological_entropy_estimate"] = cat.topological_entropy_estimate;
    j["potential_const"] = cat.potential_const;
    j["tail_model"] = cat.tail_model == orbits::TailModel::Lattice ? "lattice" : "none";
    j["length_quantum"] = cat.length_quantum;
    j["word_length_horizon"] = cat.word_length_horizon;
    Json entries = Json::array();
    for (const auto& o : cat.orbits) {
        entries.push_back({{"T", o.length},
                           {"T_prim", o.primitive_length},
                           {"intV", o.potential_integral},
                           {"log_det", o.log_det_factor},
                           {"mult", o.multiplicity}});
    }
    j["entries"] = entries;
    return j;
}

orbits::OrbitCatalog catalog_from_json(const Json& j) {
    try {
        orbits::OrbitCatalog cat;
        cat.model_id = j.at("model_id").get<std::string>();
        cat.horizon_T = j.at("horizon_T").get<double>();
        cat.complete = j.at("complete").get<bool>();
        cat.topological_entropy_estimate = j.value("topological_entropy_estimate", 0.0);
        cat.potential_const = j.value("potential_const", 0.0);
        cat.tail_model = j.value("tail_model", std::string("none")) == "lattice" ? orbits::TailModel::Lattice
                                                                                 : orbits::TailModel::None;
        cat.length_quantum = j.value("length_quantum", 0.0);
        cat.word_length_horizon = j.value("word_length_horizon", 0);
        for (const auto& e : j.at("entries")) {
            orbits::PeriodicOrbit o;
            o.length = e.at("T").get<double>();
            o.primitive_length = e.at("T_prim").get<double>();
            o.potential_integral = e.at("intV").get<double>();
            o.log_det_factor = e.at("log_det").get<double>();
            o.multiplicity = e.at("mult").get<std::int64_t>();
            cat.orbits.push_back(o);
        }
        return cat;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("malformed catalog JSON: ") + e.what());
    }
}

Json resonances_to_json(const std::vector<zeta::ResonanceValue>& res) {
    Json a = Json::array();
    for (const auto& r : res) a.push_back({{"re", r.value.real()}, {"im", r.value.imag()}, {"mult", r.multiplicity}});
    return a;
}

Json resonances_to_json(const std::vector<resonance::Resonance>& res) {
    Json a = Json::array();
    for (const auto& r : res) {
        a.push_back(
            {{"re", r.value.real()}, {"im", r.value.imag()}, {"mult", r.multiplicity}, {"residual", r.residual}});
    }
    return a;
}

std::vector<zeta::ResonanceValue> resonances_from_json(const Json& j) {
    try {
        const Json& arr = j.is_object() ? j.at("resonances") : j;
        std::vector<zeta::ResonanceValue> out;
        for (const auto& e : arr) {
            out.push_back({Complex(e.at("re").get<double>(), e.at("im").get<double>()), e.value("mult", 1)});
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("malformed resonance JSON: ") + e.what());
    }
}

Json order_fit_to_json(const resonance::OrderFit& fit) {
    return {{"rho", fit.rho},
            {"r_squared", fit.r_squared},
            {"loglog_slope", fit.loglog_slope},
            {"loglog_r_squared", fit.loglog_r_squared},
            {"radii", fit.radii},
            {"log_log_max", fit.log_log_max},
            {"excluded_radii", fit.excluded_radii}};
}

Json scan_report_to_json(const escape::ScanReport& r) {
    return {{"samples", r.samples},
            {"checked_i", r.checked_i},
            {"checked_ii", r.checked_ii},
            {"violations_i", r.violations_i},
            {"violations_ii", r.violations_ii},
            {"worst_margin_i", r.worst_margin_i},
            {"worst_margin_ii", r.worst_margin_ii},
            {"fitted_c_i", r.fitted_c_i},
            {"fitted_c_ii", r.fitted_c_ii},
            {"fitted_c", r.fitted_c},
            {"bracket_checks", r.bracket_checks},
            {"max_bracket_gap", r.max_bracket_gap}};
}

Json error_to_json(const std::string& code, const std::string& message) {
    return {{"error", code}, {"message", message}, {"tool_version", kToolVersion}};
}

std::string fbi_to_csv(const fbi::FbiGrid& grid, const fbi::PhaseSpaceArray& T) {
    std::string out = "x,xi,re,im,abs\n";
    for (std::size_t i = 0; i < T.nx; ++i) {
        for (std::size_t j = 0; j < T.nxi; ++j) {
            const Complex v = T.at(i, j);
            out += format_double(grid.x_nodes[i]) + ',' + format_double(grid.xi_nodes[j]) + ',' +
                   format_double(v.real()) + ',' + format_double(v.imag()) + ',' + format_double(std::abs(v)) + '\n';
        }
    }
    return out;
}

void fbi_from_csv(const std::string& text, double h, fbi::Variant v, fbi::FbiGrid& grid, fbi::PhaseSpaceArray& T) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line) || trim(line) != "x,xi,re,im,abs") {
        throw Error(ErrorCode::IoError, "FBI table must start with the header x,xi,re,im,abs");
    }
    std::vector<std::array<double, 4>> rows;
    while (std::getline(ss, line)) {
        if (trim(line).empty()) continue;
        std::vector<double> f;
        try {
            f = parse_list(line);
        } catch (const Error&) {
            throw Error(ErrorCode::IoError, "malformed FBI row: " + line);
        }
        if (f.size() != 5) throw Error(ErrorCode::IoError, "FBI rows need five fields");
        rows.push_back({f[0], f[1], f[2], f[3]});
    }
    if (rows.empty()) throw Error(ErrorCode::IoError, "empty FBI table");
    grid = fbi::FbiGrid{};
    grid.h = h;
    grid.variant = v;
    // Rows are x-major; the first run of equal x gives the frequency list.
    for (const auto& r : rows) {
        if (r[0] != rows.front()[0]) break;
        grid.xi_nodes.push_back(r[1]);
    }
    const std::size_t nxi = grid.xi_nodes.size();
    if (rows.size() % nxi != 0) throw Error(ErrorCode::IoError, "FBI table is not a full grid");
    const std::size_t nx = rows.size() / nxi;
    T.nx = nx;
    T.nxi = nxi;
    T.data.resize(rows.size());
    for (std::size_t i = 0; i < nx; ++i) {
        grid.x_nodes.push_back(rows[i * nxi][0]);
        for (std::size_t j = 0; j < nxi; ++j) {
            const auto& r = rows[i * nxi + j];
            if (r[0] != grid.x_nodes[i] || r[1] != grid.xi_nodes[j]) {
                throw Error(ErrorCode::IoError, "FBI table is not a full x-major grid");
            }
            T.at(i, j) = Complex(r[2], r[3]);
        }
    }
}

}  // namespace anosov::io
