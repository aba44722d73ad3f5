#pragma once

// Run configuration, file helpers and JSON/CSV serialisation shared by the CLI
// and the Python bindings.

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "anosov/common.hpp"
#include "anosov/escape.hpp"
#include "anosov/fbi.hpp"
#include "anosov/orbits.hpp"
#include "anosov/resonance.hpp"
#include "anosov/zeta.hpp"

namespace anosov::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = ANOSOV_VERSION;
inline constexpr int kSchemaVersion = 1;

/// Allowed keys per section.
using Schema = std::map<std::string, std::set<std::string>>;
[[nodiscard]] const Schema& default_schema();

/// INI-style text: "[section]" headers, "key = value" lines, '#' comments.
struct RunConfig {
    std::map<std::string, std::map<std::string, std::string>> values;

    [[nodiscard]] bool has(const std::string& sec, const std::string& key) const;
    [[nodiscard]] std::string get_string(const std::string& sec, const std::string& key, const std::string& def) const;
    [[nodiscard]] double get_double(const std::string& sec, const std::string& key, double def) const;
    [[nodiscard]] std::int64_t get_int(const std::string& sec, const std::string& key, std::int64_t def) const;
    [[nodiscard]] std::vector<double> get_list(const std::string& sec, const std::string& key,
                                               const std::vector<double>& def) const;
    void set(const std::string& sec, const std::string& key, const std::string& value);
    [[nodiscard]] Json to_json() const;
};

/// Throws ConfigParse on syntax errors, unknown sections or unknown keys.
[[nodiscard]] RunConfig parse_config(const std::string& text, const Schema& schema = default_schema());
[[nodiscard]] RunConfig load_config(const std::string& path, const Schema& schema = default_schema());

[[nodiscard]] std::vector<double> parse_list(const std::string& text);

[[nodiscard]] std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Shortest round-trip decimal form; locale independent.
[[nodiscard]] std::string format_double(double v);

// ---- models from configuration ------------------------------------------------

[[nodiscard]] bool is_fuchsian(const RunConfig& cfg);
[[nodiscard]] orbits::SuspensionModel suspension_model(const RunConfig& cfg);
[[nodiscard]] orbits::FuchsianModel fuchsian_model(const RunConfig& cfg);
[[nodiscard]] orbits::OrbitCatalog catalog_from_config(const RunConfig& cfg);
[[nodiscard]] escape::EscapeParams escape_params(const RunConfig& cfg);

// ---- JSON ---------------------------------------------------------------------

[[nodiscard]] Json catalog_to_json(const orbits::OrbitCatalog& cat);
[[nodiscard]] orbits::OrbitCatalog catalog_from_json(const Json& j);

[[nodiscard]] Json resonances_to_json(const std::vector<zeta::ResonanceValue>& res);
[[nodiscard]] Json resonances_to_json(const std::vector<resonance::Resonance>& res);
[[nodiscard]] std::vector<zeta::ResonanceValue> resonances_from_json(const Json& j);

[[nodiscard]] Json order_fit_to_json(const resonance::OrderFit& fit);
[[nodiscard]] Json scan_report_to_json(const escape::ScanReport& r);
[[nodiscard]] Json error_to_json(const std::string& code, const std::string& message);

// ---- FBI tables -----------------------------------------------------------------

/// Rows "x,xi,re,im,abs" with one header line.
[[nodiscard]] std::string fbi_to_csv(const fbi::FbiGrid& grid, const fbi::PhaseSpaceArray& T);
/// Inverse of fbi_to_csv; h and variant are not part of the table and must be supplied.
void fbi_from_csv(const std::string& text, double h, fbi::Variant v, fbi::FbiGrid& grid, fbi::PhaseSpaceArray& T);

}  // namespace anosov::io
