// Command-line front end. Every subcommand writes one JSON document (or a CSV
// table plus a JSON sidecar) that carries the resolved configuration and the
// tool version; failures print a JSON error to stderr and exit nonzero.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <sstream>

#include "anosov/escape.hpp"
#include "anosov/fbi.hpp"
#include "anosov/io.hpp"
#include "anosov/orbits.hpp"
#include "anosov/resonance.hpp"
#include "anosov/spectra.hpp"
#include "anosov/zeta.hpp"

using namespace anosov;
using io::Json;

namespace {

struct Common {
    std::string config_path;
    std::string out_path;
    int threads = 1;
    std::int64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "configuration file");
    sub->add_option("--out", c.out_path, "output file (stdout when omitted)");
    sub->add_option("--threads", c.threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", c.seed, "offset of the low-discrepancy sequence")->check(CLI::NonNegativeNumber);
}

io::RunConfig load(const Common& c) {
    if (c.config_path.empty()) return {};
    return io::load_config(c.config_path);
}

Json envelope(const std::string& sub, const io::RunConfig& cfg, Json arguments) {
    Json j;
    j["tool_version"] = io::kToolVersion;
    j["schema_version"] = io::kSchemaVersion;
    j["subcommand"] = sub;
    j["config"] = cfg.to_json();
    j["arguments"] = std::move(arguments);
    return j;
}

void emit(const Common& c, const std::string& text) {
    if (c.out_path.empty()) {
        std::cout << text;
    } else {
        io::write_file(c.out_path, text);
    }
}

void emit_json(const Common& c, const Json& j) { emit(c, j.dump(2) + "\n"); }

Complex parse_complex(const std::string& s) {
    const auto v = io::parse_list(s);
    if (v.size() == 1) return {v[0], 0.0};
    if (v.size() == 2) return {v[0], v[1]};
    throw Error(ErrorCode::InvalidArgument, "expected RE or RE,IM but got '" + s + "'");
}

std::vector<Complex> parse_complex_list(const std::string& s) {
    std::vector<Complex> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (!item.empty()) out.push_back(parse_complex(item));
    }
    return out;
}

Json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

orbits::OrbitCatalog catalog_arg(const std::string& path, const io::RunConfig& cfg) {
    if (!path.empty()) return io::catalog_from_json(Json::parse(io::read_file(path)));
    return io::catalog_from_config(cfg);
}

std::vector<zeta::ResonanceValue> resonances_arg(const std::string& path, const io::RunConfig& cfg,
                                                 const orbits::OrbitCatalog* cat) {
    if (!path.empty()) {
        try {
            return io::resonances_from_json(Json::parse(io::read_file(path)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::IoError, std::string("cannot parse resonance file: ") + e.what());
        }
    }
    const int k_max = static_cast<int>(cfg.get_int("numerics", "k_max", 200));
    const double c = cat ? cat->potential_const : cfg.get_double("model", "potential", 0.0);
    const double roof = cat && cat->length_quantum > 0 ? cat->length_quantum : cfg.get_double("model", "roof", 1.0);
    return zeta::cat_resonances(k_max, c, roof);
}

std::string sidecar_path(const std::string& out) { return out + ".meta.json"; }

fbi::GevreySignal signal_from(double s, double c, int L, const std::vector<double>& jumps,
                              const std::vector<double>& kinks) {
    auto u = fbi::make_gevrey_signal(s, c, L);
    for (double x0 : jumps) u.singularities.push_back({fbi::Singularity::Kind::Jump, x0, 1.0});
    for (double x0 : kinks) u.singularities.push_back({fbi::Singularity::Kind::Kink, x0, 1.0});
    return u;
}

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigParse: return 2;
        case ErrorCode::IoError: return 3;
        default: return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral toolkit for model Anosov flows"};
    app.set_help_flag("--help", "print help");
    app.set_version_flag("--version", std::string(io::kToolVersion));
    app.require_subcommand(1, 1);
    Common com;

    // orbits
    auto* s_orbits = app.add_subcommand("orbits", "enumerate the periodic-orbit catalog");
    add_common(s_orbits, com);
    std::optional<double> horizon;
    s_orbits->add_option("--horizon", horizon, "length horizon T");

    // zeta-eval
    auto* s_zeta = app.add_subcommand("zeta-eval", "evaluate log zeta, log Ruelle zeta, trace moments or det_m");
    add_common(s_zeta, com);
    std::string catalog_path, resonance_path, z_text = "2", mode = "direct", anchor_text = "10";
    int m_order = 4;
    s_zeta->add_option("--catalog", catalog_path, "catalog JSON (default: enumerate from config)");
    s_zeta->add_option("--z", z_text, "evaluation point RE,IM");
    s_zeta->add_option("--m", m_order, "trace or determinant order");
    s_zeta->add_option("--mode", mode, "direct|ruelle|trace|detm")
        ->check(CLI::IsMember({"direct", "ruelle", "trace", "detm"}));
    s_zeta->add_option("--resonances", resonance_path, "resonance list JSON for detm");
    s_zeta->add_option("--anchor", anchor_text, "anchor point for detm");

    // zeros
    auto* s_zeros = app.add_subcommand("zeros", "locate zeros of the truncated determinant in a box");
    add_common(s_zeros, com);
    std::string box_text = "-1,1,-30,30";
    double tol = 1e-10;
    s_zeros->add_option("--catalog", catalog_path, "catalog JSON");
    s_zeros->add_option("--box", box_text, "re_min,re_max,im_min,im_max");
    s_zeros->add_option("--tol", tol, "root tolerance");

    // nr
    auto* s_nr = app.add_subcommand("nr", "count resonances in a disk");
    add_common(s_nr, com);
    double radius = 10.0;
    s_nr->add_option("--resonances", resonance_path, "resonance list JSON")->required();
    s_nr->add_option("--R", radius, "disk radius");

    // order
    auto* s_order = app.add_subcommand("order", "growth order of the det_m representation");
    add_common(s_order, com);
    std::string radii_text;
    std::string control;
    s_order->add_option("--radii", radii_text, "comma separated radii");
    s_order->add_option("--catalog", catalog_path, "catalog JSON");
    s_order->add_option("--resonances", resonance_path, "resonance list JSON");
    s_order->add_option("--m", m_order, "determinant order");
    s_order->add_option("--anchor", anchor_text, "anchor point");
    s_order->add_option("--control", control, "exp|exp2: fit a control function instead")
        ->check(CLI::IsMember({"exp", "exp2"}));

    // traces-check
    auto* s_traces = app.add_subcommand("traces-check", "orbit side vs spectral side of the trace formula");
    add_common(s_traces, com);
    int J = 500;
    s_traces->add_option("--catalog", catalog_path, "catalog JSON");
    s_traces->add_option("--z", z_text, "evaluation point");
    s_traces->add_option("--m", m_order, "moment order (>= 2)");
    s_traces->add_option("--J", J, "spectral truncation");

    // detm-check
    auto* s_detm = app.add_subcommand("detm-check", "det_m reconstruction vs the closed form");
    add_common(s_detm, com);
    std::string lambdas_text = "1,0;1,3;-0.5,6";
    s_detm->add_option("--lambdas", lambdas_text, "points RE,IM separated by ';'");
    s_detm->add_option("--catalog", catalog_path, "catalog JSON");
    s_detm->add_option("--resonances", resonance_path, "resonance list JSON");
    s_detm->add_option("--m", m_order, "determinant order");
    s_detm->add_option("--anchor", anchor_text, "anchor point");

    // escape-check
    auto* s_escape = app.add_subcommand("escape-check", "property scan of the escape function");
    add_common(s_escape, com);
    std::optional<std::int64_t> samples;
    std::optional<double> radius_min;
    s_escape->add_option("--samples", samples, "number of samples");
    s_escape->add_option("--radius-min", radius_min, "smallest <alpha>");

    // fbi
    auto* s_fbi = app.add_subcommand("fbi", "FBI transform of a Gevrey test signal to CSV");
    add_common(s_fbi, com);
    double g_s = 1.0, g_c = 1.0, g_h = 0.05;
    int g_L = 200, n_xi = 64;
    std::string variant = "flat", x_range = "-1,1", xi_range = "0.05,1";
    std::vector<double> jumps, kinks;
    bool modal = false;
    s_fbi->add_option("--s", g_s, "Gevrey index");
    s_fbi->add_option("--c", g_c, "decay constant");
    s_fbi->add_option("--h", g_h, "semiclassical parameter");
    s_fbi->add_option("--L", g_L, "highest Fourier mode");
    s_fbi->add_option("--variant", variant, "flat|scaled|gabor")->check(CLI::IsMember({"flat", "scaled", "gabor"}));
    s_fbi->add_option("--x-range", x_range, "x_lo,x_hi");
    s_fbi->add_option("--xi-range", xi_range, "xi_lo,xi_hi");
    s_fbi->add_option("--n-xi", n_xi, "number of frequencies");
    s_fbi->add_option("--jump", jumps, "insert a unit jump at x0 (repeatable)");
    s_fbi->add_option("--kink", kinks, "insert a unit kink at x0 (repeatable)");
    s_fbi->add_flag("--modal", modal, "use the mode-by-mode closed form");

    // fbi-fit
    auto* s_fit = app.add_subcommand("fbi-fit", "decay fit of an FBI table");
    add_common(s_fit, com);
    std::string input;
    double exponent = 1.0, threshold = 0.5;
    std::optional<double> in_h;
    s_fit->add_option("--input", input, "CSV from the fbi subcommand")->required();
    s_fit->add_option("--exponent", exponent, "fit exponent (1/s)");
    s_fit->add_option("--h", in_h, "h (default: read from the sidecar)");

    // fbi-wf
    auto* s_wf = app.add_subcommand("fbi-wf", "wavefront detection on an FBI table");
    add_common(s_wf, com);
    s_wf->add_option("--input", input, "CSV from the fbi subcommand")->required();
    s_wf->add_option("--exponent", exponent, "decay exponent (1/s)");
    s_wf->add_option("--threshold", threshold, "relative slope threshold");
    s_wf->add_option("--h", in_h, "h (default: read from the sidecar)");

    // spectra
    auto* s_spec = app.add_subcommand("spectra", "stochastic stability experiment");
    add_common(s_spec, com);
    std::string eps_text;
    std::optional<double> spec_z, spec_R;
    s_spec->add_option("--eps-list", eps_text, "decreasing eps values");
    s_spec->add_option("--z", spec_z, "real base point z >= 10");
    s_spec->add_option("--R", spec_R, "disk radius");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << io::error_to_json("ConfigParse", e.what()).dump() << "\n";
        return 2;
    }

    try {
        set_thread_count(static_cast<unsigned>(com.threads));
        const io::RunConfig cfg = load(com);
        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();

        // Flags given on the command line win over [experiment] / [numerics] entries.
        const auto unset = [&](const char* flag) { return sub->count(flag) == 0; };
        if (name == "zeros") {
            if (unset("--box") && cfg.has("experiment", "box")) box_text = cfg.get_string("experiment", "box", box_text);
            if (unset("--tol")) tol = cfg.get_double("numerics", "tol", tol);
        } else if (name == "fbi") {
            if (unset("--s")) g_s = cfg.get_double("experiment", "s", g_s);
            if (unset("--c")) g_c = cfg.get_double("experiment", "c", g_c);
            if (unset("--h")) g_h = cfg.get_double("experiment", "h", g_h);
            if (unset("--L")) g_L = static_cast<int>(cfg.get_int("experiment", "L", g_L));
            if (unset("--n-xi")) n_xi = static_cast<int>(cfg.get_int("experiment", "n_xi", n_xi));
            if (unset("--variant")) variant = cfg.get_string("experiment", "variant", variant);
            if (unset("--x-range")) x_range = cfg.get_string("experiment", "x_range", x_range);
            if (unset("--xi-range")) xi_range = cfg.get_string("experiment", "xi_range", xi_range);
            if (unset("--jump")) jumps = cfg.get_list("experiment", "jumps", jumps);
            if (unset("--kink")) kinks = cfg.get_list("experiment", "kinks", kinks);
        } else if (name == "fbi-fit" || name == "fbi-wf") {
            if (unset("--exponent")) exponent = cfg.get_double("experiment", "exponent", exponent);
            if (name == "fbi-wf" && unset("--threshold")) threshold = cfg.get_double("experiment", "threshold", threshold);
        }

        if (name == "orbits") {
            const double T = horizon ? *horizon
                                     : cfg.get_double("numerics", "horizon", io::is_fuchsian(cfg) ? 8.0 : 30.0);
            auto c2 = cfg;
            c2.set("numerics", "horizon", io::format_double(T));
            const auto cat = io::catalog_from_config(c2);
            Json j = io::catalog_to_json(cat);
            j["tool_version"] = io::kToolVersion;
            j["schema_version"] = io::kSchemaVersion;
            j["config"] = cfg.to_json();
            j["arguments"] = {{"horizon", T}};
            emit_json(com, j);
        } else if (name == "zeta-eval") {
            const auto cat = catalog_arg(catalog_path, cfg);
            const Complex z = parse_complex(z_text);
            Json args{{"z", complex_json(z)}, {"mode", mode}, {"m", m_order}};
            Json res;
            if (mode == "direct" || mode == "ruelle") {
                const auto v = mode == "direct" ? zeta::log_zeta_direct(cat, z) : zeta::log_ruelle_zeta_direct(cat, z);
                res = {{"quantity", mode == "direct" ? "log_zeta" : "log_ruelle_zeta"},
                       {"value_re", v.value.real()},
                       {"value_im", v.value.imag()},
                       {"tail_bound", v.tail_bound}};
            } else if (mode == "trace") {
                const auto v = zeta::trace_moment(cat, z, m_order);
                res = {{"quantity", "trace_moment"},
                       {"value_re", v.value.real()},
                       {"value_im", v.value.imag()},
                       {"tail_bound", v.tail_bound}};
            } else {
                const Complex anchor = parse_complex(anchor_text);
                zeta::RegDetInput in;
                in.resonances = resonances_arg(resonance_path, cfg, &cat);
                in.det_order = m_order;
                in.anchor = anchor;
                const auto q = zeta::q_polynomial(cat, anchor, m_order);
                const Complex v = zeta::zeta_via_detm(in, q, z);
                const auto det = zeta::regularized_det(in, z);
                args["anchor"] = complex_json(anchor);
                res = {{"quantity", "zeta_via_detm"},
                       {"value_re", v.real()},
                       {"value_im", v.imag()},
                       {"tail_bound", std::numeric_limits<double>::infinity()},
                       {"tail_estimate", det.tail_estimate}};
            }
            Json j = envelope(name, cfg, args);
            j["result"] = res;
            emit_json(com, j);
        } else if (name == "zeros") {
            const auto cat = catalog_arg(catalog_path, cfg);
            const auto b = io::parse_list(box_text);
            if (b.size() != 4) throw Error(ErrorCode::InvalidArgument, "--box needs four numbers");
            const resonance::Box box{b[0], b[1], b[2], b[3]};
            const auto f = zeta::cycle_expansion(cat);
            resonance::LocateOptions opt;
            opt.quad_points = static_cast<int>(cfg.get_int("numerics", "quad_points", opt.quad_points));
            opt.min_diameter = cfg.get_double("numerics", "min_diameter", opt.min_diameter);
            const auto zs = resonance::locate_zeros([&](Complex z) { return f(z); }, box, tol, opt);
            Json j = envelope(name, cfg, {{"box", b}, {"tol", tol}});
            j["resonances"] = io::resonances_to_json(zs);
            emit_json(com, j);
        } else if (name == "nr") {
            const auto rv = resonances_arg(resonance_path, cfg, nullptr);
            std::vector<resonance::Resonance> rs;
            for (const auto& r : rv) rs.push_back({r.value, r.multiplicity, 0.0});
            Json j = envelope(name, cfg, {{"R", radius}});
            j["count"] = resonance::counting_function(rs, radius);
            emit_json(com, j);
        } else if (name == "order") {
            std::vector<double> radii = radii_text.empty() ? cfg.get_list("experiment", "radii", {})
                                                           : io::parse_list(radii_text);
            if (radii.empty()) {
                for (double R = 5; R <= 50; R += 5) radii.push_back(R);
            }
            const int samples_per_circle = static_cast<int>(cfg.get_int("numerics", "order_samples", 512));
            Json args{{"radii", radii}, {"m", m_order}};
            resonance::OrderFit fit;
            if (!control.empty()) {
                const resonance::LogModulusEvaluator lf = control == "exp"
                                                               ? resonance::LogModulusEvaluator([](Complex z) { return z.real(); })
                                                               : resonance::LogModulusEvaluator([](Complex z) { return (z * z).real(); });
                fit = resonance::order_estimate(lf, radii, samples_per_circle);
                args["control"] = control;
            } else {
                const auto cat = catalog_arg(catalog_path, cfg);
                const Complex anchor = parse_complex(anchor_text);
                zeta::RegDetInput in;
                in.resonances = resonances_arg(resonance_path, cfg, &cat);
                in.det_order = m_order;
                in.anchor = anchor;
                const auto q = zeta::q_polynomial(cat, anchor, m_order);
                const resonance::LogModulusEvaluator lf = [&](Complex z) {
                    return zeta::log_abs_zeta_via_detm(in, q, z);
                };
                fit = resonance::order_estimate(lf, radii, samples_per_circle);
                args["anchor"] = complex_json(anchor);
            }
            Json j = envelope(name, cfg, args);
            j["result"] = io::order_fit_to_json(fit);
            emit_json(com, j);
        } else if (name == "traces-check") {
            const auto cat = catalog_arg(catalog_path, cfg);
            const Complex z = parse_complex(z_text);
            const auto orbit_side = zeta::trace_moment(cat, z, m_order);
            const double roof = cat.length_quantum > 0 ? cat.length_quantum : 1.0;
            const auto spec_side = zeta::cat_spectral_trace(z, m_order, J, cat.potential_const, roof);
            const double gap = std::abs(orbit_side.value - spec_side.value);
            const double allowed = 1e-8 + orbit_side.tail_bound + spec_side.tail_bound;
            Json j = envelope(name, cfg, {{"z", complex_json(z)}, {"m", m_order}, {"J", J}});
            j["result"] = {{"orbit_side", complex_json(orbit_side.value)},
                           {"orbit_tail_bound", orbit_side.tail_bound},
                           {"spectral_side", complex_json(spec_side.value)},
                           {"spectral_tail_bound", spec_side.tail_bound},
                           {"difference", gap},
                           {"allowed", allowed},
                           {"agree", gap <= allowed}};
            emit_json(com, j);
        } else if (name == "detm-check") {
            const auto cat = catalog_arg(catalog_path, cfg);
            const Complex anchor = parse_complex(anchor_text);
            zeta::RegDetInput in;
            in.resonances = resonances_arg(resonance_path, cfg, &cat);
            in.det_order = m_order;
            in.anchor = anchor;
            const auto q = zeta::q_polynomial(cat, anchor, m_order);
            const double roof = cat.length_quantum > 0 ? cat.length_quantum : 1.0;
            Json rows = Json::array();
            double worst = 0.0;
            for (const Complex lam : parse_complex_list(lambdas_text)) {
                const Complex got = zeta::zeta_via_detm(in, q, lam);
                const Complex want = zeta::closed_form_cat_zeta(lam, cat.potential_const, roof);
                const double err = std::abs(got - want);
                worst = std::max(worst, err);
                rows.push_back({{"lambda", complex_json(lam)},
                                {"reconstructed", complex_json(got)},
                                {"closed_form", complex_json(want)},
                                {"error", err},
                                {"tail_estimate", zeta::regularized_det(in, lam).tail_estimate}});
            }
            Json j = envelope(name, cfg,
                              {{"anchor", complex_json(anchor)}, {"m", m_order}, {"resonances", in.resonances.size()}});
            j["result"] = {{"points", rows}, {"max_error", worst}};
            emit_json(com, j);
        } else if (name == "escape-check") {
            const auto model = io::suspension_model(cfg);
            const auto p = io::escape_params(cfg);
            const auto split = escape::splitting(model.map, model.roof);
            escape::ScanOptions opt;
            opt.sample_count = samples ? *samples : cfg.get_int("numerics", "samples", opt.sample_count);
            opt.radius_min = radius_min ? *radius_min : cfg.get_double("numerics", "radius_min", opt.radius_min);
            opt.cones.kappa_s = cfg.get_double("experiment", "kappa_s", opt.cones.kappa_s);
            opt.cones.kappa_0 = cfg.get_double("experiment", "kappa_0", opt.cones.kappa_0);
            opt.bracket_check_stride =
                static_cast<int>(cfg.get_int("experiment", "bracket_stride", opt.bracket_check_stride));
            opt.dt = cfg.get_double("experiment", "dt", opt.dt);
            const std::int64_t seed = com.seed ? com.seed : cfg.get_int("experiment", "seed", 0);
            opt.start_index = 1 + static_cast<std::uint64_t>(seed);
            const auto rep = escape::property_scan(p, split, opt);
            Json j = envelope(name, cfg,
                              {{"samples", opt.sample_count},
                               {"radius_min", opt.radius_min},
                               {"seed", seed},
                               {"params",
                                {{"delta", p.delta},
                                 {"T0", p.T0},
                                 {"T1", p.T1},
                                 {"A", p.A_const},
                                 {"gamma", p.gamma},
                                 {"gamma1", p.gamma1},
                                 {"cutoff_radius", p.cutoff_radius},
                                 {"kappa_s", opt.cones.kappa_s},
                                 {"kappa_0", opt.cones.kappa_0}}}});
            j["result"] = io::scan_report_to_json(rep);
            emit_json(com, j);
        } else if (name == "fbi") {
            if (com.out_path.empty()) throw Error(ErrorCode::InvalidArgument, "fbi needs --out FILE.csv");
            const auto xr = io::parse_list(x_range), kr = io::parse_list(xi_range);
            if (xr.size() != 2 || kr.size() != 2) throw Error(ErrorCode::InvalidArgument, "ranges need two numbers");
            const auto v = fbi::variant_from_string(variant);
            const auto grid = fbi::make_grid(g_h, xr[0], xr[1], kr[0], kr[1], static_cast<std::size_t>(n_xi), v);
            const auto u = signal_from(g_s, g_c, g_L, jumps, kinks);
            const auto T = modal ? fbi::fbi_transform_modal(u, grid) : fbi::fbi_transform(u, grid);
            io::write_file(com.out_path, io::fbi_to_csv(grid, T));
            Json j = envelope(name, cfg,
                              {{"s", g_s},
                               {"c", g_c},
                               {"h", g_h},
                               {"L", g_L},
                               {"variant", variant},
                               {"x_range", xr},
                               {"xi_range", kr},
                               {"n_xi", n_xi},
                               {"jumps", jumps},
                               {"kinks", kinks},
                               {"path", modal ? "modal" : "quadrature"},
                               {"rel_tol", 1e-12}});
            j["h"] = g_h;
            j["variant"] = variant;
            j["columns"] = {"x", "xi", "re", "im", "abs"};
            io::write_file(sidecar_path(com.out_path), j.dump(2) + "\n");
        } else if (name == "fbi-fit" || name == "fbi-wf") {
            double h = 0.0;
            std::string var = "flat";
            if (in_h) {
                h = *in_h;
            } else {
                const Json meta = Json::parse(io::read_file(sidecar_path(input)));
                h = meta.at("h").get<double>();
                var = meta.value("variant", std::string("flat"));
            }
            fbi::FbiGrid grid;
            fbi::PhaseSpaceArray T;
            io::fbi_from_csv(io::read_file(input), h, fbi::variant_from_string(var), grid, T);
            Json j = envelope(name, cfg, {{"input", input}, {"h", h}, {"exponent", exponent}});
            if (name == "fbi-fit") {
                const auto fit = fbi::decay_fit(T, grid, exponent);
                j["result"] = {{"slope", fit.slope},
                               {"intercept", fit.intercept},
                               {"r_squared", fit.r_squared},
                               {"xi_min", fit.xi_min},
                               {"xi_max", fit.xi_max},
                               {"points", fit.points}};
            } else {
                const auto wf = fbi::wavefront_from_array(T, grid, threshold, exponent);
                Json clusters = Json::array();
                for (const auto& c : wf.clusters) {
                    clusters.push_back(
                        {{"x_lo", c.x_lo}, {"x_hi", c.x_hi}, {"center", c.center}, {"xi_sign", c.xi_sign}});
                }
                j["arguments"]["threshold"] = threshold;
                j["result"] = {{"clusters", clusters},
                               {"cells", wf.cell_x.size()},
                               {"global_slope_pos", wf.global_slope_pos},
                               {"global_slope_neg", wf.global_slope_neg}};
            }
            emit_json(com, j);
        } else if (name == "spectra") {
            const auto model = io::suspension_model(cfg);
            const auto eps = eps_text.empty() ? cfg.get_list("experiment", "eps_list", {1e-1, 1e-2, 1e-3, 1e-4})
                                              : io::parse_list(eps_text);
            const double z = spec_z ? *spec_z : cfg.get_double("experiment", "z", 10.0);
            const double R = spec_R ? *spec_R : cfg.get_double("experiment", "R", 15.0);
            spectra::StabilityOptions opt;
            opt.grid_per_cell = static_cast<int>(cfg.get_int("numerics", "grid_per_cell", opt.grid_per_cell));
            opt.K = static_cast<int>(cfg.get_int("numerics", "K", opt.K));
            const auto rows = spectra::stochastic_stability_experiment(model.map, eps, z, R, opt);
            std::string csv = "eps,d_zH,n_eigs_in_disk\n";
            Json sectors = Json::array();
            Json table = Json::array();
            for (const auto& r : rows) {
                csv += io::format_double(r.eps) + ',' + io::format_double(r.d_zH) + ',' +
                       std::to_string(r.n_eigs_in_disk) + '\n';
                table.push_back({{"eps", r.eps},
                                 {"d_zH", r.d_zH},
                                 {"n_eigs_in_disk", r.n_eigs_in_disk},
                                 {"sectors_computed", r.sectors_computed},
                                 {"sectors_excluded", r.sectors_excluded},
                                 {"max_nontrivial_re", r.sectors_computed ? Json(r.max_nontrivial_re) : Json(nullptr)},
                                 {"trivial_max_error", r.trivial_max_error},
                                 {"boundary_sensitivity", r.boundary_sensitivity}});
                for (const auto& s : r.sectors) {
                    Json ev = Json::array();
                    for (const auto& v : s.eigenvalues) {
                        if (std::abs(v) <= R) ev.push_back(complex_json(v));
                    }
                    sectors.push_back({{"eps", r.eps},
                                       {"sector_id", s.sector_id},
                                       {"K", s.K},
                                       {"ds", s.ds},
                                       {"boundary_sensitivity", s.boundary_sensitivity},
                                       {"discarded", s.discarded},
                                       {"eigenvalues_in_disk", ev}});
                }
            }
            Json meta = envelope(name, cfg,
                                 {{"eps_list", eps},
                                  {"z", z},
                                  {"R", R},
                                  {"grid_per_cell", opt.grid_per_cell},
                                  {"K", opt.K}});
            meta["table"] = table;
            if (com.out_path.empty()) {
                meta["sectors"] = sectors;
                emit_json(com, meta);
            } else {
                io::write_file(com.out_path, csv);
                io::write_file(sidecar_path(com.out_path), meta.dump(2) + "\n");
                Json sj = envelope(name, cfg, meta["arguments"]);
                sj["sectors"] = sectors;
                io::write_file(com.out_path + ".sectors.json", sj.dump(2) + "\n");
            }
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << io::error_to_json(to_string(e.code()), e.what()).dump() << "\n";
        return exit_code(e.code());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << io::error_to_json("IoError", e.what()).dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << io::error_to_json("InvalidArgument", e.what()).dump() << "\n";
        return 1;
    }
}
