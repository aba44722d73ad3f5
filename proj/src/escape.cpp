#include "anosov/escape.hpp"

#include <cmath>
#include <vector>

#include "anosov/quadrature.hpp"

namespace anosov::escape {

void validate_params(const EscapeParams& p) {
    if (!(p.delta > 0.0 && p.delta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1]");
    if (!(p.T0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "T0 must be > 0");
    if (!(p.T1 >= p.T0)) throw Error(ErrorCode::InvalidArgument, "T1 must be >= T0");
    if (!(p.A_const >= 0.0)) throw Error(ErrorCode::InvalidArgument, "A must be >= 0");
    if (!(p.gamma1 > 0.0 && p.gamma1 < p.gamma && p.gamma < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "cone apertures need 0 < gamma1 < gamma < 1");
    }
    if (!(p.cutoff_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff_radius must be > 0");
}

namespace {

Vec2 eigenvector(double p, double q, double r, double s, double nu) {
    // kernel of [[p - nu, q], [r, s - nu]]
    const Vec2 v1{q, nu - p};
    const Vec2 v2{nu - s, r};
    const Vec2 v = std::hypot(v1[0], v1[1]) >= std::hypot(v2[0], v2[1]) ? v1 : v2;
    const double n = std::hypot(v[0], v[1]);
    Vec2 out{v[0] / n, v[1] / n};
    const double lead = std::abs(out[0]) > 1e-14 ? out[0] : out[1];
    if (lead < 0.0) out = {-out[0], -out[1]};
    return out;
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

SplittingData splitting(const orbits::HyperbolicToralMap& map, double roof) {
    if (!(roof > 0.0)) throw Error(ErrorCode::InvalidArgument, "roof must be > 0");
    SplittingData sd;
    sd.map = map;
    sd.roof = roof;
    const double tr = static_cast<double>(map.a + map.d);
    const double disc = std::sqrt(tr * tr - 4.0);
    sd.mu = (tr + std::copysign(disc, tr)) / 2.0;
    sd.expansion_log = std::log(std::abs(sd.mu));
    const double a = static_cast<double>(map.a), b = static_cast<double>(map.b);
    const double c = static_cast<double>(map.c), d = static_cast<double>(map.d);
    const double inv = 1.0 / sd.mu;

    const Vec2 u = eigenvector(a, c, b, d, inv);  // A^T u = mu^{-1} u
    const Vec2 s = eigenvector(a, c, b, d, sd.mu);
    const Vec2 vu = eigenvector(a, b, c, d, sd.mu);
    const Vec2 vs = eigenvector(a, b, c, d, inv);
    sd.u_covector = {u[0], u[1], 0.0};
    sd.s_covector = {s[0], s[1], 0.0};
    sd.unstable_tangent = {vu[0], vu[1], 0.0};
    sd.stable_tangent = {vs[0], vs[1], 0.0};
    // Inverse of the matrix with rows u, s gives the dual tangent vectors as columns.
    const double det = u[0] * s[1] - u[1] * s[0];
    sd.dual_u = {s[1] / det, -s[0] / det, 0.0};
    sd.dual_s = {-u[1] / det, u[0] / det, 0.0};
    return sd;
}

Components components(const CotangentSample& alpha, const SplittingData& split) {
    const double a = alpha.xi[0] * split.dual_u[0] + alpha.xi[1] * split.dual_u[1];
    const double b = alpha.xi[0] * split.dual_s[0] + alpha.xi[1] * split.dual_s[1];
    const double g = std::exp(split.expansion_log * alpha.theta / split.roof);
    return {a * g, b / g, alpha.eta};
}

CotangentSample make_sample(Vec2 x, double theta, Vec2 xi, double eta, const SplittingData& split) {
    CotangentSample s{x, theta, xi, eta, 1.0};
    const auto c = components(s, split);
    s.jap = std::sqrt(1.0 + c.u * c.u + c.s * c.s + c.zero * c.zero);
    return s;
}

CotangentSample sample_from_components(const Components& c, Vec2 x, double theta, const SplittingData& split) {
    const double g = std::exp(split.expansion_log * theta / split.roof);
    const double a = c.u / g, b = c.s * g;
    const Vec2 xi{a * split.u_covector[0] + b * split.s_covector[0], a * split.u_covector[1] + b * split.s_covector[1]};
    return make_sample(x, theta, xi, c.zero, split);
}

CotangentSample theta_flow(const CotangentSample& alpha, double t, const SplittingData& split) {
    const double r = split.roof;
    const double shifted = alpha.theta + t;
    const auto n = static_cast<long>(std::floor(shifted / r));
    double theta = shifted - static_cast<double>(n) * r;
    if (theta >= r) theta -= r;
    if (theta < 0.0) theta = 0.0;

    const auto& m = split.map;
    Vec2 x = alpha.x;
    for (long k = 0; k < std::labs(n); ++k) {
        const double x0 = x[0], x1 = x[1];
        if (n > 0) {
            x = {frac(m.a * x0 + m.b * x1), frac(m.c * x0 + m.d * x1)};
        } else {
            x = {frac(m.d * x0 - m.b * x1), frac(-m.c * x0 + m.a * x1)};
        }
    }
    // (A^T)^{-n} acts by mu^n on u and mu^{-n} on s.
    const double a = alpha.xi[0] * split.dual_u[0] + alpha.xi[1] * split.dual_u[1];
    const double b = alpha.xi[0] * split.dual_s[0] + alpha.xi[1] * split.dual_s[1];
    const double pu = std::pow(split.mu, static_cast<double>(n));
    const double an = a * pu, bn = b / pu;
    const Vec2 xi{an * split.u_covector[0] + bn * split.s_covector[0], an * split.u_covector[1] + bn * split.s_covector[1]};
    CotangentSample out{x, theta, xi, alpha.eta, alpha.jap};
    return out;
}

double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

namespace {
double smoothstep_derivative(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

double cone_weight(double ratio, const EscapeParams& p) {
    return smoothstep((p.gamma - ratio) / (p.gamma - p.gamma1));
}

// m on magnitudes (U, S, Z) = (|s_u|, |s_s|, |s_0|).
double m_mag(double U, double S, double Z, const EscapeParams& p) {
    const double R = std::sqrt(U * U + S * S + Z * Z);
    const double radial = radial_cutoff(R, p.cutoff_radius);
    if (radial == 0.0) return 0.0;
    const double bu = U > 0.0 ? cone_weight((Z + S) / U, p) : 0.0;
    const double bs = S > 0.0 ? cone_weight((Z + U) / S, p) : 0.0;
    return (bs - bu) * radial;
}

struct Trajectory {
    double U, S, Z, h;

    [[nodiscard]] double norm_at(double t) const {
        const double y = std::exp(h * t);
        const double u = U * y, s = S / y;
        return std::sqrt(u * u + s * s + Z * Z);
    }
    [[nodiscard]] double integrand(double t, const EscapeParams& p) const {
        const double y = std::exp(h * t);
        const double u = U * y, s = S / y;
        const double R = std::sqrt(u * u + s * s + Z * Z);
        const double m = m_mag(u, s, Z, p);
        if (m == 0.0) return 0.0;
        return m * (p.delta == 1.0 ? R : std::pow(R, p.delta));
    }
};

// Times where the integrand stops being analytic: cone-aperture crossings and
// radial cutoff crossings, all solvable in y = e^{ht}.
std::vector<double> breakpoints(const Trajectory& tr, const EscapeParams& p, double lo, double hi) {
    std::vector<double> ys;
    const double U = tr.U, S = tr.S, Z = tr.Z;
    for (double g : {p.gamma, p.gamma1}) {
        // (Z + S/y) / (U y) = g  ->  g U y^2 - Z y - S = 0
        if (U > 0.0) ys.push_back((Z + std::sqrt(Z * Z + 4.0 * g * U * S)) / (2.0 * g * U));
        // (Z + U y) / (S / y) = g  ->  U y^2 + Z y - g S = 0
        if (S > 0.0 && (U > 0.0 || Z > 0.0)) ys.push_back(2.0 * g * S / (Z + std::sqrt(Z * Z + 4.0 * g * U * S)));
    }
    for (double R : {p.cutoff_radius, 2.0 * p.cutoff_radius}) {
        // U^2 Y^2 - (R^2 - Z^2) Y + S^2 = 0 with Y = y^2
        const double bq = R * R - Z * Z;
        if (bq <= 0.0) continue;
        if (U == 0.0) {
            if (S > 0.0) ys.push_back(S / std::sqrt(bq));
            continue;
        }
        const double disc = bq * bq - 4.0 * U * U * S * S;
        if (disc < 0.0) continue;
        const double big = (bq + std::sqrt(disc)) / 2.0;  // = U^2 * Y_large
        const double Y1 = big / (U * U);
        const double Y2 = big > 0.0 ? S * S / big : 0.0;
        if (Y1 > 0.0) ys.push_back(std::sqrt(Y1));
        if (Y2 > 0.0) ys.push_back(std::sqrt(Y2));
    }
    std::vector<double> ts{lo};
    for (double y : ys) {
        if (!(y > 0.0) || !std::isfinite(y)) continue;
        const double t = std::log(y) / tr.h;
        if (t > lo && t < hi) ts.push_back(t);
    }
    ts.push_back(hi);
    std::sort(ts.begin(), ts.end());
    return ts;
}

double integrate_piece(const Trajectory& tr, const EscapeParams& p, double a, double b, double& abs_out,
                       double& change_out) {
    const auto& rule = gauss_legendre(16);
    auto composite = [&](int panels, double& absum) {
        NeumaierSum s, sa;
        const double w = (b - a) / panels;
        for (int k = 0; k < panels; ++k) {
            const double mid = a + (k + 0.5) * w;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double v = rule.weights[i] * 0.5 * w * tr.integrand(mid + 0.5 * w * rule.nodes[i], p);
                s.add(v);
                sa.add(std::abs(v));
            }
        }
        absum = sa.value();
        return s.value();
    };
    int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 0.5)));
    double abs1 = 0.0, abs2 = 0.0;
    double prev = composite(panels, abs1);
    double cur = prev;
    double change = kInf;
    for (int it = 0; it < 10; ++it) {
        panels *= 2;
        cur = composite(panels, abs2);
        change = std::abs(cur - prev);
        if (change <= 1e-14 * abs2 || abs2 == 0.0) break;
        prev = cur;
    }
    abs_out = abs2;
    change_out = change;
    return cur;
}

double window_integral(const Trajectory& tr, const EscapeParams& p, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    const auto ts = breakpoints(tr, p, lo, hi);
    NeumaierSum s;
    double abs_total = 0.0, change_total = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (!(ts[i + 1] > ts[i])) continue;
        double ab = 0.0, ch = 0.0;
        s.add(integrate_piece(tr, p, ts[i], ts[i + 1], ab, ch));
        abs_total += ab;
        change_total += ch;
    }
    if (change_total > 1e-8 * abs_total && change_total > 0.0) {
        throw Error(ErrorCode::QuadratureNotConverged, "escape integral did not settle under panel doubling");
    }
    return s.value();
}

}  // namespace

double radial_cutoff(double r, double cutoff) { return smoothstep((r - cutoff) / cutoff); }

double m_symbol(const Components& c, const EscapeParams& p) {
    return m_mag(std::abs(c.u), std::abs(c.s), std::abs(c.zero), p);
}

double m_symbol(const CotangentSample& alpha, const EscapeParams& p, const SplittingData& split) {
    return m_symbol(components(alpha, split), p);
}

double escape_G0(const Components& c, const EscapeParams& p, double flow_rate) {
    const Trajectory tr{std::abs(c.u), std::abs(c.s), std::abs(c.zero), flow_rate};
    const double integral = window_integral(tr, p, -p.T0, p.T1);
    const double chi = radial_cutoff(c.norm(), p.cutoff_radius);
    return integral - p.A_const * chi * std::pow(std::abs(c.zero), p.delta);
}

double escape_G0(const CotangentSample& alpha, const EscapeParams& p, const SplittingData& split) {
    return escape_G0(components(alpha, split), p, split.flow_rate());
}

double bracket_closed_form(const Components& c, const EscapeParams& p, double flow_rate) {
    const Trajectory tr{std::abs(c.u), std::abs(c.s), std::abs(c.zero), flow_rate};
    const double ends = tr.integrand(p.T1, p) - tr.integrand(-p.T0, p);
    const double R = c.norm();
    if (!(R > 0.0)) return ends;
    const double dnorm = flow_rate * (c.u * c.u - c.s * c.s) / R;
    const double dchi = smoothstep_derivative((R - p.cutoff_radius) / p.cutoff_radius) / p.cutoff_radius;
    return ends - p.A_const * dchi * dnorm * std::pow(std::abs(c.zero), p.delta);
}

BracketValue bracket_along_flow(const CotangentSample& alpha, const EscapeParams& p, const SplittingData& split,
                                double dt) {
    if (!(dt > 0.0 && dt <= 0.1)) throw Error(ErrorCode::InvalidArgument, "dt must lie in (0, 0.1]");
    const double forward = escape_G0(theta_flow(alpha, dt, split), p, split);
    const double backward = escape_G0(theta_flow(alpha, -dt, split), p, split);
    return {(forward - backward) / (2.0 * dt), bracket_closed_form(components(alpha, split), p, split.flow_rate())};
}

std::array<double, 6> halton6(std::uint64_t index) {
    static constexpr std::array<std::uint64_t, 6> bases = {2, 3, 5, 7, 11, 13};
    std::array<double, 6> out{};
    for (std::size_t d = 0; d < 6; ++d) {
        const std::uint64_t b = bases[d];
        double f = 1.0, r = 0.0;
        for (std::uint64_t i = index; i > 0; i /= b) {
            f /= static_cast<double>(b);
            r += f * static_cast<double>(i % b);
        }
        out[d] = r;
    }
    return out;
}

namespace {

Components direction(double h1, double h2) {
    const double w = 2.0 * h1 - 1.0;
    const double phi = kTwoPi * h2;
    const double rxy = std::sqrt(std::max(0.0, 1.0 - w * w));
    return {rxy * std::cos(phi), rxy * std::sin(phi), w};
}

double first_percentile(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto k = static_cast<std::size_t>(std::floor(0.01 * static_cast<double>(v.size() - 1)));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

struct SampleOutcome {
    bool check_i = false, check_ii = false;
    double margin_i = 0.0, margin_ii = 0.0;
    bool fd = false;
    double gap = 0.0;
};

}  // namespace

ScanReport property_scan(const EscapeParams& p, const SplittingData& split, const ScanOptions& opt) {
    validate_params(p);
    if (opt.sample_count < 1) throw Error(ErrorCode::InvalidArgument, "sample_count must be >= 1");
    if (!(opt.radius_min >= 1.0)) throw Error(ErrorCode::InvalidArgument, "radius_min must be >= 1");
    const double h = split.flow_rate();
    const auto n = static_cast<std::size_t>(opt.sample_count);

    auto outcomes = parallel_map<SampleOutcome>(n, [&](std::size_t i) {
        const auto hv = halton6(static_cast<std::uint64_t>(i) + opt.start_index);
        Components dir = direction(hv[0], hv[1]);
        const double jap = opt.radius_min * std::pow(1e3, hv[2]);
        const double scale = std::sqrt(jap * jap - 1.0);
        const Components c{dir.u * scale, dir.s * scale, dir.zero * scale};
        const double U = std::abs(c.u), S = std::abs(c.s), Z = std::abs(c.zero);
        const double norm_delta = std::pow(jap, p.delta);

        SampleOutcome o;
        if (!(Z + U <= opt.cones.kappa_s * S)) {
            o.check_i = true;
            o.margin_i = -escape_G0(c, p, h) / norm_delta;
        }
        const double closed = bracket_closed_form(c, p, h);
        if (!(U + S <= opt.cones.kappa_0 * Z)) {
            o.check_ii = true;
            o.margin_ii = -closed / norm_delta;
        }
        if (opt.bracket_check_stride > 0 && i % static_cast<std::size_t>(opt.bracket_check_stride) == 0) {
            const auto alpha = sample_from_components(c, {hv[4], hv[5]}, hv[3] * split.roof, split);
            const auto b = bracket_along_flow(alpha, p, split, opt.dt);
            o.fd = true;
            o.gap = std::abs(b.finite_difference - b.closed_form) / std::max(std::abs(b.closed_form), norm_delta);
        }
        return o;
    });

    ScanReport rep;
    rep.samples = opt.sample_count;
    std::vector<double> mi, mii;
    for (const auto& o : outcomes) {
        if (o.check_i) {
            ++rep.checked_i;
            mi.push_back(o.margin_i);
            if (o.margin_i <= 0.0) ++rep.violations_i;
            rep.worst_margin_i = std::min(rep.worst_margin_i, o.margin_i);
        }
        if (o.check_ii) {
            ++rep.checked_ii;
            mii.push_back(o.margin_ii);
            if (o.margin_ii <= 0.0) ++rep.violations_ii;
            rep.worst_margin_ii = std::min(rep.worst_margin_ii, o.margin_ii);
        }
        if (o.fd) {
            ++rep.bracket_checks;
            rep.max_bracket_gap = std::max(rep.max_bracket_gap, o.gap);
        }
    }
    rep.fitted_c_i = first_percentile(mi);
    rep.fitted_c_ii = first_percentile(mii);
    rep.fitted_c = std::min(rep.fitted_c_i, rep.fitted_c_ii);
    return rep;
}

T1Search find_T1(double flow_rate, double T0, double delta, double kappa_0s, int samples) {
    if (!(flow_rate > 0.0) || !(T0 > 0.0) || !(delta > 0.0) || !(kappa_0s > 0.0) || samples < 1) {
        throw Error(ErrorCode::InvalidArgument, "find_T1 needs positive rate, T0, delta, kappa and sample count");
    }
    const auto& rule = gauss_legendre(32);
    T1Search out;
    for (int i = 1; i <= samples; ++i) {
        const auto hv = halton6(static_cast<std::uint64_t>(i));
        const Components d = direction(hv[0], hv[1]);
        const double U = std::abs(d.u), S = std::abs(d.s), Z = std::abs(d.zero);
        // backward integral over [-T0, 0] with |alpha| = 1
        NeumaierSum acc;
        const int panels = static_cast<int>(std::ceil(T0 / 0.5));
        const double w = T0 / panels;
        for (int k = 0; k < panels; ++k) {
            const double mid = -T0 + (k + 0.5) * w;
            for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                const double t = mid + 0.5 * w * rule.nodes[j];
                const double y = std::exp(flow_rate * t);
                const double R = std::sqrt(U * U * y * y + S * S / (y * y) + Z * Z);
                acc.add(rule.weights[j] * 0.5 * w * std::pow(R, delta));
            }
        }
        out.backward_integral_sup = std::max(out.backward_integral_sup, acc.value());
        if (U > kappa_0s * (Z + S)) {
            // |Theta_t|^2 = U^2 y^2 + S^2 / y^2 + Z^2 is convex in log y, minimal at y^2 = S/U.
            const double t_min = std::max(T0, 0.5 * std::log(S / U) / flow_rate);
            const double y = std::exp(flow_rate * t_min);
            const double R = std::sqrt(U * U * y * y + S * S / (y * y) + Z * Z);
            out.C1 = std::max(out.C1, 1.0 / R);
        }
    }
    out.T1 = T0 + 2.0 * std::pow(out.C1, delta) * out.backward_integral_sup * (1.0 + 1e-3);
    return out;
}

}  // namespace anosov::escape
