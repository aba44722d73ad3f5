#include "anosov/fbi.hpp"

#include <cmath>

#include "anosov/quadrature.hpp"

namespace anosov::fbi {

const char* to_string(Variant v) {
    switch (v) {
        case Variant::Flat: return "flat";
        case Variant::ScaledPhase: return "scaled";
        case Variant::Gabor: return "gabor";
    }
    return "flat";
}

Variant variant_from_string(const std::string& s) {
    if (s == "flat") return Variant::Flat;
    if (s == "scaled" || s == "scaled_phase") return Variant::ScaledPhase;
    if (s == "gabor") return Variant::Gabor;
    throw Error(ErrorCode::InvalidArgument, "unknown FBI variant '" + s + "'");
}

double Window::operator()(double x) const {
    const double d = std::abs(x - center);
    if (d <= plateau) return 1.0;
    if (d >= plateau + ramp) return 0.0;
    const double t = (plateau + ramp - d) / ramp;  // 1 at the plateau edge, 0 at the outer edge
    const double k = 1.0 / (sigma - 1.0);
    const double f1 = std::exp(-std::pow(t, -k));
    const double f2 = std::exp(-std::pow(1.0 - t, -k));
    return f1 / (f1 + f2);
}

Complex GevreySignal::operator()(double x) const {
    Complex acc{0.0, 0.0};
    if (L >= 0 && !modes.empty()) {
        acc = mode(0);
        const Complex z = std::polar(1.0, x);
        Complex zp{1.0, 0.0};
        for (int l = 1; l <= L; ++l) {
            zp *= z;
            if (l % 64 == 0) zp = std::polar(1.0, l * x);  // limit drift of the recurrence
            acc += mode(l) * zp + mode(-l) * std::conj(zp);
        }
    }
    for (const auto& sg : singularities) {
        if (sg.kind == Singularity::Kind::Jump) {
            if (x >= sg.x0) acc += sg.amplitude;
        } else {
            acc += sg.amplitude * std::abs(x - sg.x0);
        }
    }
    return window(x) * acc;
}

double GevreySignal::max_abs_bound() const {
    double m = 0.0;
    for (const auto& a : modes) m += std::abs(a);
    for (const auto& sg : singularities) {
        const double reach = window.plateau + window.ramp + std::abs(sg.x0 - window.center);
        m += std::abs(sg.amplitude) * (sg.kind == Singularity::Kind::Jump ? 1.0 : reach);
    }
    return m;
}

GevreySignal make_gevrey_signal(double s, double c, int L, double phase_step) {
    if (!(s >= 1.0)) throw Error(ErrorCode::InvalidArgument, "Gevrey index s must be >= 1");
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "decay constant c must be > 0");
    if (L < 0) throw Error(ErrorCode::InvalidArgument, "mode bound L must be >= 0");
    GevreySignal u;
    u.s = s;
    u.c = c;
    u.L = L;
    u.window.sigma = s >= 3.0 ? 5.0 : 3.0;
    u.modes.resize(static_cast<std::size_t>(2 * L + 1));
    for (int l = -L; l <= L; ++l) {
        const double mag = std::exp(-c * std::pow(std::abs(static_cast<double>(l)), 1.0 / s));
        const double ph = l * phase_step - std::floor(l * phase_step);
        u.modes[static_cast<std::size_t>(l + L)] = l == 0 ? Complex(1.0, 0.0) : std::polar(mag, kTwoPi * ph);
    }
    return u;
}

GevreySignal single_mode_signal(int l0) {
    GevreySignal u;
    u.s = 1.0;
    u.c = 1.0;
    u.L = std::abs(l0);
    u.modes.assign(static_cast<std::size_t>(2 * u.L + 1), Complex(0.0, 0.0));
    u.modes[static_cast<std::size_t>(l0 + u.L)] = 1.0;
    return u;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

void validate_grid(const FbiGrid& grid) {
    if (!(grid.h > 0.0 && grid.h <= 1.0)) throw Error(ErrorCode::InvalidArgument, "h must lie in (0, 1]");
    if (grid.x_nodes.empty() || grid.xi_nodes.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid");
    const double max_dx = std::sqrt(grid.h) / 8.0 * (1.0 + 1e-12);
    for (std::size_t i = 1; i < grid.x_nodes.size(); ++i) {
        const double dx = grid.x_nodes[i] - grid.x_nodes[i - 1];
        if (!(dx > 0.0)) throw Error(ErrorCode::InvalidArgument, "x nodes must be strictly increasing");
        if (dx > max_dx) throw Error(ErrorCode::InvalidArgument, "x spacing exceeds sqrt(h)/8");
    }
}

FbiGrid make_grid(double h, double x_lo, double x_hi, double xi_lo, double xi_hi, std::size_t n_xi, Variant v) {
    FbiGrid g;
    g.h = h;
    g.variant = v;
    const auto nx = static_cast<std::size_t>(std::ceil((x_hi - x_lo) / (std::sqrt(h) / 8.0))) + 1;
    g.x_nodes = linspace(x_lo, x_hi, std::max<std::size_t>(nx, 2));
    g.xi_nodes = linspace(xi_lo, xi_hi, n_xi);
    return g;
}

namespace {

double weight_of(Variant v, double xi) { return v == Variant::ScaledPhase ? std::sqrt(1.0 + xi * xi) : 1.0; }

double flat_prefactor(double h) { return std::pow(kTwoPi * h, -1.5); }

// Half-width beyond which the kernel's Gaussian factor is below e^{-expo}.
double gaussian_reach(Variant v, double h, double w, double expo) {
    if (v == Variant::Gabor) return std::sqrt(expo / kPi);
    return std::sqrt(2.0 * expo * h / w);
}

}  // namespace

Complex kernel(Variant v, double h, double x, double xi, double xp) {
    const double d = x - xp;
    if (v == Variant::Gabor) return std::exp(Complex(-kPi * d * d, -xi * xp / h));
    const double w = weight_of(v, xi);
    return flat_prefactor(h) * std::exp(Complex(-w * d * d / (2.0 * h), d * xi / h));
}

Complex single_mode_transform(Variant v, double h, int l, double x, double xi) {
    if (v == Variant::Gabor) {
        const double k = l - xi / h;
        return std::exp(Complex(-k * k / (4.0 * kPi), k * x));
    }
    const double w = weight_of(v, xi);
    const double d = xi - h * l;
    const double pref = flat_prefactor(h) * std::sqrt(kTwoPi * h / w);
    return pref * std::exp(Complex(-d * d / (2.0 * h * w), l * x));
}

PhaseSpaceArray fbi_transform_modal(const GevreySignal& u, const FbiGrid& grid) {
    validate_grid(grid);
    if (!u.singularities.empty()) {
        throw Error(ErrorCode::InvalidArgument, "modal transform needs a signal without inserted singularities");
    }
    const double h = grid.h;
    double wmin = kInf;
    for (double xi : grid.xi_nodes) wmin = std::min(wmin, weight_of(grid.variant, xi));
    const double reach = gaussian_reach(grid.variant, h, wmin, 760.0);
    for (double x : {grid.x_nodes.front(), grid.x_nodes.back()}) {
        if (std::abs(x - u.window.center) + reach > u.window.plateau) {
            throw Error(ErrorCode::InvalidArgument, "window plateau does not cover the Gaussian reach of the grid");
        }
    }
    PhaseSpaceArray out;
    out.nx = grid.x_nodes.size();
    out.nxi = grid.xi_nodes.size();
    out.data.assign(out.nx * out.nxi, Complex(0.0, 0.0));

    const auto cols = parallel_map<std::vector<Complex>>(out.nxi, [&](std::size_t j) {
        const double xi = grid.xi_nodes[j];
        const double w = weight_of(grid.variant, xi);
        // Modes whose Gaussian factor exceeds e^{-760}.
        double span;
        if (grid.variant == Variant::Gabor) {
            span = std::sqrt(4.0 * kPi * 760.0);
        } else {
            span = std::sqrt(1520.0 * w / h);
        }
        const int lo = std::max(-u.L, static_cast<int>(std::floor(xi / h - span)));
        const int hi = std::min(u.L, static_cast<int>(std::ceil(xi / h + span)));
        std::vector<int> ls;
        std::vector<Complex> coef;  // magnitude and phase of each mode's contribution at x = 0
        const double lpref = grid.variant == Variant::Gabor
                                 ? 0.0
                                 : std::log(flat_prefactor(h) * std::sqrt(kTwoPi * h / w));
        for (int l = lo; l <= hi; ++l) {
            const Complex a = u.mode(l);
            const double am = std::abs(a);
            if (am == 0.0) continue;
            double ex;
            if (grid.variant == Variant::Gabor) {
                const double k = l - xi / h;
                ex = -k * k / (4.0 * kPi);
            } else {
                const double d = xi - h * l;
                ex = -d * d / (2.0 * h * w);
            }
            const double mag = std::exp(std::log(am) + ex + lpref);
            if (mag == 0.0) continue;
            ls.push_back(l);
            coef.push_back(mag * (a / am));
        }
        std::vector<Complex> col(out.nx, Complex(0.0, 0.0));
        for (std::size_t i = 0; i < out.nx; ++i) {
            const double x = grid.x_nodes[i];
            ComplexSum acc;
            for (std::size_t k = 0; k < ls.size(); ++k) acc.add(coef[k] * std::polar(1.0, ls[k] * x));
            Complex v = acc.value();
            if (grid.variant == Variant::Gabor) v *= std::polar(1.0, -xi * x / h);
            col[i] = v;
        }
        return col;
    });
    for (std::size_t j = 0; j < out.nxi; ++j) {
        for (std::size_t i = 0; i < out.nx; ++i) out.at(i, j) = cols[j][i];
    }
    return out;
}

namespace {

struct NodeSet {
    std::vector<double> x, w;
    std::vector<Complex> u;
};

NodeSet build_nodes(const GevreySignal& u, double lo, double hi, double base_panel, int refine) {
    std::vector<double> cuts{lo, hi};
    for (const auto& sg : u.singularities) cuts.push_back(sg.x0);
    const Window& win = u.window;
    for (double e : {win.center - win.plateau - win.ramp, win.center - win.plateau, win.center + win.plateau,
                     win.center + win.plateau + win.ramp}) {
        cuts.push_back(e);
    }
    std::vector<double> pts;
    for (double c : cuts) {
        if (c >= lo && c <= hi) pts.push_back(c);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const auto& rule = gauss_legendre(16);
    NodeSet ns;
    const double panel = base_panel / static_cast<double>(1 << refine);
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        const double a = pts[s], b = pts[s + 1];
        if (!(b > a)) continue;
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
        const double len = (b - a) / n;
        for (int k = 0; k < n; ++k) {
            const double mid = a + (k + 0.5) * len;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                ns.x.push_back(mid + 0.5 * len * rule.nodes[i]);
                ns.w.push_back(0.5 * len * rule.weights[i]);
            }
        }
    }
    ns.u = parallel_map<Complex>(ns.x.size(), [&](std::size_t i) { return u(ns.x[i]); });
    return ns;
}

PhaseSpaceArray transform_on_nodes(const NodeSet& ns, const FbiGrid& grid, double reach) {
    PhaseSpaceArray out;
    out.nx = grid.x_nodes.size();
    out.nxi = grid.xi_nodes.size();
    out.data.assign(out.nx * out.nxi, Complex(0.0, 0.0));
    const double h = grid.h;
    const auto rows = parallel_map<std::vector<Complex>>(out.nx, [&](std::size_t i) {
        const double x = grid.x_nodes[i];
        const auto first = std::lower_bound(ns.x.begin(), ns.x.end(), x - reach) - ns.x.begin();
        const auto last = std::upper_bound(ns.x.begin(), ns.x.end(), x + reach) - ns.x.begin();
        std::vector<Complex> row(out.nxi, Complex(0.0, 0.0));
        for (std::size_t j = 0; j < out.nxi; ++j) {
            const double xi = grid.xi_nodes[j];
            ComplexSum acc;
            for (auto k = first; k < last; ++k) {
                const auto K = static_cast<std::size_t>(k);
                acc.add(ns.w[K] * kernel(grid.variant, h, x, xi, ns.x[K]) * ns.u[K]);
            }
            row[j] = acc.value();
        }
        return row;
    });
    for (std::size_t i = 0; i < out.nx; ++i) {
        for (std::size_t j = 0; j < out.nxi; ++j) out.at(i, j) = rows[i][j];
    }
    return out;
}

}  // namespace

PhaseSpaceArray fbi_transform(const GevreySignal& u, const FbiGrid& grid, double rel_tol) {
    validate_grid(grid);
    const double h = grid.h;
    double wmin = kInf, ximax = 0.0;
    for (double xi : grid.xi_nodes) {
        wmin = std::min(wmin, weight_of(grid.variant, xi));
        ximax = std::max(ximax, std::abs(xi));
    }
    const double reach = gaussian_reach(grid.variant, h, wmin, 60.0);
    const double lo = grid.x_nodes.front() - reach, hi = grid.x_nodes.back() + reach;
    // Highest oscillation rate in x': kernel phase, signal modes and the Gaussian's slope at the reach.
    const double slope = grid.variant == Variant::Gabor ? 2.0 * kPi * reach : reach / h;
    const double omega = ximax / h + u.L + slope + 1.0;
    const double base_panel = std::min(reach / 2.0, 6.0 / omega);

    const double scale = (grid.variant == Variant::Gabor ? 1.0 : 1.0 / (kTwoPi * h)) * std::max(u.max_abs_bound(), 1e-300);
    PhaseSpaceArray prev = transform_on_nodes(build_nodes(u, lo, hi, base_panel, 0), grid, reach);
    for (int refine = 1; refine <= 4; ++refine) {
        PhaseSpaceArray cur = transform_on_nodes(build_nodes(u, lo, hi, base_panel, refine), grid, reach);
        double change = 0.0;
        for (std::size_t k = 0; k < cur.data.size(); ++k) change = std::max(change, std::abs(cur.data[k] - prev.data[k]));
        if (change <= rel_tol * scale) return cur;
        prev = std::move(cur);
    }
    throw Error(ErrorCode::QuadratureNotConverged, "FBI quadrature did not settle under panel doubling");
}

DecayFit decay_fit(const PhaseSpaceArray& values, const FbiGrid& grid, double exponent, double floor, double ceiling) {
    if (values.nxi != grid.xi_nodes.size()) throw Error(ErrorCode::InvalidArgument, "array and grid disagree");
    std::vector<double> X, Y, used_xi;
    for (std::size_t j = 0; j < values.nxi; ++j) {
        double sup = 0.0;
        for (std::size_t i = 0; i < values.nx; ++i) sup = std::max(sup, std::abs(values.at(i, j)));
        if (!(sup >= floor && sup <= ceiling)) continue;
        const double xi = grid.xi_nodes[j];
        X.push_back(std::pow(std::sqrt(1.0 + xi * xi) / grid.h, exponent));
        Y.push_back(std::log(sup));
        used_xi.push_back(xi);
    }
    if (X.size() < 3) throw Error(ErrorCode::EmptyFitRange, "fewer than three frequencies inside the fit window");
    const auto n = static_cast<double>(X.size());
    NeumaierSum sx, sy;
    for (std::size_t k = 0; k < X.size(); ++k) {
        sx.add(X[k]);
        sy.add(Y[k]);
    }
    const double mx = sx.value() / n, my = sy.value() / n;
    NeumaierSum sxx, sxy, syy;
    for (std::size_t k = 0; k < X.size(); ++k) {
        sxx.add((X[k] - mx) * (X[k] - mx));
        sxy.add((X[k] - mx) * (Y[k] - my));
        syy.add((Y[k] - my) * (Y[k] - my));
    }
    DecayFit fit;
    fit.points = X.size();
    fit.xi_min = *std::min_element(used_xi.begin(), used_xi.end());
    fit.xi_max = *std::max_element(used_xi.begin(), used_xi.end());
    if (!(sxx.value() > 0.0)) throw Error(ErrorCode::EmptyFitRange, "fit window has a single abscissa");
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    const double sse = std::max(0.0, syy.value() - fit.slope * sxy.value());
    fit.r_squared = syy.value() > 0.0 ? std::clamp(1.0 - sse / syy.value(), 0.0, 1.0) : 1.0;
    return fit;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t k = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    double m = v[k];
    if (v.size() % 2 == 0) {
        const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
        m = 0.5 * (m + lo);
    }
    return m;
}

double local_slope(const PhaseSpaceArray& T, const FbiGrid& grid, std::size_t i, const std::vector<std::size_t>& js,
                   double exponent) {
    std::vector<double> X, Y;
    for (std::size_t j : js) {
        const double a = std::abs(T.at(i, j));
        if (!(a > 1e-300)) continue;
        const double xi = grid.xi_nodes[j];
        X.push_back(std::pow(std::sqrt(1.0 + xi * xi) / grid.h, exponent));
        Y.push_back(std::log(a));
    }
    if (X.size() < 2) return 0.0;
    const auto n = static_cast<double>(X.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < X.size(); ++k) {
        mx += X[k];
        my += Y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < X.size(); ++k) {
        sxx += (X[k] - mx) * (X[k] - mx);
        sxy += (X[k] - mx) * (Y[k] - my);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

WavefrontResult wavefront_scan(const GevreySignal& u, const FbiGrid& grid, double threshold, double exponent) {
    return wavefront_from_array(fbi_transform(u, grid), grid, threshold, exponent);
}

WavefrontResult wavefront_from_array(const PhaseSpaceArray& T, const FbiGrid& grid, double threshold,
                                     double exponent) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
    if (T.nx != grid.x_nodes.size() || T.nxi != grid.xi_nodes.size()) {
        throw Error(ErrorCode::InvalidArgument, "array and grid disagree");
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t j = 0; j < grid.xi_nodes.size(); ++j) {
        if (grid.xi_nodes[j] > 0.0) pos.push_back(j);
        if (grid.xi_nodes[j] < 0.0) neg.push_back(j);
    }
    WavefrontResult res;
    const std::size_t nx = grid.x_nodes.size();
    for (int sign : {1, -1}) {
        const auto& js = sign > 0 ? pos : neg;
        if (js.size() < 2) continue;
        std::vector<double> slopes(nx);
        for (std::size_t i = 0; i < nx; ++i) slopes[i] = local_slope(T, grid, i, js, exponent);
        const double global = median(slopes);
        (sign > 0 ? res.global_slope_pos : res.global_slope_neg) = global;
        (sign > 0 ? res.slope_pos : res.slope_neg) = slopes;
        if (!(global < 0.0)) continue;
        // Highest frequency on this half-line; the singular part dominates there.
        std::size_t top = js.front();
        for (std::size_t j : js) {
            if (std::abs(grid.xi_nodes[j]) > std::abs(grid.xi_nodes[top])) top = j;
        }
        std::vector<bool> hit(nx, false);
        for (std::size_t i = 0; i < nx; ++i) {
            hit[i] = std::abs(slopes[i]) < threshold * std::abs(global);
            if (hit[i]) {
                res.cell_x.push_back(grid.x_nodes[i]);
                res.cell_xi_sign.push_back(sign);
            }
        }
        for (std::size_t i = 0; i < nx;) {
            if (!hit[i]) {
                ++i;
                continue;
            }
            std::size_t k = i, peak = i;
            while (k < nx && hit[k]) {
                if (std::abs(T.at(k, top)) > std::abs(T.at(peak, top))) peak = k;
                ++k;
            }
            res.clusters.push_back({grid.x_nodes[i], grid.x_nodes[k - 1], grid.x_nodes[peak], sign});
            i = k;
        }
    }
    return res;
}

FbiGrid inversion_grid(double h, Variant v) {
    FbiGrid g;
    g.h = h;
    g.variant = v;
    const double step = std::sqrt(h) / 8.0;
    const auto nx = static_cast<std::size_t>(std::ceil(kTwoPi / step)) + 1;
    const auto nxi = static_cast<std::size_t>(std::ceil(2.0 / step)) + 1;
    g.x_nodes = linspace(-kPi, kPi, nx);
    g.xi_nodes = linspace(-1.0, 1.0, nxi);
    return g;
}

double inversion_residual(const GevreySignal& u, const FbiGrid& grid) {
    validate_grid(grid);
    const std::size_t nx = grid.x_nodes.size(), nxi = grid.xi_nodes.size();
    if (nx < 3 || nxi < 3) throw Error(ErrorCode::InvalidArgument, "inversion needs at least 3x3 grid nodes");
    bool zero = u.singularities.empty();
    for (const auto& a : u.modes) zero = zero && a == Complex(0.0, 0.0);
    if (zero) return 0.0;

    PhaseSpaceArray T;
    try {
        T = fbi_transform_modal(u, grid);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InvalidArgument) throw;
        T = fbi_transform(u, grid);
    }
    auto trap = [](const std::vector<double>& n, std::size_t i) {
        const double left = i > 0 ? n[i] - n[i - 1] : 0.0;
        const double right = i + 1 < n.size() ? n[i + 1] - n[i] : 0.0;
        return 0.5 * (left + right);
    };
    const double x_lo = grid.x_nodes.front(), x_hi = grid.x_nodes.back();
    const double q = 0.25 * (x_hi - x_lo);
    std::vector<double> ys;
    for (double x : grid.x_nodes) {
        if (x >= x_lo + q && x <= x_hi - q) ys.push_back(x);
    }
    const auto v = parallel_map<Complex>(ys.size(), [&](std::size_t k) {
        const double y = ys[k];
        ComplexSum acc;
        for (std::size_t i = 0; i < nx; ++i) {
            const double wx = trap(grid.x_nodes, i);
            for (std::size_t j = 0; j < nxi; ++j) {
                const Complex K = kernel(grid.variant, grid.h, grid.x_nodes[i], grid.xi_nodes[j], y);
                acc.add(wx * trap(grid.xi_nodes, j) * std::conj(K) * T.at(i, j));
            }
        }
        return acc.value();
    });
    Complex vu{0.0, 0.0};
    double vv = 0.0, uu = 0.0;
    std::vector<Complex> uy(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) {
        uy[k] = u(ys[k]);
        vu += std::conj(v[k]) * uy[k];
        vv += std::norm(v[k]);
        uu += std::norm(uy[k]);
    }
    if (uu == 0.0) return 0.0;
    if (vv == 0.0) return 1.0;
    const Complex kappa = vu / vv;
    double rr = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) rr += std::norm(kappa * v[k] - uy[k]);
    return std::sqrt(rr / uu);
}

}  // namespace anosov::fbi
