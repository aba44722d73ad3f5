#include "anosov/resonance.hpp"

#include <array>
#include <cmath>
#include <optional>

#include "anosov/quadrature.hpp"

namespace anosov::resonance {

double Box::diameter() const { return std::hypot(width(), height()); }

bool Box::contains(Complex z, double margin) const {
    return z.real() >= re_min - margin && z.real() <= re_max + margin && z.imag() >= im_min - margin &&
           z.imag() <= im_max + margin;
}

void validate_box(const Box& box) {
    if (!(box.re_min < box.re_max) || !(box.im_min < box.im_max)) {
        throw Error(ErrorCode::InvalidArgument, "box needs re_min < re_max and im_min < im_max");
    }
}

namespace {

// Central difference; the step shrinks with the box so that zeros a guard
// distance away from the contour stay resolved.
Complex derivative(const Evaluator& f, Complex z, double scale) {
    const double h = std::min(1e-6 * (1.0 + std::abs(z)), 1e-5 * scale);
    return (f(z + h) - f(z - h)) / (2.0 * h);
}

// Contour integral of f'/f over the boundary with `panels` panels per edge.
// Also reports the smallest |f/f'| seen, a proxy for the distance to a zero.
struct ContourResult {
    Complex integral;
    double min_distance;
};

ContourResult contour_integral(const Evaluator& f, const Box& box, int panels, int order) {
    const auto& rule = gauss_legendre(order);
    const std::array<Complex, 5> corners = {Complex(box.re_min, box.im_min), Complex(box.re_max, box.im_min),
                                            Complex(box.re_max, box.im_max), Complex(box.re_min, box.im_max),
                                            Complex(box.re_min, box.im_min)};
    ComplexSum acc;
    double min_d = kInf;
    for (int e = 0; e < 4; ++e) {
        const Complex a = corners[static_cast<std::size_t>(e)];
        const Complex b = corners[static_cast<std::size_t>(e + 1)];
        const Complex step = (b - a) / static_cast<double>(panels);
        for (int p = 0; p < panels; ++p) {
            const Complex mid = a + step * (p + 0.5);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const Complex z = mid + step * (0.5 * rule.nodes[i]);
                const Complex fz = f(z);
                const Complex dfz = derivative(f, z, std::min(box.width(), box.height()));
                if (fz == Complex(0.0, 0.0)) {
                    min_d = 0.0;
                    continue;
                }
                acc.add(rule.weights[i] * 0.5 * (dfz / fz) * step);
                if (std::abs(dfz) > 0.0) min_d = std::min(min_d, std::abs(fz / dfz));
            }
        }
    }
    return {acc.value(), min_d};
}

}  // namespace

int argument_principle_count(const Evaluator& f, const Box& box, int quad_points) {
    validate_box(box);
    const double guard = 1e-3 * std::min(box.width(), box.height());
    std::optional<Complex> prev;
    Complex w{0.0, 0.0};
    bool converged = false;
    for (int panels = 4; panels <= 4096; panels *= 2) {
        const auto r = contour_integral(f, box, panels, quad_points);
        if (!(r.min_distance > guard)) {
            throw Error(ErrorCode::ZeroNearBoundary, "a zero lies within the boundary guard distance");
        }
        w = r.integral / Complex(0.0, kTwoPi);
        if (prev && std::abs(w - *prev) < 1e-7) {
            converged = true;
            break;
        }
        prev = w;
    }
    const double n = std::round(w.real());
    if (!converged || std::abs(w - Complex(n, 0.0)) > 1e-3 || !std::isfinite(n)) {
        throw Error(ErrorCode::NonIntegerWinding,
                    "winding integral " + std::to_string(w.real()) + "+" + std::to_string(w.imag()) + "i");
    }
    return static_cast<int>(n);
}

namespace {

constexpr std::array<double, 6> kCutFractions = {0.5 + 0.01 * 0.6180339887, 0.5 - 0.0371, 0.5 + 0.0618,
                                                 0.4142, 0.5773, 0.4481};

struct Finder {
    const Evaluator& f;
    double tol;
    LocateOptions opt;
    std::vector<Resonance> found;

    std::optional<Complex> newton(Complex z0, int mult, const Box& box) const {
        Complex z = z0;
        const double margin = 1e-9 * (1.0 + box.diameter());
        for (int it = 0; it < 100; ++it) {
            const Complex fz = f(z);
            if (fz == Complex(0.0, 0.0)) break;
            const Complex d = derivative(f, z, std::min(box.width(), box.height()));
            if (d == Complex(0.0, 0.0)) return std::nullopt;
            const Complex step = static_cast<double>(mult) * fz / d;
            z -= step;
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
            if (!box.contains(z, std::max(margin, 0.5 * box.diameter()))) return std::nullopt;
            if (std::abs(step) <= 4e-16 * (1.0 + std::abs(z))) break;
        }
        if (!box.contains(z, margin)) return std::nullopt;
        return z;
    }

    void solve(const Box& box, int count, int depth) {
        if (count == 0) return;
        const bool terminal = box.diameter() <= opt.min_diameter;
        if (count == 1 || terminal) {
            if (auto z = newton(box.center(), count, box)) {
                const double res = std::abs(f(*z));
                if (res <= tol) {
                    found.push_back({*z, count, res});
                    return;
                }
            }
            if (terminal) {
                if (count > 0) {
                    // Accept the center of a minimal box if it meets the tolerance.
                    const double res = std::abs(f(box.center()));
                    if (res <= tol) {
                        found.push_back({box.center(), count, res});
                        return;
                    }
                }
                throw Error(ErrorCode::MaxDepthExceeded, "minimal box reached without meeting tolerance");
            }
        }
        if (depth >= opt.max_depth) throw Error(ErrorCode::MaxDepthExceeded, "subdivision depth limit reached");
        for (double t : kCutFractions) {
            const double xr = box.re_min + t * box.width();
            const double yi = box.im_min + t * box.height();
            const std::array<Box, 4> kids = {Box{box.re_min, xr, box.im_min, yi}, Box{xr, box.re_max, box.im_min, yi},
                                             Box{box.re_min, xr, yi, box.im_max}, Box{xr, box.re_max, yi, box.im_max}};
            std::array<int, 4> counts{};
            bool ok = true;
            try {
                int total = 0;
                for (std::size_t i = 0; i < 4; ++i) {
                    counts[i] = argument_principle_count(f, kids[i], opt.quad_points);
                    total += counts[i];
                }
                ok = total == count;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::ZeroNearBoundary && e.code() != ErrorCode::NonIntegerWinding) throw;
                ok = false;
            }
            if (!ok) continue;
            for (std::size_t i = 0; i < 4; ++i) solve(kids[i], counts[i], depth + 1);
            return;
        }
        throw Error(ErrorCode::ZeroNearBoundary, "every tried subdivision passes too close to a zero");
    }
};

}  // namespace

std::vector<Resonance> locate_zeros(const Evaluator& f, const Box& box, double tol, const LocateOptions& options) {
    validate_box(box);
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be > 0");
    Finder finder{f, tol, options, {}};
    const int count = argument_principle_count(f, box, options.quad_points);
    finder.solve(box, count, 0);
    auto out = std::move(finder.found);
    std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return out;
}

int counting_function(const std::vector<Resonance>& res, double R) {
    int n = 0;
    for (const auto& r : res) {
        if (std::abs(r.value) <= R) n += r.multiplicity;
    }
    return n;
}

double log_max_on_circle(const LogModulusEvaluator& log_abs_f, double R, int samples) {
    if (samples < 8) throw Error(ErrorCode::InvalidArgument, "need at least 8 samples per circle");
    auto at = [&](double theta) { return log_abs_f(std::polar(R, theta)); };
    const double dtheta = kTwoPi / samples;
    int best = 0;
    double best_v = -kInf;
    for (int j = 0; j < samples; ++j) {
        const double v = at(j * dtheta);
        if (v > best_v) {
            best_v = v;
            best = j;
        }
    }
    // Golden-section refinement on the bracketing interval of the discrete argmax.
    constexpr double g = 0.6180339887498949;
    double a = (best - 1) * dtheta, b = (best + 1) * dtheta;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = at(c), fd = at(d);
    for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = at(d);
        }
    }
    return std::max({best_v, fc, fd});
}

namespace {

struct LinearFit {
    double slope = 0.0, intercept = 0.0, sse = kInf, r_squared = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    NeumaierSum sx, sy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / n, my = sy.value() / n;
    NeumaierSum sxx, sxy, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx.add((x[i] - mx) * (x[i] - mx));
        sxy.add((x[i] - mx) * (y[i] - my));
        syy.add((y[i] - my) * (y[i] - my));
    }
    LinearFit fit;
    if (!(sxx.value() > 0.0)) return fit;
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    NeumaierSum sse;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        sse.add(r * r);
    }
    fit.sse = sse.value();
    fit.r_squared = syy.value() > 0.0 ? std::clamp(1.0 - fit.sse / syy.value(), 0.0, 1.0) : 1.0;
    return fit;
}

}  // namespace

OrderFit order_estimate(const LogModulusEvaluator& log_abs_f, const std::vector<double>& radii, int samples) {
    OrderFit out;
    std::vector<double> logR, logM;
    for (double R : radii) {
        if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "radii must be positive");
        const double lm = log_max_on_circle(log_abs_f, R, samples);
        if (!(lm > 0.0) || !std::isfinite(lm)) {
            out.excluded_radii.push_back(R);  // max modulus <= 1: log log undefined
            continue;
        }
        out.radii.push_back(R);
        out.log_log_max.push_back(std::log(lm));
        logR.push_back(std::log(R));
        logM.push_back(lm);
    }
    if (out.radii.size() < 3) {
        throw Error(ErrorCode::EmptyFitRange, "fewer than three circles with max modulus above 1");
    }
    const auto plain = least_squares(logR, out.log_log_max);
    out.loglog_slope = plain.slope;
    out.loglog_r_squared = plain.r_squared;

    // log M(R) = a + b R^rho: linear in (a, b) for fixed rho, so scan rho.
    auto fit_at = [&](double rho) {
        std::vector<double> x(out.radii.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::pow(out.radii[i], rho);
        auto f = least_squares(x, logM);
        if (!(f.slope > 0.0)) f.sse = kInf;
        return f;
    };
    double best_rho = 1.0, best_sse = kInf;
    for (int i = 0; i <= 800; ++i) {
        const double rho = 0.02 + i * 0.01;
        const double sse = fit_at(rho).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_rho = rho;
        }
    }
    constexpr double g = 0.6180339887498949;
    double a = std::max(0.01, best_rho - 0.01), b = best_rho + 0.01;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = fit_at(c).sse, fd = fit_at(d).sse;
    for (int it = 0; it < 80 && b - a > 1e-10; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = fit_at(c).sse;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = fit_at(d).sse;
        }
    }
    const double rho = fc < fd ? c : d;
    const auto fit = fit_at(std::min(fc, fd) < best_sse ? rho : best_rho);
    out.rho = std::min(fc, fd) < best_sse ? rho : best_rho;
    out.r_squared = std::isfinite(fit.sse) ? fit.r_squared : 0.0;
    return out;
}

OrderFit order_estimate(const Evaluator& f, const std::vector<double>& radii, int samples) {
    const LogModulusEvaluator logf = [&](Complex z) { return std::log(std::abs(f(z))); };
    return order_estimate(logf, radii, samples);
}

double hausdorff_dz(const std::vector<ExtPoint>& A, const std::vector<ExtPoint>& B, Complex z) {
    auto image = [&](const ExtPoint& p) -> Complex {
        if (p.infinite) return {0.0, 0.0};
        const Complex d = z - p.value;
        if (std::abs(d) == 0.0) throw Error(ErrorCode::ZInSet, "z belongs to one of the sets");
        return 1.0 / d;
    };
    std::vector<Complex> a, b;
    a.reserve(A.size());
    b.reserve(B.size());
    for (const auto& p : A) a.push_back(image(p));
    for (const auto& p : B) b.push_back(image(p));
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return kInf;
    auto directed = [](const std::vector<Complex>& x, const std::vector<Complex>& y) {
        double worst = 0.0;
        for (const auto& p : x) {
            double best = kInf;
            for (const auto& q : y) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace anosov::resonance
