#include "anosov/zeta.hpp"

#include <cmath>

namespace anosov::zeta {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2.0;

bool lattice(const OrbitCatalog& cat) {
    return cat.tail_model == orbits::TailModel::Lattice && cat.length_quantum > 0.0;
}

int complete_levels(const OrbitCatalog& cat) {
    return static_cast<int>(std::floor(cat.horizon_T / cat.length_quantum * (1.0 + 1e-12)));
}

// E_k = 2 cosh(h r k): the trace modulus at level k, up to the sign of the eigenvalue.
double level_trace(double hr, int k) { return 2.0 * std::cosh(hr * k); }

// Bound on sum_{k>K} rho_k k^p q^k where rho_k = (E_k + 2)/(E_k - 2) decreases in k.
double weighted_level_tail(double hr, int K, double q, double p) {
    if (!(q < 1.0)) return kInf;
    const int k1 = K + 1;
    const double e = level_trace(hr, k1);
    if (!std::isfinite(e)) return 0.0;
    const double rho = (e + 2.0) / (e - 2.0);
    const double growth = std::max(1.0, std::pow(1.0 + 1.0 / k1, p));
    const double ratio = growth * q;
    if (!(ratio < 1.0)) return kInf;
    const double first = rho * std::pow(static_cast<double>(k1), p) * std::pow(q, k1);
    return first / (1.0 - ratio);
}

double lgamma_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// Common driver for sum_gamma mult * T# * T^{power} * e^{intV - z T - log_det}.
struct WeightedSum {
    Complex value;
    double abs_sum;
};

WeightedSum weighted_sum(const OrbitCatalog& cat, Complex z, int power, bool det_weight) {
    ComplexSum acc;
    NeumaierSum abs_acc;
    for (const auto& o : cat.orbits) {
        const double log_det = det_weight ? o.log_det_factor : 0.0;
        const double base = o.potential_integral - log_det + std::log(o.primitive_length) +
                            power * std::log(o.length);
        const Complex term = static_cast<double>(o.multiplicity) * std::exp(Complex(base, 0.0) - z * o.length);
        acc.add(term);
        abs_acc.add(std::abs(term));
    }
    return {acc.value(), abs_acc.value()};
}

double rounding_bound(double abs_sum) { return 8.0 * kUnit * abs_sum; }

}  // namespace

double weighted_abscissa(const OrbitCatalog& catalog) {
    if (lattice(catalog)) return catalog.potential_const;
    return catalog.topological_entropy_estimate + catalog.potential_const;
}

double ruelle_abscissa(const OrbitCatalog& catalog) {
    return catalog.topological_entropy_estimate + catalog.potential_const;
}

SeriesValue log_zeta_direct(const OrbitCatalog& catalog, Complex z) {
    const auto s = weighted_sum(catalog, z, -1, true);
    SeriesValue out{-s.value, kInf};
    if (lattice(catalog) && z.real() > weighted_abscissa(catalog)) {
        const double r = catalog.length_quantum;
        const double q = std::exp(-(z.real() - catalog.potential_const) * r);
        const double hr = catalog.topological_entropy_estimate * r;
        out.tail_bound = weighted_level_tail(hr, complete_levels(catalog), q, -1.0) +
                         rounding_bound(s.abs_sum);
    }
    return out;
}

SeriesValue log_ruelle_zeta_direct(const OrbitCatalog& catalog, Complex z) {
    const auto s = weighted_sum(catalog, z, -1, false);
    SeriesValue out{-s.value, kInf};
    if (lattice(catalog) && z.real() > ruelle_abscissa(catalog)) {
        const double r = catalog.length_quantum;
        const double q = std::exp(-(z.real() - catalog.potential_const) * r);
        const double grow = std::exp(catalog.topological_entropy_estimate * r) * q;
        const int k1 = complete_levels(catalog) + 1;
        // level weight N_k / k * q^k with N_k <= e^{h r k} + 3
        const double tail = (std::pow(grow, k1) / (1.0 - grow) + 3.0 * std::pow(q, k1) / (1.0 - q)) / k1;
        out.tail_bound = tail + rounding_bound(s.abs_sum);
    }
    return out;
}

TraceMoment trace_moment(const OrbitCatalog& catalog, Complex z, int m) {
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "trace moment order must be >= 1");
    const auto s = weighted_sum(catalog, z, m - 1, true);
    const double inv_fact = std::exp(-lgamma_factorial(m - 1));
    TraceMoment out{m, z, s.value * inv_fact, kInf};
    if (lattice(catalog) && z.real() > weighted_abscissa(catalog)) {
        const double r = catalog.length_quantum;
        const double q = std::exp(-(z.real() - catalog.potential_const) * r);
        const double hr = catalog.topological_entropy_estimate * r;
        out.tail_bound = inv_fact * std::pow(r, m) *
                             weighted_level_tail(hr, complete_levels(catalog), q, m - 1.0) +
                         rounding_bound(s.abs_sum * inv_fact);
    }
    return out;
}

std::vector<Complex> q_polynomial(const OrbitCatalog& catalog, Complex z, int m) {
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "polynomial order must be >= 1");
    std::vector<Complex> q(static_cast<std::size_t>(m));
    q[0] = log_zeta_direct(catalog, z).value;
    for (int l = 1; l < m; ++l) {
        const auto s = weighted_sum(catalog, z, l - 1, true);
        q[static_cast<std::size_t>(l)] = -s.value * std::exp(-lgamma_factorial(l));
    }
    return q;
}

std::vector<double> q_polynomial_tails(const OrbitCatalog& catalog, Complex z, int m) {
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "polynomial order must be >= 1");
    std::vector<double> t(static_cast<std::size_t>(m), kInf);
    t[0] = log_zeta_direct(catalog, z).tail_bound;
    if (!lattice(catalog) || !(z.real() > weighted_abscissa(catalog))) return t;
    const double r = catalog.length_quantum;
    const double q = std::exp(-(z.real() - catalog.potential_const) * r);
    const double hr = catalog.topological_entropy_estimate * r;
    for (int l = 1; l < m; ++l) {
        const auto s = weighted_sum(catalog, z, l - 1, true);
        const double inv_fact = std::exp(-lgamma_factorial(l));
        t[static_cast<std::size_t>(l)] =
            inv_fact * std::pow(r, l) * weighted_level_tail(hr, complete_levels(catalog), q, l - 1.0) +
            rounding_bound(s.abs_sum * inv_fact);
    }
    return t;
}

Complex eval_q_polynomial(const std::vector<Complex>& q, Complex z, Complex lam) {
    const Complex d = z - lam;
    Complex acc{0.0, 0.0};
    for (auto it = q.rbegin(); it != q.rend(); ++it) acc = acc * d + *it;
    return acc;
}

Complex weierstrass_factor(Complex w, int m_minus_1) {
    if (m_minus_1 < 0) throw Error(ErrorCode::InvalidArgument, "Weierstrass order must be >= 0");
    Complex s{0.0, 0.0};
    Complex p{1.0, 0.0};
    for (int l = 1; l <= m_minus_1; ++l) {
        p *= w;
        s += p / static_cast<double>(l);
    }
    return (1.0 - w) * std::exp(s);
}

Complex log_weierstrass_factor(Complex w, int m_minus_1) {
    if (m_minus_1 < 0) throw Error(ErrorCode::InvalidArgument, "Weierstrass order must be >= 0");
    const int m = m_minus_1 + 1;
    const double aw = std::abs(w);
    if (aw < 0.5) {
        // log E = -sum_{l >= m} w^l / l
        Complex p{1.0, 0.0};
        for (int l = 0; l < m; ++l) p *= w;
        Complex s{0.0, 0.0};
        for (int l = m; l < m + 200; ++l) {
            const Complex term = p / static_cast<double>(l);
            s += term;
            if (std::abs(term) <= 1e-18 * std::abs(s)) break;
            p *= w;
        }
        return -s;
    }
    Complex s = std::log(1.0 - w);
    Complex p{1.0, 0.0};
    for (int l = 1; l < m; ++l) {
        p *= w;
        s += p / static_cast<double>(l);
    }
    return s;
}

namespace {

// Estimate of sum over resonances beyond R of 2|lam - z|^m / |lam_k - z|^m, with
// the counting function modelled as N(r) = C r^rho fitted to the list.
double detm_tail_estimate(const RegDetInput& in, Complex lam, double R) {
    std::vector<double> radii;
    for (const auto& r : in.resonances) {
        for (int j = 0; j < r.multiplicity; ++j) radii.push_back(std::abs(r.value));
    }
    if (radii.empty()) return 0.0;
    std::sort(radii.begin(), radii.end());
    const std::size_t n = radii.size();
    if (n < 4) return kInf;
    // log-log least squares on the outer half of the list
    NeumaierSum sx, sy, sxx, sxy;
    std::size_t cnt = 0;
    for (std::size_t i = n / 2; i < n; ++i) {
        if (radii[i] <= 0.0) continue;
        const double x = std::log(radii[i]);
        const double y = std::log(static_cast<double>(i + 1));
        sx.add(x);
        sy.add(y);
        sxx.add(x * x);
        sxy.add(x * y);
        ++cnt;
    }
    if (cnt < 2) return kInf;
    const double c = static_cast<double>(cnt);
    const double den = c * sxx.value() - sx.value() * sx.value();
    if (!(std::abs(den) > 0.0)) return kInf;
    const double rho = (c * sxy.value() - sx.value() * sy.value()) / den;
    const double logC = (sy.value() - rho * sx.value()) / c;
    const int m = in.det_order;
    const double az = std::abs(in.anchor);
    if (!(R > az) || !(m > rho)) return kInf;
    // t = R/r maps [R, inf) to (0, 1]; integrand C rho R^rho t^{m-1-rho} (R - |z| t)^{-m}
    const int N = 400;
    NeumaierSum integral;
    for (int i = 0; i <= N; ++i) {
        const double t = static_cast<double>(i) / N;
        const double wgt = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double pw = m - 1.0 - rho;
        const double tp = (t == 0.0) ? (pw == 0.0 ? 1.0 : 0.0) : std::pow(t, pw);
        integral.add(wgt * tp * std::pow(R - az * t, -m));
    }
    const double value = integral.value() / (3.0 * N) * std::exp(logC) * rho * std::pow(R, rho);
    return 2.0 * std::pow(std::abs(lam - in.anchor), m) * value;
}

}  // namespace

RegDetValue regularized_det(const RegDetInput& input, Complex lam) {
    if (input.det_order < 1) throw Error(ErrorCode::InvalidArgument, "det_order must be >= 1");
    const Complex z = input.anchor;
    ComplexSum acc;
    double max_mod = 0.0;
    for (const auto& r : input.resonances) {
        const Complex d = r.value - z;
        if (std::abs(d) <= 1e-14 * (1.0 + std::abs(z))) {
            throw Error(ErrorCode::AnchorIsResonance, "anchor coincides with a listed resonance");
        }
        acc.add(static_cast<double>(r.multiplicity) * log_weierstrass_factor((lam - z) / d, input.det_order - 1));
        max_mod = std::max(max_mod, std::abs(r.value));
    }
    RegDetValue out;
    out.log_value = acc.value();
    out.value = std::exp(out.log_value);
    const double R = input.truncation_radius > 0.0 ? input.truncation_radius : max_mod;
    out.tail_estimate = detm_tail_estimate(input, lam, R);
    return out;
}

Complex zeta_via_detm(const RegDetInput& input, const std::vector<Complex>& q, Complex lam) {
    return std::exp(regularized_det(input, lam).log_value + eval_q_polynomial(q, input.anchor, lam));
}

double log_abs_zeta_via_detm(const RegDetInput& input, const std::vector<Complex>& q, Complex lam) {
    // Skip the tail fit: this is called on dense circles.
    ComplexSum acc;
    const Complex z = input.anchor;
    for (const auto& r : input.resonances) {
        const Complex d = r.value - z;
        if (std::abs(d) <= 1e-14 * (1.0 + std::abs(z))) {
            throw Error(ErrorCode::AnchorIsResonance, "anchor coincides with a listed resonance");
        }
        acc.add(static_cast<double>(r.multiplicity) * log_weierstrass_factor((lam - z) / d, input.det_order - 1));
    }
    return (acc.value() + eval_q_polynomial(q, z, lam)).real();
}

Complex closed_form_cat_zeta(Complex z, double potential_const, double roof) {
    return 1.0 - std::exp(-(z - potential_const) * roof);
}

std::vector<ResonanceValue> cat_resonances(int k_max, double potential_const, double roof) {
    std::vector<ResonanceValue> out;
    out.reserve(static_cast<std::size_t>(2 * k_max + 1));
    for (int k = -k_max; k <= k_max; ++k) {
        out.push_back({Complex(potential_const, kTwoPi * k / roof), 1});
    }
    return out;
}

Complex CycleExpansion::operator()(Complex z) const {
    const Complex q = std::exp(-z * quantum);
    Complex acc{0.0, 0.0};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * q + *it;
    return acc;
}

CycleExpansion cycle_expansion(const OrbitCatalog& catalog) {
    if (!lattice(catalog)) {
        throw Error(ErrorCode::InvalidArgument, "cycle expansion needs a catalog on a length lattice");
    }
    const double r = catalog.length_quantum;
    const int K = complete_levels(catalog);
    std::vector<NeumaierSum> level(static_cast<std::size_t>(K + 1));
    std::vector<double> level_abs(static_cast<std::size_t>(K + 1), 0.0);
    for (const auto& o : catalog.orbits) {
        const auto k = static_cast<int>(std::lround(o.length / r));
        if (k < 1 || k > K) continue;
        const double w = static_cast<double>(o.multiplicity) *
                         std::exp(o.potential_integral - o.log_det_factor) * o.primitive_length / o.length;
        level[static_cast<std::size_t>(k)].add(w);
        level_abs[static_cast<std::size_t>(k)] += std::abs(w);
    }
    // log zeta = sum_k g_k q^k with g_k = -b_k
    std::vector<double> g(static_cast<std::size_t>(K + 1), 0.0), eg(static_cast<std::size_t>(K + 1), 0.0);
    for (int k = 1; k <= K; ++k) {
        g[static_cast<std::size_t>(k)] = -level[static_cast<std::size_t>(k)].value();
        eg[static_cast<std::size_t>(k)] = 8.0 * kUnit * level_abs[static_cast<std::size_t>(k)];
    }
    CycleExpansion out;
    out.quantum = r;
    out.coeffs.assign(static_cast<std::size_t>(K + 1), 0.0);
    out.error_bounds.assign(static_cast<std::size_t>(K + 1), 0.0);
    out.coeffs[0] = 1.0;
    for (int n = 1; n <= K; ++n) {
        NeumaierSum s;
        double abs_s = 0.0, err = 0.0;
        for (int j = 1; j <= n; ++j) {
            const auto J = static_cast<std::size_t>(j);
            const auto R = static_cast<std::size_t>(n - j);
            const double f = out.coeffs[R];
            const double ef = out.error_bounds[R];
            s.add(j * g[J] * f);
            abs_s += j * std::abs(g[J] * f);
            err += j * (std::abs(g[J]) * ef + eg[J] * (std::abs(f) + ef));
        }
        const double fn = s.value() / n;
        const double en = (err + 4.0 * n * kUnit * abs_s) / n + kUnit * std::abs(fn);
        out.coeffs[static_cast<std::size_t>(n)] = std::abs(fn) <= en ? 0.0 : fn;
        out.error_bounds[static_cast<std::size_t>(n)] = en;
    }
    return out;
}

SeriesValue cat_spectral_trace(Complex z, int m, int J, double potential_const, double roof) {
    if (m < 2) throw Error(ErrorCode::InvalidArgument, "spectral trace needs m >= 2");
    if (J < 0) throw Error(ErrorCode::InvalidArgument, "J must be >= 0");
    if (!(roof > 0.0)) throw Error(ErrorCode::InvalidArgument, "roof must be > 0");
    const Complex w = z - potential_const;
    ComplexSum acc;
    double abs_sum = 0.0;
    for (int j = -J; j <= J; ++j) {
        const Complex d = w - Complex(0.0, kTwoPi * j / roof);
        if (std::abs(d) == 0.0) throw Error(ErrorCode::ZInSet, "z coincides with a resonance");
        const Complex t = std::pow(d, -m);
        acc.add(t);
        abs_sum += std::abs(t);
    }
    SeriesValue out{acc.value(), kInf};
    const double a = kTwoPi * (J + 1) / roof - std::abs(w);
    if (a > 0.0) {
        out.tail_bound = 2.0 * (std::pow(a, -m) + roof / kTwoPi * std::pow(a, 1.0 - m) / (m - 1.0)) +
                         rounding_bound(abs_sum);
    }
    return out;
}

}  // namespace anosov::zeta
