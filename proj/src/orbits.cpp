#include "anosov/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace anosov::orbits {

namespace {

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(x, y, &r)) {
        throw Error(ErrorCode::Overflow, "integer matrix power exceeds 64-bit range");
    }
    return r;
}

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(x, y, &r)) {
        throw Error(ErrorCode::Overflow, "integer matrix power exceeds 64-bit range");
    }
    return r;
}

struct IntMat {
    std::int64_t a, b, c, d;
};

IntMat multiply(const IntMat& x, const IntMat& y) {
    return {checked_add(checked_mul(x.a, y.a), checked_mul(x.b, y.c)),
            checked_add(checked_mul(x.a, y.b), checked_mul(x.b, y.d)),
            checked_add(checked_mul(x.c, y.a), checked_mul(x.d, y.c)),
            checked_add(checked_mul(x.c, y.b), checked_mul(x.d, y.d))};
}

bool close_rel(double x, double y) {
    return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace

HyperbolicToralMap validate_cat_map(std::int64_t a, std::int64_t b, std::int64_t c,
                                    std::int64_t d) {
    const std::int64_t det = checked_add(checked_mul(a, d), -checked_mul(b, c));
    if (det != 1) {
        throw Error(ErrorCode::DeterminantNotOne, "ad - bc = " + std::to_string(det));
    }
    const std::int64_t tr = checked_add(a, d);
    if (tr >= -2 && tr <= 2) {
        throw Error(ErrorCode::NotHyperbolic, "|trace| = " + std::to_string(std::abs(tr)) + " <= 2");
    }
    const double t = std::abs(static_cast<double>(tr));
    HyperbolicToralMap map{a, b, c, d, tr, 0.0};
    map.expansion_log = std::log((t + std::sqrt(t * t - 4.0)) / 2.0);
    return map;
}

std::int64_t trace_power(const HyperbolicToralMap& map, int k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
    IntMat result{1, 0, 0, 1};
    IntMat base{map.a, map.b, map.c, map.d};
    int e = k;
    while (e > 0) {
        if (e & 1) result = multiply(result, base);
        e >>= 1;
        if (e > 0) base = multiply(base, base);
    }
    return checked_add(result.a, result.d);
}

std::int64_t fixed_point_count(const HyperbolicToralMap& map, int k) {
    const std::int64_t tr = trace_power(map, k);
    const std::int64_t n = checked_add(tr, -2);
    return n < 0 ? -n : n;
}

std::vector<std::int64_t> primitive_orbit_counts(const std::vector<std::int64_t>& N) {
    std::vector<std::int64_t> M(N.size(), 0);
    for (std::size_t idx = 0; idx < N.size(); ++idx) {
        const auto p = static_cast<std::int64_t>(idx + 1);
        if (N[idx] < 0) throw Error(ErrorCode::InconsistentCounts, "negative fixed-point count");
        std::int64_t rest = N[idx];
        for (std::int64_t d = 1; d < p; ++d) {
            if (p % d == 0) rest -= d * M[static_cast<std::size_t>(d - 1)];
        }
        if (rest < 0 || rest % p != 0) {
            std::ostringstream msg;
            msg << "period " << p << " leaves " << rest << " points, not a non-negative multiple of "
                << p;
            throw Error(ErrorCode::InconsistentCounts, msg.str());
        }
        M[idx] = rest / p;
    }
    return M;
}

OrbitCatalog enumerate_suspension_orbits(const SuspensionModel& model, double horizon_T) {
    if (!(horizon_T > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon_T must be > 0");
    if (!(model.roof > 0.0)) throw Error(ErrorCode::InvalidArgument, "roof must be > 0");

    OrbitCatalog cat;
    std::ostringstream id;
    id << "cat-suspension[" << model.map.a << "," << model.map.b << "," << model.map.c << ","
       << model.map.d << "];roof=" << model.roof << ";V=" << model.potential_const;
    cat.model_id = id.str();
    cat.horizon_T = horizon_T;
    cat.complete = true;
    cat.topological_entropy_estimate = model.map.expansion_log / model.roof;
    cat.potential_const = model.potential_const;
    cat.tail_model = TailModel::Lattice;
    cat.length_quantum = model.roof;

    const auto K = static_cast<int>(std::floor(horizon_T / model.roof * (1.0 + 1e-12)));
    if (K < 1) return cat;

    std::vector<std::int64_t> N(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) N[static_cast<std::size_t>(k - 1)] = fixed_point_count(model.map, k);
    const auto M = primitive_orbit_counts(N);

    for (int k = 1; k <= K; ++k) {
        const double log_det = std::log(static_cast<double>(N[static_cast<std::size_t>(k - 1)]));
        const double length = k * model.roof;
        for (int p = 1; p <= k; ++p) {
            if (k % p != 0 || M[static_cast<std::size_t>(p - 1)] == 0) continue;
            PeriodicOrbit o;
            o.length = length;
            o.primitive_length = p * model.roof;
            o.potential_integral = model.potential_const * length;
            o.log_det_factor = log_det;
            o.multiplicity = M[static_cast<std::size_t>(p - 1)];
            cat.orbits.push_back(o);
        }
    }
    normalize_catalog(cat);
    return cat;
}

std::vector<int> canonical_cyclic_word(std::vector<int> word) {
    // Free reduction.
    std::vector<int> reduced;
    for (int letter : word) {
        if (!reduced.empty() && reduced.back() == -letter) {
            reduced.pop_back();
        } else {
            reduced.push_back(letter);
        }
    }
    // Cyclic reduction.
    std::size_t lo = 0, hi = reduced.size();
    while (hi - lo >= 2 && reduced[lo] == -reduced[hi - 1]) {
        ++lo;
        --hi;
    }
    std::vector<int> cyc(reduced.begin() + static_cast<std::ptrdiff_t>(lo),
                         reduced.begin() + static_cast<std::ptrdiff_t>(hi));
    if (cyc.empty()) return cyc;
    std::vector<int> best = cyc;
    std::vector<int> rot = cyc;
    for (std::size_t r = 1; r < cyc.size(); ++r) {
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        if (rot < best) best = rot;
    }
    return best;
}

std::size_t primitive_period(const std::vector<int>& word) {
    const std::size_t n = word.size();
    for (std::size_t p = 1; p <= n; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (std::size_t i = p; i < n && ok; ++i) ok = word[i] == word[i - p];
        if (ok) return p;
    }
    return n;
}

std::optional<double> translation_length(double trace) {
    const double t = std::abs(trace) / 2.0;
    if (std::abs(trace) - 2.0 < 1e-9) return std::nullopt;
    return 2.0 * std::log(t + std::sqrt((t - 1.0) * (t + 1.0)));
}

double geodesic_log_det(double length) {
    // 4 sinh^2(l/2) = e^l (1 - e^{-l})^2
    return length + 2.0 * std::log(-std::expm1(-length));
}

namespace {

Mat2 mat_mul(const Mat2& x, const Mat2& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3]};
}

Mat2 mat_inv(const Mat2& x) { return {x[3], -x[1], -x[2], x[0]}; }

}  // namespace

std::vector<WordClass> enumerate_primitive_classes(const FuchsianModel& model) {
    if (model.generators.empty()) {
        throw Error(ErrorCode::EmptyGeneratorList, "at least one generator is required");
    }
    for (std::size_t i = 0; i < model.generators.size(); ++i) {
        const auto& g = model.generators[i];
        const double det = g[0] * g[3] - g[1] * g[2];
        if (std::abs(det - 1.0) > 1e-12) {
            throw Error(ErrorCode::NonUnimodularGenerator,
                        "generator " + std::to_string(i + 1) + " has determinant " + std::to_string(det));
        }
    }
    if (model.max_word_len < 1) throw Error(ErrorCode::InvalidArgument, "max_word_len must be >= 1");
    const int g = static_cast<int>(model.generators.size());
    const double count = 2.0 * g * std::pow(2.0 * g - 1.0, model.max_word_len - 1);
    if (count > 5e7) {
        throw Error(ErrorCode::InvalidArgument, "word enumeration too large; lower max_word_len");
    }

    std::vector<Mat2> letters(static_cast<std::size_t>(2 * g));
    for (int i = 0; i < g; ++i) {
        letters[static_cast<std::size_t>(2 * i)] = model.generators[static_cast<std::size_t>(i)];
        letters[static_cast<std::size_t>(2 * i + 1)] = mat_inv(model.generators[static_cast<std::size_t>(i)]);
    }
    auto letter_matrix = [&](int letter) -> const Mat2& {
        const int idx = 2 * (std::abs(letter) - 1) + (letter < 0 ? 1 : 0);
        return letters[static_cast<std::size_t>(idx)];
    };

    std::vector<WordClass> classes;
    std::vector<int> word;
    std::vector<Mat2> prefix;  // prefix[i] = product of first i+1 letters
    std::function<void()> extend = [&] {
        if (!word.empty() && word.front() != -word.back()) {
            if (canonical_cyclic_word(word) == word && primitive_period(word) == word.size()) {
                const Mat2& m = prefix.back();
                const double tr = m[0] + m[3];
                if (auto len = translation_length(tr)) classes.push_back({word, tr, *len});
            }
        }
        if (static_cast<int>(word.size()) == model.max_word_len) return;
        for (int gi = 1; gi <= g; ++gi) {
            for (int sign : {1, -1}) {
                const int letter = sign * gi;
                if (!word.empty() && word.back() == -letter) continue;
                word.push_back(letter);
                prefix.push_back(prefix.empty() ? letter_matrix(letter)
                                                : mat_mul(prefix.back(), letter_matrix(letter)));
                extend();
                word.pop_back();
                prefix.pop_back();
            }
        }
    };
    extend();
    std::sort(classes.begin(), classes.end(), [](const WordClass& x, const WordClass& y) {
        if (x.length != y.length) return x.length < y.length;
        return x.word < y.word;
    });
    return classes;
}

OrbitCatalog enumerate_geodesic_orbits(const FuchsianModel& model, double horizon_T) {
    if (!(horizon_T > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon_T must be > 0");
    const auto classes = enumerate_primitive_classes(model);

    OrbitCatalog cat;
    std::ostringstream id;
    id << "geodesic[" << model.generators.size() << " generators;L=" << model.max_word_len << "]";
    cat.model_id = id.str();
    cat.horizon_T = horizon_T;
    cat.complete = false;
    cat.topological_entropy_estimate = 1.0;
    cat.potential_const = model.potential_const;
    cat.tail_model = TailModel::None;
    cat.word_length_horizon = model.max_word_len;

    for (const auto& cls : classes) {
        for (int j = 1; j * cls.length <= horizon_T; ++j) {
            PeriodicOrbit o;
            o.length = j * cls.length;
            o.primitive_length = cls.length;
            o.potential_integral = model.potential_const * o.length;
            o.log_det_factor = geodesic_log_det(o.length);
            o.multiplicity = 1;
            cat.orbits.push_back(o);
        }
    }
    normalize_catalog(cat);
    return cat;
}

void normalize_catalog(OrbitCatalog& catalog) {
    auto& v = catalog.orbits;
    std::sort(v.begin(), v.end(), [](const PeriodicOrbit& x, const PeriodicOrbit& y) {
        if (x.length != y.length) return x.length < y.length;
        if (x.primitive_length != y.primitive_length) return x.primitive_length < y.primitive_length;
        return x.log_det_factor < y.log_det_factor;
    });
    std::vector<PeriodicOrbit> merged;
    merged.reserve(v.size());
    for (const auto& o : v) {
        if (!merged.empty()) {
            auto& last = merged.back();
            if (close_rel(last.length, o.length) && close_rel(last.primitive_length, o.primitive_length) &&
                close_rel(last.log_det_factor, o.log_det_factor) &&
                close_rel(last.potential_integral, o.potential_integral)) {
                last.multiplicity += o.multiplicity;
                continue;
            }
        }
        merged.push_back(o);
    }
    v = std::move(merged);
}

}  // namespace anosov::orbits
