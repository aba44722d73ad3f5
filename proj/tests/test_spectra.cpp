#include <doctest.h>

#include <algorithm>
#include <set>

#include "anosov/spectra.hpp"

using namespace anosov;
using namespace anosov::spectra;

namespace {

const auto kCat = orbits::validate_cat_map(2, 1, 1, 1);

// Points of the A^T-orbit of m with |m| <= bound, found by walking both ways.
std::set<Mode> orbit_points(const orbits::HyperbolicToralMap& A, Mode m, double bound) {
    std::set<Mode> pts{m};
    for (int dir : {1, -1}) {
        Mode cur = m;
        for (int step = 0; step < 40; ++step) {
            if (dir > 0) {
                cur = {A.a * cur[0] + A.c * cur[1], A.b * cur[0] + A.d * cur[1]};
            } else {
                cur = {A.d * cur[0] - A.c * cur[1], -A.b * cur[0] + A.a * cur[1]};
            }
            if (std::hypot(static_cast<double>(cur[0]), static_cast<double>(cur[1])) > bound) break;
            pts.insert(cur);
        }
    }
    return pts;
}

double top_eigenvalue(const ModeOrbit& orb, double eps, int g) {
    return sector_spectrum(build_sector_operator(orb, eps, g, 3)).eigenvalues.front().real();
}

}  // namespace

TEST_CASE("the unit modes lie on distinct orbits") {
    const auto pts = orbit_points(kCat, {1, 0}, 1e6);
    CHECK(pts.count({0, 1}) == 0);
    CHECK(pts.count({-1, 0}) == 0);
    CHECK(pts.count({2, 1}) == 1);
    const auto orbs = mode_orbits(kCat, 1.0);
    std::set<Mode> reps;
    for (const auto& o : orbs) reps.insert(o.seed_mode);
    CHECK(reps.count({1, 0}) == 1);
    CHECK(reps.count({0, 1}) == 1);
    CHECK(orbs.size() == 4);
}

TEST_CASE("property: every small mode is covered by exactly one orbit") {
    for (auto A : {kCat, orbits::validate_cat_map(3, 1, 2, 1), orbits::validate_cat_map(1, 1, 1, 2)}) {
        const double R = 9.0;
        const auto orbs = mode_orbits(A, R, 4);
        std::set<Mode> reps;
        for (const auto& o : orbs) {
            reps.insert(o.seed_mode);
            REQUIRE(o.modes.size() == 9);
            CHECK(o.modes[4] == o.seed_mode);
            for (std::size_t k = 0; k < o.modes.size(); ++k) {
                const auto& m = o.modes[k];
                CHECK(o.norms[k] == static_cast<double>(m[0] * m[0] + m[1] * m[1]));
                CHECK(o.norms[k] >= o.norms[4]);
            }
            for (std::size_t k = 0; k + 1 < o.modes.size(); ++k) {
                const auto& m = o.modes[k];
                const Mode next{A.a * m[0] + A.c * m[1], A.b * m[0] + A.d * m[1]};
                CHECK(next == o.modes[k + 1]);
            }
        }
        CHECK(reps.size() == orbs.size());
        for (std::int64_t p = -9; p <= 9; ++p) {
            for (std::int64_t q = -9; q <= 9; ++q) {
                if ((p == 0 && q == 0) || p * p + q * q > 81) continue;
                const auto pts = orbit_points(A, {p, q}, 1e9);
                int hits = 0;
                for (const auto& r : reps) hits += pts.count(r) ? 1 : 0;
                CHECK(hits == 1);
            }
        }
    }
    CHECK(mode_orbits(kCat, 0.5).empty());
}

TEST_CASE("trivial sector") {
    const auto t = trivial_sector_spectrum(0.1, 2);
    REQUIRE(t.size() == 5);
    CHECK(t[2] == Complex(0.0, 0.0));
    CHECK(t[3].imag() == doctest::Approx(kTwoPi));
    CHECK(t[3].real() == doctest::Approx(-0.4 * kPi * kPi));
    CHECK(t[0] == std::conj(t[4]));
    CHECK(trivial_sector_spectrum(0.0, 1)[2].real() == 0.0);
    CHECK_THROWS_AS((void)trivial_sector_spectrum(-1.0, 1), Error);
}

TEST_CASE("sector operator dimension and limits") {
    const auto orbs = mode_orbits(kCat, 1.0, 6);
    const auto op = build_sector_operator(orbs[0], 0.05, 32, 6);
    CHECK(op.dimension == 32 * 14 - 1);
    CHECK(op.ds == doctest::Approx(1.0 / 32));
    CHECK(op.lower.size() == op.dimension - 1);
    CHECK(op.min_norm == 1.0);
    try {
        (void)build_sector_operator(orbs[0], 0.05, 800, 6);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionTooLarge);
    }
    CHECK_THROWS_AS((void)build_sector_operator(orbs[0], 0.05, 8, 6), Error);
    CHECK_THROWS_AS((void)build_sector_operator(orbs[0], 0.05, 32, 7), Error);
    CHECK_THROWS_AS((void)build_sector_operator(orbs[0], 0.0, 32, 6), Error);
}

TEST_CASE("eigenvalues respect Gershgorin discs and the real-part bound") {
    const auto orbs = mode_orbits(kCat, 2.0, 6);
    for (double eps : {0.2, 0.05, 0.005}) {
        const auto op = build_sector_operator(orbs[0], eps, 32, 4);
        const auto res = sector_spectrum(op);
        CHECK(res.self_adjoint_path == (eps > op.ds / 2));
        const std::size_t n = op.dimension;
        for (const auto& v : res.eigenvalues) {
            bool inside = false;
            for (std::size_t i = 0; i < n && !inside; ++i) {
                double r = 0.0;
                if (i > 0) r += std::abs(op.lower[i - 1]);
                if (i + 1 < n) r += std::abs(op.upper[i]);
                inside = std::abs(v - op.diag[i]) <= r * (1.0 + 1e-9);
            }
            CHECK(inside);
            if (res.self_adjoint_path) {
                CHECK(v.real() <= sector_real_part_bound(eps, op.min_norm) + 1e-6 * std::abs(v.real()));
            }
        }
    }
}

TEST_CASE("second order convergence in the grid") {
    const auto orb = mode_orbits(kCat, 1.0, 6).front();
    const double eps = 0.1;
    const double a = top_eigenvalue(orb, eps, 16), b = top_eigenvalue(orb, eps, 32), c = top_eigenvalue(orb, eps, 64);
    const double order = std::log2((a - b) / (b - c));
    CHECK(order == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("stability experiment") {
    const auto rows = stochastic_stability_experiment(kCat, {0.1, 0.01}, 10.0, 15.0);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.boundary_sensitivity < 1e-6);
        CHECK(r.max_nontrivial_re < 0.0);
        CHECK(r.trivial_max_error < 1e-12);
        CHECK(r.n_eigs_in_disk == r.in_disk.size());
        CHECK(r.d_zH > 0.0);
        for (const auto& v : r.in_disk) CHECK(std::abs(v) <= 15.0);
    }
    CHECK(rows[1].d_zH < rows[0].d_zH);

    const auto unit = stochastic_stability_experiment(kCat, {0.01}, 10.0, 1.0);
    CHECK(unit[0].d_zH == 0.0);
    CHECK(unit[0].n_eigs_in_disk == 1);

    CHECK_THROWS_AS((void)stochastic_stability_experiment(kCat, {0.1}, 5.0, 15.0), Error);
    CHECK_THROWS_AS((void)stochastic_stability_experiment(kCat, {0.01, 0.1}, 10.0, 15.0), Error);
    CHECK_THROWS_AS((void)stochastic_stability_experiment(kCat, {0.1}, 10.0, 0.0), Error);
}
