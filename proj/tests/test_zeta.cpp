#include <doctest.h>

#include <random>

#include "anosov/orbits.hpp"
#include "anosov/zeta.hpp"

using namespace anosov;
using namespace anosov::zeta;

namespace {

orbits::OrbitCatalog cat_catalog(double horizon, double roof = 1.0, double V = 0.0) {
    orbits::SuspensionModel m;
    m.map = orbits::validate_cat_map(2, 1, 1, 1);
    m.roof = roof;
    m.potential_const = V;
    return orbits::enumerate_suspension_orbits(m, horizon);
}

double lambda_cat() { return (3.0 + std::sqrt(5.0)) / 2.0; }

}  // namespace

TEST_CASE("abscissae of the cat suspension") {
    const auto cat = cat_catalog(10.0, 0.5, 0.3);
    CHECK(weighted_abscissa(cat) == doctest::Approx(0.3));
    CHECK(ruelle_abscissa(cat) == doctest::Approx(0.3 + std::log(lambda_cat()) / 0.5));
}

TEST_CASE("direct sum matches the closed form") {
    const auto cat = cat_catalog(30.0);
    for (Complex z : {Complex(1.0, 0.5), Complex(2.0, -3.0), Complex(0.5, 10.0)}) {
        const auto s = log_zeta_direct(cat, z);
        const Complex exact = std::log(closed_form_cat_zeta(z, 0.0));
        CHECK(std::abs(s.value - exact) <= s.tail_bound);
        CHECK(s.tail_bound < 1e-5);
    }
}

TEST_CASE("property: tail bounds cover the truncation error") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> re(0.15, 2.5), im(-20.0, 20.0), roof(0.3, 2.0), V(-0.5, 0.5);
    for (int trial = 0; trial < 60; ++trial) {
        const double r = roof(rng), v = V(rng);
        const double horizon = r * std::uniform_int_distribution<int>(3, 25)(rng);
        const auto cat = cat_catalog(horizon, r, v);
        const Complex z(v + re(rng), im(rng));
        const auto s = log_zeta_direct(cat, z);
        REQUIRE(std::isfinite(s.tail_bound));
        const Complex exact = std::log(closed_form_cat_zeta(z, v, r));
        CHECK(std::abs(s.value - exact) <= s.tail_bound * (1.0 + 1e-9) + 1e-15);

        const auto t = trace_moment(cat, z, 2);
        const Complex q = std::exp(-(z - v) * r);
        // sum_k k r^2 q^k = r^2 q / (1 - q)^2 for the level-normalized weights
        const Complex exact2 = r * r * q / ((1.0 - q) * (1.0 - q));
        CHECK(std::abs(t.value - exact2) <= t.tail_bound * (1.0 + 1e-9) + 1e-15);
    }
}

TEST_CASE("Ruelle zeta of the cat suspension") {
    const auto cat = cat_catalog(40.0);
    const double lam = lambda_cat();
    for (Complex z : {Complex(2.0, 1.0), Complex(1.5, -4.0)}) {
        const Complex q = std::exp(-z);
        const Complex exact = std::log(1.0 - lam * q) + std::log(1.0 - q / lam) - 2.0 * std::log(1.0 - q);
        const auto s = log_ruelle_zeta_direct(cat, z);
        CHECK(std::abs(s.value - exact) <= s.tail_bound);
        CHECK(s.tail_bound < 1e-6);
    }
}

TEST_CASE("Q polynomial is the Taylor expansion of log zeta") {
    const auto cat = cat_catalog(40.0);
    const Complex z(2.0, 0.3);
    const auto q = q_polynomial(cat, z, 10);
    const auto tails = q_polynomial_tails(cat, z, 10);
    REQUIRE(q.size() == 10);
    REQUIRE(tails.size() == 10);
    for (double t : tails) CHECK(std::isfinite(t));
    for (Complex dl : {Complex(0.05, 0.0), Complex(0.0, -0.08), Complex(-0.04, 0.04)}) {
        const Complex lam = z + dl;
        const Complex exact = std::log(closed_form_cat_zeta(lam, 0.0));
        CHECK(std::abs(eval_q_polynomial(q, z, lam) - exact) < 1e-12);
    }
    CHECK_THROWS_AS((void)q_polynomial(cat, z, 0), Error);
}

TEST_CASE("Weierstrass factors") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int trial = 0; trial < 200; ++trial) {
        const Complex w(u(rng), u(rng));
        const int p = trial % 5;
        Complex s{0.0, 0.0};
        for (int l = 1; l <= p; ++l) s += std::pow(w, l) / static_cast<double>(l);
        const Complex direct = (1.0 - w) * std::exp(s);
        CHECK(std::abs(weierstrass_factor(w, p) - direct) < 1e-14);
        CHECK(std::abs(std::exp(log_weierstrass_factor(w, p)) - direct) < 1e-13);
    }
    CHECK(weierstrass_factor(Complex(1.0, 0.0), 3) == Complex(0.0, 0.0));
    CHECK_THROWS_AS((void)weierstrass_factor(0.1, -1), Error);
}

TEST_CASE("regularized determinant against an explicit product") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        RegDetInput in;
        in.det_order = 1 + trial % 4;
        in.anchor = Complex(12.0, 0.5);
        for (int i = 0; i < 15; ++i) in.resonances.push_back({Complex(u(rng), u(rng)), 1 + i % 2});
        const Complex lam(u(rng), u(rng));
        Complex prod{1.0, 0.0};
        for (const auto& r : in.resonances) {
            prod *= std::pow(weierstrass_factor((lam - in.anchor) / (r.value - in.anchor), in.det_order - 1),
                             r.multiplicity);
        }
        const auto d = regularized_det(in, lam);
        CHECK(std::abs(d.value - prod) <= 1e-10 * (1.0 + std::abs(prod)));
        // vanishing at each listed point, measured against a nearby value
        for (const auto& r : in.resonances) {
            const double at = std::abs(regularized_det(in, r.value).value);
            const double near = std::abs(regularized_det(in, r.value + 1e-3).value);
            CHECK(at <= 1e-6 * near);
        }
    }
}

TEST_CASE("anchor on a resonance is rejected") {
    RegDetInput in;
    in.resonances = {{Complex(1.0, 2.0), 1}};
    in.anchor = Complex(1.0, 2.0);
    try {
        (void)regularized_det(in, 0.0);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AnchorIsResonance);
    }
}

TEST_CASE("cat zeta reconstructed from its resonances") {
    const auto cat = cat_catalog(40.0);
    RegDetInput in;
    in.resonances = cat_resonances(400);
    in.det_order = 2;
    in.anchor = Complex(3.0, 0.0);
    const auto q = q_polynomial(cat, in.anchor, 2);
    for (Complex lam : {Complex(0.5, 1.0), Complex(-1.0, 2.0), Complex(1.0, -0.5)}) {
        const Complex exact = closed_form_cat_zeta(lam, 0.0);
        CHECK(std::abs(zeta_via_detm(in, q, lam) - exact) < 2e-2 * std::abs(exact));
        CHECK(log_abs_zeta_via_detm(in, q, lam) == doctest::Approx(std::log(std::abs(exact))).epsilon(2e-2));
    }
}

TEST_CASE("cycle expansion of the cat suspension is 1 - q") {
    const auto cat = cat_catalog(20.0, 0.5);
    const auto ce = cycle_expansion(cat);
    REQUIRE(ce.coeffs.size() == 41);
    CHECK(ce.coeffs[0] == 1.0);
    CHECK(ce.coeffs[1] == doctest::Approx(-1.0).epsilon(1e-13));
    for (std::size_t n = 2; n < ce.coeffs.size(); ++n) CHECK(ce.coeffs[n] == 0.0);
    for (Complex z : {Complex(-3.0, 1.0), Complex(0.0, 2.0), Complex(2.0, 0.0)}) {
        const Complex exact = closed_form_cat_zeta(z, 0.0, 0.5);
        CHECK(std::abs(ce(z) - exact) < 1e-12 * (1.0 + std::abs(exact)));
    }
}

TEST_CASE("spectral side of the trace formula") {
    const auto cat = cat_catalog(40.0);
    for (int m : {2, 3, 5}) {
        const Complex z(1.0, 0.7);
        const auto orbit_side = trace_moment(cat, z, m);
        const auto spectral = cat_spectral_trace(z, m, 20000);
        CHECK(std::abs(orbit_side.value - spectral.value) <= orbit_side.tail_bound + spectral.tail_bound);
    }
    CHECK_THROWS_AS((void)cat_spectral_trace(0.5, 1, 10), Error);
    try {
        (void)cat_spectral_trace(Complex(0.0, kTwoPi), 2, 3);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZInSet);
    }
}

TEST_CASE("geodesic catalogs carry no rigorous tail") {
    orbits::FuchsianModel model;
    model.generators = {{1, 2, 0, 1}, {1, 0, 2, 1}};
    model.max_word_len = 3;
    const auto cat = orbits::enumerate_geodesic_orbits(model, 5.0);
    const Complex z(3.0, 0.0);
    CHECK(std::isinf(log_zeta_direct(cat, z).tail_bound));
    CHECK(std::isinf(trace_moment(cat, z, 2).tail_bound));
    CHECK(std::isinf(q_polynomial_tails(cat, z, 3)[1]));
    CHECK(std::isfinite(log_zeta_direct(cat, z).value.real()));
    CHECK_THROWS_AS((void)cycle_expansion(cat), Error);
}
