#include <doctest.h>

#include <algorithm>
#include <random>

#include "anosov/resonance.hpp"

using namespace anosov;
using namespace anosov::resonance;

namespace {

Evaluator poly(std::vector<Complex> roots) {
    return [roots = std::move(roots)](Complex z) {
        Complex p{1.0, 0.0};
        for (const auto& r : roots) p *= z - r;
        return p;
    };
}

}  // namespace

TEST_CASE("box helpers") {
    const Box b{-1.0, 3.0, 0.0, 3.0};
    CHECK(b.diameter() == doctest::Approx(5.0));
    CHECK(b.center() == Complex(1.0, 1.5));
    CHECK(b.contains(Complex(0.0, 1.0)));
    CHECK(!b.contains(Complex(-1.6, 1.0), 0.5));
    CHECK(b.contains(Complex(-1.4, 1.0), 0.5));
    CHECK_THROWS_AS(validate_box(Box{1.0, 1.0, 0.0, 1.0}), Error);
}

TEST_CASE("winding counts") {
    const Box b{-2.0, 2.0, -2.0, 2.0};
    CHECK(argument_principle_count(poly({Complex(0.3, 0.1), Complex(-1.0, 1.2), Complex(5.0, 0.0)}), b) == 2);
    CHECK(argument_principle_count([](Complex z) { return std::exp(z); }, b) == 0);
    try {
        (void)argument_principle_count(poly({Complex(2.0, 0.5)}), b);
        FAIL("zero on the boundary accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroNearBoundary);
    }
}

TEST_CASE("property: polynomial roots are recovered") {
    std::mt19937_64 rng(314);
    std::uniform_real_distribution<double> u(-2.7, 2.7);
    const Box b{-3.0, 3.0, -3.0, 3.0};
    for (int trial = 0; trial < 15; ++trial) {
        std::vector<Complex> roots;
        const int n = 1 + trial % 6;
        while (static_cast<int>(roots.size()) < n) {
            const Complex r(u(rng), u(rng));
            bool far = true;
            for (const auto& q : roots) far = far && std::abs(q - r) > 0.05;
            if (far) roots.push_back(r);
        }
        const auto found = locate_zeros(poly(roots), b, 1e-10);
        REQUIRE(found.size() == roots.size());
        for (const auto& r : roots) {
            double best = kInf;
            for (const auto& f : found) best = std::min(best, std::abs(f.value - r));
            CHECK(best < 1e-8);
        }
        for (std::size_t i = 1; i < found.size(); ++i) {
            CHECK(found[i - 1].value.real() <= found[i].value.real());
        }
    }
}

TEST_CASE("multiple zeros are reported once with multiplicity") {
    const Complex a(0.4, -0.3), b(-1.1, 0.7);
    const auto f = poly({a, a, a, b});
    const auto found = locate_zeros(f, Box{-2.0, 2.0, -2.0, 2.0}, 1e-9);
    REQUIRE(found.size() == 2);
    int total = 0;
    for (const auto& r : found) {
        total += r.multiplicity;
        if (r.multiplicity == 3) CHECK(std::abs(r.value - a) < 1e-4);
        if (r.multiplicity == 1) CHECK(std::abs(r.value - b) < 1e-8);
    }
    CHECK(total == 4);
    CHECK(counting_function(found, 1.0) == 3);
    CHECK(counting_function(found, 2.0) == 4);
    CHECK(counting_function(found, 0.1) == 0);
}

TEST_CASE("zeros of 1 - exp(-z) on the imaginary axis") {
    const auto f = [](Complex z) { return 1.0 - std::exp(-z); };
    const auto found = locate_zeros(f, Box{-1.0, 1.0, -20.0, 20.0}, 1e-9);
    REQUIRE(found.size() == 7);
    for (const auto& r : found) {
        const double k = r.value.imag() / kTwoPi;
        CHECK(std::abs(k - std::round(k)) < 1e-9);
        CHECK(std::abs(r.value.real()) < 1e-9);
    }
}

TEST_CASE("invalid tolerance") {
    CHECK_THROWS_AS((void)locate_zeros(poly({0.0}), Box{-1, 1, -1, 1}, 0.0), Error);
}

TEST_CASE("order of the control functions") {
    std::vector<double> radii;
    for (int i = 0; i < 10; ++i) radii.push_back(4.0 * std::pow(1.4, i));
    const auto e1 = order_estimate(LogModulusEvaluator([](Complex z) { return z.real(); }), radii);
    CHECK(e1.rho == doctest::Approx(1.0).epsilon(0.02));
    const auto e2 = order_estimate(LogModulusEvaluator([](Complex z) { return (z * z).real(); }), radii);
    CHECK(e2.rho == doctest::Approx(2.0).epsilon(0.02));
    CHECK(e2.r_squared > 0.999);
    // log M = R + 10 log R: the plain log-log slope is biased, the offset model is not
    const auto e3 = order_estimate(
        LogModulusEvaluator([](Complex z) { return z.real() + 10.0 * std::log(std::abs(z)); }), radii);
    CHECK(std::abs(e3.rho - 1.0) < std::abs(e3.loglog_slope - 1.0));
    const auto ev = order_estimate(Evaluator([](Complex z) { return std::exp(z); }), radii);
    CHECK(ev.rho == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("order fit needs enough growth") {
    try {
        (void)order_estimate(LogModulusEvaluator([](Complex) { return -1.0; }), {1.0, 2.0, 3.0, 4.0});
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyFitRange);
    }
    CHECK_THROWS_AS((void)log_max_on_circle([](Complex) { return 0.0; }, 1.0, 4), Error);
}

TEST_CASE("log_max_on_circle finds the maximum") {
    const double m = log_max_on_circle([](Complex z) { return z.imag(); }, 3.0, 64);
    CHECK(m == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("Hausdorff distance in the z chart") {
    const Complex z(10.0, 0.0);
    const auto F = [](Complex v) { return ExtPoint::finite(v); };
    CHECK(hausdorff_dz({}, {}, z) == 0.0);
    CHECK(std::isinf(hausdorff_dz({F(1.0)}, {}, z)));
    CHECK(hausdorff_dz({F(1.0), ExtPoint::infinity()}, {ExtPoint::infinity(), F(1.0)}, z) == 0.0);
    CHECK(hausdorff_dz({F(0.0)}, {F(5.0)}, z) == doctest::Approx(0.1));
    CHECK(hausdorff_dz({ExtPoint::infinity()}, {F(0.0)}, z) == doctest::Approx(0.1));
    // points at infinity collapse to 0 so a far point costs little
    CHECK(hausdorff_dz({ExtPoint::infinity()}, {F(1e6)}, z) < 1e-5);
    try {
        (void)hausdorff_dz({F(z)}, {F(0.0)}, z);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZInSet);
    }
}

TEST_CASE("property: Hausdorff distance is a metric on finite sets") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    const Complex z(11.0, 0.0);
    auto random_set = [&] {
        std::vector<ExtPoint> s;
        const int n = 1 + static_cast<int>(rng() % 5);
        for (int i = 0; i < n; ++i) s.push_back(ExtPoint::finite({u(rng), u(rng)}));
        if (rng() % 2) s.push_back(ExtPoint::infinity());
        return s;
    };
    for (int trial = 0; trial < 100; ++trial) {
        const auto A = random_set(), B = random_set(), C = random_set();
        const double ab = hausdorff_dz(A, B, z);
        CHECK(ab == doctest::Approx(hausdorff_dz(B, A, z)));
        CHECK(hausdorff_dz(A, A, z) == 0.0);
        CHECK(ab <= hausdorff_dz(A, C, z) + hausdorff_dz(C, B, z) + 1e-15);
    }
}
