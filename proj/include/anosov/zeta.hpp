#pragma once

// Orbit sums for the dynamical determinant and its relatives, and the
// regularized-determinant reconstruction from a resonance list.

#include <vector>

#include "anosov/common.hpp"
#include "anosov/orbits.hpp"

namespace anosov::zeta {

using orbits::OrbitCatalog;

struct SeriesValue {
    Complex value{0.0, 0.0};
    double tail_bound = 0.0;  // +inf when no rigorous bound is available
};

struct TraceMoment {
    int order = 1;
    Complex at{0.0, 0.0};
    Complex value{0.0, 0.0};
    double tail_bound = 0.0;
};

struct ResonanceValue {
    Complex value{0.0, 0.0};
    int multiplicity = 1;
};

struct RegDetInput {
    std::vector<ResonanceValue> resonances;
    int det_order = 4;
    Complex anchor{10.0, 0.0};
    double truncation_radius = 0.0;  // 0: take the largest listed modulus
};

/// det_m over the listed resonances. tail_estimate approximates the size of
/// log det_m contributed by resonances beyond the truncation radius, from a
/// power-law fit N(r) ~ C r^rho of the list itself; it is not a rigorous bound.
struct RegDetValue {
    Complex log_value{0.0, 0.0};
    Complex value{0.0, 0.0};
    double tail_estimate = 0.0;
};

/// Real part above which the determinant-weighted sums of this catalog converge.
[[nodiscard]] double weighted_abscissa(const OrbitCatalog& catalog);
/// Real part above which the unweighted (Ruelle) sums converge.
[[nodiscard]] double ruelle_abscissa(const OrbitCatalog& catalog);

[[nodiscard]] SeriesValue log_zeta_direct(const OrbitCatalog& catalog, Complex z);
[[nodiscard]] SeriesValue log_ruelle_zeta_direct(const OrbitCatalog& catalog, Complex z);
[[nodiscard]] TraceMoment trace_moment(const OrbitCatalog& catalog, Complex z, int m);

/// Coefficients q_0..q_{m-1} of Q_z(lam) = sum_l q_l (z - lam)^l; q_0 = log zeta(z).
[[nodiscard]] std::vector<Complex> q_polynomial(const OrbitCatalog& catalog, Complex z, int m);
[[nodiscard]] Complex eval_q_polynomial(const std::vector<Complex>& q, Complex z, Complex lam);

/// Per-coefficient tail bounds matching q_polynomial.
[[nodiscard]] std::vector<double> q_polynomial_tails(const OrbitCatalog& catalog, Complex z, int m);

[[nodiscard]] Complex weierstrass_factor(Complex w, int m_minus_1);
/// A branch of log E(w, m-1); accurate near w = 0 where E is close to 1.
[[nodiscard]] Complex log_weierstrass_factor(Complex w, int m_minus_1);

[[nodiscard]] RegDetValue regularized_det(const RegDetInput& input, Complex lam);

/// zeta(lam) reconstructed as det_m(lam) * exp(Q_z(lam)).
[[nodiscard]] Complex zeta_via_detm(const RegDetInput& input, const std::vector<Complex>& q,
                                    Complex lam);
/// log|zeta(lam)| via the same representation; finite where zeta overflows.
[[nodiscard]] double log_abs_zeta_via_detm(const RegDetInput& input, const std::vector<Complex>& q,
                                           Complex lam);

[[nodiscard]] Complex closed_form_cat_zeta(Complex z, double potential_const, double roof = 1.0);

/// Resonances c + 2 pi i k / r, |k| <= k_max, of the cat-map suspension.
[[nodiscard]] std::vector<ResonanceValue> cat_resonances(int k_max, double potential_const = 0.0,
                                                         double roof = 1.0);

/// Spectral side of the trace formula for the cat suspension:
/// sum_{|j| <= J} (z - c - 2 pi i j / r)^{-m}, with a bound on the omitted terms (m >= 2).
[[nodiscard]] SeriesValue cat_spectral_trace(Complex z, int m, int J, double potential_const = 0.0,
                                             double roof = 1.0);

/// The dynamical determinant as a polynomial in q = exp(-r z) for catalogs on
/// the lattice r*N, built from the level sums by the Newton recursion
/// n f_n = sum_j j g_j f_{n-j}. Coefficients below their accumulated rounding
/// bound are set to zero so the polynomial stays usable where |q| > 1.
struct CycleExpansion {
    double quantum = 1.0;
    std::vector<double> coeffs;        // f_0 = 1, f_1, ..., f_K
    std::vector<double> error_bounds;  // rounding bound per coefficient

    [[nodiscard]] Complex operator()(Complex z) const;
};

[[nodiscard]] CycleExpansion cycle_expansion(const OrbitCatalog& catalog);

}  // namespace anosov::zeta
