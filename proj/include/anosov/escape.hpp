#pragma once

// Escape function on the cotangent bundle of a cat-map suspension, where the
// stable/unstable splitting is explicit.
//
// Covectors at height theta are written xi = a u + b s in the eigen-covector
// basis of A^T, and measured in the smooth adapted metric
//   |xi|_theta^2 = a^2 lambda^{2 theta/r} + b^2 lambda^{-2 theta/r},
// which is compatible with the gluing (x, r) ~ (A x, 0). In these coordinates
// sigma_u = a lambda^{theta/r}, sigma_s = b lambda^{-theta/r}, sigma_0 = eta and
// the lifted flow acts exactly by (e^{ht}, e^{-ht}, 1), h = log(lambda)/r.

#include <array>
#include <cstdint>

#include "anosov/common.hpp"
#include "anosov/orbits.hpp"

namespace anosov::escape {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

struct CotangentSample {
    Vec2 x{0.0, 0.0};  // point of the torus, coordinates in [0, 1)
    double theta = 0.0;  // height in [0, roof)
    Vec2 xi{0.0, 0.0};
    double eta = 0.0;
    double jap = 1.0;  // sqrt(1 + |(xi, eta)|^2) in the adapted metric
};

struct SplittingData {
    orbits::HyperbolicToralMap map;
    double roof = 1.0;
    double expansion_log = 0.0;  // log lambda
    double mu = 0.0;             // eigenvalue of A with |mu| = lambda > 1 (signed)
    Vec3 u_covector{};  // A^T u = mu^{-1} u; annihilates E_0 + E_u
    Vec3 s_covector{};  // A^T s = mu s; annihilates E_0 + E_s
    Vec3 zero_covector{0.0, 0.0, 1.0};
    Vec3 unstable_tangent{};  // A v = mu v
    Vec3 stable_tangent{};    // A v = mu^{-1} v
    // Tangent basis dual to (u, s, zero): <u, dual_u> = 1, etc. dual_u lies in E_s.
    Vec3 dual_u{}, dual_s{}, dual_zero{0.0, 0.0, 1.0};

    [[nodiscard]] double flow_rate() const { return expansion_log / roof; }
};

/// Signed adapted coordinates (sigma_u, sigma_s, sigma_0) of a sample.
struct Components {
    double u = 0.0, s = 0.0, zero = 0.0;

    [[nodiscard]] double norm() const { return std::sqrt(u * u + s * s + zero * zero); }
};

struct EscapeParams {
    double delta = 1.0;
    double T0 = 2.0;
    double T1 = 8.02;  // find_T1(h, 2, 1, 0.3) for the (2,1,1,1) suspension, rounded up
    double A_const = 30.0;
    double gamma = 0.9;
    double gamma1 = 0.6;
    double cutoff_radius = 1.0;
};

void validate_params(const EscapeParams& p);

[[nodiscard]] SplittingData splitting(const orbits::HyperbolicToralMap& map, double roof = 1.0);

[[nodiscard]] Components components(const CotangentSample& alpha, const SplittingData& split);
[[nodiscard]] CotangentSample make_sample(Vec2 x, double theta, Vec2 xi, double eta, const SplittingData& split);
[[nodiscard]] CotangentSample sample_from_components(const Components& c, Vec2 x, double theta,
                                                     const SplittingData& split);

[[nodiscard]] CotangentSample theta_flow(const CotangentSample& alpha, double t, const SplittingData& split);

/// Quintic smoothstep clamped to [0, 1].
[[nodiscard]] double smoothstep(double t);
/// 0 below cutoff, 1 above 2 * cutoff.
[[nodiscard]] double radial_cutoff(double r, double cutoff);

[[nodiscard]] double m_symbol(const Components& c, const EscapeParams& p);
[[nodiscard]] double m_symbol(const CotangentSample& alpha, const EscapeParams& p, const SplittingData& split);

/// G_0(alpha) = int_{-T0}^{T1} m(Theta_t alpha) |Theta_t alpha|^delta dt - A chi(|alpha|) |eta|^delta.
[[nodiscard]] double escape_G0(const CotangentSample& alpha, const EscapeParams& p, const SplittingData& split);
[[nodiscard]] double escape_G0(const Components& c, const EscapeParams& p, double flow_rate);

struct BracketValue {
    double finite_difference = 0.0;
    double closed_form = 0.0;
};

[[nodiscard]] double bracket_closed_form(const Components& c, const EscapeParams& p, double flow_rate);
[[nodiscard]] BracketValue bracket_along_flow(const CotangentSample& alpha, const EscapeParams& p,
                                              const SplittingData& split, double dt);

/// Aperture thresholds of the excluded conic neighbourhoods.
struct ConeNeighbourhoods {
    double kappa_s = 0.5;  // C^s: |s0| + |su| <= kappa_s |ss|
    double kappa_0 = 1.0;  // C^0: |su| + |ss| <= kappa_0 |s0|
};

struct ScanReport {
    std::int64_t samples = 0;
    std::int64_t checked_i = 0, checked_ii = 0;
    std::int64_t violations_i = 0, violations_ii = 0;
    double worst_margin_i = kInf, worst_margin_ii = kInf;
    double fitted_c_i = 0.0, fitted_c_ii = 0.0;
    double fitted_c = 0.0;  // min of the two first-percentile margins
    std::int64_t bracket_checks = 0;
    double max_bracket_gap = 0.0;  // |fd - closed| / max(|closed|, <alpha>^delta)
};

struct ScanOptions {
    std::int64_t sample_count = 10000;
    double radius_min = 10.0;
    ConeNeighbourhoods cones{};
    int bracket_check_stride = 10;  // finite-difference audit on every n-th sample; 0 disables
    double dt = 1e-3;
    std::uint64_t start_index = 1;  // first Halton index; the CLI seed shifts it
};

[[nodiscard]] ScanReport property_scan(const EscapeParams& p, const SplittingData& split, const ScanOptions& opt);

/// Point `index` of the Halton sequence in bases 2, 3, 5, 7, 11, 13.
[[nodiscard]] std::array<double, 6> halton6(std::uint64_t index);

struct T1Search {
    double T1 = 0.0;
    double backward_integral_sup = 0.0;  // sup over sampled directions of the [-T0, 0] integral
    double C1 = 0.0;                     // sampled constant in |Theta_t alpha| >= |alpha| / C1
};

/// Smallest T1 with  sup (1/|alpha|^delta) int_{-T0}^0 |Theta_t alpha|^delta dt < (T1 - T0) / (2 C1^delta),
/// where C1 bounds |alpha| / |Theta_t alpha| for t >= T0 outside the cone
/// |s_u| <= kappa_0s (|s_0| + |s_s|). Both sides are estimated by sampling.
[[nodiscard]] T1Search find_T1(double flow_rate, double T0, double delta, double kappa_0s, int samples = 20000);

}  // namespace anosov::escape
