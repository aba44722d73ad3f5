#pragma once

// One-dimensional FBI transforms of Gevrey test signals: flat, scaled-phase
// and Gabor kernels, decay fits, wavefront detection and approximate inversion.

#include <cstddef>
#include <vector>

#include "anosov/common.hpp"

namespace anosov::fbi {

enum class Variant { Flat, ScaledPhase, Gabor };

[[nodiscard]] const char* to_string(Variant v);
[[nodiscard]] Variant variant_from_string(const std::string& s);

/// Smooth cutoff equal to 1 on |x - center| <= plateau, 0 beyond plateau + ramp,
/// with a Gevrey-sigma transition built from exp(-t^{-1/(sigma-1)}).
struct Window {
    double center = 0.0;
    double plateau = 40.0;
    double ramp = 10.0;
    double sigma = 3.0;

    [[nodiscard]] double operator()(double x) const;
};

struct Singularity {
    enum class Kind { Jump, Kink };
    Kind kind = Kind::Jump;
    double x0 = 0.0;
    double amplitude = 1.0;
};

/// u(x) = window(x) * (sum_l a_l e^{i l x} + sum of singular parts), with a step
/// H(x - x0) or a kink |x - x0| for each singularity.
struct GevreySignal {
    double s = 1.0;
    double c = 1.0;
    int L = 0;
    std::vector<Complex> modes;  // a_l stored at index l + L
    Window window;
    std::vector<Singularity> singularities;

    [[nodiscard]] Complex mode(int l) const { return modes[static_cast<std::size_t>(l + L)]; }
    [[nodiscard]] Complex operator()(double x) const;
    [[nodiscard]] double max_abs_bound() const;
};

/// |a_l| = exp(-c |l|^{1/s}) with unit phases exp(2 pi i frac(l * phase_step)); a_0 = 1.
[[nodiscard]] GevreySignal make_gevrey_signal(double s, double c, int L, double phase_step = 0.6180339887498949);

/// A single mode e^{i l0 x} under the default window.
[[nodiscard]] GevreySignal single_mode_signal(int l0);

struct FbiGrid {
    double h = 0.1;
    std::vector<double> x_nodes;
    std::vector<double> xi_nodes;
    Variant variant = Variant::Flat;
};

void validate_grid(const FbiGrid& grid);
[[nodiscard]] std::vector<double> linspace(double a, double b, std::size_t n);
/// Grid with x spacing sqrt(h)/8 over [x_lo, x_hi] and n_xi frequencies.
[[nodiscard]] FbiGrid make_grid(double h, double x_lo, double x_hi, double xi_lo, double xi_hi, std::size_t n_xi,
                                Variant v = Variant::Flat);

/// Values indexed [ix * n_xi + jxi].
struct PhaseSpaceArray {
    std::size_t nx = 0, nxi = 0;
    std::vector<Complex> data;

    [[nodiscard]] Complex& at(std::size_t i, std::size_t j) { return data[i * nxi + j]; }
    [[nodiscard]] const Complex& at(std::size_t i, std::size_t j) const { return data[i * nxi + j]; }
};

/// Kernel K(x, xi; x') of the chosen variant.
[[nodiscard]] Complex kernel(Variant v, double h, double x, double xi, double xp);

/// Quadrature path: composite Gauss-Legendre over a global partition with
/// breakpoints at singularities, refined by panel doubling until the largest
/// change is below rel_tol * (2 pi h)^{-1} * max|u|.
[[nodiscard]] PhaseSpaceArray fbi_transform(const GevreySignal& u, const FbiGrid& grid, double rel_tol = 1e-12);

/// Mode-by-mode closed form; exact up to the window, which must equal 1 on a
/// neighbourhood of every x node wide enough for the Gaussian to underflow.
[[nodiscard]] PhaseSpaceArray fbi_transform_modal(const GevreySignal& u, const FbiGrid& grid);

/// Closed form for one mode e^{i l x}: the transform at (x, xi).
[[nodiscard]] Complex single_mode_transform(Variant v, double h, int l, double x, double xi);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double xi_min = 0.0, xi_max = 0.0;
    std::size_t points = 0;
};

/// Least squares of log sup_x |Tu(., xi)| against (<xi>/h)^{exponent}, over the
/// frequencies where the sup lies in [floor, ceiling].
[[nodiscard]] DecayFit decay_fit(const PhaseSpaceArray& values, const FbiGrid& grid, double exponent,
                                 double floor = 1e-280, double ceiling = 1e-3);

struct WavefrontCluster {
    double x_lo = 0.0, x_hi = 0.0;
    double center = 0.0;  // node of the run where |Tu| peaks at the highest frequency
    int xi_sign = 1;
};

struct WavefrontResult {
    std::vector<double> cell_x;     // detected cells: x node ...
    std::vector<int> cell_xi_sign;  // ... and frequency half-line
    std::vector<WavefrontCluster> clusters;
    double global_slope_pos = 0.0, global_slope_neg = 0.0;
    std::vector<double> slope_pos, slope_neg;  // local decay slope per x node
};

/// Flags x nodes whose local decay slope along each frequency half-line is below
/// threshold times the median slope. Uses positive and negative xi nodes separately.
[[nodiscard]] WavefrontResult wavefront_scan(const GevreySignal& u, const FbiGrid& grid, double threshold = 0.5,
                                             double exponent = 1.0);
/// Same detection on precomputed transform values.
[[nodiscard]] WavefrontResult wavefront_from_array(const PhaseSpaceArray& T, const FbiGrid& grid,
                                                   double threshold = 0.5, double exponent = 1.0);

/// Relative L2 residual of the best scalar multiple of S(Tu) against u on the
/// middle half of the x range, with S the adjoint of T discretised on the grid.
[[nodiscard]] double inversion_residual(const GevreySignal& u, const FbiGrid& grid);

/// Grid used for inversion checks: x in [-pi, pi], xi in [-1, 1].
[[nodiscard]] FbiGrid inversion_grid(double h, Variant v = Variant::Flat);

}  // namespace anosov::fbi
