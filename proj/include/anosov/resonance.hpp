#pragma once

// Zeros of entire functions in rectangles, counting, growth order, and the
// d_z Hausdorff distance between resonance sets.

#include <functional>
#include <vector>

#include "anosov/common.hpp"

namespace anosov::resonance {

using Evaluator = std::function<Complex(Complex)>;
/// Returns log|f(z)|; lets order estimates work past double overflow.
using LogModulusEvaluator = std::function<double(Complex)>;

struct Box {
    double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;

    [[nodiscard]] double width() const { return re_max - re_min; }
    [[nodiscard]] double height() const { return im_max - im_min; }
    [[nodiscard]] double diameter() const;
    [[nodiscard]] Complex center() const { return {(re_min + re_max) / 2, (im_min + im_max) / 2}; }
    [[nodiscard]] bool contains(Complex z, double margin = 0.0) const;
};

void validate_box(const Box& box);

struct Resonance {
    Complex value{0.0, 0.0};
    int multiplicity = 1;
    double residual = 0.0;
};

/// Winding number of f around the box boundary. The contour integral of f'/f
/// uses composite Gauss-Legendre panels, doubled until successive values agree.
[[nodiscard]] int argument_principle_count(const Evaluator& f, const Box& box, int quad_points = 16);

struct LocateOptions {
    double min_diameter = 1e-6;
    int max_depth = 40;
    int quad_points = 16;
};

/// All zeros in the box with multiplicity, sorted by (re, im).
[[nodiscard]] std::vector<Resonance> locate_zeros(const Evaluator& f, const Box& box, double tol,
                                                  const LocateOptions& options = {});

/// Number of resonances with |lam| <= R, counted with multiplicity.
[[nodiscard]] int counting_function(const std::vector<Resonance>& res, double R);

struct OrderFit {
    double rho = 0.0;  // exponent of the offset-robust model log M(R) = a + b R^rho
    std::vector<double> radii;
    std::vector<double> log_log_max;
    double r_squared = 0.0;
    double loglog_slope = 0.0;  // plain least-squares slope of log log M against log R
    double loglog_r_squared = 0.0;
    std::vector<double> excluded_radii;  // circles where max |f| <= 1
};

[[nodiscard]] double log_max_on_circle(const LogModulusEvaluator& log_abs_f, double R, int samples = 512);

[[nodiscard]] OrderFit order_estimate(const LogModulusEvaluator& log_abs_f, const std::vector<double>& radii,
                                      int samples = 512);
[[nodiscard]] OrderFit order_estimate(const Evaluator& f, const std::vector<double>& radii, int samples = 512);

/// A point of the plane compactified at infinity.
struct ExtPoint {
    Complex value{0.0, 0.0};
    bool infinite = false;

    static ExtPoint finite(Complex v) { return {v, false}; }
    static ExtPoint infinity() { return {{0.0, 0.0}, true}; }
};

/// Hausdorff distance for d_z(x, y) = |1/(z - x) - 1/(z - y)|, with infinity sent to 0.
[[nodiscard]] double hausdorff_dz(const std::vector<ExtPoint>& A, const std::vector<ExtPoint>& B, Complex z);

}  // namespace anosov::resonance
