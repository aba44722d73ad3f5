#pragma once

// Model Anosov flows and their periodic-orbit data: constant-roof suspensions
// of hyperbolic toral automorphisms (exact enumeration) and geodesic flows of
// hyperbolic surfaces given by SL(2,R) generators (word enumeration).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anosov/common.hpp"

namespace anosov::orbits {

struct HyperbolicToralMap {
    std::int64_t a = 0, b = 0, c = 0, d = 0;
    std::int64_t trace = 0;
    double expansion_log = 0.0;  // log of the largest eigenvalue modulus
};

struct SuspensionModel {
    HyperbolicToralMap map;
    double roof = 1.0;
    double potential_const = 0.0;
};

using Mat2 = std::array<double, 4>;  // row-major

struct FuchsianModel {
    std::vector<Mat2> generators;
    int max_word_len = 6;
    std::string orientation_note;
    double potential_const = 0.0;
};

struct PeriodicOrbit {
    double length = 0.0;
    double primitive_length = 0.0;
    double potential_integral = 0.0;
    double log_det_factor = 0.0;  // log|det(I - P_gamma)|
    std::int64_t multiplicity = 1;
};

/// How the omitted orbits beyond the horizon are bounded.
enum class TailModel {
    None,     // no rigorous control: tail bounds are reported as +inf
    Lattice,  // lengths on r*N with per-level determinant structure of a toral suspension
};

struct OrbitCatalog {
    std::string model_id;
    std::vector<PeriodicOrbit> orbits;
    double horizon_T = 0.0;
    bool complete = false;
    double topological_entropy_estimate = 0.0;
    double potential_const = 0.0;
    TailModel tail_model = TailModel::None;
    double length_quantum = 0.0;  // roof for suspensions
    int word_length_horizon = 0;  // geodesic catalogs only
};

// ---- cat-map suspension ---------------------------------------------------

[[nodiscard]] HyperbolicToralMap validate_cat_map(std::int64_t a, std::int64_t b, std::int64_t c,
                                                  std::int64_t d);

/// Trace of A^k by exact 64-bit integer matrix powers; throws Overflow.
[[nodiscard]] std::int64_t trace_power(const HyperbolicToralMap& map, int k);

/// N_k = |det(A^k - I)| = |tr(A^k) - 2|.
[[nodiscard]] std::int64_t fixed_point_count(const HyperbolicToralMap& map, int k);

/// Inverts sum_{d|p} d*M_d = N_p. Index 0 of both vectors is period 1.
[[nodiscard]] std::vector<std::int64_t> primitive_orbit_counts(const std::vector<std::int64_t>& N);

[[nodiscard]] OrbitCatalog enumerate_suspension_orbits(const SuspensionModel& model,
                                                       double horizon_T);

// ---- geodesic flow ----------------------------------------------------------

/// A conjugacy class of a word in the free group on the generators; letters
/// are 1-based generator indices, negative for inverses.
struct WordClass {
    std::vector<int> word;  // canonical rotation of the cyclically reduced primitive root
    double trace = 0.0;
    double length = 0.0;
};

/// Cyclic reduction, then the lexicographically least rotation.
[[nodiscard]] std::vector<int> canonical_cyclic_word(std::vector<int> word);

/// Smallest p such that the word is (its first p letters)^(n/p).
[[nodiscard]] std::size_t primitive_period(const std::vector<int>& word);

/// 2*arccosh(|tr|/2), rejecting |tr| - 2 < 1e-9 as numerically parabolic.
[[nodiscard]] std::optional<double> translation_length(double trace);

/// log|det(I - P)| for the geodesic flow: log(4 sinh^2(l/2)).
[[nodiscard]] double geodesic_log_det(double length);

[[nodiscard]] std::vector<WordClass> enumerate_primitive_classes(const FuchsianModel& model);

[[nodiscard]] OrbitCatalog enumerate_geodesic_orbits(const FuchsianModel& model, double horizon_T);

// ---- catalog post-processing --------------------------------------------------

/// Sorts by (length, primitive_length, log_det) and merges entries whose
/// invariants agree to 1e-12 relative, summing multiplicities. Idempotent.
void normalize_catalog(OrbitCatalog& catalog);

}  // namespace anosov::orbits
