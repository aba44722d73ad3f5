#pragma once

// Spectrum of P_eps = X + eps Laplacian on the mapping torus of a cat map.
//
// Fourier modes in x are permuted by A^T under the gluing u(x, theta + 1) = u(A x, theta),
// so each A^T-orbit of nonzero modes gives an invariant sector. Unrolling the orbit
// turns the sector into one function f(s) on a line, where the cell [j, j + 1) carries
// the mode m_j = (A^T)^j m_0 and the operator reads
//   f' + eps (f'' - 4 pi^2 |m(s)|^2 f).
// The zero mode is the trivial sector, diagonalised exactly by e^{2 pi i k theta}.

#include <array>
#include <cstdint>
#include <vector>

#include "anosov/common.hpp"
#include "anosov/orbits.hpp"

namespace anosov::spectra {

using Mode = std::array<std::int64_t, 2>;

struct ModeOrbit {
    Mode seed_mode{0, 0};          // minimal-norm representative
    int window = 0;                // K: modes (A^T)^k m0 for |k| <= K
    std::vector<Mode> modes;       // index k + K
    std::vector<double> norms;     // |m_k|^2, same indexing
};

/// One representative per A^T-orbit meeting {0 < |m| <= max_norm}; the window is
/// filled with K = `window` steps either side of the representative.
[[nodiscard]] std::vector<ModeOrbit> mode_orbits(const orbits::HyperbolicToralMap& map, double max_norm,
                                                 int window = 6);

/// {2 pi i k - 4 pi^2 k^2 eps : |k| <= k_max}, ordered k = -k_max .. k_max.
[[nodiscard]] std::vector<Complex> trivial_sector_spectrum(double eps, int k_max);

struct SectorOperator {
    std::size_t dimension = 0;
    double eps = 0.0;
    double ds = 0.0;
    int K = 0;
    int grid_per_cell = 0;
    std::vector<double> lower, diag, upper;  // tridiagonal bands; lower[i] couples i+1 -> i
    double min_norm = 0.0, max_norm = 0.0;   // over the window
};

[[nodiscard]] SectorOperator build_sector_operator(const ModeOrbit& orbit, double eps, int grid_per_cell, int K);

struct SpectrumResult {
    std::vector<Complex> eigenvalues;  // sorted by real part, descending
    std::size_t sector_id = 0;
    int K = 0;
    double ds = 0.0;
    double boundary_sensitivity = 0.0;  // filled by callers that rerun with K + 2
    std::size_t discarded = 0;          // |Re| beyond the artifact threshold
    bool self_adjoint_path = false;     // symmetrised tridiagonal solve was used
};

/// Dense eigensolve, or a symmetrised tridiagonal solve when all off-diagonal
/// products are positive.
[[nodiscard]] SpectrumResult sector_spectrum(const SectorOperator& op, std::size_t sector_id = 0);

/// Upper bound on the real part of every eigenvalue of the sector on its interval:
///   -1/(4 eps) - 4 pi^2 eps min|m|^2.
/// It follows from the substitution f = e^{-s/(2 eps)} g, which makes the problem self-adjoint.
[[nodiscard]] double sector_real_part_bound(double eps, double min_norm);

struct StabilityRow {
    double eps = 0.0;
    double d_zH = 0.0;
    std::size_t n_eigs_in_disk = 0;
    std::size_t sectors_computed = 0;
    std::size_t sectors_excluded = 0;   // ruled out by the real-part bound
    double max_nontrivial_re = -kInf;   // over every computed nontrivial eigenvalue
    double trivial_max_error = 0.0;     // closed form vs direct evaluation check
    double boundary_sensitivity = 0.0;  // max over computed sectors, eigenvalues in the disk
    std::vector<SpectrumResult> sectors;
    std::vector<Complex> in_disk;       // assembled spectrum inside the disk
};

struct StabilityOptions {
    int grid_per_cell = 32;
    int K = 6;
    bool check_boundary = true;
};

[[nodiscard]] std::vector<StabilityRow> stochastic_stability_experiment(const orbits::HyperbolicToralMap& map,
                                                                        const std::vector<double>& eps_list, double z,
                                                                        double disk_R,
                                                                        const StabilityOptions& opt = {});

}  // namespace anosov::spectra
