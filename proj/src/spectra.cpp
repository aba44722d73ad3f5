#include "anosov/spectra.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <set>

#include "anosov/resonance.hpp"

namespace anosov::spectra {

namespace {

std::int64_t mul_add(std::int64_t p, std::int64_t x, std::int64_t q, std::int64_t y) {
    std::int64_t a, b, r;
    if (__builtin_mul_overflow(p, x, &a) || __builtin_mul_overflow(q, y, &b) || __builtin_add_overflow(a, b, &r)) {
        throw Error(ErrorCode::Overflow, "mode orbit left the int64 range");
    }
    return r;
}

// A^T m and its inverse (det A = 1).
Mode forward(const orbits::HyperbolicToralMap& A, const Mode& m) {
    return {mul_add(A.a, m[0], A.c, m[1]), mul_add(A.b, m[0], A.d, m[1])};
}
Mode backward(const orbits::HyperbolicToralMap& A, const Mode& m) {
    return {mul_add(A.d, m[0], -A.c, m[1]), mul_add(-A.b, m[0], A.a, m[1])};
}

double norm2(const Mode& m) {
    return static_cast<double>(m[0]) * static_cast<double>(m[0]) + static_cast<double>(m[1]) * static_cast<double>(m[1]);
}

// |m_k|^2 is convex along an orbit, so walking downhill both ways finds the minimum.
Mode representative(const orbits::HyperbolicToralMap& A, const Mode& m) {
    std::vector<Mode> pts{m};
    for (int dir : {1, -1}) {
        Mode cur = m;
        for (int step = 0; step < 200; ++step) {
            const Mode nxt = dir > 0 ? forward(A, cur) : backward(A, cur);
            if (norm2(nxt) > norm2(cur)) break;
            pts.push_back(nxt);
            cur = nxt;
        }
    }
    double best = kInf;
    for (const auto& p : pts) best = std::min(best, norm2(p));
    Mode rep{0, 0};
    bool have = false;
    for (const auto& p : pts) {
        if (norm2(p) == best && (!have || p < rep)) {
            rep = p;
            have = true;
        }
    }
    return rep;
}

}  // namespace

std::vector<ModeOrbit> mode_orbits(const orbits::HyperbolicToralMap& map, double max_norm, int window) {
    (void)orbits::validate_cat_map(map.a, map.b, map.c, map.d);
    if (window < 0) throw Error(ErrorCode::InvalidArgument, "orbit window must be >= 0");
    std::vector<ModeOrbit> out;
    if (!(max_norm >= 1.0)) return out;
    const auto r = static_cast<std::int64_t>(std::floor(max_norm));
    const double lim = max_norm * max_norm * (1.0 + 1e-12);
    std::set<Mode> reps;
    for (std::int64_t p = -r; p <= r; ++p) {
        for (std::int64_t q = -r; q <= r; ++q) {
            const Mode m{p, q};
            if ((p == 0 && q == 0) || norm2(m) > lim) continue;
            reps.insert(representative(map, m));
        }
    }
    // Sort by (norm, lexicographic) so that output order is meaningful.
    std::vector<Mode> order(reps.begin(), reps.end());
    std::stable_sort(order.begin(), order.end(), [](const Mode& x, const Mode& y) { return norm2(x) < norm2(y); });
    for (const auto& rep : order) {
        ModeOrbit o;
        o.seed_mode = rep;
        o.window = window;
        o.modes.assign(static_cast<std::size_t>(2 * window + 1), Mode{0, 0});
        o.modes[static_cast<std::size_t>(window)] = rep;
        for (int k = 1; k <= window; ++k) {
            o.modes[static_cast<std::size_t>(window + k)] = forward(map, o.modes[static_cast<std::size_t>(window + k - 1)]);
            o.modes[static_cast<std::size_t>(window - k)] = backward(map, o.modes[static_cast<std::size_t>(window - k + 1)]);
        }
        for (const auto& m : o.modes) o.norms.push_back(norm2(m));
        out.push_back(std::move(o));
    }
    return out;
}

std::vector<Complex> trivial_sector_spectrum(double eps, int k_max) {
    if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be >= 0");
    if (k_max < 0) throw Error(ErrorCode::InvalidArgument, "k_max must be >= 0");
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(2 * k_max + 1));
    for (int k = -k_max; k <= k_max; ++k) {
        const double kk = static_cast<double>(k);
        out.emplace_back(-4.0 * kPi * kPi * kk * kk * eps, kTwoPi * kk);
    }
    return out;
}

SectorOperator build_sector_operator(const ModeOrbit& orbit, double eps, int grid_per_cell, int K) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be > 0");
    if (grid_per_cell < 16) throw Error(ErrorCode::InvalidArgument, "grid_per_cell must be >= 16");
    if (K < 0 || K > orbit.window) throw Error(ErrorCode::InvalidArgument, "K must lie in [0, orbit window]");
    const long long n = static_cast<long long>(grid_per_cell) * (2LL * K + 2) - 1;
    if (n > 10000) throw Error(ErrorCode::DimensionTooLarge, "sector dimension " + std::to_string(n) + " exceeds 1e4");
    SectorOperator op;
    op.dimension = static_cast<std::size_t>(n);
    op.eps = eps;
    op.ds = 1.0 / grid_per_cell;
    op.K = K;
    op.grid_per_cell = grid_per_cell;
    const double ds = op.ds;
    const double diff = eps / (ds * ds);
    const double adv = 1.0 / (2.0 * ds);
    op.diag.resize(op.dimension);
    op.lower.assign(op.dimension - 1, diff - adv);
    op.upper.assign(op.dimension - 1, diff + adv);
    op.min_norm = kInf;
    op.max_norm = 0.0;
    for (int k = -K; k <= K; ++k) {
        const double nm = orbit.norms[static_cast<std::size_t>(k + orbit.window)];
        op.min_norm = std::min(op.min_norm, nm);
        op.max_norm = std::max(op.max_norm, nm);
    }
    for (std::size_t i = 0; i < op.dimension; ++i) {
        // Node i + 1 sits at s = -K - 1 + (i + 1) ds; cell j = floor(s), clamped to the window.
        const long long cell = static_cast<long long>(i + 1) / grid_per_cell - K - 1;
        const long long j = std::clamp<long long>(cell, -K, K);
        const double nm = orbit.norms[static_cast<std::size_t>(j + orbit.window)];
        op.diag[i] = -2.0 * diff - 4.0 * kPi * kPi * eps * nm;
    }
    return op;
}

SpectrumResult sector_spectrum(const SectorOperator& op, std::size_t sector_id) {
    if (op.dimension > 10000) throw Error(ErrorCode::DimensionTooLarge, "sector dimension exceeds 1e4");
    SpectrumResult res;
    res.sector_id = sector_id;
    res.K = op.K;
    res.ds = op.ds;
    const auto n = static_cast<Eigen::Index>(op.dimension);
    if (n == 0) return res;
    bool positive = true;
    for (std::size_t i = 0; i + 1 < op.dimension; ++i) positive = positive && op.lower[i] * op.upper[i] > 0.0;

    std::vector<Complex> ev;
    if (positive) {
        // D^{-1} T D is symmetric with off-diagonals sqrt(l u); same spectrum.
        Eigen::VectorXd d(n), e(std::max<Eigen::Index>(n - 1, 0));
        for (Eigen::Index i = 0; i < n; ++i) d[i] = op.diag[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            e[i] = std::sqrt(op.lower[static_cast<std::size_t>(i)] * op.upper[static_cast<std::size_t>(i)]);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw Error(ErrorCode::EigensolveFailed, "tridiagonal eigensolve failed");
        for (Eigen::Index i = 0; i < n; ++i) ev.emplace_back(es.eigenvalues()[i], 0.0);
        res.self_adjoint_path = true;
    } else {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            M(i, i) = op.diag[static_cast<std::size_t>(i)];
            if (i + 1 < n) {
                M(i, i + 1) = op.upper[static_cast<std::size_t>(i)];
                M(i + 1, i) = op.lower[static_cast<std::size_t>(i)];
            }
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
        if (es.info() != Eigen::Success) throw Error(ErrorCode::EigensolveFailed, "dense eigensolve failed");
        for (Eigen::Index i = 0; i < n; ++i) ev.push_back(es.eigenvalues()[i]);
    }
    const double cap = 10.0 * 4.0 * kPi * kPi * op.max_norm * op.eps;
    for (const auto& v : ev) {
        if (std::abs(v.real()) > cap) {
            ++res.discarded;
        } else {
            res.eigenvalues.push_back(v);
        }
    }
    std::sort(res.eigenvalues.begin(), res.eigenvalues.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return res;
}

double sector_real_part_bound(double eps, double min_norm) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be > 0");
    return -1.0 / (4.0 * eps) - 4.0 * kPi * kPi * eps * min_norm;
}

namespace {

double boundary_shift(const SpectrumResult& base, const SpectrumResult& wide, double disk_R) {
    double worst = 0.0;
    for (const auto& v : base.eigenvalues) {
        if (std::abs(v) > disk_R) continue;
        double best = kInf;
        for (const auto& w : wide.eigenvalues) best = std::min(best, std::abs(v - w));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

std::vector<StabilityRow> stochastic_stability_experiment(const orbits::HyperbolicToralMap& map,
                                                          const std::vector<double>& eps_list, double z, double disk_R,
                                                          const StabilityOptions& opt) {
    if (!(z >= 10.0)) throw Error(ErrorCode::InvalidArgument, "z must be real and >= 10");
    if (!(disk_R > 0.0)) throw Error(ErrorCode::InvalidArgument, "disk radius must be > 0");
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i] < eps_list[i - 1])) throw Error(ErrorCode::InvalidArgument, "eps list must be decreasing");
    }
    const int k_res = static_cast<int>(std::floor(disk_R / kTwoPi));
    std::vector<resonance::ExtPoint> ruelle{resonance::ExtPoint::infinity()};
    for (int k = -k_res; k <= k_res; ++k) {
        const Complex v{0.0, kTwoPi * k};
        if (std::abs(v) <= disk_R) ruelle.push_back(resonance::ExtPoint::finite(v));
    }
    for (const auto& p : ruelle) {
        if (!p.infinite && std::abs(z - p.value) < 0.1) {
            throw Error(ErrorCode::InvalidArgument, "z lies within 0.1 of a resonance");
        }
    }

    std::vector<StabilityRow> rows;
    for (double eps : eps_list) {
        if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be > 0");
        StabilityRow row;
        row.eps = eps;
        const auto trivial = trivial_sector_spectrum(eps, k_res + 1);
        for (std::size_t i = 0; i < trivial.size(); ++i) {
            const double k = static_cast<double>(static_cast<int>(i) - (k_res + 1));
            const Complex direct = Complex(0.0, kTwoPi * k) + eps * Complex(0.0, kTwoPi * k) * Complex(0.0, kTwoPi * k);
            row.trivial_max_error = std::max(row.trivial_max_error, std::abs(direct - trivial[i]));
            if (std::abs(trivial[i]) <= disk_R) row.in_disk.push_back(trivial[i]);
        }

        const double max_norm = std::sqrt(disk_R / (4.0 * kPi * kPi * eps));
        const auto orbits_list = mode_orbits(map, max_norm, opt.K + 2);
        std::vector<std::size_t> todo;
        for (std::size_t s = 0; s < orbits_list.size(); ++s) {
            const double mn = orbits_list[s].norms[static_cast<std::size_t>(orbits_list[s].window)];
            if (sector_real_part_bound(eps, mn) < -disk_R) {
                ++row.sectors_excluded;
            } else {
                todo.push_back(s);
            }
        }
        struct Out {
            SpectrumResult res;
            double shift = 0.0;
        };
        auto outs = parallel_map<Out>(todo.size(), [&](std::size_t t) {
            const auto& orb = orbits_list[todo[t]];
            Out o;
            o.res = sector_spectrum(build_sector_operator(orb, eps, opt.grid_per_cell, opt.K), todo[t] + 1);
            if (opt.check_boundary) {
                const auto wide = sector_spectrum(build_sector_operator(orb, eps, opt.grid_per_cell, opt.K + 2));
                o.shift = boundary_shift(o.res, wide, disk_R);
                o.res.boundary_sensitivity = o.shift;
            }
            return o;
        });
        for (auto& o : outs) {
            for (const auto& v : o.res.eigenvalues) {
                row.max_nontrivial_re = std::max(row.max_nontrivial_re, v.real());
                if (std::abs(v) <= disk_R) row.in_disk.push_back(v);
            }
            row.boundary_sensitivity = std::max(row.boundary_sensitivity, o.shift);
            row.sectors.push_back(std::move(o.res));
        }
        row.sectors_computed = row.sectors.size();
        row.n_eigs_in_disk = row.in_disk.size();
        std::vector<resonance::ExtPoint> pert{resonance::ExtPoint::infinity()};
        for (const auto& v : row.in_disk) pert.push_back(resonance::ExtPoint::finite(v));
        row.d_zH = resonance::hausdorff_dz(ruelle, pert, Complex(z, 0.0));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace anosov::spectra
