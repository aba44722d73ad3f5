#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace anosov {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Every failure mode named by the public contracts. The string form is what
// ends up in machine-readable CLI error reports.
enum class ErrorCode {
    DeterminantNotOne,
    NotHyperbolic,
    Overflow,
    InconsistentCounts,
    NonUnimodularGenerator,
    EmptyGeneratorList,
    InvalidArgument,
    AnchorIsResonance,
    ZeroNearBoundary,
    NonIntegerWinding,
    MaxDepthExceeded,
    ZInSet,
    QuadratureNotConverged,
    EmptyFitRange,
    DimensionTooLarge,
    EigensolveFailed,
    ConfigParse,
    IoError,
};

[[nodiscard]] constexpr const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DeterminantNotOne: return "DeterminantNotOne";
        case ErrorCode::NotHyperbolic: return "NotHyperbolic";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::InconsistentCounts: return "InconsistentCounts";
        case ErrorCode::NonUnimodularGenerator: return "NonUnimodularGenerator";
        case ErrorCode::EmptyGeneratorList: return "EmptyGeneratorList";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::AnchorIsResonance: return "AnchorIsResonance";
        case ErrorCode::ZeroNearBoundary: return "ZeroNearBoundary";
        case ErrorCode::NonIntegerWinding: return "NonIntegerWinding";
        case ErrorCode::MaxDepthExceeded: return "MaxDepthExceeded";
        case ErrorCode::ZInSet: return "ZInSet";
        case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorCode::EmptyFitRange: return "EmptyFitRange";
        case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorCode::EigensolveFailed: return "EigensolveFailed";
        case ErrorCode::ConfigParse: return "ConfigParse";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Neumaier-compensated accumulator; the order of add() calls fixes the result.
class NeumaierSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (!std::isfinite(t)) {  // keep an infinite sum instead of producing inf - inf
            sum_ = t;
            return;
        }
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class ComplexSum {
public:
    void add(Complex x) noexcept {
        re_.add(x.real());
        im_.add(x.imag());
    }
    [[nodiscard]] Complex value() const noexcept { return {re_.value(), im_.value()}; }

private:
    NeumaierSum re_, im_;
};

/// Worker count used by the parallel helpers (default 1); 0 selects hardware concurrency.
void set_thread_count(unsigned n) noexcept;
[[nodiscard]] unsigned thread_count() noexcept;

/// Evaluates fn(i) for i in [0, n) across the configured workers. Results are
/// stored by index, so the output never depends on scheduling.
template <typename R, typename Fn>
std::vector<R> parallel_map(std::size_t n, Fn&& fn) {
    std::vector<R> out(n);
    const unsigned workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace anosov
