#ifndef LAMBSHIFT_NUMERICS_HPP
#define LAMBSHIFT_NUMERICS_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string_view>
#include <thread>
#include <vector>

#include "lambshift/errors.hpp"

namespace lambshift {

/// Uniform frequency grid omega_min + i * step, covering as much of
/// [omega_min, omega_max] as whole steps allow.
struct FrequencyGrid {
    double omega_min = 0.0;
    double omega_max = 0.0;
    double step = 0.0;

    void validate() const {
        if (!(omega_min > 0.0)) throw domain_error("frequency grid: omega_min must be > 0");
        if (!(omega_max > omega_min)) throw domain_error("frequency grid: omega_max must exceed omega_min");
        if (!(step > 0.0)) throw domain_error("frequency grid: step must be > 0");
    }

    std::size_t size() const {
        return static_cast<std::size_t>(std::floor((omega_max - omega_min) / step + 1e-9)) + 1;
    }

    double at(std::size_t i) const { return omega_min + static_cast<double>(i) * step; }

    std::vector<double> points() const {
        validate();
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i);
        return out;
    }
};

namespace numerics {

/// Vertex of the parabola through (x1,y1),(x2,y2),(x3,y3).
/// Returns nullopt when the three points are (numerically) collinear.
inline std::optional<double> parabola_vertex(double x1, double y1, double x2, double y2,
                                             double x3, double y3) {
    const double a = x2 - x1;
    const double b = x2 - x3;
    const double num = a * a * (y2 - y3) - b * b * (y2 - y1);
    const double den = a * (y2 - y3) - b * (y2 - y1);
    if (den == 0.0 || !std::isfinite(num / den)) return std::nullopt;
    return x2 - 0.5 * num / den;
}

/// Golden-section minimizer on [lo, hi]; deterministic, derivative-free.
/// `f` must be unimodal on the bracket for a guaranteed result.
template <class F>
double golden_minimize(F&& f, double lo, double hi, double x_tol = 1e-12) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

/// FNV-1a 64-bit over a byte view; used for config/output fingerprints.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Runs fn(i) for i in [0, count) on `jobs` threads. Work items must be
/// independent; results keyed by i make the output order deterministic
/// regardless of scheduling. The first exception thrown by any item is
/// rethrown on the calling thread.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs < 1) jobs = 1;
    const std::size_t max_useful = count == 0 ? 1 : count;
    std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), max_useful);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace numerics
} // namespace lambshift

#endif
