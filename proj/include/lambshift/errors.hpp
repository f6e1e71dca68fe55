#ifndef LAMBSHIFT_ERRORS_HPP
#define LAMBSHIFT_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace lambshift {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid physical input (non-positive frequency, bad mode index, ...).
class domain_error : public error {
public:
    using error::error;
};

/// Emitter/probe configuration is geometrically impossible (overlap, d <= R).
class geometry_error : public error {
public:
    using error::error;
};

/// Exact pole of a lossless response function was hit.
class singular_error : public error {
public:
    using error::error;
};

/// Multipole series failed to converge before the hard cap.
class truncation_error : public error {
public:
    truncation_error(const std::string& msg, int n_reached, double tail_estimate)
        : error(msg), n_reached(n_reached), tail_estimate(tail_estimate) {}
    int n_reached;
    double tail_estimate;
};

/// Spectrum has no interference dip; carries the position of the single peak.
class no_dip_error : public error {
public:
    no_dip_error(const std::string& msg, double peak_omega)
        : error(msg), peak_omega(peak_omega) {}
    double peak_omega;
};

/// Coupled-system eigenfrequencies coincide (exceptional point).
class degenerate_error : public error {
public:
    using error::error;
};

/// Observed value lies outside the attainable range of the forward map.
class out_of_range_error : public error {
public:
    using error::error;
};

/// Forward map sampled non-monotone where an inversion requires monotonicity.
class non_monotone_error : public error {
public:
    using error::error;
};

/// Several comparable extrema; lists candidate (x, y) positions.
class ambiguity_error : public error {
public:
    ambiguity_error(const std::string& msg, std::vector<std::pair<double, double>> candidates)
        : error(msg), candidates(std::move(candidates)) {}
    std::vector<std::pair<double, double>> candidates;
};

/// Run-configuration validation failure; carries the offending field path.
class config_error : public error {
public:
    config_error(const std::string& field, const std::string& msg)
        : error(field + ": " + msg), field(field) {}
    std::string field;
};

/// Filesystem failure while reading inputs or writing outputs.
class io_error : public error {
public:
    using error::error;
};

} // namespace lambshift

#endif
