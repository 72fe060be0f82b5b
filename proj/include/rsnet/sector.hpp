#pragma once

#include "rsnet/matrixlab.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rsnet {

/// Continuous piecewise-linear scalar function.
///
/// Defined by knots x_0 < ... < x_{m-1} with values f(x_k), linear between
/// knots and extended with `left_slope` / `right_slope` outside them.
struct PiecewiseLinear {
    std::vector<double> knots;
    std::vector<double> values;
    double left_slope = 0.0;
    double right_slope = 0.0;

    /// Throws InvalidArgument on empty, unsorted, or non-finite data.
    void validate() const;

    double operator()(double x) const;

    /// Exact integral of f over [0, x] (signed, so negative x gives
    /// -integral over [x, 0]).
    double integral_from_zero(double x) const;

    /// All segment slopes, outer slopes included, in left-to-right order.
    std::vector<double> slopes() const;
};

enum class SectorKind { SaturationDeadzone, IdentityZero, CustomPwl };

std::string to_string(SectorKind kind);

/// Elementwise nonlinearity pair (f, h) with h(u) = u - f(u).
///
/// Only f is stored. Transformations of a saturation pair produce a
/// CustomPwl pair whose knees sit at the shifted/scaled saturation limits.
class SectorPair {
public:
    static SectorPair saturation(std::size_t n);
    static SectorPair identity(std::size_t n);
    /// Structural validation only; use `sector_violation` or `sector_audit`
    /// to check the [0, 1] incremental sector.
    static SectorPair custom(std::vector<PiecewiseLinear> pieces);

    SectorKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return n_; }

    double f(std::size_t i, double x) const;
    double h(std::size_t i, double x) const { return x - f(i, x); }

    /// PWL representation of coordinate i (exact for every kind).
    PiecewiseLinear piece(std::size_t i) const;

    /// Exact integral of f_i over [0, x].
    double integral_f(std::size_t i, double x) const;

private:
    SectorKind kind_ = SectorKind::IdentityZero;
    std::size_t n_ = 0;
    std::vector<PiecewiseLinear> pieces_;
};

Vector eval_f(const SectorPair& pair, const Vector& u);
Vector eval_h(const SectorPair& pair, const Vector& u);

/// f~(x) = f(x + x0) - f(x0), per coordinate.
SectorPair shift_pair(const SectorPair& pair, const Vector& x0);

/// f~(x) = d_i f(x / d_i), per coordinate.
SectorPair scale_pair(const SectorPair& pair, const DiagonalScaling& d);

/// Exact check of the sector invariants (f(0) = 0, every slope in [0, 1]);
/// returns an empty string when satisfied, otherwise a description.
std::string sector_violation(const SectorPair& pair, double eps = 1e-12);

struct SlopeRange {
    double min = 0.0;
    double max = 0.0;
};

struct AuditReport {
    bool pass = false;
    bool f_zero_at_origin = false;
    SlopeRange f_slope;
    SlopeRange h_slope;
    std::size_t samples = 0;
};

struct Interval {
    double lo = -5.0;
    double hi = 5.0;
};

/// Samples random pairs (x, y) per coordinate and records the incremental
/// slopes of f and h. Pairs closer than 1% of the range width are redrawn so
/// rounding in the difference quotient stays below the 1e-12 tolerance.
AuditReport sector_audit(const SectorPair& pair, std::size_t samples, Interval range,
                         std::uint64_t seed = 0x5eed);

}  // namespace rsnet
