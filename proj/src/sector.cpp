#include "rsnet/sector.hpp"

#include "rsnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rsnet {

namespace {

constexpr double kAuditEps = 1e-12;

PiecewiseLinear saturation_piece() { return {{-1.0, 1.0}, {-1.0, 1.0}, 0.0, 0.0}; }

PiecewiseLinear identity_piece() { return {{0.0}, {0.0}, 1.0, 1.0}; }

void require_size(const SectorPair& pair, Eigen::Index n, const char* what) {
    if (static_cast<std::size_t>(n) != pair.size()) {
        throw DimensionMismatch(std::string(what) + ": vector has " + std::to_string(n) +
                                " entries, pair has " + std::to_string(pair.size()));
    }
}

}  // namespace

void PiecewiseLinear::validate() const {
    if (knots.empty() || knots.size() != values.size()) {
        throw InvalidArgument("piecewise-linear: need matching, non-empty knot and value lists");
    }
    for (std::size_t k = 0; k < knots.size(); ++k) {
        if (!std::isfinite(knots[k]) || !std::isfinite(values[k])) {
            throw InvalidArgument("piecewise-linear: non-finite breakpoint");
        }
        if (k > 0 && !(knots[k] > knots[k - 1])) {
            throw InvalidArgument("piecewise-linear: knots must be strictly increasing");
        }
    }
    if (!std::isfinite(left_slope) || !std::isfinite(right_slope)) {
        throw InvalidArgument("piecewise-linear: non-finite outer slope");
    }
}

double PiecewiseLinear::operator()(double x) const {
    if (x <= knots.front()) return values.front() + left_slope * (x - knots.front());
    if (x >= knots.back()) return values.back() + right_slope * (x - knots.back());
    const auto it = std::upper_bound(knots.begin(), knots.end(), x);
    const auto k = static_cast<std::size_t>(it - knots.begin()) - 1;
    const double t = (x - knots[k]) / (knots[k + 1] - knots[k]);
    return values[k] + t * (values[k + 1] - values[k]);
}

double PiecewiseLinear::integral_from_zero(double x) const {
    if (x == 0.0) return 0.0;
    const double lo = std::min(0.0, x);
    const double hi = std::max(0.0, x);
    double total = 0.0;
    double left = lo;
    double f_left = (*this)(lo);
    for (double knot : knots) {
        if (knot <= lo) continue;
        if (knot >= hi) break;
        const double f_knot = (*this)(knot);
        total += 0.5 * (knot - left) * (f_left + f_knot);
        left = knot;
        f_left = f_knot;
    }
    total += 0.5 * (hi - left) * (f_left + (*this)(hi));
    return x > 0.0 ? total : -total;
}

std::vector<double> PiecewiseLinear::slopes() const {
    std::vector<double> out;
    out.reserve(knots.size() + 1);
    out.push_back(left_slope);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        out.push_back((values[k + 1] - values[k]) / (knots[k + 1] - knots[k]));
    }
    out.push_back(right_slope);
    return out;
}

std::string to_string(SectorKind kind) {
    switch (kind) {
        case SectorKind::SaturationDeadzone: return "saturation_deadzone";
        case SectorKind::IdentityZero: return "identity_zero";
        case SectorKind::CustomPwl: return "custom_pwl";
    }
    return "unknown";
}

SectorPair SectorPair::saturation(std::size_t n) {
    SectorPair p;
    p.kind_ = SectorKind::SaturationDeadzone;
    p.n_ = n;
    return p;
}

SectorPair SectorPair::identity(std::size_t n) {
    SectorPair p;
    p.kind_ = SectorKind::IdentityZero;
    p.n_ = n;
    return p;
}

SectorPair SectorPair::custom(std::vector<PiecewiseLinear> pieces) {
    for (const auto& piece : pieces) piece.validate();
    SectorPair p;
    p.kind_ = SectorKind::CustomPwl;
    p.n_ = pieces.size();
    p.pieces_ = std::move(pieces);
    return p;
}

double SectorPair::f(std::size_t i, double x) const {
    switch (kind_) {
        case SectorKind::SaturationDeadzone: return std::clamp(x, -1.0, 1.0);
        case SectorKind::IdentityZero: return x;
        case SectorKind::CustomPwl: return pieces_[i](x);
    }
    return x;
}

PiecewiseLinear SectorPair::piece(std::size_t i) const {
    switch (kind_) {
        case SectorKind::SaturationDeadzone: return saturation_piece();
        case SectorKind::IdentityZero: return identity_piece();
        case SectorKind::CustomPwl: return pieces_.at(i);
    }
    return identity_piece();
}

double SectorPair::integral_f(std::size_t i, double x) const {
    switch (kind_) {
        case SectorKind::IdentityZero: return 0.5 * x * x;
        case SectorKind::CustomPwl: return pieces_[i].integral_from_zero(x);
        case SectorKind::SaturationDeadzone: {
            const double ax = std::abs(x);
            return ax <= 1.0 ? 0.5 * x * x : ax - 0.5;
        }
    }
    return 0.0;
}

Vector eval_f(const SectorPair& pair, const Vector& u) {
    require_size(pair, u.size(), "eval_f");
    Vector out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = pair.f(static_cast<std::size_t>(i), u[i]);
    return out;
}

Vector eval_h(const SectorPair& pair, const Vector& u) {
    return u - eval_f(pair, u);
}

SectorPair shift_pair(const SectorPair& pair, const Vector& x0) {
    require_size(pair, x0.size(), "shift_pair");
    if (!x0.allFinite()) throw InvalidArgument("shift_pair: non-finite shift");
    if (pair.kind() == SectorKind::IdentityZero || (x0.array() == 0.0).all()) return pair;
    std::vector<PiecewiseLinear> pieces;
    pieces.reserve(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        PiecewiseLinear p = pair.piece(i);
        const double offset = x0[static_cast<Eigen::Index>(i)];
        const double f_at = pair.f(i, offset);
        for (std::size_t k = 0; k < p.knots.size(); ++k) {
            p.knots[k] -= offset;
            p.values[k] -= f_at;
        }
        pieces.push_back(std::move(p));
    }
    return SectorPair::custom(std::move(pieces));
}

SectorPair scale_pair(const SectorPair& pair, const DiagonalScaling& d) {
    require_size(pair, d.size(), "scale_pair");
    if (pair.kind() == SectorKind::IdentityZero || (d.values().array() == 1.0).all()) return pair;
    std::vector<PiecewiseLinear> pieces;
    pieces.reserve(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        PiecewiseLinear p = pair.piece(i);
        const double di = d[static_cast<Eigen::Index>(i)];
        for (std::size_t k = 0; k < p.knots.size(); ++k) {
            p.knots[k] *= di;
            p.values[k] *= di;
        }
        pieces.push_back(std::move(p));
    }
    return SectorPair::custom(std::move(pieces));
}

std::string sector_violation(const SectorPair& pair, double eps) {
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const PiecewiseLinear p = pair.piece(i);
        double scale = 1.0;
        for (double v : p.values) scale = std::max(scale, std::abs(v));
        if (std::abs(pair.f(i, 0.0)) > eps * scale) {
            return "coordinate " + std::to_string(i) + ": f(0) != 0";
        }
        for (double slope : p.slopes()) {
            if (slope < -eps || slope > 1.0 + eps) {
                return "coordinate " + std::to_string(i) + ": slope " + std::to_string(slope) +
                       " outside [0, 1]";
            }
        }
    }
    return {};
}

AuditReport sector_audit(const SectorPair& pair, std::size_t samples, Interval range,
                         std::uint64_t seed) {
    if (samples < 2) throw InvalidArgument("sector_audit: need at least 2 samples");
    if (!(range.hi > range.lo)) throw InvalidArgument("sector_audit: empty range");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> draw(range.lo, range.hi);
    const double min_gap = 0.01 * (range.hi - range.lo);

    AuditReport report;
    report.samples = samples;
    report.f_slope = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    report.h_slope = report.f_slope;
    report.f_zero_at_origin = true;

    for (std::size_t i = 0; i < pair.size(); ++i) {
        if (std::abs(pair.f(i, 0.0)) > kAuditEps) report.f_zero_at_origin = false;
        for (std::size_t s = 0; s < samples; ++s) {
            double x = draw(rng);
            double y = draw(rng);
            while (std::abs(y - x) < min_gap) y = draw(rng);
            const double fs = (pair.f(i, y) - pair.f(i, x)) / (y - x);
            const double hs = (pair.h(i, y) - pair.h(i, x)) / (y - x);
            report.f_slope.min = std::min(report.f_slope.min, fs);
            report.f_slope.max = std::max(report.f_slope.max, fs);
            report.h_slope.min = std::min(report.h_slope.min, hs);
            report.h_slope.max = std::max(report.h_slope.max, hs);
        }
    }
    const auto within = [](const SlopeRange& r) {
        return r.min >= -kAuditEps && r.max <= 1.0 + kAuditEps;
    };
    report.pass = report.f_zero_at_origin && within(report.f_slope) && within(report.h_slope);
    return report;
}

}  // namespace rsnet
