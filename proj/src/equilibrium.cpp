#include "rsnet/equilibrium.hpp"

#include "rsnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rsnet {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// S^-1 A^-1 as a vector of diagonal entries.
Vector inverse_sa(const PlantModel& plant, const ControllerSpec& ctrl) {
    return plant.a().cwiseProduct(ctrl.s).cwiseInverse();
}

}  // namespace

ContractionMap::ContractionMap(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w) {
    if (ctrl.variant != ControllerVariant::Decentralized) {
        throw UnsupportedVariant("equilibrium: only the decentralized controller is supported");
    }
    ctrl.validate(plant.n());
    if (static_cast<std::size_t>(w.size()) != plant.n()) {
        throw DimensionMismatch("equilibrium: disturbance has the wrong dimension");
    }
    if (!w.allFinite()) throw InvalidArgument("equilibrium: non-finite disturbance");

    const Vector sa_inv = inverse_sa(plant, ctrl);
    const Matrix m = sa_inv.asDiagonal() * plant.b();
    d_ = column_dominance_scaling(m);
    const Vector& d = d_.values();
    b_hat_ = d.asDiagonal() * m * d.cwiseInverse().asDiagonal();
    w_hat_ = d.cwiseProduct(sa_inv.cwiseProduct(w));
    scaled_ = scale_pair(plant.pair(), d_);

    k_ = std::max(1.0, 2.0 * b_hat_.diagonal().maxCoeff()) + 1.0;
    lambda_ = (k_ - 1.0) / k_;
    const Eigen::Index n = b_hat_.rows();
    mu_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double off = b_hat_.col(i).cwiseAbs().sum() - std::abs(b_hat_(i, i));
        mu_[i] = (k_ - (b_hat_(i, i) - off)) / k_;
    }
    gamma_bar_ = std::max(lambda_, mu_.maxCoeff());
}

Vector ContractionMap::apply(const Vector& zeta) const {
    const Vector f = eval_f(scaled_, zeta);
    const Vector h = zeta - f;
    return -((1.0 - k_) * h + b_hat_ * f - k_ * f + w_hat_) / k_;
}

ContractionMap ContractionMap::with_w_hat(Vector w_hat) const {
    if (w_hat.size() != w_hat_.size()) throw DimensionMismatch("with_w_hat: wrong dimension");
    ContractionMap copy = *this;
    copy.w_hat_ = std::move(w_hat);
    return copy;
}

ContractionMap build_contraction(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w) {
    return ContractionMap(plant, ctrl, w);
}

FixedPointResult iterate_fixed_point(const ContractionMap& map, const Vector& zeta0, double tol,
                                     long max_iter, bool record_deltas) {
    if (!(tol > 0.0)) throw InvalidArgument("iterate_fixed_point: tol must be positive");
    if (static_cast<std::size_t>(zeta0.size()) != map.n()) {
        throw DimensionMismatch("iterate_fixed_point: initial iterate has the wrong dimension");
    }
    const double g = map.gamma_bar();
    const double threshold = tol * (1.0 - g) / g;
    const double n = static_cast<double>(map.n());

    FixedPointResult out;
    out.zeta = zeta0;
    double best = std::numeric_limits<double>::infinity();
    long since_best = 0;
    for (long it = 1; it <= max_iter; ++it) {
        Vector next = map.apply(out.zeta);
        const double delta = (next - out.zeta).lpNorm<1>();
        out.zeta = std::move(next);
        out.iterations = it;
        out.last_delta = delta;
        if (record_deltas) out.deltas.push_back(delta);
        if (!std::isfinite(delta)) break;
        if (delta <= threshold) return out;

        const double scale = std::max(1.0, out.zeta.lpNorm<Eigen::Infinity>());
        if (delta <= 8.0 * kEps * n * scale) {
            out.roundoff_limited = true;
            return out;
        }
        // In exact arithmetic delta shrinks by g every step; a long plateau
        // just above the floor is rounding noise.
        if (delta < best) {
            best = delta;
            since_best = 0;
        } else if (++since_best > 200 && best <= 1e3 * kEps * n * scale) {
            out.roundoff_limited = true;
            return out;
        }
    }
    throw MaxIterationsExceeded("iterate_fixed_point: no convergence within " + std::to_string(max_iter) +
                                    " iterations (last delta " + std::to_string(out.last_delta) + ")",
                                out.iterations, out.last_delta);
}

double stationary_residual(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w,
                           const Vector& u) {
    const Vector f = eval_f(plant.pair(), u);
    const Vector h = u - f;
    const Vector sa_inv = inverse_sa(plant, ctrl);
    return (h + sa_inv.cwiseProduct(plant.b() * f + w)).lpNorm<Eigen::Infinity>();
}

EquilibriumResult equilibrium_from_zeta(const PlantModel& plant, const ControllerSpec& ctrl,
                                        const Vector& w, const ContractionMap& map, const Vector& zeta) {
    EquilibriumResult out;
    out.zeta = zeta;
    out.u0 = zeta.cwiseQuotient(map.scaling().values());
    const Vector f = eval_f(plant.pair(), out.u0);
    out.x0 = (plant.b() * f + w).cwiseQuotient(plant.a());
    out.z0 = (-ctrl.p.cwiseProduct(out.x0) - out.u0).cwiseQuotient(ctrl.r);
    out.residual_stationary = stationary_residual(plant, ctrl, w, out.u0);
    out.contraction_bound = map.gamma_bar();
    out.scaling_d = map.scaling();
    out.k = map.k();
    return out;
}

EquilibriumResult solve_equilibrium(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w,
                                    double tol, long max_iter) {
    if (!(tol > 0.0)) throw InvalidArgument("solve_equilibrium: tol must be positive");
    const ContractionMap map(plant, ctrl, w);
    // ||residual||_inf <= (k / min d) ||zeta - T(zeta)||_1
    const double iter_tol = tol * std::min(1.0, map.scaling().values().minCoeff() / map.k());
    const FixedPointResult fp = iterate_fixed_point(map, map.initial_iterate(), iter_tol, max_iter);
    EquilibriumResult out = equilibrium_from_zeta(plant, ctrl, w, map, fp.zeta);
    out.iterations = fp.iterations;
    if (!(out.residual_stationary <= tol)) {
        throw ConvergenceFailure("solve_equilibrium: stationary residual " +
                                     std::to_string(out.residual_stationary) + " above tolerance",
                                 out.residual_stationary);
    }
    return out;
}

UniquenessProbe probe_uniqueness(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w,
                                 const EquilibriumResult& reference, int restarts, std::uint64_t seed,
                                 double agree_tol, double tol) {
    if (restarts < 1) throw InvalidArgument("probe_uniqueness: restarts must be >= 1");
    if (!(tol > 0.0)) throw InvalidArgument("probe_uniqueness: tol must be positive");
    const ContractionMap map(plant, ctrl, w);
    const double iter_tol = tol * std::min(1.0, map.scaling().values().minCoeff() / map.k());
    const double radius = 10.0 * std::max(1.0, reference.zeta.lpNorm<Eigen::Infinity>());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-radius, radius);
    const double ref_norm = reference.u0.lpNorm<1>();

    UniquenessProbe out;
    out.restarts = restarts;
    for (int k = 0; k < restarts; ++k) {
        Vector start(reference.zeta.size());
        for (Eigen::Index i = 0; i < start.size(); ++i) start[i] = box(rng);
        const FixedPointResult fp = iterate_fixed_point(map, start, iter_tol);
        const Vector u0 = fp.zeta.cwiseQuotient(map.scaling().values());
        out.max_spread = std::max(out.max_spread, std::abs(u0.lpNorm<1>() - ref_norm));
        out.max_distance = std::max(out.max_distance, (u0 - reference.u0).lpNorm<1>());
    }
    out.pass = out.max_distance <= agree_tol;
    return out;
}

double measure_contraction(const ContractionMap& map, int trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("measure_contraction: trials must be >= 1");
    const auto n = static_cast<Eigen::Index>(map.n());
    const double half_width = 4.0 * std::max(1.0, map.scaling().values().maxCoeff());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-half_width, half_width);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<Eigen::Index> axis(0, n - 1);

    const auto random_point = [&] {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = box(rng);
        return v;
    };

    // T(a) - T(b) does not depend on w hat; dropping it keeps the rounding of
    // a large w hat out of the difference quotient.
    const ContractionMap centred = map.with_w_hat(Vector::Zero(n));
    const double min_sep = 1e-3 * half_width;
    double worst = 0.0;
    const auto probe = [&](const Vector& a, const Vector& b) {
        const double den = (a - b).lpNorm<1>();
        if (den < min_sep) return;
        worst = std::max(worst, (centred.apply(a) - centred.apply(b)).lpNorm<1>() / den);
    };

    for (int t = 0; t < trials; ++t) {
        const Vector a = random_point();
        switch (t % 3) {
            case 0:
                probe(a, random_point());
                break;
            case 1: {
                Vector b = a;
                for (Eigen::Index i = 0; i < n; ++i) b[i] += 0.1 * map.scaling()[i] * unit(rng);
                probe(a, b);
                break;
            }
            default: {
                Vector b = a;
                const Eigen::Index i = axis(rng);
                b[i] += half_width * unit(rng);
                probe(a, b);
                break;
            }
        }
    }
    return worst;
}

}  // namespace rsnet
