#include "dmsing/measures.hpp"

#include "dmsing/scalar_opt.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmsing {

namespace {

// Count of secular-equation bisection steps; interval width halves each step,
// so 200 steps reach machine precision from any bracket.
constexpr int kSecularMaxIter = 200;
constexpr int kFallbackSphereSamples = 4096;

double norm_at(const RealMatrix& M, const RealVector& b, const RealVector& n) {
    return (M * n + b).norm();
}

// Polish a sphere point by projected gradient ascent of ||M n + b||^2.
RealVector polish_on_sphere(const RealMatrix& M, const RealVector& b, RealVector n,
                            double tol) {
    double step = 0.5;
    double best = norm_at(M, b, n);
    for (int it = 0; it < 200 && step > tol; ++it) {
        const RealVector grad = 2.0 * M.transpose() * (M * n + b);
        RealVector trial = n + step * grad;
        const double norm = trial.norm();
        if (norm > 0) trial /= norm;
        const double value = norm_at(M, b, trial);
        if (value > best) {
            best = value;
            n = trial;
        } else {
            step *= 0.5;
        }
    }
    return n;
}

BallMaxResult sampled_ball_max(const RealMatrix& M, const RealVector& b, double tol) {
    BallMaxResult result;
    result.solver = "sampled-fallback";
    const int n_dim = static_cast<int>(M.cols());
    if (n_dim != 3) {
        // Generic fallback: power-iteration direction plus b alignment.
        Eigen::JacobiSVD<RealMatrix> svd(M, Eigen::ComputeThinV);
        RealVector n = svd.matrixV().col(0);
        if ((M * n + b).norm() < (M * (-n) + b).norm()) n = -n;
        n = polish_on_sphere(M, b, n, tol);
        result.value = norm_at(M, b, n);
        result.argmax = n;
        return result;
    }
    RealVector best_n = RealVector::Zero(3);
    double best = b.norm();
    for (int i = 0; i < kFallbackSphereSamples; ++i) {
        const Eigen::Vector3d p = fibonacci_sphere_point(i, kFallbackSphereSamples);
        const double value = norm_at(M, b, p);
        if (value > best) {
            best = value;
            best_n = p;
        }
    }
    best_n = polish_on_sphere(M, b, best_n, tol);
    result.value = norm_at(M, b, best_n);
    result.argmax = best_n;
    return result;
}

}  // namespace

BallMaxResult max_norm_affine_over_ball(const RealMatrix& M, const RealVector& b,
                                        double tol) {
    const int n_dim = static_cast<int>(M.cols());
    if (M.rows() != n_dim || b.size() != n_dim) {
        throw std::invalid_argument("max_norm_affine_over_ball: shape mismatch");
    }

    const double m_scale = M.cwiseAbs().maxCoeff();
    if (m_scale < tol) {
        BallMaxResult result;
        result.value = b.norm();
        result.argmax = RealVector::Zero(n_dim);
        result.solver = "secular";
        return result;
    }

    // Maximize n^T A n + 2 c^T n + ||b||^2 with A = M^T M, c = M^T b over the
    // unit ball.  The maximum sits on the sphere; stationary points satisfy
    // (mu I - A) n = c with mu >= lambda_max(A), giving the secular equation
    // sum_i a_i^2 / (mu - lambda_i)^2 = 1 in the eigenbasis of A.
    const RealMatrix A = M.transpose() * M;
    const RealVector c = M.transpose() * b;
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(A);
    if (eig.info() != Eigen::Success) return sampled_ball_max(M, b, tol);
    const RealVector lambda = eig.eigenvalues();  // ascending
    const RealVector a = eig.eigenvectors().transpose() * c;
    const double lambda_max = lambda(n_dim - 1);

    // Components of c along the top eigenspace (within tolerance of lambda_max).
    double top_mass = 0.0;
    for (int i = 0; i < n_dim; ++i) {
        if (lambda_max - lambda(i) < tol * std::max(1.0, lambda_max)) {
            top_mass += a(i) * a(i);
        }
    }

    BallMaxResult result;
    const double a_norm = a.norm();

    if (top_mass > tol * tol * std::max(1.0, a_norm * a_norm)) {
        // Regular case: phi(mu) = sum a_i^2/(mu - lambda_i)^2 decreases from
        // +inf at lambda_max^+ to 0, so it crosses 1 exactly once.
        double lo = lambda_max;
        double hi = lambda_max + std::max(a_norm, tol);
        const auto phi = [&](double mu) {
            double s = 0.0;
            for (int i = 0; i < n_dim; ++i) {
                const double den = mu - lambda(i);
                s += (a(i) * a(i)) / (den * den);
            }
            return s;
        };
        while (phi(hi) > 1.0) hi = lambda_max + 2.0 * (hi - lambda_max);
        for (int it = 0; it < kSecularMaxIter; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lambda_max) break;
            (phi(mid) > 1.0 ? lo : hi) = mid;
        }
        const double mu = 0.5 * (lo + hi);
        RealVector y(n_dim);
        for (int i = 0; i < n_dim; ++i) y(i) = a(i) / (mu - lambda(i));
        RealVector n = eig.eigenvectors() * y;
        const double norm = n.norm();
        if (norm > 0) n /= norm;
        result.argmax = n;
        result.value = norm_at(M, b, n);
        result.solver = "secular";
    } else {
        // Hard case: c is orthogonal to the top eigenspace.  Solve in the
        // complement at mu = lambda_max and spend the leftover norm budget
        // along the top eigenvector.
        RealVector y = RealVector::Zero(n_dim);
        for (int i = 0; i < n_dim; ++i) {
            const double den = lambda_max - lambda(i);
            if (den > tol * std::max(1.0, lambda_max)) y(i) = a(i) / den;
        }
        if (y.norm() > 1.0) {
            // Interior-complement solution already exceeds the ball: fall back
            // to the regular bracket shifted off lambda_max.
            return sampled_ball_max(M, b, tol);
        }
        const double budget = std::sqrt(std::max(0.0, 1.0 - y.squaredNorm()));
        RealVector n_plus = eig.eigenvectors() * y + budget * eig.eigenvectors().col(n_dim - 1);
        RealVector n_minus = eig.eigenvectors() * y - budget * eig.eigenvectors().col(n_dim - 1);
        const double v_plus = norm_at(M, b, n_plus);
        const double v_minus = norm_at(M, b, n_minus);
        result.argmax = v_plus >= v_minus ? n_plus : n_minus;
        result.value = std::max(v_plus, v_minus);
        result.solver = "secular";
    }

    // The closed-form answer must never lose to a cheap sampled bound.
    const BallMaxResult sampled = sampled_ball_max(M, b, tol);
    if (sampled.value > result.value + tol) return sampled;
    return result;
}

AffineMap restart_trajectory(const MapFamily& family, double t_mid, double T) {
    if (!(t_mid > 0.0) || !(T >= t_mid)) {
        throw std::invalid_argument("restart_trajectory: need 0 < t_mid <= T");
    }
    const AffineMap first = family.evaluate(t_mid);
    const AffineMap second = family.evaluate(T - t_mid);
    AffineMap composed;
    composed.d = family.d;
    composed.D = second.D * first.D;
    composed.f = second.D * first.f + second.f;
    return composed;
}

AffineMap deviation_affine(const MapFamily& family, double t_mid, double T) {
    if (!(t_mid > 0.0) || !(T >= t_mid)) {
        throw std::invalid_argument("deviation_affine: need 0 < t_mid <= T");
    }
    const AffineMap direct = family.evaluate(T);
    const AffineMap first = family.evaluate(t_mid);
    const AffineMap second = family.evaluate(T - t_mid);

    AffineMap dev;
    dev.d = family.d;
    dev.D = direct.D - second.D * first.D;
    dev.f = direct.f - second.D * first.f - second.f;
    return dev;
}

double restart_deviation(const MapFamily& family, double t_mid, double T,
                         const RealVector& n0) {
    const AffineMap dev = deviation_affine(family, t_mid, T);
    return 0.5 * (dev.D * n0 + dev.f).norm();
}

MeasureResult singularity_measure(const MapFamily& family, double t_c,
                                  const MeasureConfig& config) {
    if (!(t_c > 0.0) || !(t_c <= config.t_max)) {
        throw std::invalid_argument("singularity_measure: t_c must lie in (0, t_max]");
    }

    MeasureResult result;
    result.t_c = t_c;

    int evaluations = 0;
    const auto inner = [&](double T) {
        ++evaluations;
        const AffineMap dev = deviation_affine(family, t_c, T);
        return max_norm_affine_over_ball(dev.D, dev.f, config.ball_solver_tol);
    };
    const auto objective = [&](double T) { return 0.5 * inner(T).value; };

    // Grid over [t_c, t_max], then golden-section polish around the best node.
    const int n_grid = std::max(config.outer_grid, 2);
    const double span = config.t_max - t_c;
    double best_T = t_c;
    double best_value = objective(t_c);
    if (span > 0) {
        for (int i = 1; i <= n_grid; ++i) {
            const double T = t_c + span * i / n_grid;
            const double value = objective(T);
            if (value > best_value + 1e-15) {
                best_value = value;
                best_T = T;
            }
        }
        const double h = span / n_grid;
        const double lo = std::max(t_c, best_T - h);
        const double hi = std::min(config.t_max, best_T + h);
        if (hi > lo) {
            const auto refined = golden_section_maximize(objective, lo, hi, config.refine_tol);
            // Adopt the polished point on ties too, else argmax_T keeps grid resolution.
            if (refined.value >= best_value - 1e-12) {
                best_value = std::max(best_value, refined.value);
                best_T = refined.x;
            }
        }
    }

    const BallMaxResult at_best = inner(best_T);
    result.S = 0.5 * at_best.value;
    result.argmax_T = best_T;
    result.argmax_n0 = at_best.argmax;
    result.inner_solver = at_best.solver;
    result.outer_evaluations = evaluations;
    return result;
}

double default_measure_horizon(const MapFamily& family, double t_c) {
    if (!family.period_hint.has_value()) {
        throw std::invalid_argument(
            "default_measure_horizon: family has no closed-form period; pass t_max explicitly");
    }
    return std::min(family.t_horizon, t_c + 2.0 * (*family.period_hint));
}

NonMarkovianityResult non_markovianity(const MapFamily& family, const ScanConfig& scan,
                                       const MeasureConfig& measure) {
    NonMarkovianityResult result;
    result.points = find_singular_points(family, scan);
    MeasureConfig inner = measure;
    inner.t_max = scan.t_max;
    for (const auto& p : result.points) {
        if (!p.confirmed) continue;
        const MeasureResult term = singularity_measure(family, p.t_c, inner);
        result.N_M += term.S;
        result.terms.push_back(term);
    }
    return result;
}

}  // namespace dmsing
