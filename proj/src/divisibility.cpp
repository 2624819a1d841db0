#include "dmsing/divisibility.hpp"

#include "dmsing/errors.hpp"
#include "dmsing/scalar_opt.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmsing {

namespace {

// Loose pre-filter applied to grid local minima before refinement.  Families
// whose sigma_min decays quadratically near a zero (e.g. D = diag(c, c, c^2))
// sit well above rank_tol * sigma_max at the surrounding grid nodes, so the
// final acceptance test runs on the refined minimum instead.
constexpr double kPrefilterRatio = 1e-2;

Eigen::JacobiSVD<RealMatrix> svd_of(const RealMatrix& A) {
    return Eigen::JacobiSVD<RealMatrix>(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

int rank_from_singular_values(const RealVector& sv, double rel_tol) {
    if (sv.size() == 0) return 0;
    const double cutoff = rel_tol * sv(0);
    if (sv(0) <= 0.0) return 0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return rank;
}

RealMatrix stack_rows(const RealMatrix& top, const RealMatrix& bottom) {
    RealMatrix out(top.rows() + bottom.rows(), top.cols());
    out.topRows(top.rows()) = top;
    out.bottomRows(bottom.rows()) = bottom;
    return out;
}

void check_compatible(const AffineMap& map_c, const AffineMap& map_t) {
    if (map_c.d != map_t.d) {
        throw std::invalid_argument("divisibility: maps act on different dimensions");
    }
}

double sigma_min_at(const MapFamily& family, double t) {
    Eigen::JacobiSVD<RealMatrix> svd(family.evaluate(t).D);
    return svd.singularValues().tail<1>()(0);
}

}  // namespace

int numeric_rank(const RealMatrix& A, double rel_tol) {
    if (A.size() == 0) return 0;
    Eigen::JacobiSVD<RealMatrix> svd(A);
    return rank_from_singular_values(svd.singularValues(), rel_tol);
}

RealMatrix null_space(const RealMatrix& A, double rel_tol) {
    Eigen::JacobiSVD<RealMatrix> svd(A, Eigen::ComputeFullV);
    const int rank = rank_from_singular_values(svd.singularValues(), rel_tol);
    return svd.matrixV().rightCols(A.cols() - rank);
}

bool decomposition_exists(const AffineMap& map_c, const AffineMap& map_t, double rel_tol) {
    check_compatible(map_c, map_t);
    const RealMatrix stacked = stack_rows(map_c.D, map_t.D);
    return numeric_rank(stacked, rel_tol) == numeric_rank(map_c.D, rel_tol);
}

DecompositionResult solve_decomposition(const AffineMap& map_c, const AffineMap& map_t,
                                        double rel_tol) {
    check_compatible(map_c, map_t);
    const int n = map_c.D.rows();

    DecompositionResult result;
    result.rank_c = numeric_rank(map_c.D, rel_tol);
    result.rank_stacked = numeric_rank(stack_rows(map_c.D, map_t.D), rel_tol);
    if (result.rank_stacked != result.rank_c) {
        result.status = DecompositionStatus::NotExists;
        return result;
    }

    // Minimal-Frobenius solution of V Dc = Dt via the pseudoinverse.
    const auto svd = svd_of(map_c.D);
    const RealVector& sv = svd.singularValues();
    const double cutoff = sv.size() ? rel_tol * sv(0) : 0.0;
    RealVector inv = RealVector::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    }
    const RealMatrix pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();

    result.status = DecompositionStatus::Exists;
    result.V = map_t.D * pinv;
    result.r = map_t.f - result.V * map_c.f;
    result.unique = (result.rank_c == n);
    const double dev_D = (result.V * map_c.D - map_t.D).cwiseAbs().maxCoeff();
    const double dev_f = (result.V * map_c.f + result.r - map_t.f).cwiseAbs().maxCoeff();
    result.residual = std::max(dev_D, dev_f);
    return result;
}

std::vector<SingularPoint> find_singular_points(const MapFamily& family,
                                                const ScanConfig& config) {
    if (!(config.t_max > 0.0)) {
        throw std::invalid_argument("find_singular_points: t_max must be > 0");
    }
    if (config.grid_points < 100) {
        throw std::invalid_argument("find_singular_points: need at least 100 grid points");
    }

    const int n_grid = config.grid_points;
    const double h = config.t_max / n_grid;
    std::vector<double> t_grid(n_grid);
    std::vector<double> sig(n_grid);
    std::vector<double> sig_max(n_grid);
    double sigma_ref = 0.0;  // family scale: largest singular value seen on the grid
    for (int i = 0; i < n_grid; ++i) {
        t_grid[i] = (i + 1) * h;  // grid over (0, t_max]
        Eigen::JacobiSVD<RealMatrix> svd(family.evaluate(t_grid[i]).D);
        const RealVector& sv = svd.singularValues();
        sig[i] = sv(sv.size() - 1);
        sig_max[i] = sv(0);
        sigma_ref = std::max(sigma_ref, sv(0));
    }

    std::vector<SingularPoint> points;
    for (int i = 1; i + 1 < n_grid; ++i) {
        // Interior three-point local minima only; endpoints are skipped so a
        // monotone decay (e.g. a semigroup) never produces a candidate.
        if (!(sig[i] <= sig[i - 1] && sig[i] <= sig[i + 1])) continue;
        if (sig[i] > kPrefilterRatio * std::max(sig_max[i], 1e-300)) continue;

        const auto refined = golden_section_minimize(
            [&family](double t) { return sigma_min_at(family, t); }, t_grid[i - 1],
            t_grid[i + 1], config.refine_time_tol);

        Eigen::JacobiSVD<RealMatrix> svd(family.evaluate(refined.x).D);
        const RealVector sv = svd.singularValues();
        const double sigma_max = sv(0);
        const double sigma_min = sv(sv.size() - 1);
        if (sigma_min > config.rank_tol * std::max(sigma_max, 1e-300)) continue;

        SingularPoint p;
        p.t_c = refined.x;
        p.sigma_min = sigma_min;
        // Deficit against the family scale, so a fully collapsed map reports
        // the full dimension even though its own largest singular value is tiny.
        int rank_at_scale = 0;
        for (int k = 0; k < sv.size(); ++k) {
            if (sv(k) > config.rank_tol * std::max(sigma_ref, 1e-300)) ++rank_at_scale;
        }
        p.rank_deficit = static_cast<int>(sv.size()) - rank_at_scale;
        p.refine_iterations = refined.iterations;
        points.push_back(p);
    }

    // Dedupe refined points that collapsed to the same time.
    std::sort(points.begin(), points.end(),
              [](const SingularPoint& a, const SingularPoint& b) { return a.t_c < b.t_c; });
    std::vector<SingularPoint> unique_points;
    for (const auto& p : points) {
        if (!unique_points.empty() &&
            std::abs(p.t_c - unique_points.back().t_c) < config.dedupe_tol) {
            if (p.sigma_min < unique_points.back().sigma_min) unique_points.back() = p;
            continue;
        }
        unique_points.push_back(p);
    }

    // Confirm: some later map must fail to factor through the singular one.
    for (auto& p : unique_points) {
        const AffineMap map_c = family.evaluate(p.t_c);
        std::vector<double> probes;
        const int start = static_cast<int>(std::floor(p.t_c / h));
        for (int k = 1; k <= config.confirm_probes; ++k) {
            const double tp = (start + k) * h;
            if (tp > p.t_c + config.dedupe_tol && tp <= config.t_max) probes.push_back(tp);
        }
        if (probes.empty() || probes.back() < config.t_max) probes.push_back(config.t_max);
        p.confirmed = false;
        for (double tp : probes) {
            if (!decomposition_exists(map_c, family.evaluate(tp), config.rank_tol)) {
                p.confirmed = true;
                break;
            }
        }
    }
    return unique_points;
}

std::string to_string(DivisibilityClass c) {
    switch (c) {
        case DivisibilityClass::CpDivisible: return "CP-divisible";
        case DivisibilityClass::PositiveOnly: return "positive-only";
        case DivisibilityClass::NotPositive: return "not-positive";
        case DivisibilityClass::NoDecomposition: return "no-decomposition";
    }
    return "unknown";
}

DivisibilityClass classify_interval(const MapFamily& family, double t_from, double t_to,
                                    const ClassificationConfig& config) {
    if (family.d != 2) {
        throw std::invalid_argument("classify_interval: only qubit families supported");
    }
    if (!(t_from >= 0.0) || !(t_to > t_from)) {
        throw std::invalid_argument("classify_interval: need 0 <= t_from < t_to");
    }
    const AffineMap map_c = family.evaluate(t_from);
    const AffineMap map_t = family.evaluate(t_to);
    const DecompositionResult dec = solve_decomposition(map_c, map_t, config.rank_tol);
    if (dec.status == DecompositionStatus::NotExists) {
        return DivisibilityClass::NoDecomposition;
    }
    const ChoiMatrix choi = choi_from_affine(dec.V, dec.r);
    if (is_completely_positive(choi, config.cp_tol)) {
        return DivisibilityClass::CpDivisible;
    }
    if (is_positive_map(dec.V, dec.r, config.positivity_samples, config.positivity_tol,
                        config.seed)) {
        return DivisibilityClass::PositiveOnly;
    }
    return DivisibilityClass::NotPositive;
}

}  // namespace dmsing
