#pragma once

#include "dmsing/bloch.hpp"
#include "dmsing/models.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dmsing {

// Effective rank from an SVD: number of singular values above
// rel_tol * sigma_max.  A numerically zero matrix has rank 0.
int numeric_rank(const RealMatrix& A, double rel_tol = 1e-8);

// Orthonormal basis of the (numeric) null space, as matrix columns.
RealMatrix null_space(const RealMatrix& A, double rel_tol = 1e-8);

enum class DecompositionStatus { Exists, NotExists };

// Outcome of solving map_t = V . map_c for the intermediate piece V, r.
struct DecompositionResult {
    DecompositionStatus status{DecompositionStatus::NotExists};
    RealMatrix V;       // intermediate linear part (empty when NotExists)
    RealVector r;       // intermediate translation (empty when NotExists)
    bool unique{false};
    double residual{0.0};  // max abs deviation of V*Dc - Dt and V*fc + r - ft
    int rank_c{0};
    int rank_stacked{0};  // rank of [Dc; Dt] stacked vertically
};

// The intermediate map exists iff appending the rows of Dt to Dc does not
// raise the rank, i.e. null(Dc) is contained in null(Dt).
bool decomposition_exists(const AffineMap& map_c, const AffineMap& map_t,
                          double rel_tol = 1e-8);

DecompositionResult solve_decomposition(const AffineMap& map_c, const AffineMap& map_t,
                                        double rel_tol = 1e-8);

// A time where the map loses rank, found by scanning sigma_min(D(t)).
struct SingularPoint {
    double t_c{0.0};
    double sigma_min{0.0};
    int rank_deficit{0};
    bool confirmed{false};  // some later map fails to factor through t_c
    int refine_iterations{0};
};

struct ScanConfig {
    double t_max{10.0};
    int grid_points{2000};
    double rank_tol{1e-8};
    double refine_time_tol{1e-10};
    double dedupe_tol{1e-9};
    int confirm_probes{8};
};

// Scan (0, t_max] for rank-deficient maps.  Grid local minima of
// sigma_min(D(t)) are refined by golden-section search; a candidate is kept
// when the refined sigma_min falls below rank_tol * sigma_max at that time.
std::vector<SingularPoint> find_singular_points(const MapFamily& family,
                                                const ScanConfig& config = {});

enum class DivisibilityClass { CpDivisible, PositiveOnly, NotPositive, NoDecomposition };

std::string to_string(DivisibilityClass c);

struct ClassificationConfig {
    double cp_tol{1e-10};
    double positivity_tol{1e-10};
    int positivity_samples{2048};
    std::uint64_t seed{42};
    double rank_tol{1e-8};
};

// Classify the intermediate map between two times of a qubit family.
DivisibilityClass classify_interval(const MapFamily& family, double t_from, double t_to,
                                    const ClassificationConfig& config = {});

}  // namespace dmsing
