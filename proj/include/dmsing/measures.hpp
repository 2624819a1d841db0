#pragma once

#include "dmsing/bloch.hpp"
#include "dmsing/divisibility.hpp"
#include "dmsing/models.hpp"

#include <string>
#include <vector>

namespace dmsing {

// max_{||n|| <= 1} ||M n + b|| together with an attaining n.
struct BallMaxResult {
    double value{0.0};
    RealVector argmax;
    std::string solver;  // "secular" or "sampled-fallback"
};

BallMaxResult max_norm_affine_over_ball(const RealMatrix& M, const RealVector& b,
                                        double tol = 1e-10);

// The family restarted at t_mid with a fresh environment:
// n0 -> D(T - t_mid) (D(t_mid) n0 + f(t_mid)) + f(T - t_mid).
AffineMap restart_trajectory(const MapFamily& family, double t_mid, double T);

// Affine deviation between the direct map to T and the composition through
// t_mid: n -> (D_T - D_{T-t_mid} D_{t_mid}) n + (f_T - D_{T-t_mid} f_{t_mid} - f_{T-t_mid}).
// The second leg is the family restarted at t_mid with a fresh environment.
AffineMap deviation_affine(const MapFamily& family, double t_mid, double T);

struct MeasureConfig {
    double t_max{10.0};
    int outer_grid{400};
    double refine_tol{1e-8};
    double ball_solver_tol{1e-10};
};

struct MeasureResult {
    double t_c{0.0};
    double S{0.0};
    double argmax_T{0.0};
    RealVector argmax_n0;
    int outer_evaluations{0};
    std::string inner_solver;
};

// S(t_c) = max_{T in [t_c, t_max]} max_{||n0|| <= 1} (1/2)||deviation(n0)||.
MeasureResult singularity_measure(const MapFamily& family, double t_c,
                                  const MeasureConfig& config = {});

// Default outer horizon when none is given: two closed-form periods past t_c
// (clamped to the family domain).  Throws when the family has no period hint.
double default_measure_horizon(const MapFamily& family, double t_c);

// Trace-distance deviation between the direct and restarted evolutions of a
// single initial state, as a function of T.
double restart_deviation(const MapFamily& family, double t_mid, double T,
                         const RealVector& n0);

struct NonMarkovianityResult {
    double N_M{0.0};
    std::vector<SingularPoint> points;
    std::vector<MeasureResult> terms;
};

// Sum of singularity measures over all confirmed singular points in (0, t_max].
NonMarkovianityResult non_markovianity(const MapFamily& family, const ScanConfig& scan,
                                       const MeasureConfig& measure);

}  // namespace dmsing
