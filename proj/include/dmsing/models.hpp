// models.hpp — built-in closed-form map families and file-backed families

#pragma once

#include "dmsing/bloch.hpp"

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>

namespace dmsing {

// A time-parametrized family of trace-preserving maps Lambda(t, 0) in affine
// form, defined on [0, t_horizon]. Immutable after construction; the
// evaluator is pure, so concurrent use is safe.
struct MapFamily {
    int d{2};
    std::string name;
    std::map<std::string, double> params;
    double t_horizon{std::numeric_limits<double>::infinity()};
    std::function<AffineMap(double)> evaluator;
    // n-th singular time in closed form, when the model provides one.
    std::function<double(int)> closed_form_singular_points;
    // Spacing between extrema of the coherence envelope; used to pick a
    // default search horizon for the singularity measure.
    std::optional<double> period_hint;

    AffineMap evaluate(double t) const;
    bool has_closed_form() const { return static_cast<bool>(closed_form_singular_points); }
};

// --------------------------- Spin-bath dephasing ------------------------------

struct DephasingParams {
    double A{1.0};  // coupling constant, inverse time
    int N{1};       // number of bath spins
};

// Coherence multiplier C(t) = cos^N(2 A t / sqrt(N)).
double dephasing_coherence(const DephasingParams& p, double t);

// Decay rate A sqrt(N) tan(2 A t / sqrt(N)); throws PoleError at the poles.
double dephasing_gamma(const DephasingParams& p, double t);

// Family with D = diag(C, C, 1), f = 0; singular times sqrt(N)(2n+1)pi/(4A).
MapFamily dephasing_family(const DephasingParams& p);

// --------------------------- Damped Jaynes-Cummings ---------------------------

struct JCParams {
    double gamma0{1.0};  // system-reservoir coupling, inverse time
    double lambda{1.0};  // spectral width, inverse time
};

enum class JCRegime { Overdamped, Critical, Underdamped };

JCRegime jc_regime(const JCParams& p);

// Excited-state amplitude c(t) with c(0) = 1; damped-oscillatory in the
// underdamped regime, monotone in the overdamped one.
double jc_c(const JCParams& p, double t);

// Decay rate gamma(t) = -2 c'(t)/c(t); throws PoleError near its poles.
double jc_gamma(const JCParams& p, double t);

// Family with D = diag(D11, D11, D11^2), f = (0, 0, D11^2 - 1) and
// D11(t) = c(t)/c(0). Closed-form singular times exist only underdamped.
MapFamily jc_family(const JCParams& p);

// --------------------------- File-backed families -----------------------------

// Tabulated-family JSON: {"d": int, "samples": [{"t": number,
// "D": [row-major n^2 numbers], "f": [n numbers]}...]}. Strictly increasing
// times starting at 0 with an identity first sample; evaluation is entrywise
// linear interpolation on [first, last]. Throws SchemaError on violations.
MapFamily load_tabulated_family(const std::string& path);

// Kraus-family JSON: {"d": int, "samples": [{"t": number, "kraus":
// [[[[re,im] x d] x d rows], ...]}...]}. Each sample must satisfy
// sum K^dag K = I (1e-8); converted to affine form via
// D_{mu,nu} = Tr(L_mu sum_K K L_nu K^dag)/d, f_mu = Tr(L_mu sum_K K K^dag)/d,
// then interpolated like a tabulated family.
MapFamily family_from_kraus(const std::string& path);

// Samples a family on the given times and writes tabulated-family JSON.
void save_tabulated_family(const MapFamily& family, const std::vector<double>& times,
                           const std::string& path);

// Affine form of a single Kraus set (exposed for conversion and tests).
AffineMap affine_from_kraus(const std::vector<Matrix>& kraus, const OperatorBasis& basis);

}  // namespace dmsing
