#include <doctest.h>

#include "dmsing/divisibility.hpp"
#include "dmsing/measures.hpp"
#include "dmsing/models.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace dmsing;

namespace {

constexpr double kPi = std::numbers::pi;

AffineMap make_affine(const RealMatrix& D, const RealVector& f) {
    AffineMap m;
    m.d = 2;
    m.D = D;
    m.f = f;
    return m;
}

// Projector onto the orthogonal complement of v.
RealMatrix complement_projector(const RealVector& v) {
    const RealVector u = v / v.norm();
    return RealMatrix::Identity(v.size(), v.size()) - u * u.transpose();
}

}  // namespace

TEST_CASE("numeric rank: zero, deficient, and full-rank inputs") {
    CHECK(numeric_rank(RealMatrix::Zero(3, 3)) == 0);
    CHECK(numeric_rank(RealMatrix::Identity(3, 3)) == 3);

    RealMatrix tiny = RealMatrix::Identity(3, 3);
    tiny(1, 1) = 1e-12;
    CHECK(numeric_rank(tiny) == 2);

    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        CHECK(numeric_rank(oracles::random_conditioned(3, 0.3, 2.0, rng)) == 3);
    }
}

TEST_CASE("null space: orthonormal and annihilated") {
    std::mt19937_64 rng(32);
    const RealVector v = RealVector::Random(3);
    const RealMatrix A = oracles::random_conditioned(3, 0.5, 1.5, rng) *
                         complement_projector(v);
    const RealMatrix ns = null_space(A);
    REQUIRE(ns.cols() == 1);
    CHECK((A * ns).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(ns.col(0).norm() - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(ns.col(0).dot(v / v.norm())) - 1.0) < 1e-10);
}

TEST_CASE("decomposition on full-rank pairs: exact, unique, composable") {
    std::mt19937_64 rng(33);
    const OperatorBasis basis = make_basis(2);
    for (int rep = 0; rep < 500; ++rep) {
        const RealMatrix Dc = oracles::random_conditioned(3, 0.4, 1.6, rng);
        const RealMatrix Dt = oracles::random_conditioned(3, 0.4, 1.6, rng);
        const RealVector fc = 0.05 * RealVector::Random(3);
        const RealVector ft = 0.05 * RealVector::Random(3);
        const AffineMap map_c = make_affine(Dc, fc);
        const AffineMap map_t = make_affine(Dt, ft);

        REQUIRE(decomposition_exists(map_c, map_t));
        const DecompositionResult dec = solve_decomposition(map_c, map_t);
        REQUIRE(dec.status == DecompositionStatus::Exists);
        CHECK(dec.unique);
        CHECK((dec.V * Dc - Dt).norm() < 1e-10);  // Frobenius
        CHECK((dec.V * fc + dec.r - ft).norm() < 1e-10);
    }

    // Composition closes on states: intermediate after the first leg equals
    // the direct endpoint map.
    const MapFamily family = dephasing_family({1.0, 4});
    std::mt19937_64 state_rng(34);
    const AffineMap leg1 = family.evaluate(0.4);
    const AffineMap leg2 = family.evaluate(0.9);
    const DecompositionResult dec = solve_decomposition(leg1, leg2);
    REQUIRE(dec.status == DecompositionStatus::Exists);
    const AffineMap mid = make_affine(dec.V, dec.r);
    for (int rep = 0; rep < 100; ++rep) {
        const DensityMatrix rho = oracles::random_state(2, state_rng);
        const DensityMatrix direct = apply_map(leg2, rho, basis);
        const DensityMatrix composed = apply_map(mid, apply_map(leg1, rho, basis), basis);
        CHECK((direct.entries - composed.entries).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("decomposition follows null-space inclusion exactly") {
    std::mt19937_64 rng(35);
    for (int rep = 0; rep < 100; ++rep) {
        RealVector v = RealVector::Random(3);
        v.normalize();
        const RealMatrix P = complement_projector(v);
        const RealMatrix Dc = oracles::random_conditioned(3, 0.5, 1.5, rng) * P;
        const AffineMap map_c = make_affine(Dc, RealVector::Zero(3));

        // Included: the later map kills the same direction.
        const RealMatrix Dt_ok = oracles::random_conditioned(3, 0.5, 1.5, rng) * P;
        const AffineMap map_ok = make_affine(Dt_ok, RealVector::Zero(3));
        REQUIRE(decomposition_exists(map_c, map_ok));
        const DecompositionResult dec = solve_decomposition(map_c, map_ok);
        REQUIRE(dec.status == DecompositionStatus::Exists);
        CHECK_FALSE(dec.unique);
        CHECK((dec.V * Dc - Dt_ok).norm() < 1e-8);

        // Violated: the later map is full rank.
        const RealMatrix Dt_bad = oracles::random_conditioned(3, 0.5, 1.5, rng);
        const AffineMap map_bad = make_affine(Dt_bad, RealVector::Zero(3));
        CHECK_FALSE(decomposition_exists(map_c, map_bad));
        CHECK(solve_decomposition(map_c, map_bad).status == DecompositionStatus::NotExists);
    }
}

TEST_CASE("existence test agrees with a least-squares residual criterion") {
    std::mt19937_64 rng(36);
    int deficient_seen = 0;
    for (int rep = 0; rep < 500; ++rep) {
        RealMatrix Dc;
        if (rep % 3 == 0) {
            RealVector v = RealVector::Random(3);
            v.normalize();
            Dc = oracles::random_conditioned(3, 0.5, 1.5, rng) * complement_projector(v);
            ++deficient_seen;
        } else {
            Dc = oracles::random_conditioned(3, 0.4, 1.6, rng);
        }
        RealMatrix Dt;
        if (rep % 2 == 0) {
            Dt = oracles::random_conditioned(3, 0.4, 1.6, rng);
        } else {
            // Force solvability by construction.
            Dt = oracles::random_conditioned(3, 0.4, 1.6, rng) * Dc;
        }
        const AffineMap map_c = make_affine(Dc, RealVector::Zero(3));
        const AffineMap map_t = make_affine(Dt, RealVector::Zero(3));

        // Oracle: minimal-residual solve via least squares on the transposed
        // system, independent of the rank bookkeeping.
        const RealMatrix S =
            (Dc.transpose().colPivHouseholderQr().solve(Dt.transpose())).transpose();
        const bool solvable = (S * Dc - Dt).norm() < 1e-8;
        CHECK(decomposition_exists(map_c, map_t) == solvable);
    }
    CHECK(deficient_seen > 100);
}

TEST_CASE("singular points of the dephasing family sit at the closed-form times") {
    const MapFamily family = dephasing_family({1.0, 4});
    ScanConfig config;
    config.t_max = 10.0;
    const auto points = find_singular_points(family, config);
    REQUIRE(points.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(points[i].t_c - (2 * i + 1) * kPi / 2.0) < 1e-6);
        CHECK(points[i].confirmed);
        CHECK(points[i].rank_deficit == 2);
        CHECK(points[i].sigma_min < 1e-8);
    }
}

TEST_CASE("even-multiplicity zeros are found (no sign change in det)") {
    // N=2: C(t) = cos^2(sqrt(2) t) >= 0, so det D = C^2 never changes sign.
    const MapFamily family = dephasing_family({1.0, 2});
    ScanConfig config;
    config.t_max = 4.0;
    const auto points = find_singular_points(family, config);
    REQUIRE(points.size() == 2);
    CHECK(std::abs(points[0].t_c - std::sqrt(2.0) * kPi / 4.0) < 1e-6);
    CHECK(std::abs(points[1].t_c - 3.0 * std::sqrt(2.0) * kPi / 4.0) < 1e-6);
    for (const auto& p : points) {
        const double det = family.evaluate(p.t_c + 0.05).D.determinant();
        CHECK(det >= 0.0);  // determinant stays nonnegative around the zero
    }
}

TEST_CASE("JC scan finds the first collapse with full rank loss") {
    const MapFamily family = jc_family({5.0, 1.0});
    ScanConfig config;
    config.t_max = 3.0;
    const auto points = find_singular_points(family, config);
    REQUIRE(points.size() == 1);
    CHECK(std::abs(points[0].t_c - 1.261698) < 1e-6);
    CHECK(points[0].rank_deficit == 3);
    CHECK(points[0].confirmed);
}

TEST_CASE("JC scan on a longer horizon finds the full periodic train") {
    const MapFamily family = jc_family({5.0, 1.0});
    ScanConfig config;
    config.t_max = 8.0;
    const auto points = find_singular_points(family, config);
    REQUIRE(points.size() == 4);
    for (std::size_t n = 0; n < points.size(); ++n) {
        CHECK(std::abs(points[n].t_c - family.closed_form_singular_points(
                                           static_cast<int>(n))) < 1e-6);
        CHECK(points[n].confirmed);
    }
}

TEST_CASE("no singular points for semigroups or overdamped families") {
    ScanConfig config;
    config.t_max = 10.0;
    CHECK(find_singular_points(oracles::semigroup_dephasing(1.0), config).empty());

    config.t_max = 20.0;
    CHECK(find_singular_points(jc_family({0.2, 1.0}), config).empty());
    CHECK(find_singular_points(jc_family({0.5, 1.0}), config).empty());
}

TEST_CASE("rank deficiency with persistent null-space inclusion is unconfirmed") {
    // D11 ramps to zero at t=1 and stays there: later maps still factor
    // through the singular one, so no augmented-rank jump ever occurs.
    MapFamily family;
    family.d = 2;
    family.name = "ramp";
    family.evaluator = [](double t) {
        AffineMap m = AffineMap::identity(2);
        m.D(0, 0) = std::max(0.0, 1.0 - t);
        return m;
    };
    ScanConfig config;
    config.t_max = 1.25;
    config.grid_points = 500;
    const auto points = find_singular_points(family, config);
    REQUIRE(!points.empty());
    for (const auto& p : points) {
        CHECK_FALSE(p.confirmed);
        CHECK(p.rank_deficit == 1);
    }
}

TEST_CASE("scan input validation") {
    const MapFamily family = dephasing_family({1.0, 4});
    ScanConfig bad_horizon;
    bad_horizon.t_max = 0.0;
    CHECK_THROWS_AS(find_singular_points(family, bad_horizon), std::invalid_argument);
    ScanConfig bad_grid;
    bad_grid.t_max = 10.0;
    bad_grid.grid_points = 50;
    CHECK_THROWS_AS(find_singular_points(family, bad_grid), std::invalid_argument);
}

TEST_CASE("interval classification on the dephasing family") {
    const MapFamily family = dephasing_family({1.0, 4});
    CHECK(classify_interval(family, 0.3, 0.6) == DivisibilityClass::CpDivisible);
    CHECK(classify_interval(family, 1.8, 2.2) == DivisibilityClass::NotPositive);
    CHECK(classify_interval(family, kPi / 2.0, 2.0) == DivisibilityClass::NoDecomposition);
}

TEST_CASE("a transpose-like intermediate map classifies as positive-only") {
    // D(t) = diag(1, 1-2t, 1): between t=0.2 and t=0.8 the intermediate map is
    // diag(1, -1, 1), the Bloch form of the transpose.
    MapFamily family;
    family.d = 2;
    family.name = "ybend";
    family.evaluator = [](double t) {
        AffineMap m = AffineMap::identity(2);
        m.D(1, 1) = 1.0 - 2.0 * t;
        return m;
    };
    CHECK(classify_interval(family, 0.2, 0.8) == DivisibilityClass::PositiveOnly);
}

TEST_CASE("classification string names") {
    CHECK(to_string(DivisibilityClass::CpDivisible) == "CP-divisible");
    CHECK(to_string(DivisibilityClass::PositiveOnly) == "positive-only");
    CHECK(to_string(DivisibilityClass::NotPositive) == "not-positive");
    CHECK(to_string(DivisibilityClass::NoDecomposition) == "no-decomposition");
}
