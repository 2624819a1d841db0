#include <doctest.h>

#include "dmsing/errors.hpp"
#include "dmsing/models.hpp"
#include "support/oracles.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

using namespace dmsing;

namespace {

constexpr double kPi = std::numbers::pi;

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("dephasing family: identity at t=0 and closed-form collapse times") {
    const MapFamily family = dephasing_family({1.0, 4});
    const AffineMap at0 = family.evaluate(0.0);
    CHECK((at0.D - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(at0.f.cwiseAbs().maxCoeff() < 1e-12);

    const AffineMap collapsed = family.evaluate(kPi / 2.0);
    CHECK(std::abs(collapsed.D(0, 0)) < 1e-12);
    CHECK(std::abs(collapsed.D(1, 1)) < 1e-12);
    CHECK(collapsed.D(2, 2) == doctest::Approx(1.0));

    const AffineMap revived = family.evaluate(kPi);
    CHECK(revived.D(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

    REQUIRE(family.has_closed_form());
    for (int n = 0; n < 4; ++n) {
        CHECK(family.closed_form_singular_points(n) ==
              doctest::Approx(std::sqrt(4.0) * (2 * n + 1) * kPi / 4.0).epsilon(1e-14));
    }
}

TEST_CASE("dephasing coherence: bounds, periodicity for even N, f identically zero") {
    const DephasingParams p{1.0, 4};
    const MapFamily family = dephasing_family(p);
    for (double t = 0.0; t <= 10.0; t += 0.37) {
        const double c = dephasing_coherence(p, t);
        CHECK(std::abs(c) <= 1.0 + 1e-14);
        // Period sqrt(N) pi / A for even N.
        CHECK(dephasing_coherence(p, t + 2.0 * kPi) == doctest::Approx(c).epsilon(1e-10));
        CHECK(family.evaluate(t).f.cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("dephasing rate: values and pole") {
    const DephasingParams p{1.0, 4};
    CHECK(dephasing_gamma(p, 0.0) == doctest::Approx(0.0));
    CHECK(dephasing_gamma(p, kPi / 4.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(dephasing_gamma(p, kPi / 2.0), PoleError);
}

TEST_CASE("dephasing family validates parameters") {
    CHECK_THROWS_AS(dephasing_family({0.0, 4}), std::invalid_argument);
    CHECK_THROWS_AS(dephasing_family({1.0, 0}), std::invalid_argument);
}

TEST_CASE("jc regimes split at gamma0/lambda = 1/2") {
    CHECK(jc_regime({0.2, 1.0}) == JCRegime::Overdamped);
    CHECK(jc_regime({0.5, 1.0}) == JCRegime::Critical);
    CHECK(jc_regime({5.0, 1.0}) == JCRegime::Underdamped);
}

TEST_CASE("jc amplitude: closed-form values in each regime") {
    CHECK(jc_c({5.0, 1.0}, 0.0) == doctest::Approx(1.0));
    // Underdamped: d0 = 3, c(2 pi / 3) = -e^{-pi/3}.
    CHECK(jc_c({5.0, 1.0}, 2.0 * kPi / 3.0) ==
          doctest::Approx(-std::exp(-kPi / 3.0)).epsilon(1e-12));

    // Overdamped: positive and monotone decreasing.
    double prev = jc_c({0.2, 1.0}, 0.0);
    for (double t = 0.05; t <= 10.0; t += 0.05) {
        const double c = jc_c({0.2, 1.0}, t);
        CHECK(c > 0.0);
        CHECK(c < prev + 1e-15);
        prev = c;
    }

    // Critical limit agrees with nearby regimes.
    const double c_crit = jc_c({0.5, 1.0}, 1.3);
    CHECK(jc_c({0.5 + 1e-7, 1.0}, 1.3) == doctest::Approx(c_crit).epsilon(1e-5));
    CHECK(jc_c({0.5 - 1e-7, 1.0}, 1.3) == doctest::Approx(c_crit).epsilon(1e-5));
}

TEST_CASE("jc rate: zero at origin, positive when overdamped, divergent near collapse") {
    CHECK(jc_gamma({5.0, 1.0}, 0.0) == doctest::Approx(0.0));
    for (double t = 0.1; t <= 10.0; t += 0.1) {
        CHECK(jc_gamma({0.2, 1.0}, t) >= 0.0);
    }
    const MapFamily family = jc_family({5.0, 1.0});
    const double tc = family.closed_form_singular_points(0);
    CHECK(std::abs(jc_gamma({5.0, 1.0}, tc - 1e-4)) > 1e3);
    CHECK_THROWS_AS(jc_gamma({5.0, 1.0}, tc), PoleError);
}

TEST_CASE("jc family: structure D33 = D11^2, fixed ground state, collapse at t_c") {
    const MapFamily family = jc_family({5.0, 1.0});
    RealVector ground = RealVector::Zero(3);
    ground(2) = -1.0;
    for (double t = 0.0; t <= 4.0; t += 0.23) {
        const AffineMap m = family.evaluate(t);
        CHECK(m.D(2, 2) == doctest::Approx(m.D(0, 0) * m.D(0, 0)).epsilon(1e-14));
        CHECK(m.f(2) == doctest::Approx(m.D(2, 2) - 1.0).epsilon(1e-14));
        CHECK((m.D * ground + m.f - ground).cwiseAbs().maxCoeff() < 1e-12);
    }

    REQUIRE(family.has_closed_form());
    const double tc = family.closed_form_singular_points(0);
    CHECK(tc == doctest::Approx((2.0 / 3.0) * (kPi - std::atan(3.0))).epsilon(1e-14));
    CHECK(tc == doctest::Approx(1.2616979).epsilon(1e-6));
    const AffineMap at_tc = family.evaluate(tc);
    CHECK(at_tc.D.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((at_tc.f - RealVector(ground)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("jc family without underdamping exposes no closed-form singular times") {
    CHECK_FALSE(jc_family({0.2, 1.0}).has_closed_form());
    CHECK_FALSE(jc_family({0.5, 1.0}).has_closed_form());
    CHECK(jc_family({5.0, 1.0}).has_closed_form());
}

TEST_CASE("generator consistency: closed forms solve their own rate equations") {
    // Dephasing: d rho12 / dt = -2 gamma(t) rho12 on an interval clear of poles.
    const DephasingParams dp{1.0, 4};
    const double r0 = 0.37;
    const double got_deph = oracles::rk4(
        [&dp](double t, double y) { return -2.0 * dephasing_gamma(dp, t) * y; }, r0, 0.1,
        1.2, 20000);
    const double want_deph =
        r0 * dephasing_coherence(dp, 1.2) / dephasing_coherence(dp, 0.1);
    CHECK(got_deph == doctest::Approx(want_deph).epsilon(1e-6));

    // JC: d rho_ee / dt = -gamma(t) rho_ee; the survival factor is D11^2.
    const JCParams jp{5.0, 1.0};
    const double got_jc = oracles::rk4(
        [&jp](double t, double y) { return -jc_gamma(jp, t) * y; }, 0.8, 0.05, 1.0, 20000);
    const double want_jc = 0.8 * std::pow(jc_c(jp, 1.0) / jc_c(jp, 0.05), 2);
    CHECK(got_jc == doctest::Approx(want_jc).epsilon(1e-6));

    // Same check in the overdamped regime over a long window.
    const JCParams op{0.2, 1.0};
    const double got_over = oracles::rk4(
        [&op](double t, double y) { return -jc_gamma(op, t) * y; }, 1.0, 0.0, 6.0, 20000);
    CHECK(got_over == doctest::Approx(std::pow(jc_c(op, 6.0), 2)).epsilon(1e-6));
}

TEST_CASE("family evaluation rejects times outside the domain") {
    const MapFamily family = dephasing_family({1.0, 4});
    CHECK_THROWS_AS(family.evaluate(-0.1), std::domain_error);

    MapFamily bounded = family;
    bounded.t_horizon = 2.0;
    CHECK_THROWS_AS(bounded.evaluate(2.5), std::domain_error);
    CHECK_NOTHROW(bounded.evaluate(2.0));
}

TEST_CASE("tabulated family: midpoint interpolation") {
    const std::string path = write_temp(
        "tab_mid.json",
        R"({"d": 2, "samples": [
             {"t": 0, "D": [1,0,0, 0,1,0, 0,0,1], "f": [0,0,0]},
             {"t": 1, "D": [0.5,0,0, 0,0.5,0, 0,0,1], "f": [0,0,0]}
           ]})");
    const MapFamily family = load_tabulated_family(path);
    CHECK(family.d == 2);
    CHECK(family.t_horizon == doctest::Approx(1.0));
    const AffineMap mid = family.evaluate(0.5);
    CHECK(mid.D(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(mid.D(1, 1) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(mid.D(2, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(family.evaluate(1.5), std::domain_error);
    std::remove(path.c_str());
}

TEST_CASE("tabulated family: schema violations are rejected") {
    const std::string not_identity = write_temp(
        "tab_bad_id.json",
        R"({"d": 2, "samples": [{"t": 0, "D": [0.9,0,0, 0,1,0, 0,0,1], "f": [0,0,0]}]})");
    CHECK_THROWS_AS(load_tabulated_family(not_identity), SchemaError);
    std::remove(not_identity.c_str());

    const std::string non_monotone = write_temp(
        "tab_bad_order.json",
        R"({"d": 2, "samples": [
             {"t": 0, "D": [1,0,0, 0,1,0, 0,0,1], "f": [0,0,0]},
             {"t": 0.5, "D": [1,0,0, 0,1,0, 0,0,1], "f": [0,0,0]},
             {"t": 0.25, "D": [1,0,0, 0,1,0, 0,0,1], "f": [0,0,0]}
           ]})");
    CHECK_THROWS_AS(load_tabulated_family(non_monotone), SchemaError);
    std::remove(non_monotone.c_str());

    const std::string wrong_shape = write_temp(
        "tab_bad_shape.json",
        R"({"d": 2, "samples": [{"t": 0, "D": [1,0,0,1], "f": [0,0,0]}]})");
    CHECK_THROWS_AS(load_tabulated_family(wrong_shape), SchemaError);
    std::remove(wrong_shape.c_str());

    const std::string no_d = write_temp("tab_bad_d.json", R"({"samples": []})");
    CHECK_THROWS_AS(load_tabulated_family(no_d), SchemaError);
    std::remove(no_d.c_str());

    const std::string garbage = write_temp("tab_garbage.json", "not json at all {");
    CHECK_THROWS_AS(load_tabulated_family(garbage), SchemaError);
    std::remove(garbage.c_str());

    CHECK_THROWS_AS(load_tabulated_family("/nonexistent/path.json"), SchemaError);
}

TEST_CASE("tabulated round trip reproduces the exported family at its nodes") {
    const MapFamily family = dephasing_family({1.0, 4});
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(i * 0.1);
    const std::string path =
        (std::filesystem::temp_directory_path() / "tab_roundtrip.json").string();
    save_tabulated_family(family, times, path);
    const MapFamily loaded = load_tabulated_family(path);
    for (double t : times) {
        const AffineMap a = family.evaluate(t);
        const AffineMap b = loaded.evaluate(t);
        CHECK((a.D - b.D).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((a.f - b.f).cwiseAbs().maxCoeff() < 1e-12);
    }
    std::remove(path.c_str());
}

TEST_CASE("kraus family: identity channel and exact dephasing channel") {
    const std::string id_path = write_temp(
        "kraus_id.json",
        R"({"d": 2, "samples": [
             {"t": 0, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]},
             {"t": 1, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}
           ]})");
    const MapFamily id_family = family_from_kraus(id_path);
    const AffineMap id_map = id_family.evaluate(0.7);
    CHECK((id_map.D - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(id_map.f.cwiseAbs().maxCoeff() < 1e-12);
    std::remove(id_path.c_str());

    // {sqrt(1-p) I, sqrt(p) sigma_z} with p = 1/2 kills both coherences.
    const double r = std::sqrt(0.5);
    nlohmann::json z_doc;
    z_doc["d"] = 2;
    const auto cmplx = [](double re) { return nlohmann::json::array({re, 0.0}); };
    nlohmann::json identity_k = {{cmplx(1), cmplx(0)}, {cmplx(0), cmplx(1)}};
    nlohmann::json k_plus = {{cmplx(r), cmplx(0)}, {cmplx(0), cmplx(r)}};
    nlohmann::json k_minus = {{cmplx(r), cmplx(0)}, {cmplx(0), cmplx(-r)}};
    z_doc["samples"] = {{{"t", 0}, {"kraus", {identity_k}}},
                        {{"t", 1}, {"kraus", {k_plus, k_minus}}}};
    const std::string z_path = write_temp("kraus_deph.json", z_doc.dump());
    const MapFamily z_family = family_from_kraus(z_path);
    const AffineMap z_map = z_family.evaluate(1.0);
    CHECK(std::abs(z_map.D(0, 0)) < 1e-12);
    CHECK(std::abs(z_map.D(1, 1)) < 1e-12);
    CHECK(z_map.D(2, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(z_map.f.cwiseAbs().maxCoeff() < 1e-12);
    std::remove(z_path.c_str());
}

TEST_CASE("kraus family: amplitude damping against a transfer-matrix oracle") {
    // Excited state is the first basis vector; ground is the Bloch south pole.
    const double eta = 0.37;
    const OperatorBasis basis = make_basis(2);
    std::vector<Matrix> kraus(2, Matrix::Zero(2, 2));
    kraus[0](0, 0) = std::sqrt(1.0 - eta);
    kraus[0](1, 1) = 1.0;
    kraus[1](1, 0) = std::sqrt(eta);

    const AffineMap m = affine_from_kraus(kraus, basis);
    CHECK(m.D(0, 0) == doctest::Approx(std::sqrt(1.0 - eta)).epsilon(1e-12));
    CHECK(m.D(1, 1) == doctest::Approx(std::sqrt(1.0 - eta)).epsilon(1e-12));
    CHECK(m.D(2, 2) == doctest::Approx(1.0 - eta).epsilon(1e-12));
    CHECK(m.f(2) == doctest::Approx(-eta).epsilon(1e-12));

    // Oracle: push basis-aligned states through the Kraus action directly and
    // read off the image coherence vectors.
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        const DensityMatrix rho = oracles::random_state(2, rng);
        Matrix direct = Matrix::Zero(2, 2);
        for (const Matrix& K : kraus) direct += K * rho.entries * K.adjoint();
        const DensityMatrix via_affine = apply_map(m, rho, basis);
        CHECK((direct - via_affine.entries).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("kraus family: trace-preservation violations are rejected") {
    const std::string bad = write_temp(
        "kraus_bad.json",
        R"({"d": 2, "samples": [{"t": 0, "kraus": [[[[0.5,0],[0,0]],[[0,0],[1,0]]]]}]})");
    CHECK_THROWS_AS(family_from_kraus(bad), SchemaError);
    std::remove(bad.c_str());
}
