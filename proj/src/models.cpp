#include "dmsing/models.hpp"

#include "dmsing/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dmsing {

namespace {

using json = nlohmann::json;
using Cx = std::complex<double>;

constexpr double kPi = std::numbers::pi;
constexpr double kIdentityTol = 1e-10;
constexpr double kPoleTol = 1e-12;
// Below this |d^2| the JC square-root frequency is treated as zero.
constexpr double kCriticalTol = 1e-12;

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

void check_starts_at_identity(const MapFamily& family, const std::string& path) {
    const AffineMap m0 = family.evaluate(0.0);
    const int n = family.d * family.d - 1;
    const double dev = (m0.D - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    const double fdev = m0.f.cwiseAbs().maxCoeff();
    if (dev > kIdentityTol || fdev > kIdentityTol) {
        schema_fail(path, "first sample (t = 0) is not the identity map");
    }
}

struct SampledFamilyData {
    int d{0};
    std::vector<double> times;
    std::vector<RealMatrix> D;
    std::vector<RealVector> f;
};

// Piecewise-linear evaluator over the stored samples.
MapFamily make_interpolated_family(SampledFamilyData data, std::string name,
                                   const std::string& path) {
    if (data.times.empty()) schema_fail(path, "no samples");
    if (std::abs(data.times.front()) > 0.0) {
        schema_fail(path, "first sample time must be 0");
    }
    for (std::size_t i = 1; i < data.times.size(); ++i) {
        if (!(data.times[i] > data.times[i - 1])) {
            schema_fail(path, "sample times must be strictly increasing");
        }
    }

    MapFamily family;
    family.d = data.d;
    family.name = std::move(name);
    family.t_horizon = data.times.back();

    auto shared = std::make_shared<SampledFamilyData>(std::move(data));
    family.evaluator = [shared](double t) -> AffineMap {
        const auto& s = *shared;
        if (t < s.times.front() - 1e-12 || t > s.times.back() + 1e-12) {
            std::ostringstream os;
            os << "tabulated family: t = " << t << " outside domain ["
               << s.times.front() << ", " << s.times.back() << "]";
            throw std::domain_error(os.str());
        }
        const double tc = std::clamp(t, s.times.front(), s.times.back());
        if (s.times.size() == 1) {
            AffineMap m;
            m.d = s.d;
            m.D = s.D[0];
            m.f = s.f[0];
            return m;
        }
        const auto upper = std::upper_bound(s.times.begin(), s.times.end(), tc);
        std::size_t hi = std::min<std::size_t>(upper - s.times.begin(), s.times.size() - 1);
        if (hi == 0) hi = 1;
        const std::size_t lo = hi - 1;
        const double span = s.times[hi] - s.times[lo];
        const double w = span > 0 ? (tc - s.times[lo]) / span : 0.0;
        AffineMap m;
        m.d = s.d;
        m.D = (1.0 - w) * s.D[lo] + w * s.D[hi];
        m.f = (1.0 - w) * s.f[lo] + w * s.f[hi];
        return m;
    };

    check_starts_at_identity(family, path);
    return family;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        schema_fail(path, std::string("JSON parse error: ") + e.what());
    }
    return j;
}

int read_dimension(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("d") || !j["d"].is_number_integer()) {
        schema_fail(path, "missing integer field \"d\"");
    }
    const int d = j["d"].get<int>();
    if (d < 2) schema_fail(path, "d must be >= 2");
    return d;
}

}  // namespace

// --------------------------- MapFamily ---------------------------------------

AffineMap MapFamily::evaluate(double t) const {
    if (!evaluator) throw std::logic_error("MapFamily: no evaluator");
    if (t < 0.0) {
        std::ostringstream os;
        os << name << ": negative time t = " << t;
        throw std::domain_error(os.str());
    }
    if (t > t_horizon) {
        std::ostringstream os;
        os << name << ": t = " << t << " beyond horizon " << t_horizon;
        throw std::domain_error(os.str());
    }
    return evaluator(t);
}

// --------------------------- Dephasing ----------------------------------------

double dephasing_coherence(const DephasingParams& p, double t) {
    return std::pow(std::cos(2.0 * p.A * t / std::sqrt(p.N)), p.N);
}

double dephasing_gamma(const DephasingParams& p, double t) {
    const double arg = 2.0 * p.A * t / std::sqrt(p.N);
    if (std::abs(std::cos(arg)) < kPoleTol) {
        throw PoleError("dephasing_gamma: pole at t = " + std::to_string(t));
    }
    return p.A * std::sqrt(p.N) * std::tan(arg);
}

MapFamily dephasing_family(const DephasingParams& p) {
    if (!(p.A > 0.0)) throw std::invalid_argument("dephasing_family: A must be > 0");
    if (p.N < 1) throw std::invalid_argument("dephasing_family: N must be >= 1");

    MapFamily family;
    family.d = 2;
    family.name = "dephasing";
    family.params = {{"A", p.A}, {"N", static_cast<double>(p.N)}};
    family.evaluator = [p](double t) {
        const double c = dephasing_coherence(p, t);
        AffineMap m = AffineMap::identity(2);
        m.D(0, 0) = c;
        m.D(1, 1) = c;
        return m;
    };
    family.closed_form_singular_points = [p](int n) {
        return std::sqrt(p.N) * (2 * n + 1) * kPi / (4.0 * p.A);
    };
    // |C| peaks every pi in the cosine argument.
    family.period_hint = kPi * std::sqrt(p.N) / (2.0 * p.A);
    return family;
}

// --------------------------- Damped Jaynes-Cummings ---------------------------

JCRegime jc_regime(const JCParams& p) {
    const double d_sq = p.lambda * p.lambda - 2.0 * p.gamma0 * p.lambda;
    if (std::abs(d_sq) < kCriticalTol) return JCRegime::Critical;
    return d_sq > 0 ? JCRegime::Overdamped : JCRegime::Underdamped;
}

double jc_c(const JCParams& p, double t) {
    const double lam = p.lambda;
    const double d_sq = lam * lam - 2.0 * p.gamma0 * lam;
    switch (jc_regime(p)) {
        case JCRegime::Critical:
            return std::exp(-lam * t / 2.0) * (1.0 + lam * t / 2.0);
        case JCRegime::Underdamped: {
            const double d0 = std::sqrt(-d_sq);
            return std::exp(-lam * t / 2.0) *
                   (std::cos(d0 * t / 2.0) + (lam / d0) * std::sin(d0 * t / 2.0));
        }
        case JCRegime::Overdamped: {
            // Overflow-safe form of e^{-lam t/2}(cosh + (lam/d) sinh).
            const double d = std::sqrt(d_sq);
            return 0.5 * ((1.0 + lam / d) * std::exp(-(lam - d) * t / 2.0) +
                          (1.0 - lam / d) * std::exp(-(lam + d) * t / 2.0));
        }
    }
    return 0.0;  // unreachable
}

double jc_gamma(const JCParams& p, double t) {
    const double lam = p.lambda;
    const double g0 = p.gamma0;
    const double d_sq = lam * lam - 2.0 * g0 * lam;
    switch (jc_regime(p)) {
        case JCRegime::Critical:
            return g0 * lam * t / (1.0 + lam * t / 2.0);
        case JCRegime::Underdamped: {
            const double d0 = std::sqrt(-d_sq);
            const double den = d0 * std::cos(d0 * t / 2.0) + lam * std::sin(d0 * t / 2.0);
            if (std::abs(den) < kPoleTol) {
                throw PoleError("jc_gamma: pole at t = " + std::to_string(t));
            }
            return 2.0 * g0 * lam * std::sin(d0 * t / 2.0) / den;
        }
        case JCRegime::Overdamped: {
            const double d = std::sqrt(d_sq);
            const double e = std::exp(-d * t);
            const double den = d * (1.0 + e) + lam * (1.0 - e);
            if (std::abs(den) < kPoleTol) {
                throw PoleError("jc_gamma: pole at t = " + std::to_string(t));
            }
            return 2.0 * g0 * lam * (1.0 - e) / den;
        }
    }
    return 0.0;  // unreachable
}

MapFamily jc_family(const JCParams& p) {
    if (!(p.gamma0 > 0.0)) throw std::invalid_argument("jc_family: gamma0 must be > 0");
    if (!(p.lambda > 0.0)) throw std::invalid_argument("jc_family: lambda must be > 0");

    MapFamily family;
    family.d = 2;
    family.name = "jc";
    family.params = {{"gamma0", p.gamma0}, {"lambda", p.lambda}};
    family.evaluator = [p](double t) {
        const double d11 = jc_c(p, t);  // c(0) = 1
        AffineMap m = AffineMap::identity(2);
        m.D(0, 0) = d11;
        m.D(1, 1) = d11;
        m.D(2, 2) = d11 * d11;
        m.f(2) = d11 * d11 - 1.0;
        return m;
    };
    if (jc_regime(p) == JCRegime::Underdamped) {
        const double lam = p.lambda;
        const double d0 = std::sqrt(2.0 * p.gamma0 * lam - lam * lam);
        family.closed_form_singular_points = [d0, lam](int n) {
            // arccot branch in (0, pi) so the first zero is positive.
            const double arccot = kPi - std::atan(d0 / lam);
            return (2.0 / d0) * (arccot + n * kPi);
        };
        family.period_hint = 2.0 * kPi / d0;
    }
    return family;
}

// --------------------------- File-backed families -----------------------------

MapFamily load_tabulated_family(const std::string& path) {
    const json j = load_json_file(path);
    const int d = read_dimension(j, path);
    const int n = d * d - 1;

    if (!j.contains("samples") || !j["samples"].is_array() || j["samples"].empty()) {
        schema_fail(path, "missing non-empty \"samples\" array");
    }

    SampledFamilyData data;
    data.d = d;
    for (const auto& sample : j["samples"]) {
        if (!sample.is_object() || !sample.contains("t") || !sample.contains("D") ||
            !sample.contains("f")) {
            schema_fail(path, "sample must have fields t, D, f");
        }
        if (!sample["t"].is_number()) schema_fail(path, "sample t must be a number");
        const auto& Dj = sample["D"];
        const auto& fj = sample["f"];
        if (!Dj.is_array() || static_cast<int>(Dj.size()) != n * n) {
            schema_fail(path, "sample D must hold " + std::to_string(n * n) + " numbers");
        }
        if (!fj.is_array() || static_cast<int>(fj.size()) != n) {
            schema_fail(path, "sample f must hold " + std::to_string(n) + " numbers");
        }
        RealMatrix D(n, n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                const auto& v = Dj[r * n + c];
                if (!v.is_number()) schema_fail(path, "D entries must be numbers");
                D(r, c) = v.get<double>();
            }
        }
        RealVector f(n);
        for (int r = 0; r < n; ++r) {
            const auto& v = fj[r];
            if (!v.is_number()) schema_fail(path, "f entries must be numbers");
            f(r) = v.get<double>();
        }
        data.times.push_back(sample["t"].get<double>());
        data.D.push_back(std::move(D));
        data.f.push_back(std::move(f));
    }
    return make_interpolated_family(std::move(data), "file", path);
}

AffineMap affine_from_kraus(const std::vector<Matrix>& kraus, const OperatorBasis& basis) {
    const int d = basis.d;
    const int n = basis.size();

    Matrix closure = Matrix::Zero(d, d);
    for (const Matrix& K : kraus) {
        if (K.rows() != d || K.cols() != d) {
            throw std::invalid_argument("affine_from_kraus: Kraus operator shape mismatch");
        }
        closure += K.adjoint() * K;
    }
    const double tp_dev = (closure - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (tp_dev > 1e-8) {
        throw std::invalid_argument("affine_from_kraus: Kraus set is not trace preserving (deviation " +
                                    std::to_string(tp_dev) + ")");
    }

    const auto apply = [&](const Matrix& X) {
        Matrix out = Matrix::Zero(d, d);
        for (const Matrix& K : kraus) out += K * X * K.adjoint();
        return out;
    };

    AffineMap m;
    m.d = d;
    m.D.resize(n, n);
    m.f.resize(n);
    const Matrix image_of_identity = apply(Matrix::Identity(d, d));
    for (int mu = 0; mu < n; ++mu) {
        m.f(mu) = (basis.elements[mu] * image_of_identity).trace().real() / d;
    }
    for (int nu = 0; nu < n; ++nu) {
        const Matrix image = apply(basis.elements[nu]);
        for (int mu = 0; mu < n; ++mu) {
            m.D(mu, nu) = (basis.elements[mu] * image).trace().real() / d;
        }
    }
    return m;
}

MapFamily family_from_kraus(const std::string& path) {
    const json j = load_json_file(path);
    const int d = read_dimension(j, path);

    if (!j.contains("samples") || !j["samples"].is_array() || j["samples"].empty()) {
        schema_fail(path, "missing non-empty \"samples\" array");
    }
    const OperatorBasis basis = make_basis(d);

    SampledFamilyData data;
    data.d = d;
    for (const auto& sample : j["samples"]) {
        if (!sample.is_object() || !sample.contains("t") || !sample.contains("kraus")) {
            schema_fail(path, "sample must have fields t and kraus");
        }
        if (!sample["t"].is_number()) schema_fail(path, "sample t must be a number");
        const auto& list = sample["kraus"];
        if (!list.is_array() || list.empty()) {
            schema_fail(path, "kraus must be a non-empty array of matrices");
        }
        std::vector<Matrix> kraus;
        for (const auto& Kj : list) {
            if (!Kj.is_array() || static_cast<int>(Kj.size()) != d) {
                schema_fail(path, "each Kraus matrix must have " + std::to_string(d) + " rows");
            }
            Matrix K(d, d);
            for (int r = 0; r < d; ++r) {
                const auto& row = Kj[r];
                if (!row.is_array() || static_cast<int>(row.size()) != d) {
                    schema_fail(path, "each Kraus row must have " + std::to_string(d) + " entries");
                }
                for (int c = 0; c < d; ++c) {
                    const auto& entry = row[c];
                    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                        !entry[1].is_number()) {
                        schema_fail(path, "complex entries must be [re, im] pairs");
                    }
                    K(r, c) = Cx(entry[0].get<double>(), entry[1].get<double>());
                }
            }
            kraus.push_back(std::move(K));
        }
        AffineMap m;
        try {
            m = affine_from_kraus(kraus, basis);
        } catch (const std::invalid_argument& e) {
            schema_fail(path, e.what());
        }
        data.times.push_back(sample["t"].get<double>());
        data.D.push_back(std::move(m.D));
        data.f.push_back(std::move(m.f));
    }
    return make_interpolated_family(std::move(data), "kraus", path);
}

void save_tabulated_family(const MapFamily& family, const std::vector<double>& times,
                           const std::string& path) {
    const int n = family.d * family.d - 1;
    json samples = json::array();
    for (double t : times) {
        const AffineMap m = family.evaluate(t);
        json Dj = json::array();
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) Dj.push_back(m.D(r, c));
        }
        json fj = json::array();
        for (int r = 0; r < n; ++r) fj.push_back(m.f(r));
        samples.push_back({{"t", t}, {"D", std::move(Dj)}, {"f", std::move(fj)}});
    }
    const json j = {{"d", family.d}, {"samples", std::move(samples)}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_tabulated_family: cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace dmsing
