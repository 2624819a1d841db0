#include "dmsing/bloch.hpp"

#include "dmsing/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dmsing {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kStateEigTol = 1e-10;
constexpr double kImagResidueTol = 1e-10;

using Cx = std::complex<double>;

Matrix ketbra(int d, int i, int j) {
    Matrix M = Matrix::Zero(d, d);
    M(i, j) = 1.0;
    return M;
}

void check_same_dimension(int a, int b, const char* where) {
    if (a != b) {
        std::ostringstream os;
        os << where << ": dimension mismatch (" << a << " vs " << b << ")";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

// --------------------------- AffineMap --------------------------------------

AffineMap AffineMap::identity(int d) {
    const int n = d * d - 1;
    return AffineMap{d, RealMatrix::Identity(n, n), RealVector::Zero(n)};
}

// --------------------------- Basis -------------------------------------------

OperatorBasis make_basis(int d) {
    if (d < 2) throw std::invalid_argument("make_basis: dimension must be >= 2");

    OperatorBasis basis;
    basis.d = d;
    basis.elements.reserve(d * d - 1);
    const double scale = std::sqrt(d / 2.0);

    // Symmetric pairs |j><k| + |k><j|, lexicographic (j,k).
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            Matrix M = ketbra(d, j, k) + ketbra(d, k, j);
            basis.elements.push_back(scale * M);
        }
    }
    // Antisymmetric pairs -i|j><k| + i|k><j|.
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            Matrix M = Cx(0, -1) * ketbra(d, j, k) + Cx(0, 1) * ketbra(d, k, j);
            basis.elements.push_back(scale * M);
        }
    }
    // Diagonal sqrt(2/(l(l+1))) (sum_{j<l} |j><j| - l |l><l|), l = 1..d-1.
    for (int l = 1; l < d; ++l) {
        Matrix M = Matrix::Zero(d, d);
        const double factor = std::sqrt(2.0 / (l * (l + 1.0)));
        for (int j = 0; j < l; ++j) M(j, j) = factor;
        M(l, l) = -l * factor;
        basis.elements.push_back(scale * M);
    }
    return basis;
}

// --------------------------- States ------------------------------------------

double min_eigenvalue(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

DensityMatrix make_density_matrix(const Matrix& entries) {
    if (entries.rows() != entries.cols() || entries.rows() < 2) {
        throw std::invalid_argument("make_density_matrix: need a square matrix, d >= 2");
    }
    const double herm = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) {
        throw NotAStateError("make_density_matrix: not Hermitian (residue " +
                             std::to_string(herm) + ")");
    }
    const Cx tr = entries.trace();
    if (std::abs(tr - Cx(1.0, 0.0)) > kTraceTol) {
        throw NotAStateError("make_density_matrix: trace != 1");
    }
    const double lmin = min_eigenvalue(entries);
    if (lmin < -kStateEigTol) {
        throw NotAStateError("make_density_matrix: smallest eigenvalue " +
                             std::to_string(lmin) + " < -1e-10");
    }
    return DensityMatrix{static_cast<int>(entries.rows()), entries};
}

BlochVector state_to_bloch(const DensityMatrix& rho, const OperatorBasis& basis) {
    check_same_dimension(rho.d, basis.d, "state_to_bloch");
    const int n = basis.size();
    RealVector components(n);
    for (int mu = 0; mu < n; ++mu) {
        const Cx value = (rho.entries * basis.elements[mu]).trace();
        if (std::abs(value.imag()) > kImagResidueTol) {
            throw std::runtime_error("state_to_bloch: imaginary residue " +
                                     std::to_string(value.imag()));
        }
        components(mu) = value.real();
    }
    return BlochVector{rho.d, components};
}

DensityMatrix bloch_to_state(const BlochVector& n, const OperatorBasis& basis) {
    check_same_dimension(n.d, basis.d, "bloch_to_state");
    if (n.components.size() != basis.size()) {
        throw std::invalid_argument("bloch_to_state: component count mismatch");
    }
    const int d = basis.d;
    Matrix rho = Matrix::Identity(d, d);
    for (int mu = 0; mu < basis.size(); ++mu) {
        rho += n.components(mu) * basis.elements[mu];
    }
    rho /= static_cast<double>(d);
    return make_density_matrix(rho);
}

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
    check_same_dimension(rho1.d, rho2.d, "trace_distance");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho1.entries - rho2.entries,
                                             Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityMatrix apply_map(const AffineMap& m, const DensityMatrix& rho,
                        const OperatorBasis& basis) {
    check_same_dimension(m.d, rho.d, "apply_map");
    const BlochVector n = state_to_bloch(rho, basis);
    const RealVector out = m.D * n.components + m.f;
    return bloch_to_state(BlochVector{rho.d, out}, basis);
}

// --------------------------- Choi / positivity --------------------------------

ChoiMatrix choi_from_affine(const RealMatrix& V, const RealVector& s) {
    if (V.rows() != 3 || V.cols() != 3 || s.size() != 3) {
        throw std::invalid_argument("choi_from_affine: expected a 3x3 matrix and 3-vector (d = 2)");
    }
    const OperatorBasis pauli = make_basis(2);
    Matrix M = Matrix::Identity(4, 4);
    for (int mu = 0; mu < 3; ++mu) {
        const Matrix left = Eigen::kroneckerProduct(pauli.elements[mu], Matrix::Identity(2, 2));
        M += s(mu) * left;
        for (int nu = 0; nu < 3; ++nu) {
            const Matrix pair =
                Eigen::kroneckerProduct(pauli.elements[mu], pauli.elements[nu].transpose().eval());
            M += V(mu, nu) * pair;
        }
    }
    return ChoiMatrix{2, 0.5 * M};
}

bool is_completely_positive(const ChoiMatrix& M, double tol) {
    return min_eigenvalue(M.entries) >= -tol;
}

Eigen::Vector3d fibonacci_sphere_point(int i, int n) {
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * std::numbers::pi * i / golden;
    return {r * std::cos(phi), r * std::sin(phi), z};
}

bool is_positive_map(const RealMatrix& V, const RealVector& s, int n_samples,
                     double tol, std::uint64_t seed) {
    if (V.rows() != 3 || V.cols() != 3 || s.size() != 3) {
        throw std::invalid_argument("is_positive_map: expected a 3x3 matrix and 3-vector (d = 2)");
    }
    if (n_samples < 10) {
        throw std::invalid_argument("is_positive_map: need at least 10 samples");
    }

    // Output eigenvalues of a qubit state are (1 +- |V n + s|) / 2, so the map
    // is positive iff max_{|n|=1} |V n + s| <= 1.
    const auto output_norm = [&](const Eigen::Vector3d& n) { return (V * n + s).norm(); };

    double worst = 0.0;
    Eigen::Vector3d worst_n = Eigen::Vector3d::UnitZ();
    for (int i = 0; i < n_samples; ++i) {
        const Eigen::Vector3d n = fibonacci_sphere_point(i, n_samples);
        const double value = output_norm(n);
        if (value > worst) {
            worst = value;
            worst_n = n;
        }
    }

    // Projected-gradient polish from the worst grid point plus a few seeded
    // random restarts.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<Eigen::Vector3d> starts{worst_n};
    for (int k = 0; k < 8; ++k) {
        Eigen::Vector3d r{gauss(rng), gauss(rng), gauss(rng)};
        if (r.norm() > 1e-12) starts.push_back(r.normalized());
    }
    for (Eigen::Vector3d n : starts) {
        double step = 0.5;
        double value = output_norm(n);
        for (int it = 0; it < 200; ++it) {
            const Eigen::Vector3d out = V * n + s;
            const double norm = out.norm();
            if (norm < 1e-14) break;
            Eigen::Vector3d cand = n + step * (V.transpose() * out) / norm;
            const double cn = cand.norm();
            if (cn < 1e-12) break;
            cand /= cn;
            const double cv = output_norm(cand);
            if (cv > value) {
                n = cand;
                value = cv;
            } else {
                step *= 0.5;
                if (step < 1e-12) break;
            }
        }
        worst = std::max(worst, value);
    }

    const double min_output_eigenvalue = 0.5 * (1.0 - worst);
    return min_output_eigenvalue >= -tol;
}

// --------------------------- Haar utilities ----------------------------------

Matrix swap_operator(int d) {
    if (d < 2) throw std::invalid_argument("swap_operator: dimension must be >= 2");
    Matrix V = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            V(i * d + j, j * d + i) = 1.0;
        }
    }
    return V;
}

Vector haar_random_state(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Vector psi(d);
    for (int i = 0; i < d; ++i) psi(i) = Cx(gauss(rng), gauss(rng));
    return psi / psi.norm();
}

Matrix projector_pair_average(const std::vector<Vector>& states) {
    if (states.empty()) {
        throw std::invalid_argument("projector_pair_average: empty sample set");
    }
    const int d = static_cast<int>(states.front().size());
    Matrix sum = Matrix::Zero(d * d, d * d);
    Vector pair(d * d);
    for (const Vector& psi : states) {
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) pair(i * d + j) = psi(i) * psi(j);
        }
        sum.noalias() += pair * pair.adjoint();
    }
    return sum / static_cast<double>(states.size());
}

Matrix haar_average_projector(int d, std::int64_t K, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("haar_average_projector: dimension must be >= 2");
    if (K < 1) throw std::invalid_argument("haar_average_projector: need K >= 1");
    std::mt19937_64 rng(seed);
    Matrix sum = Matrix::Zero(d * d, d * d);
    Vector pair(d * d);
    for (std::int64_t k = 0; k < K; ++k) {
        const Vector psi = haar_random_state(d, rng);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) pair(i * d + j) = psi(i) * psi(j);
        }
        sum.noalias() += pair * pair.adjoint();
    }
    return sum / static_cast<double>(K);
}

}  // namespace dmsing
