// bloch.hpp — operator bases, coherence-vector representation of states and
// trace-preserving maps, Choi construction and positivity checks.
//
// Conventions fixed for the whole library:
//   * basis elements are traceless Hermitian with Tr(L_mu L_nu) = d * delta_{mu,nu}
//   * states expand as rho = (I + sum_mu n_mu L_mu) / d, n_mu = Tr(rho L_mu)
//   * maps act on coherence vectors by column convention n(t) = D * n(0) + f

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace dmsing {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// --------------------------- Domain types -----------------------------------

// Ordered set of n = d^2-1 traceless Hermitian matrices with Tr(L_mu L_nu) = d delta.
// For d = 2 this is exactly (sigma_x, sigma_y, sigma_z).
struct OperatorBasis {
    int d{0};
    std::vector<Matrix> elements;

    int size() const { return static_cast<int>(elements.size()); }
};

struct DensityMatrix {
    int d{0};
    Matrix entries;
};

struct BlochVector {
    int d{0};
    RealVector components;
};

// Trace-preserving map in coherence-vector form: n -> D * n + f.
struct AffineMap {
    int d{0};
    RealMatrix D;
    RealVector f;

    static AffineMap identity(int d);
};

// d^2 x d^2 Hermitian operator of a map on the unnormalized maximally
// entangled state; trace d for trace-preserving maps.
struct ChoiMatrix {
    int d{0};
    Matrix entries;
};

// --------------------------- Construction / validation ----------------------

// Generalized Gell-Mann basis rescaled to Tr(L_mu L_nu) = d delta_{mu,nu}.
// Ordering: symmetric off-diagonal pairs, antisymmetric pairs, diagonal,
// each in lexicographic index order. Throws std::invalid_argument for d < 2.
OperatorBasis make_basis(int d);

// Validates Hermiticity (1e-12), unit trace (1e-12) and smallest eigenvalue
// >= -1e-10; throws NotAStateError otherwise.
DensityMatrix make_density_matrix(const Matrix& entries);

// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const Matrix& hermitian);

// --------------------------- State <-> coherence vector ---------------------

BlochVector state_to_bloch(const DensityMatrix& rho, const OperatorBasis& basis);

// rho = (I + n . L) / d; throws NotAStateError if the result is not a state.
DensityMatrix bloch_to_state(const BlochVector& n, const OperatorBasis& basis);

// 1/2 Tr |rho1 - rho2|; equals half the Euclidean Bloch distance for qubits.
double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

// Applies the affine map at the state level via the coherence-vector route.
DensityMatrix apply_map(const AffineMap& m, const DensityMatrix& rho,
                        const OperatorBasis& basis);

// --------------------------- Choi construction and positivity ---------------

// Choi operator of the qubit affine map (V, s) on |Phi> = |00> + |11>:
//   M = 1/2 ( I(x)I + sum_mu s_mu sigma_mu (x) I
//             + sum_{mu,nu} V_{mu,nu} sigma_mu (x) sigma_nu^T ),  Tr M = 2.
ChoiMatrix choi_from_affine(const RealMatrix& V, const RealVector& s);

// True iff the smallest Choi eigenvalue is >= -tol.
bool is_completely_positive(const ChoiMatrix& M, double tol = 1e-10);

// Sampling-based qubit positivity check: evaluates the map on a deterministic
// Fibonacci-sphere grid of pure-state Bloch vectors plus seeded local
// refinement around the worst point. One-sided: may accept maps that are
// positive only up to sampling resolution. Throws for n_samples < 10.
bool is_positive_map(const RealMatrix& V, const RealVector& s,
                     int n_samples = 2048, double tol = 1e-10,
                     std::uint64_t seed = 42);

// --------------------------- Haar-identity utilities ------------------------

// Two-qudit swap, V|i,j> = |j,i>; involution with Tr V = d.
Matrix swap_operator(int d);

// Average of |psi><psi| (x) |psi><psi| over the given pure states.
Matrix projector_pair_average(const std::vector<Vector>& states);

// Monte-Carlo average over K Haar-random pure states; deterministic for a
// fixed seed, and the sample stream for K' > K extends the one for K.
// Converges to (I + swap) / (d (d+1)).
Matrix haar_average_projector(int d, std::int64_t K, std::uint64_t seed);

// A single Haar-random pure state drawn from the given generator state.
Vector haar_random_state(int d, std::mt19937_64& rng);

// Deterministic unit vector number i of an n-point Fibonacci sphere grid.
Eigen::Vector3d fibonacci_sphere_point(int i, int n);

}  // namespace dmsing
