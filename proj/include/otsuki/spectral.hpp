#pragma once

#include <array>
#include <string>
#include <vector>

#include "otsuki/sl_system.hpp"

namespace otsuki {

/// Second-order divergence-form discretization of an SLSystem on n uniform
/// intervals. Unknowns are the nodes 0..n-1 (closed problems) or 1..n-1
/// (Dirichlet). The operator is block tridiagonal with scalar couplings
/// -w_k I; closed problems add a wrap-around block -w Phi between the last
/// node and node 0, Phi = diag(channel phases).
struct DiscreteOperator {
    int dim = 1;
    int nodes = 0;
    bool cyclic = true;
    double step = 0.0;
    std::vector<double> times;     // node times
    std::vector<double> potential; // nodes * dim * dim, row-major blocks
    std::vector<double> stiffness; // diagonal stiffness, w_{k-1/2} + w_{k+1/2}
    std::vector<double> coupling;  // nodes - 1 chain couplings w_{k+1/2}
    double wrap = 0.0;             // wrap coupling (cyclic only)
    std::array<cplx, 2> phase{cplx{1.0}, cplx{1.0}};

    int size() const { return nodes * dim; }
    bool is_real() const;
    /// min over nodes of the smallest eigenvalue of the potential block; a
    /// lower bound for the spectrum since the stiffness part is nonnegative.
    double lower_bound() const;
    /// max absolute row sum.
    double norm() const;
    /// Row-major dense Hermitian matrix.
    std::vector<cplx> to_dense() const;
};

/// Requires n >= 128 and sys.intervals() divisible by 2n so that half-node
/// weights are available from the samples.
DiscreteOperator discretize(const SLSystem& sys, int n);

/// Number of eigenvalues strictly below sigma (Sylvester inertia of
/// M - sigma via block LDL^H with node 0 as an arrowhead border).
int count_below(const DiscreteOperator& op, double sigma);

/// All eigenvalues below `cutoff`, by bisection on count_below.
std::vector<double> eigenvalues_below(const DiscreteOperator& op, double cutoff);

/// Eigenvectors for the given (sorted) eigenvalues by inverse iteration;
/// vectors inside a cluster are orthogonalized. Node-major layout.
std::vector<std::vector<cplx>> eigenvectors(const DiscreteOperator& op,
                                            const std::vector<double>& eigenvalues);

/// Eigenvalues of a dense Hermitian matrix (row-major, n x n), ascending:
/// Householder reduction to real tridiagonal form and implicit QL.
std::vector<double> hermitian_eigenvalues(std::vector<cplx> a, int n);
/// Eigenvalues of a real symmetric tridiagonal matrix; `off` has n - 1 entries.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> off);

enum class SolverMethod { Inertia, DenseQL };

std::string to_string(SolverMethod method);

struct SpectrumOptions {
    double tau_zero = 1e-5;
    bool eigenfunctions = false;
    SolverMethod method = SolverMethod::Inertia;
};

struct SpectrumSummary {
    int l = -1; // Fourier index when known
    int dim = 1;
    BoundaryCondition bc;
    int n = 0;  // coarse mesh; the fine mesh is 2n
    double cutoff = 0.0;
    double tau_zero = 1e-5;
    std::vector<double> eigenvalues; // Richardson extrapolated, ascending
    std::vector<double> coarse;      // raw values at n
    std::vector<double> fine;        // raw values at 2n
    int neg = 0;
    int zero = 0;
    // Raw classifications at each mesh, for the refinement check.
    int neg_coarse = 0, zero_coarse = 0;
    int neg_fine = 0, zero_fine = 0;
    std::vector<double> times;                    // fine-mesh node times
    std::vector<std::vector<cplx>> eigenfunctions; // fine mesh, node-major
    std::string method_tag;

    /// True when the raw counts at n and 2n equal the extrapolated ones.
    bool mesh_stable() const
    {
        return neg_coarse == neg && neg_fine == neg && zero_coarse == zero && zero_fine == zero;
    }

    /// Component `channel` of eigenfunction i as real samples (real part).
    std::vector<double> channel(std::size_t i, int channel = 0) const;
};

/// Eigenvalues below `cutoff` at meshes n and 2n, extrapolated as
/// (4 lambda_2n - lambda_n) / 3 and classified by |lambda| <= tau_zero.
/// Throws AmbiguityError when a value lies within 3 tau_zero of the
/// classification boundary and the raw classifications at n and 2n differ.
SpectrumSummary spectrum_below(const SLSystem& sys, double cutoff, int n,
                               const SpectrumOptions& options = {});

/// Sign changes of sampled values over one period. `closure` is +1 for
/// periodic data, -1 for antiperiodic data and 0 for an open interval.
/// Samples below 1e-9 of the maximum are treated as zeros.
int zero_count(const std::vector<double>& values, int closure = 1);

struct OscillationLabel {
    int position = 0; // index in the sorted spectrum
    int zeros = 0;
    int sturm_index = 0;
};

/// Sturm indices from eigenfunction zero counts for a scalar periodic or
/// antiperiodic summary with eigenfunctions. Periodic: index 0 has no zeros,
/// indices 2i+1, 2i+2 have 2i+2. Antiperiodic: indices 2i+1, 2i+2 have 2i+1.
/// Throws NumericalError when the zero counts break this pattern.
std::vector<OscillationLabel> oscillation_index(const SpectrumSummary& summary);

/// Checks the interleaving lambda_0 < lt_1 <= lt_2 < lambda_1 <= lambda_2 < ...
/// of periodic and antiperiodic eigenvalue lists (up to the shorter length).
bool interlacing_holds(const std::vector<double>& periodic,
                       const std::vector<double>& antiperiodic, double tolerance);

} // namespace otsuki
