#pragma once

#include <array>
#include <optional>
#include <vector>

#include "otsuki/geodesic.hpp"
#include "otsuki/sl_system.hpp"

namespace otsuki {

using Mat4 = std::array<std::array<double, 4>, 4>;
using Mat2c = std::array<std::array<cplx, 2>, 2>;

/// Solutions psi_1..psi_4 of the l-th system at lambda = 0 on [0, T] with
/// boundary data (psi_i(0), psi_i(T)) = e_i, sampled at `t`, together with
/// their fluxes p psi_i'.
struct BoundarySolutions {
    int l = 0;
    double T = 0.0;
    std::vector<double> t;
    std::array<std::vector<std::array<double, 2>>, 4> h;
    std::array<std::vector<std::array<double, 2>>, 4> flux;
    double condition = 0.0;       // condition number of the 2x2 matching block
    double boundary_defect = 0.0; // max deviation of the boundary data from e_i
};

/// Integrates the fundamental matrix of h' = y / p, y' = Q_l h from t = 0
/// and matches boundary values. `samples` >= 2 uniform times over [0, T].
/// Throws NumericalError when the matching block has condition > 1e10.
BoundarySolutions boundary_solutions(int l, const Trajectory& traj, int samples = 257);

struct DirichletCount {
    int neg = 0;
    double margin = 0.0; // min |mu_k| over the computed eigenvalues (capped by the cutoff)
    std::vector<double> eigenvalues;
};

/// Negative eigenvalues of the l-th system on [0, T] with h(0) = h(T) = 0.
/// Throws InapplicableError when some |mu_k| <= tau_zero.
DirichletCount dirichlet_negative_count(int l, const Trajectory& traj, double tau_zero = 1e-5);

struct GramMatrix {
    Mat4 a{};
    double symmetry_defect = 0.0; // max |a_ij - a_ji| / max |a| before averaging
    double sigma_defect = 0.0;    // max |a_ij - a_s(i)s(j)| / max |a|, s = (13)(24)
    double condition = 0.0;
};

/// a_ij = <psi_i, p psi_j'> from t = 0 to T. Symmetry and sigma-symmetry are
/// checked (NumericalError beyond 1e-6) and then enforced by averaging.
GramMatrix gram_matrix(int l, const Trajectory& traj);
GramMatrix gram_matrix(const BoundarySolutions& psi);

struct DetPolynomial {
    std::array<double, 3> coeffs{}; // P(s) = c0 + c1 s + c2 s^2
    std::vector<double> roots;      // real roots, ascending
    bool complex_pair = false;

    double operator()(double s) const { return coeffs[0] + s * (coeffs[1] + s * coeffs[2]); }
    double norm() const;            // max |c_i|
};

/// det A(omega) as a polynomial in s = Re omega. Throws NumericalError when
/// all coefficients vanish.
DetPolynomial det_polynomial(const Mat4& a);

/// [[2a11 + (w + w*) a13, (w - w*) a14], [(w* - w) a14, 2a22 - (w + w*) a24]].
Mat2c twisted_form(const Mat4& a, cplx omega);

/// Everything the boundary-form count needs for one l.
struct BoundaryFormData {
    int l = 0;
    double b = 0.0;
    GramMatrix gram;
    DetPolynomial poly;
    DirichletCount dirichlet;
    std::optional<double> s1, s2; // real roots when present, s1 <= s2
};

BoundaryFormData boundary_form(int l, const Trajectory& traj, double tau_zero = 1e-5);

struct TwistedCount {
    int l = 0;
    int omega_index = -1;
    cplx omega{1.0, 0.0};
    int neg = 0;
    int zero = 0;
    std::array<double, 2> form_eigenvalues{};
    bool near_root = false;
};

/// neg = Dirichlet negatives + ind A(omega), zero = nul A(omega), with
/// eigenvalue tolerance 1e-7 ||A||. Re omega within 1e-7 of a root of P
/// forces nul = 1; a small eigenvalue away from the roots raises AmbiguityError.
TwistedCount twisted_counts(const BoundaryFormData& data, cplx omega, int omega_index = -1);
/// omega = exp(i pi r / q).
TwistedCount twisted_counts(const BoundaryFormData& data, int r, int q);

struct RootAggregate {
    int neg = 0;
    int zero = 0;
    int neg_even = 0, zero_even = 0; // r even (t0/2-periodic when q is even)
    int neg_odd = 0, zero_odd = 0;   // r odd (t0/2-antiperiodic when q is even)
    std::vector<TwistedCount> per_root;
};

/// Sums twisted_counts over omega = exp(i pi r / q), r = 0..2q-1.
RootAggregate aggregate_roots(const BoundaryFormData& data, int q);

} // namespace otsuki
