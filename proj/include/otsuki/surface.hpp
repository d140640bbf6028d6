#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "otsuki/geodesic.hpp"
#include "otsuki/sl_system.hpp"

namespace otsuki {

using Vec5 = std::array<double, 5>;

/// Point of the bipolar Otsuki torus in S^4 subset R^5.
Vec5 immersion(double alpha, double t, const Trajectory& traj);

/// Adapted orthonormal frame of R^5 at a surface point: position N, tangent
/// e1 = (1/cos phi) d/dalpha, e2 = 2 pi cos phi d/dt, normals n1, n2.
struct FramePoint {
    Vec5 N, e1, e2, n1, n2;

    std::array<Vec5, 5> vectors() const { return {N, e1, e2, n1, n2}; }
};

FramePoint frame(double alpha, double t, const Trajectory& traj);

/// Diagonal entries of A^*A in the normal basis (n1, n2).
struct WeingartenDiag {
    double a11;
    double a22;
};

WeingartenDiag weingarten_diag(double t, const Trajectory& traj);

/// Coefficients of the l-th separated Jacobi system
///   -(p h')' + Q_l h = lambda h,  p = 4 pi^2 cos^2 phi,
/// sampled at the times in `t`.
struct SeparatedCoefficients {
    int l = 0;
    std::vector<double> t;
    std::vector<double> weight;       // p(t)
    std::vector<double> weight_slope; // p'(t)
    std::vector<double> q11, q12, q22;
};

/// p, p' and Q_l at a single time t in [0, t0).
struct PointCoefficients {
    double weight;
    double weight_slope;
    double q11, q12, q22;
};

PointCoefficients coefficients_at(int l, const Trajectory& traj, double t);

/// Samples on the trajectory grid over [0, T].
SeparatedCoefficients separated_coefficients(int l, const Trajectory& traj);

/// Samples at arbitrary times in [0, t0), via the symmetry extension.
SeparatedCoefficients separated_coefficients_at(int l, const Trajectory& traj,
                                                const std::vector<double>& times);

/// Normal components (h1, h2) of a Killing field projection, in separated
/// form, sampled at uniform times over [0, t0).
struct KernelField {
    int id = 0;
    int l = 0;
    std::string label;
    std::vector<double> t;
    std::vector<double> h1;
    std::vector<double> h2;
};

/// The nine spanning projections of the Killing fields of S^4, each reduced to
/// its separated (h1, h2, l) form, sampled at `samples` points over [0, t0).
std::vector<KernelField> kernel_fields(const Trajectory& traj, int samples);

struct KernelResidual {
    double value = 0.0; // max residual relative to coefficient and field scale
    bool coarse_grid = false;
};

/// Residual of the separated system at lambda = 0, with derivatives from
/// fourth-order periodic centered differences. The coefficients must be
/// sampled at the field's times and have the same l.
KernelResidual kernel_residual(const KernelField& field, const SeparatedCoefficients& coeffs);

enum class Channels { Both, First, Second };

/// Extends coefficients sampled on the trajectory grid over [0, T] to
/// [0, half_periods * T]; the off-diagonal entry flips sign with each
/// half-period. `First`/`Second` select one decoupled scalar channel.
SLSystem jacobi_system(const SeparatedCoefficients& coeffs, int half_periods,
                       BoundaryCondition bc, Channels channels = Channels::Both);

/// Scalar Laplace-Beltrami block -(p h')' + (l^2 / cos^2 phi) h = lambda h over
/// half_periods * T (0 selects the full length 2q).
SLSystem laplace_coefficients(int l, const Trajectory& traj, int half_periods = 0,
                              BoundaryCondition bc = BoundaryCondition::periodic());

/// Writes alpha,t,x1..x5 rows for an (alpha_samples x t_samples) grid.
void write_immersion_csv(std::ostream& out, const Trajectory& traj, int alpha_samples,
                         int t_samples);

} // namespace otsuki
