#pragma once

#include "otsuki/geodesic.hpp"
#include "otsuki/spectral.hpp"
#include "otsuki/surface.hpp"

namespace otsuki {

/// Trajectory fine enough for spectral meshes n and 2n per half-period
/// (4n sample intervals, so every mesh node and half-node is a sample).
Trajectory jacobi_trajectory(const GeodesicFamily& family, int n);

/// Coarse mesh per half-period supported by a trajectory: intervals / 4.
int mesh_per_half_period(const Trajectory& traj);

/// The l-th separated Jacobi problem over half_periods * T.
SLSystem jacobi_problem(int l, const Trajectory& traj, int half_periods, BoundaryCondition bc,
                        Channels channels = Channels::Both);

/// spectrum_below for jacobi_problem on the trajectory's native mesh.
SpectrumSummary jacobi_spectrum(int l, const Trajectory& traj, int half_periods,
                                BoundaryCondition bc, Channels channels = Channels::Both,
                                double cutoff = 1.0, const SpectrumOptions& options = {});

struct AntiperiodicCheck {
    double lambda1 = 0.0;     // first antiperiodic eigenvalue of channel 2 at l = 0
    double lambda2 = 0.0;     // second one
    double correlation = 0.0; // |cos angle| between its eigenfunction and 2 pi cos^2 phi phidot
    bool first_negative = false;
    bool second_zero = false;
};

/// Channel 2 at l = 0 on [0, T] with h(t + T) = -h(t). Requires b != 0.
AntiperiodicCheck antiperiodic_check_l0(const Trajectory& traj, double tau_zero = 1e-5);

/// Number of Laplace-Beltrami eigenvalues below 2 on the closed surface.
/// Blocks l >= 1 count twice; for even q only functions invariant under
/// (alpha, t) -> (alpha + pi, t + t0/2) are kept.
int spectral_index(const Trajectory& traj, double tau_zero = 1e-5);

/// For l >= 3: Q_l positive definite at every node and no eigenvalue <= 0
/// over [0, t0). Throws ValidationError for l < 3.
bool verify_high_l_positive(int l, const Trajectory& traj);

} // namespace otsuki
