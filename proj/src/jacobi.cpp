#include "otsuki/jacobi.hpp"

#include <cmath>

#include "otsuki/errors.hpp"
#include "otsuki/numeric.hpp"

namespace otsuki {

Trajectory jacobi_trajectory(const GeodesicFamily& family, int n)
{
    if (n < 128)
        throw ValidationError("mesh n must be at least 128");
    return sample_trajectory(family, 4 * n);
}

int mesh_per_half_period(const Trajectory& traj)
{
    if (traj.intervals() % 4 != 0)
        throw ValidationError("trajectory intervals must be a multiple of 4");
    return traj.intervals() / 4;
}

SLSystem jacobi_problem(int l, const Trajectory& traj, int half_periods, BoundaryCondition bc,
                        Channels channels)
{
    return jacobi_system(separated_coefficients(l, traj), half_periods, bc, channels);
}

SpectrumSummary jacobi_spectrum(int l, const Trajectory& traj, int half_periods,
                                BoundaryCondition bc, Channels channels, double cutoff,
                                const SpectrumOptions& options)
{
    const int n = mesh_per_half_period(traj);
    auto s = spectrum_below(jacobi_problem(l, traj, half_periods, bc, channels), cutoff,
                            n * half_periods, options);
    s.l = l;
    return s;
}

AntiperiodicCheck antiperiodic_check_l0(const Trajectory& traj, double tau_zero)
{
    if (traj.family().b == 0.0)
        throw DomainError("antiperiodic check needs b != 0");
    SpectrumOptions opt;
    opt.tau_zero = tau_zero;
    opt.eigenfunctions = true;
    const auto s = jacobi_spectrum(0, traj, 1, BoundaryCondition::antiperiodic(), Channels::Second,
                                   1.0, opt);
    if (s.eigenvalues.size() < 2)
        throw NumericalError("antiperiodic problem has fewer than two eigenvalues below 1");

    AntiperiodicCheck r;
    r.lambda1 = s.eigenvalues[0];
    r.lambda2 = s.eigenvalues[1];
    r.first_negative = r.lambda1 < -tau_zero;
    r.second_zero = std::abs(r.lambda2) <= tau_zero;

    const auto f = s.channel(1);
    double uv = 0, uu = 0, vv = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto st = evaluate_extended(traj, s.times[k]);
        const double c = std::cos(st.phi);
        const double g = two_pi * c * c * st.phidot;
        uv += f[k] * g;
        uu += f[k] * f[k];
        vv += g * g;
    }
    r.correlation = std::abs(uv) / std::sqrt(uu * vv);
    return r;
}

int spectral_index(const Trajectory& traj, double tau_zero)
{
    const auto& fam = traj.family();
    const auto rn = RotationNumber::make(fam.p, fam.q);
    const int n = mesh_per_half_period(traj);
    SpectrumOptions opt;
    opt.tau_zero = tau_zero;

    int total = 0;
    // The potential l^2 / cos^2 phi is at least l^2, so blocks with l^2 >= 2
    // have no eigenvalue below 2.
    for (int l = 0; l * l < 2; ++l) {
        int half_periods = 2 * fam.q;
        auto bc = BoundaryCondition::periodic();
        if (rn.q_even()) {
            half_periods = fam.q;
            if (l % 2 == 1)
                bc = BoundaryCondition::antiperiodic();
        }
        auto sys = laplace_coefficients(l, traj, half_periods, bc);
        for (auto& v : sys.q11)
            v -= 2.0;
        sys.q22 = sys.q11;
        const auto s = spectrum_below(sys, 0.5, n * half_periods, opt);
        total += (l == 0 ? 1 : 2) * s.neg;
    }
    return total;
}

bool verify_high_l_positive(int l, const Trajectory& traj)
{
    if (l < 3)
        throw ValidationError("positivity is only claimed for l >= 3");
    const auto c = separated_coefficients(l, traj);
    for (std::size_t k = 0; k < c.t.size(); ++k) {
        if (!(c.q11[k] > 0.0 && c.q11[k] * c.q22[k] - c.q12[k] * c.q12[k] > 0.0))
            return false;
    }
    const int q = traj.family().closed() ? traj.family().q : 1;
    const int n = mesh_per_half_period(traj);
    const auto sys = jacobi_system(c, 2 * q, BoundaryCondition::periodic());
    for (int mesh : {n * 2 * q, 2 * n * 2 * q})
        if (count_below(discretize(sys, mesh), 0.0) != 0)
            return false;
    return true;
}

} // namespace otsuki
