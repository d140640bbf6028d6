#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace otsuki {

using cplx = std::complex<double>;

enum class BoundaryKind { Periodic, Antiperiodic, Twisted, Dirichlet };

std::string to_string(BoundaryKind kind);

/// Closure of a problem on [0, L]. Twisted(omega) means
///   h1(t + L) = omega h1(t),  h2(t + L) = -omega h2(t)
/// for 2x2 systems and h(t + L) = omega h(t) for scalar ones.
struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::Periodic;
    cplx omega{1.0, 0.0};
    int omega_index = -1; // r in omega = exp(i pi r / q), when known

    static BoundaryCondition periodic() { return {BoundaryKind::Periodic, {1.0, 0.0}, -1}; }
    static BoundaryCondition antiperiodic() { return {BoundaryKind::Antiperiodic, {-1.0, 0.0}, -1}; }
    static BoundaryCondition dirichlet() { return {BoundaryKind::Dirichlet, {0.0, 0.0}, -1}; }
    static BoundaryCondition twisted(cplx omega, int index = -1);
    /// omega = exp(i pi r / q), a 2q-th root of unity.
    static BoundaryCondition root_of_unity(int r, int q);

    /// Factor relating h(t + L) to h(t) for each channel.
    std::array<cplx, 2> channel_phases(int dim) const;
    /// True when every channel phase is real (+-1), so real arithmetic suffices.
    bool real_phases(int dim) const;
};

/// Scalar (dim 1) or 2x2 Sturm-Liouville problem -(p h')' + Q h = lambda h on
/// [0, L]. Coefficients are sampled at intervals() + 1 uniform points
/// including both ends; for dim 1 only q11 is used.
struct SLSystem {
    int dim = 1;
    double length = 0.0;
    std::vector<double> weight;
    std::vector<double> q11, q12, q22;
    BoundaryCondition bc;

    int intervals() const { return static_cast<int>(weight.size()) - 1; }
    double sample_step() const { return length / intervals(); }

    /// Throws ValidationError on a non-positive weight, mismatched sample
    /// counts, or |omega| != 1 for twisted closures.
    void validate() const;
};

} // namespace otsuki
