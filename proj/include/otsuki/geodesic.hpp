#pragma once

#include <span>
#include <vector>

namespace otsuki {

struct MetricCoefficients {
    double E;
    double G;
};

/// Coefficients of g = E dphi^2 + G dtheta^2 on the sphere minus the poles.
MetricCoefficients metric_coefficients(double phi);

/// Length of the arc from phi = b to phi = -b. Requires b in (-pi/2, 0).
double half_period(double b);

/// Rotation angle theta(T) accumulated over one half-period.
double rotation_angle(double b);

/// The closed-geodesic data for one value of the starting latitude b <= 0.
/// A family that closes after 2q half-periods also records (p, q); p == q == 0
/// means the closing rotation number is unknown.
struct GeodesicFamily {
    double b = 0.0;
    double c = 0.0;  // conserved momentum G * thetadot
    double T = 0.0;  // half-period
    double Xi = 0.0; // rotation angle over one half-period
    int p = 0;
    int q = 0;

    bool closed() const { return q > 0; }
    /// Full length t0 = 2qT of the closed geodesic.
    double full_length() const;

    /// Family with arbitrary b in (-pi/2, 0); closing data left empty.
    static GeodesicFamily from_b(double b);
    /// The degenerate b = 0 family (Clifford torus). The optional q sets the
    /// number of half-periods used as the closing length.
    static GeodesicFamily clifford(int p = 0, int q = 0);
};

struct RotationNumber {
    int p;
    int q;

    bool q_even() const { return q % 2 == 0; }
    double ratio() const { return static_cast<double>(p) / q; }

    /// Checks gcd(p, q) = 1 and 1/2 < p/q < sqrt(2)/2; throws ValidationError.
    static RotationNumber make(int p, int q);
};

/// Solves rotation_angle(b) = p pi / q for b in (-pi/2, 0).
GeodesicFamily solve_parameter(int p, int q);

/// Geodesic state at one instant.
struct GeodesicState {
    double phi;
    double phidot;
    double theta;
};

/// Samples of (phi, phidot, theta) on n + 1 uniform nodes over [0, T].
class Trajectory {
public:
    Trajectory(GeodesicFamily family, std::vector<double> phi, std::vector<double> phidot,
               std::vector<double> theta);

    const GeodesicFamily& family() const { return family_; }
    int intervals() const { return static_cast<int>(phi_.size()) - 1; }
    double step() const { return family_.T / intervals(); }
    double node_time(int k) const { return k * step(); }

    std::span<const double> phi() const { return phi_; }
    std::span<const double> phidot() const { return phidot_; }
    std::span<const double> theta() const { return theta_; }

    GeodesicState node(int k) const { return {phi_[k], phidot_[k], theta_[k]}; }

    /// State at s in [0, T] by cubic Hermite interpolation of the samples.
    GeodesicState interpolate(double s) const;

    /// thetadot = c / G(phi).
    double thetadot(double phi) const;
    /// phi'' from the geodesic equation.
    double phi_acceleration(double phi, double phidot) const;

    /// max over nodes of |E phidot^2 + G thetadot^2 - 1|.
    double max_speed_defect() const;

private:
    GeodesicFamily family_;
    std::vector<double> phi_;
    std::vector<double> phidot_;
    std::vector<double> theta_;
};

/// Integrates the second-order geodesic equation from (b, 0, 0) over [0, T].
/// Requires n >= 64. Throws NumericalError if the unit-speed constraint
/// drifts beyond 1e-10.
Trajectory sample_trajectory(const GeodesicFamily& family, int n);

/// State at any t in [0, t0), rebuilt from the half-period samples through
/// phi(t + T) = -phi(t) and theta(t + T) = theta(t) + Xi. For families without
/// closing data any t >= 0 is accepted.
GeodesicState evaluate_extended(const Trajectory& traj, double t);

/// Same state with theta kept as (theta within the half-period, number of
/// whole half-periods), so trigonometric functions of theta avoid the
/// rounding of the large accumulated angle.
struct SplitState {
    GeodesicState local;  // theta measured within the current half-period
    long half_periods = 0;
    double rotation = 0.0; // theta gained per half-period
};
SplitState evaluate_split(const Trajectory& traj, double t);

} // namespace otsuki
