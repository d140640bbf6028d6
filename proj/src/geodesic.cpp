#include "otsuki/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "otsuki/errors.hpp"
#include "otsuki/numeric.hpp"
#include "otsuki/quadrature.hpp"

namespace otsuki {

namespace {

constexpr double quad_rel_tol = 1e-13;
constexpr double quad_abs_tol = 1e-15;
constexpr int quad_max_intervals = 20000;
constexpr double speed_tolerance = 1e-10;

void require_open_range(double b)
{
    if (!(b > -pi / 2 && b < 0.0)) {
        std::ostringstream msg;
        msg << "b = " << b << " must lie in (-pi/2, 0)";
        throw DomainError(msg.str());
    }
}

// With phi = beta sin(u), beta = -b, the factor cos^4 phi - cos^4 b becomes
// beta^2 cos^2 u * root^2 with root smooth and positive, which cancels the
// inverse square-root singularities at u = +-pi/2.
struct Substituted {
    double cos_phi;
    double root;
};

Substituted substitute(double b, double u)
{
    const double beta = -b;
    const double s = std::sin(u);
    const double phi = beta * s;
    const double cb = std::cos(b);
    const double cp = std::cos(phi);
    const double product = sinc(beta * (1.0 + s)) * sinc(beta * (1.0 - s));
    return {cp, std::sqrt(product * (cp * cp + cb * cb))};
}

// Both integrands are even in u, so integrate over [0, pi/2] and double.
double half_period_unchecked(double b)
{
    auto integrand = [b](double u) {
        const auto [cp, root] = substitute(b, u);
        return two_pi * cp * cp * cp / root;
    };
    return 2.0 * integrate_adaptive(integrand, 0.0, pi / 2, quad_rel_tol, quad_abs_tol, quad_max_intervals).value;
}

double rotation_angle_unchecked(double b)
{
    const double cb2 = std::cos(b) * std::cos(b);
    auto integrand = [b, cb2](double u) {
        const auto [cp, root] = substitute(b, u);
        return cb2 / (cp * root);
    };
    return 2.0 * integrate_adaptive(integrand, 0.0, pi / 2, quad_rel_tol, quad_abs_tol, quad_max_intervals).value;
}

struct OdeState {
    double phi, phidot, theta;
};

} // namespace

MetricCoefficients metric_coefficients(double phi)
{
    if (!(std::abs(phi) < pi / 2))
        throw DomainError("metric degenerates at the poles: |phi| must be < pi/2");
    const double c2 = std::cos(phi) * std::cos(phi);
    return {four_pi_sq * c2, four_pi_sq * c2 * c2};
}

double half_period(double b)
{
    require_open_range(b);
    return half_period_unchecked(b);
}

double rotation_angle(double b)
{
    require_open_range(b);
    return rotation_angle_unchecked(b);
}

double GeodesicFamily::full_length() const
{
    if (!closed())
        throw ValidationError("geodesic family has no closing rotation number");
    return 2.0 * q * T;
}

GeodesicFamily GeodesicFamily::from_b(double b)
{
    require_open_range(b);
    const double cb = std::cos(b);
    return {b, two_pi * cb * cb, half_period_unchecked(b), rotation_angle_unchecked(b), 0, 0};
}

GeodesicFamily GeodesicFamily::clifford(int p, int q)
{
    return {0.0, two_pi, clifford_half_period(), clifford_rotation_angle(), p, q};
}

RotationNumber RotationNumber::make(int p, int q)
{
    if (p <= 0 || q <= 0)
        throw ValidationError("p and q must be positive");
    if (std::gcd(p, q) != 1)
        throw ValidationError("p and q must be coprime");
    const double r = static_cast<double>(p) / q;
    if (!(2 * p > q && r < std::numbers::sqrt2 / 2))
        throw ValidationError("p/q must lie in (1/2, √2/2)");
    return {p, q};
}

GeodesicFamily solve_parameter(int p, int q)
{
    const auto rn = RotationNumber::make(p, q);
    const double target = pi * rn.ratio();
    auto residual = [target](double b) { return rotation_angle_unchecked(b) - target; };

    // rotation_angle increases from pi/2 to (sqrt 2 / 2) pi on (-pi/2, 0).
    double hi = -1e-12;
    double f_hi = residual(hi);
    double lo = -pi / 2 + 1e-3;
    double f_lo = residual(lo);
    for (double gap : {1e-6, 1e-9}) {
        if (f_lo < 0.0)
            break;
        lo = -pi / 2 + gap;
        f_lo = residual(lo);
    }
    if (!(f_lo < 0.0 && f_hi > 0.0))
        throw NumericalError("could not bracket the root of rotation_angle(b) = p pi / q");

    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = residual(mid);
        (f_mid < 0.0 ? lo : hi) = mid;
        (f_mid < 0.0 ? f_lo : f_hi) = f_mid;
    }
    // Safeguarded secant (Illinois) polish inside the bracket.
    double b = lo;
    double f_b = f_lo;
    int side = 0;
    for (int iter = 0; iter < 100; ++iter) {
        b = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        f_b = residual(b);
        if (std::abs(f_b) < 1e-14 || hi - lo < 1e-15)
            break;
        if (f_b < 0.0) {
            lo = b;
            f_lo = f_b;
            if (side == -1)
                f_hi *= 0.5;
            side = -1;
        } else {
            hi = b;
            f_hi = f_b;
            if (side == 1)
                f_lo *= 0.5;
            side = 1;
        }
    }
    if (std::abs(f_b) > 1e-10) {
        std::ostringstream msg;
        msg << "root polish stalled: |Xi(b) - p pi/q| = " << std::abs(f_b);
        throw NumericalError(msg.str());
    }
    auto family = GeodesicFamily::from_b(b);
    family.p = p;
    family.q = q;
    return family;
}

// ---------------------------------------------------------------------------

Trajectory::Trajectory(GeodesicFamily family, std::vector<double> phi,
                       std::vector<double> phidot, std::vector<double> theta)
    : family_(family), phi_(std::move(phi)), phidot_(std::move(phidot)),
      theta_(std::move(theta))
{
}

double Trajectory::thetadot(double phi) const
{
    const double c2 = std::cos(phi) * std::cos(phi);
    return family_.c / (four_pi_sq * c2 * c2);
}

double Trajectory::phi_acceleration(double phi, double phidot) const
{
    const double td = thetadot(phi);
    return std::tan(phi) * phidot * phidot - 2.0 * std::sin(phi) * std::cos(phi) * td * td;
}

double Trajectory::max_speed_defect() const
{
    double worst = 0.0;
    for (std::size_t k = 0; k < phi_.size(); ++k) {
        const auto [E, G] = metric_coefficients(phi_[k]);
        const double td = thetadot(phi_[k]);
        worst = std::max(worst, std::abs(E * phidot_[k] * phidot_[k] + G * td * td - 1.0));
    }
    return worst;
}

GeodesicState Trajectory::interpolate(double s) const
{
    const int n = intervals();
    const double h = step();
    const double x = std::clamp(s / h, 0.0, static_cast<double>(n));
    const int k = std::min(static_cast<int>(x), n - 1);
    const double tau = x - k;
    if (tau == 0.0)
        return node(k);

    const double tau2 = tau * tau;
    const double tau3 = tau2 * tau;
    const double h00 = 2 * tau3 - 3 * tau2 + 1;
    const double h10 = tau3 - 2 * tau2 + tau;
    const double h01 = -2 * tau3 + 3 * tau2;
    const double h11 = tau3 - tau2;
    auto hermite = [&](double f0, double d0, double f1, double d1) {
        return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
    };

    const double acc0 = phi_acceleration(phi_[k], phidot_[k]);
    const double acc1 = phi_acceleration(phi_[k + 1], phidot_[k + 1]);
    return {hermite(phi_[k], phidot_[k], phi_[k + 1], phidot_[k + 1]),
            hermite(phidot_[k], acc0, phidot_[k + 1], acc1),
            hermite(theta_[k], thetadot(phi_[k]), theta_[k + 1], thetadot(phi_[k + 1]))};
}

Trajectory sample_trajectory(const GeodesicFamily& family, int n)
{
    if (n < 64)
        throw ValidationError("trajectory needs at least 64 intervals");
    if (!(family.b > -pi / 2 && family.b <= 0.0))
        throw DomainError("b must lie in (-pi/2, 0]");

    std::vector<double> phi(n + 1), phidot(n + 1), theta(n + 1);
    Trajectory shell(family, {}, {}, {});

    // RK4 with enough substeps that the total step count is >= 32768.
    const int substeps = std::max(1, (32768 + n - 1) / n);
    const double h = family.T / (static_cast<double>(n) * substeps);
    auto rhs = [&shell](const OdeState& y) {
        return OdeState{y.phidot, shell.phi_acceleration(y.phi, y.phidot), shell.thetadot(y.phi)};
    };
    auto axpy = [](const OdeState& y, double a, const OdeState& k) {
        return OdeState{y.phi + a * k.phi, y.phidot + a * k.phidot, y.theta + a * k.theta};
    };

    OdeState y{family.b, 0.0, 0.0};
    phi[0] = y.phi;
    phidot[0] = y.phidot;
    theta[0] = y.theta;
    for (int k = 0; k < n; ++k) {
        for (int s = 0; s < substeps; ++s) {
            const auto k1 = rhs(y);
            const auto k2 = rhs(axpy(y, 0.5 * h, k1));
            const auto k3 = rhs(axpy(y, 0.5 * h, k2));
            const auto k4 = rhs(axpy(y, h, k3));
            y.phi += h / 6.0 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
            y.phidot += h / 6.0 * (k1.phidot + 2 * k2.phidot + 2 * k3.phidot + k4.phidot);
            y.theta += h / 6.0 * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta);
        }
        phi[k + 1] = y.phi;
        phidot[k + 1] = y.phidot;
        theta[k + 1] = y.theta;
    }

    Trajectory traj(family, std::move(phi), std::move(phidot), std::move(theta));
    const double defect = traj.max_speed_defect();
    if (defect > speed_tolerance) {
        std::ostringstream msg;
        msg << "unit-speed constraint drifted by " << defect;
        throw NumericalError(msg.str());
    }
    return traj;
}

SplitState evaluate_split(const Trajectory& traj, double t)
{
    const auto& fam = traj.family();
    if (t < 0.0 || (fam.closed() && t >= fam.full_length())) {
        std::ostringstream msg;
        msg << "t = " << t << " outside [0, t0)";
        throw DomainError(msg.str());
    }
    const double T = fam.T;
    auto j = static_cast<long>(std::floor(t / T));
    double s = t - j * T;
    if (s >= T) { // rounding at an exact multiple of T
        ++j;
        s = 0.0;
    }
    // Times on a grid commensurate with the nodes carry rounding of order
    // ulp(t); snap those to the node so finite differences see exact spacing.
    const double x = s / traj.step();
    const double r = std::round(x);
    const double snap = 16.0 * std::numeric_limits<double>::epsilon() * (t / traj.step() + 1.0);
    auto st = std::abs(x - r) <= snap ? traj.node(static_cast<int>(r)) : traj.interpolate(s);
    // The turning point is phi(T) = -b with phidot(T) = 0 exactly. Spreading
    // the roundoff-level endpoint error linearly removes the jumps the
    // reflection would otherwise leave at every junction.
    const auto end = traj.node(traj.intervals());
    if (std::abs(end.phi + fam.b) < 1e-9 && std::abs(end.phidot) < 1e-9) {
        st.phi -= (end.phi + fam.b) * (s / T);
        st.phidot -= end.phidot * (s / T);
    }
    if (j % 2 != 0) {
        st.phi = -st.phi;
        st.phidot = -st.phidot;
    }
    // For a closed family the exact closing rotation p pi / q is used, with
    // the small integration drift in theta(T) spread linearly over the
    // half-period; this keeps theta continuous at t0 as well as at each T.
    const double sampled = traj.theta().back();
    double rotation = sampled;
    if (fam.closed() && fam.p > 0) {
        const double exact = fam.p * pi / fam.q;
        if (std::abs(exact - sampled) < 1e-9) {
            st.theta += (exact - sampled) * (s / T);
            rotation = exact;
        }
    }
    return {st, j, rotation};
}

GeodesicState evaluate_extended(const Trajectory& traj, double t)
{
    auto s = evaluate_split(traj, t);
    s.local.theta += s.half_periods * s.rotation;
    return s.local;
}

} // namespace otsuki
