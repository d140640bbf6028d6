#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "otsuki/errors.hpp"
#include "otsuki/geodesic.hpp"

using namespace otsuki;

namespace {

constexpr double pi = std::numbers::pi;

// Gauss-Chebyshev quadrature of the first kind on [b, -b]: the inverse
// square root at both ends is the Chebyshev weight itself, so the remaining
// factor is smooth. Independent of the library's substitution.
double chebyshev_integral(double b, int nodes, bool rotation)
{
    const double beta = -b;
    const double cb2 = std::cos(b) * std::cos(b);
    auto sinc = [](double x) { return std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x; };
    double sum = 0.0;
    for (int k = 1; k <= nodes; ++k) {
        const double x = std::cos((2.0 * k - 1.0) * pi / (2.0 * nodes));
        const double phi = beta * x;
        const double c = std::cos(phi);
        // (beta^2 - phi^2) / (cos^4 phi - cos^4 b), written without cancellation.
        const double ratio = 1.0 / std::sqrt(sinc(b + phi) * sinc(b - phi) * (c * c + cb2));
        const double f = rotation ? cb2 / c * ratio : 2.0 * pi * c * c * c * ratio;
        sum += f;
    }
    return sum * pi / nodes;
}

double oracle_T(double b) { return chebyshev_integral(b, 400, false); }
double oracle_Xi(double b) { return chebyshev_integral(b, 400, true); }

} // namespace

TEST_CASE("metric coefficients")
{
    auto [E0, G0] = metric_coefficients(0.0);
    CHECK(E0 == doctest::Approx(4 * pi * pi).epsilon(1e-15));
    CHECK(G0 == doctest::Approx(4 * pi * pi).epsilon(1e-15));
    auto [E, G] = metric_coefficients(pi / 3);
    CHECK(E == doctest::Approx(pi * pi).epsilon(1e-14));
    CHECK(G == doctest::Approx(pi * pi / 4).epsilon(1e-14));
    CHECK_THROWS_AS(metric_coefficients(pi / 2), DomainError);
    CHECK_THROWS_AS(metric_coefficients(-pi / 2), DomainError);
}

TEST_CASE("half period and rotation angle against the Chebyshev oracle")
{
    // The oracle converges spectrally; 200 vs 400 nodes shows its own error.
    CHECK(std::abs(chebyshev_integral(-0.3, 200, false) - oracle_T(-0.3)) < 1e-12);
    CHECK(std::abs(half_period(-0.3) - oracle_T(-0.3)) < 1e-11);
    CHECK(std::abs(rotation_angle(-0.3) - oracle_Xi(-0.3)) < 1e-11);
    // Regression values from the oracle, refined until successive estimates agree to 1e-12.
    CHECK(std::abs(half_period(-0.3) - 13.805846723339346) < 1e-11);
    CHECK(std::abs(rotation_angle(-0.3) - 2.1961487733804987) < 1e-11);
    for (double b : {-1.4, -1.0, -0.6, -0.05}) {
        CHECK(std::abs(half_period(b) - oracle_T(b)) < 1e-10);
        CHECK(std::abs(rotation_angle(b) - oracle_Xi(b)) < 1e-10);
    }
}

TEST_CASE("Clifford and polar limits")
{
    CHECK(std::abs(half_period(-1e-4) - std::sqrt(2.0) * pi * pi) < 1e-2);
    CHECK(std::abs(rotation_angle(-1e-4) - std::sqrt(2.0) / 2 * pi) < 1e-3);
    CHECK(std::abs(rotation_angle(-pi / 2 + 1e-4) - pi / 2) < 1e-2);
    CHECK_THROWS_AS(half_period(0.0), DomainError);
    CHECK_THROWS_AS(half_period(-pi / 2), DomainError);
    CHECK_THROWS_AS(rotation_angle(0.1), DomainError);
}

TEST_CASE("rotation angle is increasing and half period bounded on a ladder")
{
    double prev = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double b = -pi / 2 + (i + 0.5) * (pi / 2) / 100.0;
        const auto fam = GeodesicFamily::from_b(b);
        CHECK(fam.Xi > pi / 2);
        CHECK(fam.Xi < std::sqrt(2.0) / 2 * pi);
        CHECK(fam.T > 0.0);
        CHECK(fam.T < std::sqrt(2.0) * pi * pi);
        CHECK(fam.c == doctest::Approx(2 * pi * std::cos(b) * std::cos(b)));
        if (i > 0)
            CHECK(fam.Xi > prev);
        prev = fam.Xi;
    }
}

TEST_CASE("solve_parameter")
{
    const auto fam = solve_parameter(2, 3);
    CHECK(std::abs(fam.Xi - 2 * pi / 3) < 1e-10);
    CHECK(fam.p == 2);
    CHECK(fam.q == 3);
    CHECK(fam.full_length() == doctest::Approx(6 * fam.T));

    // Independent bisection on the Chebyshev oracle.
    double lo = -1.5, hi = -1e-3;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (oracle_Xi(mid) < 2 * pi / 3 ? lo : hi) = mid;
    }
    CHECK(std::abs(fam.b - 0.5 * (lo + hi)) < 1e-9);
    CHECK(std::abs(fam.b - (-0.6585659592774428)) < 1e-9);

    CHECK(std::abs(solve_parameter(5, 8).b - (-0.9209457869660466)) < 1e-9);
    CHECK(std::abs(solve_parameter(7, 10).b - (-0.2820543394652587)) < 1e-9);

    CHECK_THROWS_AS(solve_parameter(1, 2), ValidationError);
    CHECK_THROWS_AS(solve_parameter(3, 4), ValidationError);
    CHECK_THROWS_AS(solve_parameter(4, 6), ValidationError);
    CHECK_THROWS_AS(solve_parameter(-2, 3), ValidationError);
    try {
        solve_parameter(1, 2);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("p/q must lie in (1/2, √2/2)") != std::string::npos);
    }
}

TEST_CASE("sampled trajectory invariants")
{
    const auto fam = solve_parameter(2, 3);
    const auto traj = sample_trajectory(fam, 1024);
    CHECK(traj.max_speed_defect() < 1e-10);
    const auto end = traj.node(traj.intervals());
    CHECK(std::abs(end.phi + fam.b) < 1e-8);
    CHECK(std::abs(end.phidot) < 1e-8);
    CHECK(std::abs(end.theta - fam.Xi) < 1e-8);
    CHECK(traj.node(0).phi == fam.b);
    for (double v : traj.phi()) {
        CHECK(v >= fam.b - 1e-12);
        CHECK(v <= -fam.b + 1e-12);
    }
    CHECK_THROWS_AS(sample_trajectory(fam, 32), ValidationError);
}

TEST_CASE("extension by symmetry")
{
    for (auto [p, q] : {std::pair{2, 3}, std::pair{5, 8}}) {
        const auto fam = solve_parameter(p, q);
        const auto traj = sample_trajectory(fam, 2048);
        const double T = fam.T;
        const double t0 = fam.full_length();

        for (double s : {0.1, 1.7, 5.3, T - 0.2}) {
            const auto a = evaluate_extended(traj, s);
            const auto b = evaluate_extended(traj, s + T);
            CHECK(std::abs(a.phi + b.phi) < 1e-12);
            CHECK(std::abs(b.theta - a.theta - traj.theta().back()) < 1e-12);
        }
        // Interpolation agrees with an independent fine trajectory.
        const auto fine = sample_trajectory(fam, 8192);
        for (double s : {0.123, 3.21, 7.77}) {
            CHECK(std::abs(traj.interpolate(s).phi - fine.interpolate(s).phi) < 1e-8);
            CHECK(std::abs(traj.interpolate(s).phidot - fine.interpolate(s).phidot) < 1e-8);
        }

        // Sign changes of phi and phidot over [0, t0).
        const int samples = 4 * q * 97;
        int phi_changes = 0, phidot_changes = 0;
        double prev_phi = 0, prev_dot = 0;
        for (int k = 0; k <= samples; ++k) {
            const double t = (k + 0.5) * t0 / samples;
            const auto st = evaluate_extended(traj, std::fmod(t, t0));
            if (k > 0) {
                phi_changes += (st.phi > 0) != (prev_phi > 0);
                phidot_changes += (st.phidot > 0) != (prev_dot > 0);
            }
            prev_phi = st.phi;
            prev_dot = st.phidot;
        }
        CHECK(phi_changes == 2 * q);
        CHECK(phidot_changes == 2 * q);

        // Zeros of phi at (2d+1)T/2.
        for (int d = 0; d < 2 * q; ++d)
            CHECK(std::abs(evaluate_extended(traj, (2 * d + 1) * T / 2).phi) < 1e-9);

        const auto last = evaluate_extended(traj, t0 * (1 - 1e-12));
        CHECK(std::abs(last.theta - 2 * p * pi) < 1e-7);
        CHECK_THROWS_AS(evaluate_extended(traj, t0), DomainError);
        CHECK_THROWS_AS(evaluate_extended(traj, -1e-3), DomainError);
    }
}

TEST_CASE("extension is continuous across junctions and the closing point")
{
    for (auto [p, q] : {std::pair{5, 8}, std::pair{7, 10}}) {
        const auto fam = solve_parameter(p, q);
        const auto traj = sample_trajectory(fam, 4096);
        const double T = fam.T;
        for (int j = 1; j < 2 * q; ++j) {
            const auto at = evaluate_extended(traj, j * T);
            const auto before = traj.node(traj.intervals());
            const double sign = j % 2 == 1 ? 1.0 : -1.0;
            CHECK(std::abs(at.phi - sign * -fam.b) < 1e-15);
            CHECK(std::abs(at.phidot) < 1e-20);
            CHECK(std::abs(at.theta - j * p * pi / q) < 1e-12);
            CHECK(std::abs(before.phidot) < 1e-12);
        }
        const auto split = evaluate_split(traj, (2 * q - 1) * T + T * 0.5);
        CHECK(split.half_periods == 2 * q - 1);
        CHECK(split.rotation == p * pi / q);
        const auto end = evaluate_split(traj, 2 * q * T * (1 - 1e-15));
        CHECK(std::abs(end.local.theta + end.half_periods * end.rotation - 2 * p * pi) < 1e-12);
    }
}
