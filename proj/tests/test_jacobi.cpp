#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otsuki/errors.hpp"
#include "otsuki/jacobi.hpp"

using namespace otsuki;

namespace {

struct Fam {
    int p, q;
};
const Fam families[] = {{2, 3}, {5, 8}, {7, 10}};

Trajectory traj_for(int p, int q, int n)
{
    return jacobi_trajectory(solve_parameter(p, q), n);
}

SpectrumSummary scalar_l0(const Trajectory& traj, Channels ch, BoundaryCondition bc, int half_periods,
                          bool functions = false)
{
    SpectrumOptions opt;
    opt.eigenfunctions = functions;
    return jacobi_spectrum(0, traj, half_periods, bc, ch, 0.5, opt);
}

} // namespace

TEST_CASE("l = 0 counts for the closed families, stable under refinement")
{
    for (const auto& f : families) {
        CAPTURE(f.p);
        CAPTURE(f.q);
        for (int n : {1024, 2048}) {
            CAPTURE(n);
            const auto traj = traj_for(f.p, f.q, n);
            const auto full = jacobi_spectrum(0, traj, 2 * f.q, BoundaryCondition::periodic(),
                                              Channels::Both, 0.1);
            CHECK(full.mesh_stable());
            CHECK(full.neg == 2 * f.q + 4 * f.p - 1);
            CHECK(full.zero == 3);
            if (f.q % 2 == 0) {
                const auto plus = jacobi_spectrum(0, traj, f.q, BoundaryCondition::periodic(),
                                                  Channels::Both, 0.1);
                CHECK(plus.mesh_stable());
                CHECK(plus.neg == f.q + 2 * f.p - 1);
                CHECK(plus.zero == 3);
            }
        }
    }
}

TEST_CASE("channel 1 zero modes sit at positions 4p-1 and 4p with 4p zeros")
{
    const int p = 2, q = 3;
    const auto traj = traj_for(p, q, 1024);
    const auto s = scalar_l0(traj, Channels::First, BoundaryCondition::periodic(), 2 * q, true);
    REQUIRE(s.eigenvalues.size() > static_cast<std::size_t>(4 * p));
    CHECK(s.neg == 4 * p - 1);
    CHECK(s.zero == 2);
    CHECK(std::abs(s.eigenvalues[4 * p - 1]) <= s.tau_zero);
    CHECK(std::abs(s.eigenvalues[4 * p]) <= s.tau_zero);
    CHECK(s.eigenvalues[4 * p - 2] < -s.tau_zero);

    const auto labels = oscillation_index(s);
    CHECK(labels[4 * p - 1].zeros == 4 * p);
    CHECK(labels[4 * p].zeros == 4 * p);
    CHECK(labels[4 * p - 1].sturm_index == 4 * p - 1);
    CHECK(labels[4 * p].sturm_index == 4 * p);
}

TEST_CASE("channel 2 zero mode sits at position 2q after the antiperiodic negative one")
{
    for (const auto& f : {Fam{2, 3}, Fam{5, 8}}) {
        CAPTURE(f.q);
        const auto traj = traj_for(f.p, f.q, 1024);
        const auto s = scalar_l0(traj, Channels::Second, BoundaryCondition::periodic(), 2 * f.q, true);
        REQUIRE(s.eigenvalues.size() > static_cast<std::size_t>(2 * f.q));
        CHECK(s.neg == 2 * f.q);
        CHECK(s.zero == 1);
        CHECK(std::abs(s.eigenvalues[2 * f.q]) <= s.tau_zero);
        const auto labels = oscillation_index(s);
        CHECK(labels[2 * f.q].zeros == 2 * f.q);

        const auto check = antiperiodic_check_l0(traj);
        CHECK(check.first_negative);
        CHECK(check.second_zero);
        CHECK(check.correlation > 0.999);
        CHECK(std::abs(s.eigenvalues[2 * f.q - 1] - check.lambda1) < 1e-6);
    }
    CHECK_THROWS_AS(antiperiodic_check_l0(jacobi_trajectory(GeodesicFamily::clifford(), 256)),
                    DomainError);
}

TEST_CASE("periodic and antiperiodic channel spectra interlace with matching zero counts")
{
    const int p = 2, q = 3;
    const auto traj = traj_for(p, q, 1024);
    for (auto ch : {Channels::First, Channels::Second}) {
        const auto per = scalar_l0(traj, ch, BoundaryCondition::periodic(), 2 * q, true);
        const auto anti = scalar_l0(traj, ch, BoundaryCondition::antiperiodic(), 2 * q, true);
        CHECK(interlacing_holds(per.eigenvalues, anti.eigenvalues, 1e-6));
        CHECK_NOTHROW(oscillation_index(per));
        CHECK_NOTHROW(oscillation_index(anti));
    }
}

TEST_CASE("spectral index matches the closed formulas")
{
    for (const auto& f : families) {
        CAPTURE(f.q);
        const auto traj = traj_for(f.p, f.q, 1024);
        const int expected = f.q % 2 == 1 ? 2 * f.q + 4 * f.p - 2 : f.q + 2 * f.p - 2;
        CHECK(spectral_index(traj) == expected);
    }
}

TEST_CASE("high Fourier blocks are positive")
{
    const auto traj = traj_for(2, 3, 256);
    CHECK(verify_high_l_positive(3, traj));
    CHECK(verify_high_l_positive(10, traj));
    CHECK_THROWS_AS(verify_high_l_positive(1, traj), ValidationError);
}

TEST_CASE("trajectory mesh requirements")
{
    CHECK_THROWS_AS(jacobi_trajectory(solve_parameter(2, 3), 64), ValidationError);
    const auto traj = jacobi_trajectory(solve_parameter(2, 3), 256);
    CHECK(mesh_per_half_period(traj) == 256);
    CHECK(traj.intervals() == 1024);
}
