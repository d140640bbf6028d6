#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "otsuki/errors.hpp"
#include "otsuki/geodesic.hpp"
#include "otsuki/spectral.hpp"
#include "otsuki/surface.hpp"

using namespace otsuki;

namespace {

constexpr double pi = std::numbers::pi;

SLSystem sampled(int dim, double length, int intervals, const std::function<double(double)>& p,
                 const std::function<double(double)>& q11, const std::function<double(double)>& q12,
                 const std::function<double(double)>& q22, BoundaryCondition bc)
{
    SLSystem s;
    s.dim = dim;
    s.length = length;
    s.bc = bc;
    for (int k = 0; k <= intervals; ++k) {
        const double t = length * k / intervals;
        s.weight.push_back(p(t));
        s.q11.push_back(q11(t));
        s.q12.push_back(q12(t));
        s.q22.push_back(q22(t));
    }
    return s;
}

SLSystem free_scalar(BoundaryCondition bc, int intervals = 1024, double shift = 0.0)
{
    auto one = [](double) { return 1.0; };
    auto c = [shift](double) { return shift; };
    auto zero = [](double) { return 0.0; };
    return sampled(1, 2 * pi, intervals, one, c, zero, c, bc);
}

SLSystem mathieu(BoundaryCondition bc, int intervals = 2048)
{
    auto p = [](double t) { return 1.0 + 0.3 * std::sin(t); };
    auto q = [](double t) { return 2.0 * std::cos(t); };
    auto zero = [](double) { return 0.0; };
    return sampled(1, 2 * pi, intervals, p, q, zero, q, bc);
}

SLSystem coupled(BoundaryCondition bc, int intervals = 512)
{
    auto p = [](double t) { return 1.0 + 0.5 * std::cos(t) * std::cos(t); };
    auto q11 = [](double t) { return -3.0 + std::sin(2 * t); };
    auto q12 = [](double t) { return 0.8 * std::sin(t); };
    auto q22 = [](double t) { return 1.0 + std::cos(t); };
    return sampled(2, pi, intervals, p, q11, q12, q22, bc);
}

} // namespace

TEST_CASE("Fourier spectra of the free operator")
{
    const auto per = spectrum_below(free_scalar(BoundaryCondition::periodic()), 10.0, 256);
    const std::vector<double> expect{0, 1, 1, 4, 4, 9, 9};
    REQUIRE(per.eigenvalues.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(std::abs(per.eigenvalues[i] - expect[i]) < 1e-6);
        // Raw values carry the O(n^-2) error.
        CHECK(std::abs(per.coarse[i] - expect[i]) < 2e-3 * (1 + expect[i] * expect[i]));
    }
    CHECK(per.neg == 0);
    CHECK(per.zero == 1);

    const auto anti = spectrum_below(free_scalar(BoundaryCondition::antiperiodic()), 7.0, 256);
    const std::vector<double> expect_a{0.25, 0.25, 2.25, 2.25, 6.25, 6.25};
    REQUIRE(anti.eigenvalues.size() == expect_a.size());
    for (std::size_t i = 0; i < expect_a.size(); ++i)
        CHECK(std::abs(anti.eigenvalues[i] - expect_a[i]) < 1e-6);

    const auto dir = spectrum_below(free_scalar(BoundaryCondition::dirichlet()), 3.0, 256);
    const std::vector<double> expect_d{0.25, 1.0, 2.25};
    REQUIRE(dir.eigenvalues.size() == expect_d.size());
    for (std::size_t i = 0; i < expect_d.size(); ++i)
        CHECK(std::abs(dir.eigenvalues[i] - expect_d[i]) < 1e-6);

    // Scalar twist omega = i: modes e^{i(k + 1/4)t}.
    const auto tw = spectrum_below(free_scalar(BoundaryCondition::twisted({0.0, 1.0})), 3.0, 256);
    CHECK(std::abs(tw.eigenvalues[0] - 1.0 / 16) < 1e-6);
    CHECK(std::abs(tw.eigenvalues[1] - 9.0 / 16) < 1e-6);
    CHECK(std::abs(tw.eigenvalues[2] - 25.0 / 16) < 1e-6);
}

TEST_CASE("Clifford channel 2 at l = 0: 2k^2/q^2 - 2")
{
    for (int q : {3, 8}) {
        const auto fam = GeodesicFamily::clifford(1, q);
        const auto traj = sample_trajectory(fam, 512);
        const auto c = separated_coefficients(0, traj);
        const auto sys = jacobi_system(c, 2 * q, BoundaryCondition::periodic(), Channels::Second);
        const auto s = spectrum_below(sys, 0.5, q * 256);
        std::vector<double> expect;
        for (int k = 0; 2.0 * k * k / (q * q) - 2 < 0.5; ++k) {
            expect.push_back(2.0 * k * k / (q * q) - 2);
            if (k > 0)
                expect.push_back(2.0 * k * k / (q * q) - 2);
        }
        std::sort(expect.begin(), expect.end());
        REQUIRE(s.eigenvalues.size() == expect.size());
        for (std::size_t i = 0; i < expect.size(); ++i)
            CHECK(std::abs(s.eigenvalues[i] - expect[i]) < 1e-6);
    }
}

TEST_CASE("discrete operator is Hermitian and matches the dense solver")
{
    for (auto bc : {BoundaryCondition::periodic(), BoundaryCondition::antiperiodic(),
                    BoundaryCondition::dirichlet(), BoundaryCondition::twisted(std::polar(1.0, 0.7))}) {
        CAPTURE(to_string(bc.kind));
        const auto op = discretize(coupled(bc), 128);
        const auto a = op.to_dense();
        const int n = op.size();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(a[i * n + j] == std::conj(a[j * n + i]));

        const auto dense = hermitian_eigenvalues(a, n);
        const auto bis = eigenvalues_below(op, 40.0);
        REQUIRE(bis.size() <= dense.size());
        for (std::size_t i = 0; i < bis.size(); ++i)
            CHECK(std::abs(bis[i] - dense[i]) < 1e-8);
        CHECK(dense[bis.size()] >= 40.0 - 1e-8);
        for (double sigma : {-2.5, 0.0, 3.3, 17.0})
            CHECK(count_below(op, sigma) ==
                  std::count_if(dense.begin(), dense.end(), [&](double x) { return x < sigma; }));
        // Rayleigh bound.
        CHECK(dense.front() >= op.lower_bound() - 1e-10);
    }
}

TEST_CASE("dense method agrees with the inertia method")
{
    const auto sys = coupled(BoundaryCondition::twisted(std::polar(1.0, 2.0)), 1024);
    SpectrumOptions dense;
    dense.method = SolverMethod::DenseQL;
    const auto a = spectrum_below(sys, 20.0, 128);
    const auto b = spectrum_below(sys, 20.0, 128, dense);
    REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
    for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
        CHECK(std::abs(a.eigenvalues[i] - b.eigenvalues[i]) < 1e-7);
}

TEST_CASE("tridiagonal QL")
{
    // Free Dirichlet Laplacian: 2 - 2 cos(k pi / (n + 1)).
    const int n = 50;
    auto ev = tridiagonal_eigenvalues(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
    for (int k = 1; k <= n; ++k)
        CHECK(std::abs(ev[k - 1] - (2 - 2 * std::cos(k * pi / (n + 1)))) < 1e-13);
}

TEST_CASE("eigenvectors satisfy the discrete equation")
{
    const auto op = discretize(coupled(BoundaryCondition::twisted(std::polar(1.0, 1.1))), 256);
    const auto ev = eigenvalues_below(op, 5.0);
    const auto vecs = eigenvectors(op, ev);
    const auto a = op.to_dense();
    const int n = op.size();
    for (std::size_t j = 0; j < ev.size(); ++j) {
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx s{};
            for (int k = 0; k < n; ++k)
                s += a[i * n + k] * vecs[j][k];
            res = std::max(res, std::abs(s - ev[j] * vecs[j][i]));
        }
        CHECK(res < 1e-6 * op.norm());
    }
}

TEST_CASE("periodic spectrum over t0 is the union of twisted spectra")
{
    const auto fam = solve_parameter(2, 3);
    const auto traj = sample_trajectory(fam, 1024);
    const int q = 3;
    for (int l : {1, 2}) {
        const auto c = separated_coefficients(l, traj);
        const auto whole = discretize(jacobi_system(c, 2 * q, BoundaryCondition::periodic()), 2 * q * 256);
        auto all = eigenvalues_below(whole, 3.0);
        std::vector<double> parts;
        for (int r = 0; r < 2 * q; ++r) {
            const auto op = discretize(jacobi_system(c, 1, BoundaryCondition::root_of_unity(r, q)), 256);
            const auto ev = eigenvalues_below(op, 3.0);
            parts.insert(parts.end(), ev.begin(), ev.end());
        }
        std::sort(parts.begin(), parts.end());
        REQUIRE(all.size() == parts.size());
        for (std::size_t i = 0; i < all.size(); ++i)
            CHECK(std::abs(all[i] - parts[i]) < 1e-6);
    }
}

TEST_CASE("mesh errors")
{
    CHECK_THROWS_AS(discretize(free_scalar(BoundaryCondition::periodic()), 64), ValidationError);
    CHECK_THROWS_AS(discretize(free_scalar(BoundaryCondition::periodic(), 1000), 128), ValidationError);
    auto bad = free_scalar(BoundaryCondition::periodic());
    bad.weight[7] = -1.0;
    CHECK_THROWS_AS(discretize(bad, 128), ValidationError);
    CHECK_THROWS_AS(BoundaryCondition::twisted({2.0, 0.0}), ValidationError);
}

TEST_CASE("ambiguous classification is reported")
{
    // Mode k = 1 of -h'' + (delta - 1) h sits at delta after extrapolation;
    // raw values straddle the zero band.
    SpectrumOptions opt;
    opt.tau_zero = 1e-4;
    const auto sys = free_scalar(BoundaryCondition::periodic(), 1024, -1.0 + 2e-4);
    CHECK_THROWS_AS(spectrum_below(sys, 0.5, 128, opt), AmbiguityError);
}

TEST_CASE("zero counting")
{
    const int n = 1000;
    std::vector<double> c(n, 1.0), s3(n), cos_half(n);
    for (int k = 0; k < n; ++k) {
        s3[k] = std::sin(3 * 2 * pi * k / n);
        cos_half[k] = std::cos(0.5 * 2 * pi * k / n + 0.1);
    }
    CHECK(zero_count(c) == 0);
    CHECK(zero_count(s3) == 6);
    CHECK(zero_count(cos_half, -1) == 1);
    CHECK_THROWS_AS(zero_count(std::vector<double>(10, 0.0)), NumericalError);
}

TEST_CASE("oscillation labels and interlacing for a Hill equation")
{
    SpectrumOptions opt;
    opt.eigenfunctions = true;
    const auto per = spectrum_below(mathieu(BoundaryCondition::periodic()), 30.0, 512, opt);
    const auto anti = spectrum_below(mathieu(BoundaryCondition::antiperiodic()), 30.0, 512, opt);
    const auto lp = oscillation_index(per);
    const auto la = oscillation_index(anti);
    for (std::size_t i = 0; i < lp.size(); ++i)
        CHECK(lp[i].sturm_index == static_cast<int>(i));
    for (std::size_t i = 0; i < la.size(); ++i)
        CHECK(la[i].sturm_index == static_cast<int>(i) + 1);
    CHECK(lp[0].zeros == 0);
    CHECK(la[0].zeros == 1);
    CHECK(interlacing_holds(per.eigenvalues, anti.eigenvalues, 1e-9));
    CHECK_FALSE(interlacing_holds(anti.eigenvalues, per.eigenvalues, 1e-9));
}
