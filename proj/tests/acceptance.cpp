// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "otsuki/edwards.hpp"
#include "otsuki/errors.hpp"
#include "otsuki/geodesic.hpp"
#include "otsuki/jacobi.hpp"
#include "otsuki/pipeline.hpp"
#include "otsuki/surface.hpp"

using namespace otsuki;

namespace {

constexpr double pi = std::numbers::pi;
constexpr int mesh = 4096;

struct Fam {
    int p, q;
};
const Fam families[] = {{2, 3}, {5, 8}, {7, 10}};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

int failures = 0;

void criterion(int id, const std::string& title, double time_limit,
               const std::function<void(Outcome&)>& body)
{
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_limit > 0 && secs >= time_limit) {
        o.pass = false;
        o.detail << "[over the " << time_limit << " s budget] ";
    }
    if (!o.pass)
        ++failures;
    std::printf("%s  %2d  %-28s %8.2f s  %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
}

const Trajectory& traj_for(int p, int q)
{
    static std::vector<std::pair<std::pair<int, int>, Trajectory>> cache;
    for (const auto& [k, t] : cache)
        if (k == std::pair{p, q})
            return t;
    cache.emplace_back(std::pair{p, q}, jacobi_trajectory(solve_parameter(p, q), mesh));
    return cache.back().second;
}

std::string counts(const SpectrumSummary& s)
{
    return std::to_string(s.neg) + "/" + std::to_string(s.zero);
}

} // namespace

int main()
{
    std::printf("acceptance run, mesh n = %d per half-period (confirmation at 2n)\n", mesh);

    criterion(1, "Clifford limits", 1.0, [](Outcome& o) {
        const double xi = rotation_angle(-1e-4);
        const double T = half_period(-1e-4);
        const double xi0 = std::sqrt(2.0) / 2 * pi;
        const double T0 = std::sqrt(2.0) * pi * pi;
        o.require(std::abs(xi - xi0) < 1e-3, "rotation angle");
        o.require(std::abs(T - T0) < 1e-2, "half period");
        o.detail << "Xi = " << xi << " (|d| " << std::abs(xi - xi0) << "), T = " << T << " (|d| "
                 << std::abs(T - T0) << ")";
    });

    criterion(2, "Closed-form Gram data", 5.0, [](Outcome& o) {
        const auto traj = jacobi_trajectory(GeodesicFamily::clifford(), mesh);
        const auto g1 = gram_matrix(1, traj);
        const auto g2 = gram_matrix(2, traj);
        const double s6 = std::sqrt(6.0) * pi / 2, s2 = std::sqrt(2.0) * pi / 2;
        double worst = 0;
        for (int k = 0; k < 16; ++k) {
            const cplx w = std::polar(1.0, k * pi / 8);
            const double s = w.real();
            const auto A1 = twisted_form(g1.a, w);
            const auto A2 = twisted_form(g2.a, w);
            const double e1[2] = {4 * std::sqrt(3.0) * pi / std::sin(s6) * (std::cos(s6) - s),
                                  4 * pi / std::sin(s2) * (std::cos(s2) + s)};
            const double e2[2] = {4 * std::sqrt(2.0) * (1 - s),
                                  4 * std::sqrt(2.0) * pi / std::sinh(pi) * (std::cosh(pi) + s)};
            for (int i = 0; i < 2; ++i) {
                worst = std::max(worst, std::abs(A1[i][i] - e1[i]));
                worst = std::max(worst, std::abs(A2[i][i] - e2[i]));
            }
            worst = std::max({worst, std::abs(A1[0][1]), std::abs(A2[0][1])});
        }
        o.require(worst < 1e-6, "entrywise 1e-6");
        o.detail << "max entry error " << worst << " over 16 roots";
    });

    criterion(3, "Dirichlet counts near b = 0", 0, [](Outcome& o) {
        for (double b : {0.0, -1e-3}) {
            for (int n : {mesh, 2 * mesh}) {
                const auto fam = b == 0.0 ? GeodesicFamily::clifford() : GeodesicFamily::from_b(b);
                const auto traj = jacobi_trajectory(fam, n);
                const int m1 = dirichlet_negative_count(1, traj).neg;
                const int m2 = dirichlet_negative_count(2, traj).neg;
                o.require(m1 == 1 && m2 == 0, "b = " + std::to_string(b) + ", n = " + std::to_string(n));
                o.detail << "b=" << b << " n=" << n << ": " << m1 << "," << m2 << "  ";
            }
        }
    });

    for (const auto& f : families) {
        const std::string title = "l = 0 counts " + std::to_string(f.p) + "/" + std::to_string(f.q);
        criterion(4, title, 60.0, [&](Outcome& o) {
            const auto& traj = traj_for(f.p, f.q);
            const auto full = jacobi_spectrum(0, traj, 2 * f.q, BoundaryCondition::periodic(),
                                              Channels::Both, 0.1);
            o.require(full.neg == 2 * f.q + 4 * f.p - 1 && full.zero == 3, "full period counts");
            o.require(full.mesh_stable(), "mesh doubling");
            o.detail << "full " << counts(full) << " (want " << 2 * f.q + 4 * f.p - 1 << "/3)";
            if (f.q % 2 == 0) {
                const auto plus = jacobi_spectrum(0, traj, f.q, BoundaryCondition::periodic(),
                                                  Channels::Both, 0.1);
                o.require(plus.neg == f.q + 2 * f.p - 1 && plus.zero == 3, "half-period counts");
                o.require(plus.mesh_stable(), "mesh doubling (plus)");
                o.detail << ", plus " << counts(plus) << " (want " << f.q + 2 * f.p - 1 << "/3)";
            }
        });
    }

    criterion(5, "Root identities", 0, [](Outcome& o) {
        for (const auto& f : families) {
            const auto& traj = traj_for(f.p, f.q);
            const auto d1 = boundary_form(1, traj);
            const auto d2 = boundary_form(2, traj);
            const double e1 = d1.s2 ? std::abs(*d1.s2 + std::cos(f.p * pi / f.q)) : INFINITY;
            const double e2 = std::abs(d2.poly(1.0)) / d2.poly.norm();
            o.require(e1 < 1e-6, "s2 identity");
            o.require(e2 < 1e-8, "P2(1) = 0");
            o.detail << f.p << "/" << f.q << ": " << e1 << ", " << e2 << "  ";
        }
    });

    criterion(6, "Oracle equivalence 2/3", 0, [](Outcome& o) {
        const auto& traj = traj_for(2, 3);
        int checked = 0;
        for (int l : {1, 2}) {
            const auto d = boundary_form(l, traj);
            for (int r = 0; r < 6; ++r) {
                const auto c = twisted_counts(d, r, 3);
                const auto s = jacobi_spectrum(l, traj, 1, BoundaryCondition::root_of_unity(r, 3),
                                               Channels::Both, 0.1);
                ++checked;
                if (c.neg != s.neg || c.zero != s.zero) {
                    o.require(false, "l=" + std::to_string(l) + " r=" + std::to_string(r));
                    o.detail << "edwards " << c.neg << "/" << c.zero << " direct " << counts(s) << "  ";
                }
            }
        }
        o.detail << checked << " (l, r) pairs compared";
    });

    std::vector<IndexReport> reports;
    criterion(7, "Headline 2/3: ind 31, nul 9", 300.0, [&](Outcome& o) {
        IndexOptions opt;
        opt.n = mesh;
        opt.method = IndexMethod::Both;
        opt.parallel = false;
        const auto r = compute_index(2, 3, opt);
        reports.push_back(r);
        o.require(r.ind == 31 && r.nul == 9, "counts");
        o.require(r.ind == 6 * 3 + 8 * 2 - 3, "lower bound");
        o.detail << "ind " << r.ind << ", nul " << r.nul << ", lower bound " << 6 * 3 + 8 * 2 - 3;
    });

    criterion(8, "Killing residuals", 0, [](Outcome& o) {
        // n counts samples per half-period. Ratios are taken only while the
        // coarse residual sits above the roundoff floor (about 1e-9 here).
        constexpr double floor = 1e-8;
        for (const auto& f : families) {
            const auto& traj = traj_for(f.p, f.q);
            std::vector<std::vector<double>> res;
            for (int n = 64; n <= 2048; n *= 2) {
                std::vector<double> row;
                for (const auto& field : kernel_fields(traj, 2 * f.q * n))
                    row.push_back(kernel_residual(field, separated_coefficients_at(field.l, traj, field.t)).value);
                o.require(row.size() == 9, "nine fields");
                res.push_back(std::move(row));
            }
            double worst = 0, rmin = INFINITY, rmax = 0;
            int doublings = 0;
            for (double r : res.back())
                worst = std::max(worst, r);
            for (std::size_t m = 0; m + 1 < res.size(); ++m)
                for (std::size_t i = 0; i < 9; ++i) {
                    if (res[m][i] < floor)
                        continue;
                    const double ratio = res[m][i] / res[m + 1][i];
                    rmin = std::min(rmin, ratio);
                    rmax = std::max(rmax, ratio);
                    ++doublings;
                }
            o.require(worst < 1e-6, "residual below 1e-6 at n = 2048");
            o.require(doublings >= 9, "refinement study above the roundoff floor");
            o.require(rmin >= 8 && rmax <= 32, "refinement ratio in [8, 32]");
            o.detail << f.p << "/" << f.q << ": max " << worst << ", ratio [" << rmin << ", " << rmax
                     << "] over " << doublings << "  ";
        }
    });

    criterion(9, "Spectral index and rough bound", 0, [&](Outcome& o) {
        for (const auto& f : families) {
            const auto& traj = traj_for(f.p, f.q);
            const int got = spectral_index(traj);
            const int want = f.q % 2 == 1 ? 2 * f.q + 4 * f.p - 2 : f.q + 2 * f.p - 2;
            o.require(got == want, "ind_S " + std::to_string(f.p) + "/" + std::to_string(f.q));
            o.detail << f.p << "/" << f.q << ": ind_S " << got;
            if (!(f.p == 2 && f.q == 3 && !reports.empty())) {
                IndexOptions opt;
                opt.n = mesh;
                reports.push_back(compute_index(f.p, f.q, opt));
            }
            const auto& r = reports.back();
            o.require(r.ind <= 5 * got + 2, "rough bound");
            o.detail << ", ind " << r.ind << " <= " << 5 * got + 2 << "  ";
        }
    });

    criterion(10, "Oscillation suite 2/3", 0, [](Outcome& o) {
        const int p = 2, q = 3;
        const auto& traj = traj_for(p, q);
        SpectrumOptions opt;
        opt.eigenfunctions = true;
        auto solve = [&](Channels ch, BoundaryCondition bc) {
            return jacobi_spectrum(0, traj, 2 * q, bc, ch, 0.5, opt);
        };
        const auto per1 = solve(Channels::First, BoundaryCondition::periodic());
        const auto anti1 = solve(Channels::First, BoundaryCondition::antiperiodic());
        const auto per2 = solve(Channels::Second, BoundaryCondition::periodic());
        const auto anti2 = solve(Channels::Second, BoundaryCondition::antiperiodic());
        o.require(interlacing_holds(per1.eigenvalues, anti1.eigenvalues, 1e-6), "channel 1 interlacing");
        o.require(interlacing_holds(per2.eigenvalues, anti2.eigenvalues, 1e-6), "channel 2 interlacing");
        for (const auto* s : {&per1, &anti1, &per2, &anti2})
            oscillation_index(*s); // throws when zero counts break the pattern

        const auto l1 = oscillation_index(per1);
        std::vector<int> zero1;
        for (std::size_t i = 0; i < per1.eigenvalues.size(); ++i)
            if (std::abs(per1.eigenvalues[i]) <= per1.tau_zero)
                zero1.push_back(l1[i].sturm_index);
        o.require(zero1 == std::vector<int>{4 * p - 1, 4 * p}, "channel 1 zero-mode indices");

        const auto l2 = oscillation_index(per2);
        std::vector<int> zero2;
        for (std::size_t i = 0; i < per2.eigenvalues.size(); ++i)
            if (std::abs(per2.eigenvalues[i]) <= per2.tau_zero)
                zero2.push_back(l2[i].sturm_index);
        o.require(zero2 == std::vector<int>{2 * q}, "channel 2 zero-mode index");

        const auto ac = antiperiodic_check_l0(traj);
        o.require(ac.first_negative && ac.second_zero, "antiperiodic lambda1 < 0 = lambda2");
        o.detail << "channel 1 zero modes at {";
        for (int k : zero1)
            o.detail << k << (k == zero1.back() ? "" : ",");
        o.detail << "}, channel 2 at {" << (zero2.empty() ? -1 : zero2[0]) << "}, antiperiodic "
                 << ac.lambda1 << ", " << ac.lambda2;
    });

    std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
