#include "otsuki/edwards.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "otsuki/errors.hpp"
#include "otsuki/jacobi.hpp"
#include "otsuki/ode.hpp"
#include "otsuki/surface.hpp"

namespace otsuki {

namespace {

constexpr double max_condition = 1e10;
constexpr double symmetry_limit = 1e-6;
constexpr double form_tolerance = 1e-7;
constexpr double root_tolerance = 1e-7;
constexpr int sigma_perm[4] = {2, 3, 0, 1};

void require_l(int l)
{
    if (l != 1 && l != 2)
        throw ValidationError("boundary-form counting is implemented for l = 1, 2");
}

double max_abs(const Mat4& a)
{
    double m = 0.0;
    for (const auto& row : a)
        for (double v : row)
            m = std::max(m, std::abs(v));
    return m;
}

std::array<double, 2> hermitian_eigenvalues_2x2(const Mat2c& a)
{
    const double p = a[0][0].real();
    const double d = a[1][1].real();
    const double mean = 0.5 * (p + d);
    const double radius = std::hypot(0.5 * (p - d), std::abs(a[0][1]));
    return {mean - radius, mean + radius};
}

} // namespace

BoundarySolutions boundary_solutions(int l, const Trajectory& traj, int samples)
{
    require_l(l);
    if (samples < 2)
        throw ValidationError("need at least two samples");
    const double T = traj.family().T;

    // Columns j = 0..3 of the fundamental matrix, each (h1, h2, y1, y2), y = p h'.
    auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
        const auto c = coefficients_at(l, traj, std::min(t, T));
        for (int j = 0; j < 4; ++j) {
            const double* s = y.data() + 4 * j;
            double* d = dy.data() + 4 * j;
            d[0] = s[2] / c.weight;
            d[1] = s[3] / c.weight;
            d[2] = c.q11 * s[0] + c.q12 * s[1];
            d[3] = c.q12 * s[0] + c.q22 * s[1];
        }
    };
    std::vector<double> y0(16, 0.0);
    for (int j = 0; j < 4; ++j)
        y0[4 * j + j] = 1.0;
    std::vector<double> times(samples);
    for (int k = 0; k < samples; ++k)
        times[k] = T * k / (samples - 1);
    times.back() = T;
    std::vector<double> outputs(times.begin() + 1, times.end());
    auto states = integrate_dopri(rhs, 0.0, y0, outputs);
    states.insert(states.begin(), y0);

    // Phi(T) blocks: entry (row i, column j) is states[.][4j + i].
    const auto& end = states.back();
    auto phi = [&](int i, int j) { return end[4 * j + i]; };
    const double hy[2][2] = {{phi(0, 2), phi(0, 3)}, {phi(1, 2), phi(1, 3)}};
    const double det = hy[0][0] * hy[1][1] - hy[0][1] * hy[1][0];

    // Condition number of the 2x2 block from its singular values.
    const double fro2 = hy[0][0] * hy[0][0] + hy[0][1] * hy[0][1] + hy[1][0] * hy[1][0] + hy[1][1] * hy[1][1];
    const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
    const double smax = std::sqrt(0.5 * (fro2 + disc));
    const double smin = std::sqrt(std::max(0.0, 0.5 * (fro2 - disc)));
    BoundarySolutions out;
    out.l = l;
    out.T = T;
    out.condition = smin > 0.0 ? smax / smin : INFINITY;
    if (!(out.condition <= max_condition)) {
        std::ostringstream msg;
        msg << "boundary matching is ill-conditioned (condition " << out.condition
            << "); the Dirichlet problem is close to a zero eigenvalue";
        throw NumericalError(msg.str());
    }
    const double inv[2][2] = {{hy[1][1] / det, -hy[0][1] / det}, {-hy[1][0] / det, hy[0][0] / det}};

    // Initial flux W = Phi_hy^{-1} [-Phi_hh | I].
    double w[2][4];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) {
            double rhs_col[2];
            for (int r = 0; r < 2; ++r)
                rhs_col[r] = j < 2 ? -phi(r, j) : (r == j - 2 ? 1.0 : 0.0);
            w[i][j] = inv[i][0] * rhs_col[0] + inv[i][1] * rhs_col[1];
        }

    out.t = times;
    for (int j = 0; j < 4; ++j) {
        const double init[4] = {j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0, w[0][j], w[1][j]};
        out.h[j].resize(samples);
        out.flux[j].resize(samples);
        for (int k = 0; k < samples; ++k) {
            double v[4] = {0, 0, 0, 0};
            for (int i = 0; i < 4; ++i)
                for (int c = 0; c < 4; ++c)
                    v[i] += states[k][4 * c + i] * init[c];
            out.h[j][k] = {v[0], v[1]};
            out.flux[j][k] = {v[2], v[3]};
        }
        for (int i = 0; i < 4; ++i) {
            const double got = i < 2 ? out.h[j].front()[i] : out.h[j].back()[i - 2];
            out.boundary_defect = std::max(out.boundary_defect, std::abs(got - (i == j ? 1.0 : 0.0)));
        }
    }
    return out;
}

DirichletCount dirichlet_negative_count(int l, const Trajectory& traj, double tau_zero)
{
    require_l(l);
    SpectrumOptions opt;
    opt.tau_zero = tau_zero;
    const double cutoff = 1.0;
    const auto s = jacobi_spectrum(l, traj, 1, BoundaryCondition::dirichlet(), Channels::Both, cutoff, opt);
    DirichletCount d;
    d.neg = s.neg;
    d.eigenvalues = s.eigenvalues;
    d.margin = cutoff;
    for (double mu : s.eigenvalues)
        d.margin = std::min(d.margin, std::abs(mu));
    if (s.zero > 0) {
        std::ostringstream msg;
        msg << "Dirichlet problem at l = " << l << " has an eigenvalue within " << tau_zero
            << " of zero; boundary-form counting is inapplicable, use the direct method";
        throw InapplicableError(msg.str());
    }
    return d;
}

GramMatrix gram_matrix(const BoundarySolutions& psi)
{
    GramMatrix g;
    Mat4 a{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const auto& hi0 = psi.h[i].front();
            const auto& hiT = psi.h[i].back();
            const auto& yj0 = psi.flux[j].front();
            const auto& yjT = psi.flux[j].back();
            a[i][j] = hiT[0] * yjT[0] + hiT[1] * yjT[1] - hi0[0] * yj0[0] - hi0[1] * yj0[1];
        }
    const double scale = std::max(max_abs(a), 1e-300);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            g.symmetry_defect = std::max(g.symmetry_defect, std::abs(a[i][j] - a[j][i]) / scale);
            g.sigma_defect = std::max(g.sigma_defect,
                                      std::abs(a[i][j] - a[sigma_perm[i]][sigma_perm[j]]) / scale);
        }
    if (g.symmetry_defect > symmetry_limit || g.sigma_defect > symmetry_limit) {
        std::ostringstream msg;
        msg << "Gram matrix symmetry violated (transpose " << g.symmetry_defect << ", sigma "
            << g.sigma_defect << "); integration is inaccurate";
        throw NumericalError(msg.str());
    }
    Mat4 s{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            s[i][j] = 0.5 * (a[i][j] + a[j][i]);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            g.a[i][j] = 0.5 * (s[i][j] + s[sigma_perm[i]][sigma_perm[j]]);
    g.condition = psi.condition;
    return g;
}

GramMatrix gram_matrix(int l, const Trajectory& traj)
{
    return gram_matrix(boundary_solutions(l, traj, 2));
}

double DetPolynomial::norm() const
{
    return std::max({std::abs(coeffs[0]), std::abs(coeffs[1]), std::abs(coeffs[2])});
}

DetPolynomial det_polynomial(const Mat4& a)
{
    const double a11 = a[0][0], a13 = a[0][2], a14 = a[0][3], a22 = a[1][1], a24 = a[1][3];
    DetPolynomial p;
    p.coeffs = {4.0 * (a11 * a22 - a14 * a14), 4.0 * (a13 * a22 - a11 * a24),
                4.0 * (a14 * a14 - a13 * a24)};
    const double scale = max_abs(a);
    const double nrm = p.norm();
    if (!(nrm > 1e-14 * scale * scale))
        throw NumericalError("determinant polynomial is degenerate (all coefficients vanish)");
    const auto [c0, c1, c2] = p.coeffs;
    if (std::abs(c2) <= 1e-12 * nrm) {
        if (std::abs(c1) > 1e-12 * nrm)
            p.roots = {-c0 / c1};
        return p;
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) {
        p.complex_pair = true;
        return p;
    }
    const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
    double r1 = q / c2;
    double r2 = q != 0.0 ? c0 / q : r1;
    if (r1 > r2)
        std::swap(r1, r2);
    p.roots = {r1, r2};
    return p;
}

Mat2c twisted_form(const Mat4& a, cplx omega)
{
    const double s2 = 2.0 * omega.real();    // omega + conj(omega)
    const cplx d = omega - std::conj(omega); // 2 i Im omega
    Mat2c m;
    m[0][0] = 2.0 * a[0][0] + s2 * a[0][2];
    m[0][1] = d * a[0][3];
    m[1][0] = -d * a[0][3];
    m[1][1] = 2.0 * a[1][1] - s2 * a[1][3];
    return m;
}

BoundaryFormData boundary_form(int l, const Trajectory& traj, double tau_zero)
{
    BoundaryFormData d;
    d.l = l;
    d.b = traj.family().b;
    d.dirichlet = dirichlet_negative_count(l, traj, tau_zero);
    d.gram = gram_matrix(l, traj);
    d.poly = det_polynomial(d.gram.a);
    if (!d.poly.roots.empty()) {
        d.s1 = d.poly.roots.front();
        d.s2 = d.poly.roots.back();
    }
    return d;
}

TwistedCount twisted_counts(const BoundaryFormData& data, cplx omega, int omega_index)
{
    if (std::abs(std::abs(omega) - 1.0) > 1e-12)
        throw ValidationError("omega must have modulus 1");
    TwistedCount c;
    c.l = data.l;
    c.omega = omega;
    c.omega_index = omega_index;
    const auto form = twisted_form(data.gram.a, omega);
    c.form_eigenvalues = hermitian_eigenvalues_2x2(form);
    const double nrm = std::max(std::abs(c.form_eigenvalues[0]), std::abs(c.form_eigenvalues[1]));
    const double tau = form_tolerance * nrm;
    for (double r : data.poly.roots)
        c.near_root = c.near_root || std::abs(omega.real() - r) <= root_tolerance;

    int ind = 0, nul = 0;
    for (double e : c.form_eigenvalues) {
        if (e < -tau)
            ++ind;
        else if (e <= tau)
            ++nul;
    }
    if (c.near_root && nul == 0) {
        // The eigenvalue closest to zero is the null direction.
        const int k = std::abs(c.form_eigenvalues[0]) < std::abs(c.form_eigenvalues[1]) ? 0 : 1;
        if (c.form_eigenvalues[k] < 0.0)
            --ind;
        nul = 1;
    } else if (!c.near_root && nul > 0) {
        std::ostringstream msg;
        msg << "A_" << data.l << "(omega) at Re omega = " << omega.real()
            << " has an eigenvalue within " << tau << " of zero but Re omega is not a root of P";
        throw AmbiguityError(msg.str());
    }
    c.neg = data.dirichlet.neg + ind;
    c.zero = nul;
    return c;
}

TwistedCount twisted_counts(const BoundaryFormData& data, int r, int q)
{
    const auto bc = BoundaryCondition::root_of_unity(r, q);
    return twisted_counts(data, bc.omega, r);
}

RootAggregate aggregate_roots(const BoundaryFormData& data, int q)
{
    RootAggregate agg;
    for (int r = 0; r < 2 * q; ++r) {
        const auto c = twisted_counts(data, r, q);
        agg.neg += c.neg;
        agg.zero += c.zero;
        (r % 2 == 0 ? agg.neg_even : agg.neg_odd) += c.neg;
        (r % 2 == 0 ? agg.zero_even : agg.zero_odd) += c.zero;
        agg.per_root.push_back(c);
    }
    return agg;
}

} // namespace otsuki
