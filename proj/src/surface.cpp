#include "otsuki/surface.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "otsuki/errors.hpp"
#include "otsuki/numeric.hpp"

namespace otsuki {

namespace {

struct LocalState {
    double cp, sp;  // cos, sin phi
    double ct, st;  // cos, sin theta
    double phidot;
    double thetadot;
};

LocalState local_state(double t, const Trajectory& traj)
{
    const auto split = evaluate_split(traj, t);
    const auto& s = split.local;
    const auto& fam = traj.family();
    // j p pi / q reduced mod 2 pi in integers when the family closes.
    const double offset =
        fam.closed() && fam.p > 0 && split.rotation == fam.p * pi / fam.q
            ? pi * static_cast<double>((split.half_periods * fam.p) % (2 * fam.q)) / fam.q
            : split.half_periods * split.rotation;
    const double c0 = std::cos(offset), s0 = std::sin(offset);
    const double cl = std::cos(s.theta), sl = std::sin(s.theta);
    return {std::cos(s.phi), std::sin(s.phi), cl * c0 - sl * s0, sl * c0 + cl * s0, s.phidot,
            traj.thetadot(s.phi)};
}

SeparatedCoefficients coefficients_from_states(int l, const Trajectory& traj,
                                               std::vector<double> times)
{
    if (l < 0)
        throw ValidationError("Fourier index l must be non-negative");
    SeparatedCoefficients c;
    c.l = l;
    const std::size_t n = times.size();
    c.weight.resize(n);
    c.weight_slope.resize(n);
    c.q11.resize(n);
    c.q12.resize(n);
    c.q22.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto pc = coefficients_at(l, traj, times[k]);
        c.weight[k] = pc.weight;
        c.weight_slope[k] = pc.weight_slope;
        c.q11[k] = pc.q11;
        c.q12[k] = pc.q12;
        c.q22[k] = pc.q22;
    }
    c.t = std::move(times);
    return c;
}

} // namespace

PointCoefficients coefficients_at(int l, const Trajectory& traj, double t)
{
    if (l < 0)
        throw ValidationError("Fourier index l must be non-negative");
    const auto s = evaluate_extended(traj, t);
    const double cp = std::cos(s.phi);
    const double sp = std::sin(s.phi);
    const double td = traj.thetadot(s.phi);
    const double base = static_cast<double>(l) * l / (cp * cp) + four_pi_sq * s.phidot * s.phidot - 2.0;
    const double shape = 2.0 * four_pi_sq * cp * cp * td * td; // 8 pi^2 cos^2 phi thetadot^2
    return {four_pi_sq * cp * cp, -2.0 * four_pi_sq * cp * sp * s.phidot, base - shape,
            -2.0 * two_pi * l * s.phidot / cp, base - sp * sp * shape};
}

Vec5 immersion(double alpha, double t, const Trajectory& traj)
{
    const auto s = local_state(t, traj);
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    return {ca * s.cp * s.st, sa * s.cp * s.st, ca * s.cp * s.ct, sa * s.cp * s.ct, s.sp};
}

FramePoint frame(double alpha, double t, const Trajectory& traj)
{
    const auto s = local_state(t, traj);
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    const double scale = two_pi * s.cp;

    FramePoint f;
    f.N = {ca * s.cp * s.st, sa * s.cp * s.st, ca * s.cp * s.ct, sa * s.cp * s.ct, s.sp};
    f.e1 = {-sa * s.st, ca * s.st, -sa * s.ct, ca * s.ct, 0.0};

    const double u = -s.sp * s.st * s.phidot + s.cp * s.ct * s.thetadot;
    const double v = -s.sp * s.ct * s.phidot - s.cp * s.st * s.thetadot;
    f.e2 = {scale * ca * u, scale * sa * u, scale * ca * v, scale * sa * v,
            scale * s.cp * s.phidot};

    f.n1 = {sa * s.ct, -ca * s.ct, -sa * s.st, ca * s.st, 0.0};

    const double a = s.ct * s.phidot + s.st * s.sp * s.cp * s.thetadot;
    const double b = s.st * s.phidot - s.ct * s.sp * s.cp * s.thetadot;
    f.n2 = {-scale * ca * a, -scale * sa * a, scale * ca * b, scale * sa * b,
            scale * s.cp * s.cp * s.thetadot};
    return f;
}

WeingartenDiag weingarten_diag(double t, const Trajectory& traj)
{
    const auto s = local_state(t, traj);
    const double a11 = 2.0 * four_pi_sq * s.cp * s.cp * s.thetadot * s.thetadot;
    return {a11, s.sp * s.sp * a11};
}

SeparatedCoefficients separated_coefficients(int l, const Trajectory& traj)
{
    std::vector<double> times(traj.intervals() + 1);
    for (int k = 0; k <= traj.intervals(); ++k)
        times[k] = traj.node_time(k);
    return coefficients_from_states(l, traj, std::move(times));
}

SeparatedCoefficients separated_coefficients_at(int l, const Trajectory& traj,
                                                const std::vector<double>& times)
{
    return coefficients_from_states(l, traj, times);
}

std::vector<KernelField> kernel_fields(const Trajectory& traj, int samples)
{
    if (samples < 8)
        throw ValidationError("kernel fields need at least 8 samples");
    const double t0 = traj.family().full_length();
    const double h = t0 / samples;

    struct Spec {
        int l;
        const char* label;
    };
    const Spec specs[9] = {
        {0, "(cos phi sin 2theta, 0)"},
        {0, "(cos phi cos 2theta, 0)"},
        {0, "(0, 2pi cos^2 phi phidot)"},
        {1, "(-sin a sin phi cos theta, 2pi cos a cos phi (sin phi cos theta phidot + sin theta cos phi thetadot))"},
        {1, "(cos a sin phi cos theta, 2pi sin a cos phi (sin phi cos theta phidot + sin theta cos phi thetadot))"},
        {1, "(-sin a sin phi sin theta, 2pi cos a cos phi (sin phi sin theta phidot - cos theta cos phi thetadot))"},
        {1, "(cos a sin phi sin theta, 2pi sin a cos phi (sin phi sin theta phidot - cos theta cos phi thetadot))"},
        {2, "(-sin 2a cos phi, 2pi cos 2a cos^2 phi phidot)"},
        {2, "(cos 2a cos phi, 2pi sin 2a cos^2 phi phidot)"},
    };

    std::vector<KernelField> fields(9);
    for (int id = 0; id < 9; ++id) {
        fields[id].id = id + 1;
        fields[id].l = specs[id].l;
        fields[id].label = specs[id].label;
        fields[id].t.resize(samples);
        fields[id].h1.resize(samples);
        fields[id].h2.resize(samples);
    }

    for (int k = 0; k < samples; ++k) {
        const double t = k * h;
        const auto s = local_state(t, traj);
        const double s2t = 2.0 * s.st * s.ct;
        const double c2t = s.ct * s.ct - s.st * s.st;
        const double tilt = two_pi * s.cp * s.cp * s.phidot;
        const double cos_part = two_pi * s.cp * (s.sp * s.ct * s.phidot + s.st * s.cp * s.thetadot);
        const double sin_part = two_pi * s.cp * (s.sp * s.st * s.phidot - s.ct * s.cp * s.thetadot);

        const std::array<std::pair<double, double>, 9> values = {{
            {s.cp * s2t, 0.0},
            {s.cp * c2t, 0.0},
            {0.0, tilt},
            {s.sp * s.ct, cos_part},
            {s.sp * s.ct, cos_part},
            {s.sp * s.st, sin_part},
            {s.sp * s.st, sin_part},
            {s.cp, tilt},
            {s.cp, tilt},
        }};
        for (int id = 0; id < 9; ++id) {
            fields[id].t[k] = t;
            fields[id].h1[k] = values[id].first;
            fields[id].h2[k] = values[id].second;
        }
    }
    return fields;
}

KernelResidual kernel_residual(const KernelField& field, const SeparatedCoefficients& coeffs)
{
    if (field.l != coeffs.l)
        throw ValidationError("kernel field and coefficients have different l");
    const std::size_t n = field.t.size();
    if (n < 8 || coeffs.t.size() != n)
        throw ValidationError("coefficients must be sampled at the field's times");

    const double h = field.t[1] - field.t[0];
    auto at = [n](const std::vector<double>& f, std::ptrdiff_t i) {
        const auto m = static_cast<std::ptrdiff_t>(n);
        return f[static_cast<std::size_t>(((i % m) + m) % m)];
    };
    auto d1 = [&](const std::vector<double>& f, std::ptrdiff_t i) {
        return (at(f, i - 2) - 8.0 * at(f, i - 1) + 8.0 * at(f, i + 1) - at(f, i + 2)) / (12.0 * h);
    };
    auto d2 = [&](const std::vector<double>& f, std::ptrdiff_t i) {
        return (-at(f, i - 2) + 16.0 * at(f, i - 1) - 30.0 * at(f, i) + 16.0 * at(f, i + 1) -
                at(f, i + 2)) /
               (12.0 * h * h);
    };

    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<std::ptrdiff_t>(k);
        const double p = coeffs.weight[k];
        const double dp = coeffs.weight_slope[k];
        const double h1 = field.h1[k];
        const double h2 = field.h2[k];

        const double flux1 = p * d2(field.h1, i) + dp * d1(field.h1, i);
        const double flux2 = p * d2(field.h2, i) + dp * d1(field.h2, i);
        const double r1 = -flux1 + coeffs.q11[k] * h1 + coeffs.q12[k] * h2;
        const double r2 = -flux2 + coeffs.q22[k] * h2 + coeffs.q12[k] * h1;
        worst = std::max({worst, std::abs(r1), std::abs(r2)});

        const double terms1 =
            std::abs(flux1) + std::abs(coeffs.q11[k] * h1) + std::abs(coeffs.q12[k] * h2);
        const double terms2 =
            std::abs(flux2) + std::abs(coeffs.q22[k] * h2) + std::abs(coeffs.q12[k] * h1);
        scale = std::max({scale, terms1, terms2});
    }
    return {scale > 0.0 ? worst / scale : worst, n < 256};
}

SLSystem jacobi_system(const SeparatedCoefficients& coeffs, int half_periods,
                       BoundaryCondition bc, Channels channels)
{
    if (half_periods < 1)
        throw ValidationError("need at least one half-period");
    const int n = static_cast<int>(coeffs.t.size()) - 1;
    if (n < 1)
        throw ValidationError("coefficients must cover [0, T] with at least two samples");
    const double T = coeffs.t.back();

    SLSystem sys;
    sys.dim = channels == Channels::Both ? 2 : 1;
    sys.length = half_periods * T;
    sys.bc = bc;
    const std::size_t total = static_cast<std::size_t>(half_periods) * n + 1;
    sys.weight.resize(total);
    sys.q11.resize(total);
    sys.q12.resize(total, 0.0);
    sys.q22.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        const auto j = static_cast<int>(i / n);
        auto k = static_cast<int>(i % n);
        // The final sample closes the last half-period.
        const bool closing = i + 1 == total;
        const int period = closing ? half_periods - 1 : j;
        if (closing)
            k = n;
        const double flip = period % 2 == 0 ? 1.0 : -1.0;
        sys.weight[i] = coeffs.weight[k];
        switch (channels) {
        case Channels::Both:
            sys.q11[i] = coeffs.q11[k];
            sys.q22[i] = coeffs.q22[k];
            sys.q12[i] = flip * coeffs.q12[k];
            break;
        case Channels::First:
            sys.q11[i] = coeffs.q11[k];
            sys.q22[i] = coeffs.q11[k];
            break;
        case Channels::Second:
            sys.q11[i] = coeffs.q22[k];
            sys.q22[i] = coeffs.q22[k];
            break;
        }
    }
    sys.validate();
    return sys;
}

SLSystem laplace_coefficients(int l, const Trajectory& traj, int half_periods,
                              BoundaryCondition bc)
{
    if (l < 0)
        throw ValidationError("Fourier index l must be non-negative");
    if (half_periods == 0)
        half_periods = 2 * traj.family().q;
    if (half_periods < 1)
        throw ValidationError("laplace_coefficients needs a closed family or explicit length");

    const int n = traj.intervals();
    SLSystem sys;
    sys.dim = 1;
    sys.length = half_periods * traj.family().T;
    sys.bc = bc;
    const std::size_t total = static_cast<std::size_t>(half_periods) * n + 1;
    sys.weight.resize(total);
    sys.q11.resize(total);
    sys.q12.assign(total, 0.0);
    const double l2 = static_cast<double>(l) * l;
    for (std::size_t i = 0; i < total; ++i) {
        // Both coefficients depend on cos^2 phi only, which is T-periodic.
        const int k = (i + 1 == total) ? n : static_cast<int>(i % n);
        const double cp = std::cos(traj.phi()[k]);
        sys.weight[i] = four_pi_sq * cp * cp;
        sys.q11[i] = l2 / (cp * cp);
    }
    sys.q22 = sys.q11;
    sys.validate();
    return sys;
}

void write_immersion_csv(std::ostream& out, const Trajectory& traj, int alpha_samples,
                         int t_samples)
{
    const double t0 = traj.family().full_length();
    out << "alpha,t,x1,x2,x3,x4,x5\n";
    out.precision(17);
    for (int i = 0; i < alpha_samples; ++i) {
        const double alpha = two_pi * i / alpha_samples;
        for (int j = 0; j < t_samples; ++j) {
            const double t = t0 * j / t_samples;
            const auto x = immersion(alpha, t, traj);
            out << alpha << ',' << t;
            for (double v : x)
                out << ',' << v;
            out << '\n';
        }
    }
}

} // namespace otsuki
