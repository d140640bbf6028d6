#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "otsuki/errors.hpp"

namespace otsuki {

struct OdeOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    double initial_step = 1e-3;
    long max_steps = 2000000;
};

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) from `t0`,
/// stopping exactly at each of the ascending output times. Returns the
/// states at those times.
template <class Rhs>
std::vector<std::vector<double>> integrate_dopri(const Rhs& f, double t0, std::vector<double> y,
                                                 const std::vector<double>& outputs,
                                                 const OdeOptions& opt = {})
{
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);
    std::vector<std::vector<double>> out;
    out.reserve(outputs.size());

    double t = t0;
    double h = opt.initial_step;
    long steps = 0;
    f(t, y, k1);
    for (double target : outputs) {
        if (target < t)
            throw ValidationError("output times must be ascending and after t0");
        while (t < target) {
            if (++steps > opt.max_steps)
                throw NumericalError("ODE integration exceeded the step budget");
            bool last = false;
            const double h_planned = h;
            if (t + h >= target) {
                h = target - t;
                last = true;
            }
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + h * a21 * k1[i];
            f(t + c2 * h, tmp, k2);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            f(t + c3 * h, tmp, k3);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f(t + c4 * h, tmp, k4);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            f(t + c5 * h, tmp, k5);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            f(t + h, tmp, k6);
            for (std::size_t i = 0; i < n; ++i)
                y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            f(t + h, y5, k7);

            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                err = std::max(err, std::abs(e) / sc);
            }
            if (!std::isfinite(err))
                throw NumericalError("ODE integration produced a non-finite state");
            if (err <= 1.0) {
                t = last ? target : t + h;
                y.swap(y5);
                k1.swap(k7); // first-same-as-last
            }
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (last && err <= 1.0)
                h = std::max(h, h_planned); // do not let a short final step shrink the next one
            else
                h *= factor;
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                std::ostringstream msg;
                msg << "ODE step size underflow at t = " << t;
                throw NumericalError(msg.str());
            }
        }
        out.push_back(y);
    }
    return out;
}

} // namespace otsuki
