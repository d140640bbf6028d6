#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "otsuki/errors.hpp"

namespace otsuki {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 data).
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class Func>
Segment gauss_kronrod_15(const Func& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = kronrod_weights[7] * fc;
    double gauss = gauss_weights[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[j] * pair;
        if (j % 2 == 1)
            gauss += gauss_weights[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature. The interval with the
/// largest error estimate is bisected until the summed estimate drops below
/// max(abs_tol, rel_tol * |I|).
template <class Func>
QuadratureResult integrate_adaptive(const Func& f, double a, double b,
                                    double rel_tol = 1e-13, double abs_tol = 1e-15,
                                    int max_intervals = 4000)
{
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gauss_kronrod_15(f, a, b);
    double total = first.value;
    double total_error = first.error;
    heap.push(first);

    while (total_error > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (static_cast<int>(heap.size()) >= max_intervals) {
            std::ostringstream msg;
            msg << "adaptive quadrature did not converge: residual " << total_error
                << " after " << heap.size() << " intervals";
            throw NumericalError(msg.str());
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // The running error sum loses digits after many updates.
        if (total_error < 0.0 || heap.size() % 64 == 0) {
            total_error = 0.0;
            auto copy = heap;
            double sum = 0.0;
            while (!copy.empty()) {
                total_error += copy.top().error;
                sum += copy.top().value;
                copy.pop();
            }
            total = sum;
        }
    }
    return {total, total_error, static_cast<int>(heap.size())};
}

} // namespace otsuki
