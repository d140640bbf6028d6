#include "otsuki/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <tuple>
#include <type_traits>

#include "otsuki/errors.hpp"

namespace otsuki {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

template <class S>
double re(S x)
{
    return std::real(x);
}

template <class S>
S conj_of(S x)
{
    if constexpr (std::is_same_v<S, double>)
        return x;
    else
        return std::conj(x);
}

template <class S>
S from_cplx(cplx z)
{
    if constexpr (std::is_same_v<S, double>)
        return z.real();
    else
        return z;
}

// Small dense blocks (D = 1 or 2), row-major.
template <class S, int D>
using Block = std::array<S, D * D>;

template <class S, int D>
Block<S, D> identity_block(S s = S{1})
{
    Block<S, D> b{};
    for (int i = 0; i < D; ++i)
        b[i * D + i] = s;
    return b;
}

template <class S, int D>
Block<S, D> mul(const Block<S, D>& a, const Block<S, D>& b)
{
    Block<S, D> c{};
    for (int i = 0; i < D; ++i)
        for (int k = 0; k < D; ++k)
            for (int j = 0; j < D; ++j)
                c[i * D + j] += a[i * D + k] * b[k * D + j];
    return c;
}

template <class S, int D>
Block<S, D> adjoint(const Block<S, D>& a)
{
    Block<S, D> c{};
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            c[j * D + i] = conj_of(a[i * D + j]);
    return c;
}

template <class S, int D>
std::array<S, D> apply(const Block<S, D>& a, const S* x)
{
    std::array<S, D> y{};
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            y[i] += a[i * D + j] * x[j];
    return y;
}

template <class S, int D>
double max_abs(const Block<S, D>& a)
{
    double m = 0.0;
    for (const auto& v : a)
        m = std::max(m, std::abs(v));
    return m;
}

// Hermitian pivot: returns its number of negative eigenvalues and writes its
// inverse. A (near) singular pivot is nudged by a tiny positive shift.
template <class S, int D>
int hermitian_pivot(Block<S, D>& a, double scale, Block<S, D>& inverse)
{
    const double nudge = 64.0 * eps * std::max(scale, 1.0);
    if constexpr (D == 1) {
        double d = re(a[0]);
        if (std::abs(d) < nudge)
            d = nudge;
        a[0] = S{d};
        inverse[0] = S{1.0 / d};
        return d < 0.0 ? 1 : 0;
    } else {
        // Keep the block exactly Hermitian.
        double a00 = re(a[0]);
        double a11 = re(a[3]);
        const S off = 0.5 * (a[1] + conj_of(a[2]));
        double det = a00 * a11 - std::norm(off);
        if (std::abs(det) < nudge * std::max({std::abs(a00), std::abs(a11), nudge})) {
            a00 += nudge;
            a11 += nudge;
            det = a00 * a11 - std::norm(off);
            if (det == 0.0) {
                a00 += nudge;
                det = a00 * a11 - std::norm(off);
            }
        }
        a = {S{a00}, off, conj_of(off), S{a11}};
        inverse = {S{a11 / det}, -off / det, -conj_of(off) / det, S{a00 / det}};
        if (det < 0.0)
            return 1;
        return (a00 + a11) < 0.0 ? 2 : 0;
    }
}

template <class S, int D>
Block<S, D> diagonal_block(const DiscreteOperator& op, int k, double sigma)
{
    Block<S, D> b{};
    for (int i = 0; i < D * D; ++i)
        b[i] = S{op.potential[static_cast<std::size_t>(k) * D * D + i]};
    for (int i = 0; i < D; ++i)
        b[i * D + i] += S{op.stiffness[k] - sigma};
    return b;
}

template <class S, int D>
Block<S, D> wrap_block(const DiscreteOperator& op)
{
    Block<S, D> b{};
    for (int i = 0; i < D; ++i)
        b[i * D + i] = from_cplx<S>(-op.wrap * op.phase[i]);
    return b;
}

// Factorization of M - sigma. Chain nodes 1..N-1 are eliminated in order
// with node 0 kept as a border (cyclic case); the Dirichlet case is a plain
// block tridiagonal LDL^H over all nodes.
template <class S, int D>
class ArrowFactor {
public:
    ArrowFactor(const DiscreteOperator& op, double sigma, bool keep)
        : op_(op), keep_(keep)
    {
        const int N = op.nodes;
        const double scale = op.norm();
        if (keep_) {
            inv_.resize(N);
            border_.resize(N);
        }

        if (!op.cyclic) {
            Block<S, D> prev_inv{};
            for (int k = 0; k < N; ++k) {
                auto d = diagonal_block<S, D>(op, k, sigma);
                if (k > 0) {
                    const double w = op.coupling[k - 1];
                    for (int i = 0; i < D * D; ++i)
                        d[i] -= w * w * prev_inv[i];
                }
                Block<S, D> inv{};
                negatives_ += hermitian_pivot<S, D>(d, scale, inv);
                prev_inv = inv;
                if (keep_)
                    inv_[k] = inv;
            }
            return;
        }

        // Border couplings C_k = M[k][0]: -w_0 I at k = 1, wrap at k = N-1.
        auto border_coupling = [&](int k) {
            Block<S, D> c{};
            if (k == 1)
                c = identity_block<S, D>(S{-op.coupling[0]});
            if (k == N - 1) {
                const auto w = wrap_block<S, D>(op);
                for (int i = 0; i < D * D; ++i)
                    c[i] += w[i];
            }
            return c;
        };

        auto schur = diagonal_block<S, D>(op, 0, sigma);
        Block<S, D> prev_inv{};
        Block<S, D> e{};
        for (int k = 1; k < N; ++k) {
            auto d = diagonal_block<S, D>(op, k, sigma);
            auto c = border_coupling(k);
            if (k > 1) {
                const double w = op.coupling[k - 1];
                const auto carried = mul<S, D>(prev_inv, e);
                for (int i = 0; i < D * D; ++i) {
                    d[i] -= w * w * prev_inv[i];
                    c[i] += w * carried[i];
                }
            }
            e = c;
            Block<S, D> inv{};
            negatives_ += hermitian_pivot<S, D>(d, scale, inv);
            const auto update = mul<S, D>(adjoint<S, D>(e), mul<S, D>(inv, e));
            for (int i = 0; i < D * D; ++i)
                schur[i] -= update[i];
            prev_inv = inv;
            if (keep_) {
                inv_[k] = inv;
                border_[k] = e;
            }
        }
        negatives_ += hermitian_pivot<S, D>(schur, scale, schur_inv_);
    }

    int negatives() const { return negatives_; }

    // Solves (M - sigma) x = b; requires keep = true.
    std::vector<S> solve(const std::vector<S>& b) const
    {
        const int N = op_.nodes;
        std::vector<S> y(b);
        auto at = [](std::vector<S>& v, int k) { return v.data() + static_cast<std::size_t>(k) * D; };

        if (!op_.cyclic) {
            for (int k = 1; k < N; ++k) {
                const auto t = apply<S, D>(inv_[k - 1], at(y, k - 1));
                for (int i = 0; i < D; ++i)
                    at(y, k)[i] += op_.coupling[k - 1] * t[i];
            }
            std::vector<S> x(y.size());
            for (int k = N - 1; k >= 0; --k) {
                std::array<S, D> r{};
                for (int i = 0; i < D; ++i)
                    r[i] = at(y, k)[i] + (k + 1 < N ? op_.coupling[k] * at(x, k + 1)[i] : S{});
                const auto v = apply<S, D>(inv_[k], r.data());
                for (int i = 0; i < D; ++i)
                    at(x, k)[i] = v[i];
            }
            return x;
        }

        std::array<S, D> z{};
        for (int i = 0; i < D; ++i)
            z[i] = at(y, 0)[i];
        for (int k = 1; k < N; ++k) {
            if (k > 1) {
                const auto t = apply<S, D>(inv_[k - 1], at(y, k - 1));
                for (int i = 0; i < D; ++i)
                    at(y, k)[i] += op_.coupling[k - 1] * t[i];
            }
            const auto t = apply<S, D>(inv_[k], at(y, k));
            const auto eh = adjoint<S, D>(border_[k]);
            const auto u = apply<S, D>(eh, t.data());
            for (int i = 0; i < D; ++i)
                z[i] -= u[i];
        }
        std::vector<S> x(y.size());
        const auto x0 = apply<S, D>(schur_inv_, z.data());
        for (int i = 0; i < D; ++i)
            at(x, 0)[i] = x0[i];
        for (int k = N - 1; k >= 1; --k) {
            const auto ex = apply<S, D>(border_[k], x0.data());
            std::array<S, D> r{};
            for (int i = 0; i < D; ++i)
                r[i] = at(y, k)[i] - ex[i] + (k + 1 < N ? op_.coupling[k] * at(x, k + 1)[i] : S{});
            const auto v = apply<S, D>(inv_[k], r.data());
            for (int i = 0; i < D; ++i)
                at(x, k)[i] = v[i];
        }
        return x;
    }

private:
    const DiscreteOperator& op_;
    bool keep_;
    int negatives_ = 0;
    std::vector<Block<S, D>> inv_;
    std::vector<Block<S, D>> border_;
    Block<S, D> schur_inv_{};
};

template <class F>
auto dispatch(const DiscreteOperator& op, F&& f)
{
    const bool real = op.is_real();
    if (op.dim == 1)
        return real ? f(std::integral_constant<int, 1>{}, double{}) : f(std::integral_constant<int, 1>{}, cplx{});
    return real ? f(std::integral_constant<int, 2>{}, double{}) : f(std::integral_constant<int, 2>{}, cplx{});
}

void check_mesh(const SLSystem& sys, int n)
{
    if (n < 128)
        throw ValidationError("mesh n must be at least 128");
    if (sys.intervals() % (2 * n) != 0) {
        std::ostringstream msg;
        msg << "mesh n = " << n << " is incompatible with " << sys.intervals()
            << " sample intervals (need a multiple of 2n)";
        throw ValidationError(msg.str());
    }
}

} // namespace

bool DiscreteOperator::is_real() const
{
    return std::abs(phase[0].imag()) == 0.0 && std::abs(phase[1].imag()) == 0.0;
}

double DiscreteOperator::lower_bound() const
{
    double lo = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nodes; ++k) {
        const double* q = potential.data() + static_cast<std::size_t>(k) * dim * dim;
        if (dim == 1) {
            lo = std::min(lo, q[0]);
        } else {
            const double mean = 0.5 * (q[0] + q[3]);
            const double radius = std::hypot(0.5 * (q[0] - q[3]), q[1]);
            lo = std::min(lo, mean - radius);
        }
    }
    return lo;
}

double DiscreteOperator::norm() const
{
    double m = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double left = k > 0 ? coupling[k - 1] : (cyclic ? wrap : 0.0);
        const double right = k + 1 < nodes ? coupling[k] : (cyclic ? wrap : 0.0);
        const double* q = potential.data() + static_cast<std::size_t>(k) * dim * dim;
        double row = 0.0;
        for (int i = 0; i < dim * dim; ++i)
            row = std::max(row, std::abs(q[i]));
        m = std::max(m, stiffness[k] + dim * row + left + right);
    }
    return m;
}

std::vector<cplx> DiscreteOperator::to_dense() const
{
    const int n = size();
    std::vector<cplx> a(static_cast<std::size_t>(n) * n);
    auto at = [&](int i, int j) -> cplx& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int k = 0; k < nodes; ++k) {
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j)
                at(k * dim + i, k * dim + j) = potential[static_cast<std::size_t>(k) * dim * dim + i * dim + j];
            at(k * dim + i, k * dim + i) += stiffness[k];
        }
        if (k + 1 < nodes)
            for (int i = 0; i < dim; ++i) {
                at(k * dim + i, (k + 1) * dim + i) = -coupling[k];
                at((k + 1) * dim + i, k * dim + i) = -coupling[k];
            }
    }
    if (cyclic)
        for (int i = 0; i < dim; ++i) {
            const int last = (nodes - 1) * dim + i;
            at(last, i) += -wrap * phase[i];
            at(i, last) += -wrap * std::conj(phase[i]);
        }
    return a;
}

DiscreteOperator discretize(const SLSystem& sys, int n)
{
    sys.validate();
    check_mesh(sys, n);
    const int stride = sys.intervals() / n;
    const double h = sys.length / n;
    const int d = sys.dim;

    std::vector<double> w(n);
    for (int k = 0; k < n; ++k)
        w[k] = sys.weight[static_cast<std::size_t>(k) * stride + stride / 2] / (h * h);

    DiscreteOperator op;
    op.dim = d;
    op.step = h;
    op.cyclic = sys.bc.kind != BoundaryKind::Dirichlet;
    const int first = op.cyclic ? 0 : 1;
    op.nodes = op.cyclic ? n : n - 1;
    op.times.resize(op.nodes);
    op.potential.resize(static_cast<std::size_t>(op.nodes) * d * d);
    op.stiffness.resize(op.nodes);
    for (int i = 0; i < op.nodes; ++i) {
        const int g = first + i;
        const auto s = static_cast<std::size_t>(g) * stride;
        op.times[i] = g * h;
        double* q = op.potential.data() + static_cast<std::size_t>(i) * d * d;
        if (d == 1) {
            q[0] = sys.q11[s];
        } else {
            q[0] = sys.q11[s];
            q[1] = q[2] = sys.q12[s];
            q[3] = sys.q22[s];
        }
        op.stiffness[i] = w[(g + n - 1) % n] + w[g];
    }
    op.coupling.resize(op.nodes - 1);
    for (int i = 0; i + 1 < op.nodes; ++i)
        op.coupling[i] = w[first + i];
    if (op.cyclic) {
        op.wrap = w[n - 1];
        op.phase = sys.bc.channel_phases(d);
    }
    return op;
}

int count_below(const DiscreteOperator& op, double sigma)
{
    return dispatch(op, [&](auto dim, auto scalar) {
        using S = decltype(scalar);
        return ArrowFactor<S, decltype(dim)::value>(op, sigma, false).negatives();
    });
}

std::vector<double> eigenvalues_below(const DiscreteOperator& op, double cutoff)
{
    const double tol = std::max(1e-13, 2.0 * eps * op.norm());
    double lo = op.lower_bound() - 1.0;
    std::vector<double> out;
    const int total = count_below(op, cutoff);
    if (total == 0)
        return out;
    out.reserve(total);

    struct Interval {
        double lo, hi;
        int c_lo, c_hi;
    };
    std::vector<Interval> stack{{lo, cutoff, count_below(op, lo), total}};
    if (stack.back().c_lo != 0)
        throw NumericalError("spectral lower bound failed: eigenvalues below the potential minimum");
    while (!stack.empty()) {
        auto iv = stack.back();
        stack.pop_back();
        if (iv.c_hi == iv.c_lo)
            continue;
        if (iv.hi - iv.lo <= tol) {
            for (int i = iv.c_lo; i < iv.c_hi; ++i)
                out.push_back(0.5 * (iv.lo + iv.hi));
            continue;
        }
        const double mid = 0.5 * (iv.lo + iv.hi);
        // Rounding can make raw counts non-monotone; clamp to the bracket.
        const int c_mid = std::clamp(count_below(op, mid), iv.c_lo, iv.c_hi);
        // Upper half first so the lower half is processed next.
        stack.push_back({mid, iv.hi, c_mid, iv.c_hi});
        stack.push_back({iv.lo, mid, iv.c_lo, c_mid});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<cplx>> eigenvectors(const DiscreteOperator& op,
                                            const std::vector<double>& eigenvalues)
{
    return dispatch(op, [&](auto dim, auto scalar) {
        using S = decltype(scalar);
        constexpr int D = decltype(dim)::value;
        const int size = op.size();
        std::mt19937_64 rng(20240611);
        std::normal_distribution<double> gauss;

        auto dot = [](const std::vector<S>& a, const std::vector<S>& b) {
            S s{};
            for (std::size_t i = 0; i < a.size(); ++i)
                s += conj_of(a[i]) * b[i];
            return s;
        };
        auto normalize = [&](std::vector<S>& v) {
            const double nrm = std::sqrt(re(dot(v, v)));
            for (auto& x : v)
                x /= nrm;
        };

        std::vector<std::vector<S>> vecs;
        std::vector<std::vector<cplx>> out;
                for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
            const double lambda = eigenvalues[j];
            const double sigma = lambda + 1e-10 * std::max(1.0, std::abs(lambda));
            ArrowFactor<S, D> factor(op, sigma, true);

            std::vector<S> v(size);
            for (auto& x : v) {
                if constexpr (std::is_same_v<S, double>)
                    x = gauss(rng);
                else
                    x = cplx{gauss(rng), gauss(rng)};
            }
            std::size_t first = j;
            while (first > 0 && std::abs(eigenvalues[first - 1] - lambda) < 1e-6 * std::max(1.0, std::abs(lambda)))
                --first;
            for (int it = 0; it < 4; ++it) {
                for (std::size_t m = first; m < j; ++m) {
                    const S c = dot(vecs[m], v);
                    for (int i = 0; i < size; ++i)
                        v[i] -= c * vecs[m][i];
                }
                normalize(v);
                v = factor.solve(v);
            }
            for (std::size_t m = first; m < j; ++m) {
                const S c = dot(vecs[m], v);
                for (int i = 0; i < size; ++i)
                    v[i] -= c * vecs[m][i];
            }
            normalize(v);
            // Fix the global phase: largest entry real positive.
            std::size_t big = 0;
            for (int i = 0; i < size; ++i)
                if (std::abs(v[i]) > std::abs(v[big]))
                    big = i;
            if constexpr (std::is_same_v<S, double>) {
                if (v[big] < 0)
                    for (auto& x : v)
                        x = -x;
            } else {
                const cplx ph = std::abs(v[big]) > 0 ? std::conj(v[big]) / std::abs(v[big]) : cplx{1.0};
                for (auto& x : v)
                    x *= ph;
            }
            vecs.push_back(v);
            out.emplace_back(v.begin(), v.end());
        }
        return out;
    });
}

// ---------------------------------------------------------------------------

std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> off)
{
    const int n = static_cast<int>(d.size());
    if (n == 0)
        return d;
    std::vector<double> e(n, 0.0);
    for (int i = 0; i + 1 < n; ++i)
        e[i] = off[i];

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd)
                    break;
            }
            if (m != l) {
                if (++iter > 60)
                    throw NumericalError("tridiagonal QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l)
                    continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<double> hermitian_eigenvalues(std::vector<cplx> a, int n)
{
    if (static_cast<long>(a.size()) != static_cast<long>(n) * n)
        throw ValidationError("dense matrix size mismatch");
    auto at = [&](int i, int j) -> cplx& { return a[static_cast<std::size_t>(i) * n + j]; };
    std::vector<cplx> v(n), u(n);
    for (int k = 0; k + 2 < n; ++k) {
        double norm_x = 0.0;
        for (int i = k + 1; i < n; ++i)
            norm_x += std::norm(at(i, k));
        norm_x = std::sqrt(norm_x);
        if (norm_x == 0.0)
            continue;
        const cplx x0 = at(k + 1, k);
        const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0};
        const cplx alpha = -phase * norm_x;
        // v = x - alpha e1, normalized
        double vnorm = 0.0;
        for (int i = k + 1; i < n; ++i) {
            v[i] = at(i, k) - (i == k + 1 ? alpha : cplx{});
            vnorm += std::norm(v[i]);
        }
        vnorm = std::sqrt(vnorm);
        if (vnorm == 0.0)
            continue;
        for (int i = k + 1; i < n; ++i)
            v[i] /= vnorm;
        // u = A v on the trailing block, gamma = v^H u
        cplx gamma{};
        for (int i = k + 1; i < n; ++i) {
            cplx s{};
            for (int j = k + 1; j < n; ++j)
                s += at(i, j) * v[j];
            u[i] = s;
        }
        for (int i = k + 1; i < n; ++i)
            gamma += std::conj(v[i]) * u[i];
        for (int i = k + 1; i < n; ++i)
            u[i] -= gamma * v[i];
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                at(i, j) -= 2.0 * (v[i] * std::conj(u[j]) + u[i] * std::conj(v[j]));
        at(k + 1, k) = alpha;
        at(k, k + 1) = std::conj(alpha);
        for (int i = k + 2; i < n; ++i)
            at(i, k) = at(k, i) = 0.0;
    }
    std::vector<double> d(n), off(n > 0 ? n - 1 : 0);
    for (int i = 0; i < n; ++i)
        d[i] = at(i, i).real();
    // A diagonal unitary similarity makes the off-diagonal real.
    for (int i = 0; i + 1 < n; ++i)
        off[i] = std::abs(at(i + 1, i));
    return tridiagonal_eigenvalues(std::move(d), std::move(off));
}

// ---------------------------------------------------------------------------

std::string to_string(SolverMethod method)
{
    return method == SolverMethod::Inertia ? "inertia-bisection" : "dense-householder-ql";
}

std::vector<double> SpectrumSummary::channel(std::size_t i, int ch) const
{
    const auto& f = eigenfunctions.at(i);
    std::vector<double> out(f.size() / dim);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = f[k * dim + ch].real();
    return out;
}

SpectrumSummary spectrum_below(const SLSystem& sys, double cutoff, int n,
                               const SpectrumOptions& options)
{
    const double tau = options.tau_zero;
    if (!(tau > 0.0))
        throw ValidationError("tau_zero must be positive");
    check_mesh(sys, 2 * n);
    const auto coarse_op = discretize(sys, n);
    const auto fine_op = discretize(sys, 2 * n);

    // A margin above the cutoff keeps index pairing intact when an
    // eigenvalue sits near it.
    const double margin = 0.25 * std::max(1.0, std::abs(cutoff));
    auto solve = [&](const DiscreteOperator& op) {
        if (options.method == SolverMethod::DenseQL) {
            if (op.size() > 4096)
                throw ValidationError("dense solver limited to 4096 unknowns");
            auto all = hermitian_eigenvalues(op.to_dense(), op.size());
            all.erase(std::remove_if(all.begin(), all.end(),
                                     [&](double x) { return x >= cutoff + margin; }),
                      all.end());
            return all;
        }
        return eigenvalues_below(op, cutoff + margin);
    };

    SpectrumSummary s;
    s.dim = sys.dim;
    s.bc = sys.bc;
    s.n = n;
    s.cutoff = cutoff;
    s.tau_zero = tau;
    s.method_tag = to_string(options.method) + "+richardson";
    auto coarse = solve(coarse_op);
    auto fine = solve(fine_op);
    const std::size_t m = std::min(coarse.size(), fine.size());

    std::ostringstream ambiguous;
    for (std::size_t i = 0; i < m; ++i) {
        const double lr = (4.0 * fine[i] - coarse[i]) / 3.0;
        if (lr >= cutoff)
            break;
        auto cls = [tau](double x) { return x < -tau ? -1 : (x <= tau ? 0 : 1); };
        if (std::abs(std::abs(lr) - tau) <= 3.0 * tau && cls(coarse[i]) != cls(fine[i]))
            ambiguous << " lambda[" << i << "] = " << lr << " (n: " << coarse[i]
                      << ", 2n: " << fine[i] << ")";
        s.eigenvalues.push_back(lr);
        s.coarse.push_back(coarse[i]);
        s.fine.push_back(fine[i]);
        for (auto [x, neg, zero] : {std::tuple{coarse[i], &s.neg_coarse, &s.zero_coarse},
                                    std::tuple{fine[i], &s.neg_fine, &s.zero_fine}}) {
            if (x < -tau)
                ++*neg;
            else if (x <= tau)
                ++*zero;
        }
        if (lr < -tau)
            ++s.neg;
        else if (lr <= tau)
            ++s.zero;
    }
    if (!ambiguous.str().empty())
        throw AmbiguityError("ambiguous zero classification:" + ambiguous.str());

    if (options.eigenfunctions) {
        s.times = fine_op.times;
        s.eigenfunctions = eigenvectors(fine_op, s.fine);
    }
    return s;
}

// ---------------------------------------------------------------------------

int zero_count(const std::vector<double>& values, int closure)
{
    double peak = 0.0;
    for (double v : values)
        peak = std::max(peak, std::abs(v));
    if (!(peak > 1e-300))
        throw NumericalError("function is identically below the noise floor");
    const double floor = 1e-9 * peak;

    std::vector<int> signs;
    signs.reserve(values.size());
    for (double v : values)
        if (std::abs(v) > floor)
            signs.push_back(v > 0 ? 1 : -1);
    int count = 0;
    for (std::size_t i = 1; i < signs.size(); ++i)
        if (signs[i] != signs[i - 1])
            ++count;
    if (closure != 0 && !signs.empty() && signs.back() != closure * signs.front())
        ++count;
    return count;
}

std::vector<OscillationLabel> oscillation_index(const SpectrumSummary& summary)
{
    if (summary.dim != 1)
        throw ValidationError("oscillation labels need a scalar problem");
    const bool periodic = summary.bc.kind == BoundaryKind::Periodic;
    if (!periodic && summary.bc.kind != BoundaryKind::Antiperiodic)
        throw ValidationError("oscillation labels need periodic or antiperiodic closure");
    if (summary.eigenfunctions.size() != summary.eigenvalues.size())
        throw ValidationError("oscillation labels need eigenfunctions");

    std::vector<OscillationLabel> labels;
    for (std::size_t i = 0; i < summary.eigenvalues.size(); ++i) {
        OscillationLabel lab;
        lab.zeros = zero_count(summary.channel(i), periodic ? 1 : -1);
        // Periodic: 0 -> 0, 2i+2 -> {2i+1, 2i+2}. Antiperiodic: 2i+1 -> {2i+1, 2i+2}.
        lab.position = periodic ? static_cast<int>(i) : static_cast<int>(i) + 1;
        int expected_zeros;
        if (periodic)
            expected_zeros = lab.position == 0 ? 0 : 2 * ((lab.position + 1) / 2);
        else
            expected_zeros = 2 * ((lab.position - 1) / 2) + 1;
        if (lab.zeros != expected_zeros) {
            std::ostringstream msg;
            msg << "oscillation pattern broken at position " << lab.position << ": eigenfunction has "
                << lab.zeros << " zeros, expected " << expected_zeros
                << " (mesh likely under-resolved)";
            throw NumericalError(msg.str());
        }
        // First member of a pair gets the odd index.
        if (periodic)
            lab.sturm_index = lab.zeros == 0 ? 0 : (lab.position % 2 == 1 ? lab.zeros - 1 : lab.zeros);
        else
            lab.sturm_index = lab.position % 2 == 1 ? lab.zeros : lab.zeros + 1;
        labels.push_back(lab);
    }
    return labels;
}

bool interlacing_holds(const std::vector<double>& periodic, const std::vector<double>& anti,
                       double tolerance)
{
    // Merge into the sequence lambda_0, lt_1, lt_2, lambda_1, lambda_2, lt_3, ...
    std::vector<double> seq;
    std::vector<bool> strict; // strict inequality required before this entry
    std::size_t ip = 0, ia = 0;
    if (periodic.empty())
        return true;
    seq.push_back(periodic[ip++]);
    strict.push_back(false);
    bool take_anti = true;
    while (true) {
        auto& src = take_anti ? anti : periodic;
        auto& idx = take_anti ? ia : ip;
        if (idx + 2 > src.size())
            break;
        seq.push_back(src[idx]);
        strict.push_back(true);
        seq.push_back(src[idx + 1]);
        strict.push_back(false);
        idx += 2;
        take_anti = !take_anti;
    }
    for (std::size_t i = 1; i < seq.size(); ++i) {
        if (strict[i] ? !(seq[i - 1] < seq[i] + tolerance) : !(seq[i - 1] <= seq[i] + tolerance))
            return false;
    }
    return true;
}

} // namespace otsuki
