#include "otsuki/pipeline.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include "otsuki/errors.hpp"
#include "otsuki/jacobi.hpp"

namespace otsuki {

namespace {

constexpr double spectrum_cutoff = 0.1;

SpectrumOptions spectrum_options(double tau)
{
    SpectrumOptions opt;
    opt.tau_zero = tau;
    return opt;
}

CountPair stable_counts(const SpectrumSummary& s, const std::string& what)
{
    if (!s.mesh_stable()) {
        std::ostringstream msg;
        msg << what << ": counts differ between meshes (n: " << s.neg_coarse << " neg, "
            << s.zero_coarse << " zero; 2n: " << s.neg_fine << " neg, " << s.zero_fine
            << " zero; extrapolated: " << s.neg << " neg, " << s.zero << " zero)";
        throw NumericalError(msg.str());
    }
    return {s.neg, s.zero};
}

struct BlockCounts {
    CountPair total;
    std::optional<CountPair> plus, minus;
};

// Even q keeps the t0/2-periodic class for l = 0, 2 and the
// t0/2-antiperiodic class for l = 1.
CountPair surviving(int l, const CountPair& plus, const CountPair& minus)
{
    return l == 1 ? minus : plus;
}

BlockCounts direct_counts(int l, const Trajectory& traj, double tau)
{
    const int q = traj.family().q;
    const auto opt = spectrum_options(tau);
    const std::string tag = "l = " + std::to_string(l);
    BlockCounts out;
    if (q % 2 == 1) {
        out.total = stable_counts(jacobi_spectrum(l, traj, 2 * q, BoundaryCondition::periodic(),
                                                  Channels::Both, spectrum_cutoff, opt),
                                  tag + " periodic");
        return out;
    }
    out.plus = stable_counts(jacobi_spectrum(l, traj, q, BoundaryCondition::periodic(),
                                             Channels::Both, spectrum_cutoff, opt),
                             tag + " half-length periodic");
    out.minus = stable_counts(jacobi_spectrum(l, traj, q, BoundaryCondition::antiperiodic(),
                                              Channels::Both, spectrum_cutoff, opt),
                              tag + " half-length antiperiodic");
    out.total = surviving(l, *out.plus, *out.minus);
    return out;
}

BlockCounts edwards_counts(int l, const BoundaryFormData& data, int q, LRecord& rec)
{
    const auto agg = aggregate_roots(data, q);
    rec.per_root = agg.per_root;
    BlockCounts out;
    if (q % 2 == 1) {
        out.total = {agg.neg, agg.zero};
    } else {
        out.plus = CountPair{agg.neg_even, agg.zero_even};
        out.minus = CountPair{agg.neg_odd, agg.zero_odd};
        out.total = surviving(l, *out.plus, *out.minus);
    }
    return out;
}

void put(LRecord& rec, const BlockCounts& c)
{
    rec.counts = c.total;
    rec.plus = c.plus;
    rec.minus = c.minus;
}

std::string describe(const CountPair& c)
{
    std::ostringstream s;
    s << "(neg " << c.neg << ", zero " << c.zero << ")";
    return s.str();
}

// Direct omega-twisted solves on [0, T] against the boundary-form counts,
// then the aggregated counts against the full-length solve.
void cross_check(int l, const Trajectory& traj, const LRecord& rec, const BlockCounts& edw,
                 const BlockCounts& dir, double tau)
{
    const int q = traj.family().q;
    const auto opt = spectrum_options(tau);
    std::ostringstream diff;
    for (const auto& tc : rec.per_root) {
        const auto s = jacobi_spectrum(l, traj, 1, BoundaryCondition::root_of_unity(tc.omega_index, q),
                                       Channels::Both, spectrum_cutoff, opt);
        const CountPair direct{s.neg, s.zero};
        const CountPair form{tc.neg, tc.zero};
        if (!(direct == form))
            diff << "\n  l = " << l << ", r = " << tc.omega_index << ": edwards " << describe(form)
                 << ", direct " << describe(direct);
    }
    auto compare = [&](const char* name, const std::optional<CountPair>& a,
                       const std::optional<CountPair>& b) {
        if (a && b && !(*a == *b))
            diff << "\n  l = " << l << ", " << name << ": edwards " << describe(*a) << ", direct "
                 << describe(*b);
    };
    compare("total", edw.total, dir.total);
    compare("plus", edw.plus, dir.plus);
    compare("minus", edw.minus, dir.minus);
    if (!diff.str().empty())
        throw InconsistencyError("edwards and direct counts disagree:" + diff.str());
}

struct BlockResult {
    LRecord record;
    std::optional<BoundaryFormData> form;
};

BlockResult run_block(int l, const Trajectory& traj, const IndexOptions& opt)
{
    BlockResult res;
    LRecord& rec = res.record;
    rec.l = l;
    const int q = traj.family().q;
    if (l == 0) {
        rec.method = "direct";
        put(rec, direct_counts(0, traj, opt.tau_zero));
        return res;
    }

    std::string inapplicable;
    try {
        res.form = boundary_form(l, traj, opt.tau_zero);
        rec.dirichlet_margin = res.form->dirichlet.margin;
        rec.s1 = res.form->s1;
        rec.s2 = res.form->s2;
        if (!(res.form->dirichlet.margin > 10.0 * opt.tau_zero)) {
            std::ostringstream msg;
            msg << "Dirichlet margin " << res.form->dirichlet.margin << " at l = " << l
                << " is not above 10 tau_zero";
            inapplicable = msg.str();
        }
    } catch (const InapplicableError& e) {
        inapplicable = e.what();
    }

    const bool edwards_ok = inapplicable.empty();
    if (opt.method == IndexMethod::Edwards && !edwards_ok)
        throw InapplicableError(inapplicable + "; rerun with --method direct");

    if (opt.method == IndexMethod::Edwards) {
        rec.method = "edwards";
        put(rec, edwards_counts(l, *res.form, q, rec));
    } else if (opt.method == IndexMethod::Direct || !edwards_ok) {
        rec.method = "direct";
        put(rec, direct_counts(l, traj, opt.tau_zero));
    } else {
        rec.method = "both";
        const auto edw = edwards_counts(l, *res.form, q, rec);
        const auto dir = direct_counts(l, traj, opt.tau_zero);
        cross_check(l, traj, rec, edw, dir, opt.tau_zero);
        put(rec, edw);
    }
    if (!edwards_ok)
        res.form.reset();
    return res;
}

} // namespace

std::string to_string(IndexMethod method)
{
    switch (method) {
    case IndexMethod::Edwards: return "edwards";
    case IndexMethod::Direct: return "direct";
    case IndexMethod::Both: return "both";
    }
    return "unknown";
}

IndexMethod parse_index_method(const std::string& name)
{
    if (name == "edwards")
        return IndexMethod::Edwards;
    if (name == "direct")
        return IndexMethod::Direct;
    if (name == "both")
        return IndexMethod::Both;
    throw ValidationError("method must be edwards, direct or both, got '" + name + "'");
}

int index_lower_bound(int p, int q)
{
    return q % 2 == 1 ? 6 * q + 8 * p - 3 : 3 * q + 4 * p - 3;
}

int index_upper_bound(int p, int q)
{
    return q % 2 == 1 ? 10 * q + 4 * p - 5 : 5 * q + 2 * p - 5;
}

IndexReport compute_index(int p, int q, const IndexOptions& opt)
{
    RotationNumber::make(p, q);
    if (opt.n < 128)
        throw ValidationError("mesh n must be at least 128");
    if (!(opt.tau_zero > 0.0))
        throw ValidationError("tau_zero must be positive");

    const auto fam = solve_parameter(p, q);
    const auto traj = jacobi_trajectory(fam, opt.n);
    const auto policy = opt.parallel ? std::launch::async : std::launch::deferred;

    std::vector<std::future<BlockResult>> blocks;
    for (int l = 0; l <= 2; ++l)
        blocks.push_back(std::async(policy, [&, l] { return run_block(l, traj, opt); }));
    auto high = std::async(policy, [&] { return verify_high_l_positive(3, traj); });
    auto ind_s = std::async(policy, [&] { return spectral_index(traj, opt.tau_zero); });

    IndexReport r;
    r.p = p;
    r.q = q;
    r.b = fam.b;
    r.T = fam.T;
    r.Xi = fam.Xi;
    r.n = opt.n;
    r.method = opt.method;

    std::optional<BoundaryFormData> form1;
    bool all_applicable = true;
    for (int l = 0; l <= 2; ++l) {
        auto res = blocks[l].get();
        if (l > 0 && !res.form)
            all_applicable = false;
        if (l == 1)
            form1 = res.form;
        r.per_l.push_back(std::move(res.record));
    }
    r.high_l_positive = high.get();
    if (!r.high_l_positive)
        throw NumericalError("Q_3 is not positive on the full period; l >= 3 cannot be dismissed");

    const auto& c = r.per_l;
    r.ind = c[0].counts.neg + 2 * c[1].counts.neg + 2 * c[2].counts.neg;
    r.nul = c[0].counts.zero + 2 * c[1].counts.zero + 2 * c[2].counts.zero;

    r.bounds.thm_lower = index_lower_bound(p, q);
    r.bounds.thm_upper = index_upper_bound(p, q);
    r.bounds.ind_s = ind_s.get();
    r.bounds.rough_upper = 5 * r.bounds.ind_s + 2;

    r.flags.edwards_applicable = all_applicable;
    r.flags.s1 = c[1].s1;
    r.flags.s2 = c[1].s2;
    if (r.flags.s1)
        r.flags.s1_regime = *r.flags.s1 < -1.0 ? "below -1" : "above -1";
    else
        r.flags.s1_regime = "none";
    if (r.flags.s1 && r.flags.s2)
        r.flags.abs_s1_exceeds_s2 = std::abs(*r.flags.s1) > *r.flags.s2;
    return r;
}

std::vector<BoundCheckItem> bounds_check(const IndexReport& r)
{
    std::vector<BoundCheckItem> out;
    auto add = [&](std::string name, bool holds, int lo, int value, int hi) {
        std::ostringstream d;
        if (lo == hi)
            d << value << " <= " << hi;
        else
            d << lo << " <= " << value << " <= " << hi;
        out.push_back({std::move(name), holds, d.str()});
    };
    add("index bounds", r.bounds.thm_lower <= r.ind && r.ind <= r.bounds.thm_upper,
        r.bounds.thm_lower, r.ind, r.bounds.thm_upper);
    add("nullity bounds", r.bounds.nul_lower <= r.nul && r.nul <= r.bounds.nul_upper,
        r.bounds.nul_lower, r.nul, r.bounds.nul_upper);
    add("rough bound", r.ind <= r.bounds.rough_upper, r.bounds.rough_upper, r.ind,
        r.bounds.rough_upper);
    return out;
}

} // namespace otsuki
