#include "otsuki/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "otsuki/edwards.hpp"
#include "otsuki/errors.hpp"
#include "otsuki/io.hpp"
#include "otsuki/jacobi.hpp"
#include "otsuki/numeric.hpp"
#include "otsuki/pipeline.hpp"
#include "otsuki/surface.hpp"

namespace otsuki {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_numerical = 2;

struct FamilyArgs {
    int p = 0;
    int q = 0;
    std::optional<double> b;

    void attach(CLI::App* app)
    {
        app->add_option("--p", p, "rotation number numerator");
        app->add_option("--q", q, "rotation number denominator");
        app->add_option("--b", b, "starting latitude in (-pi/2, 0], instead of --p/--q");
    }

    GeodesicFamily resolve() const
    {
        if (b) {
            if (p != 0 || q != 0)
                throw ValidationError("--b cannot be combined with --p/--q");
            return *b == 0.0 ? GeodesicFamily::clifford() : GeodesicFamily::from_b(*b);
        }
        if (p == 0 || q == 0)
            throw ValidationError("give both --p and --q, or --b");
        return solve_parameter(p, q);
    }
};

struct Output {
    std::string json_out;

    void attach(CLI::App* app)
    {
        app->add_option("--json-out", json_out, "write JSON to this file instead of stdout");
    }

    void emit(const json& doc, std::ostream& out) const
    {
        const std::string text = dump_json(doc, 2);
        if (json_out.empty()) {
            out << text << '\n';
            return;
        }
        std::ofstream f(json_out, std::ios::binary);
        if (!f)
            throw ValidationError("cannot write " + json_out);
        f << text << '\n';
    }
};

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e))
        return exit_validation;
    return exit_numerical;
}

BoundaryCondition parse_bc(const std::string& name, std::optional<int> omega_index, int q)
{
    if (omega_index) {
        if (q == 0)
            throw ValidationError("--omega-index needs --p/--q");
        if (name != "twisted" && name != "periodic")
            throw ValidationError("--omega-index implies a twisted boundary condition");
        return BoundaryCondition::root_of_unity(*omega_index, q);
    }
    if (name == "periodic")
        return BoundaryCondition::periodic();
    if (name == "antiperiodic")
        return BoundaryCondition::antiperiodic();
    if (name == "dirichlet")
        return BoundaryCondition::dirichlet();
    if (name == "twisted")
        throw ValidationError("--bc twisted needs --omega-index");
    throw ValidationError("unknown boundary condition '" + name + "'");
}

Channels parse_channels(const std::string& name)
{
    if (name == "both")
        return Channels::Both;
    if (name == "first")
        return Channels::First;
    if (name == "second")
        return Channels::Second;
    throw ValidationError("channels must be both, first or second");
}

int cmd_geodesic(const FamilyArgs& fa, int n, int stride, const std::string& mesh_csv,
                 const Output& o, std::ostream& out)
{
    const auto fam = fa.resolve();
    const auto traj = sample_trajectory(fam, n);
    o.emit(to_json(traj, stride), out);
    if (!mesh_csv.empty()) {
        std::ofstream f(mesh_csv);
        if (!f)
            throw ValidationError("cannot write " + mesh_csv);
        write_immersion_csv(f, traj, 64, 256);
    }
    return exit_ok;
}

struct SpectrumArgs {
    int l = 0;
    std::string bc = "periodic";
    std::optional<int> omega_index;
    int half_periods = 0;
    std::string channels = "both";
    int n = 1024;
    double cutoff = 0.1;
    std::string solver = "inertia";
    bool eigenfunctions = false;
};

int cmd_spectrum(const FamilyArgs& fa, const SpectrumArgs& a, const Output& o, std::ostream& out)
{
    if (a.l < 0)
        throw ValidationError("--l must be nonnegative");
    const auto fam = fa.resolve();
    const auto bc = parse_bc(a.bc, a.omega_index, fam.q);
    int half = a.half_periods;
    if (half == 0)
        half = bc.kind == BoundaryKind::Periodic && fam.closed() ? 2 * fam.q : 1;
    if (half < 1)
        throw ValidationError("--half-periods must be positive");
    SpectrumOptions opt;
    opt.eigenfunctions = a.eigenfunctions;
    if (a.solver == "dense")
        opt.method = SolverMethod::DenseQL;
    else if (a.solver != "inertia")
        throw ValidationError("--solver must be inertia or dense");
    const auto traj = jacobi_trajectory(fam, a.n);
    const auto s = jacobi_spectrum(a.l, traj, half, bc, parse_channels(a.channels), a.cutoff, opt);
    json doc{{"family", to_json(fam)}, {"half_periods", half}, {"spectrum", to_json(s)}};
    if (a.eigenfunctions) {
        json labels = json::array();
        if (s.dim == 1 && (bc.kind == BoundaryKind::Periodic || bc.kind == BoundaryKind::Antiperiodic))
            for (const auto& lab : oscillation_index(s))
                labels.push_back({{"position", lab.position}, {"zeros", lab.zeros},
                                  {"sturm_index", lab.sturm_index}});
        doc["oscillation"] = labels;
    }
    o.emit(doc, out);
    return exit_ok;
}

int cmd_edwards(const FamilyArgs& fa, std::optional<int> l, int n, const Output& o, std::ostream& out)
{
    const auto fam = fa.resolve();
    const auto traj = jacobi_trajectory(fam, n);
    std::vector<int> ls = l ? std::vector<int>{*l} : std::vector<int>{1, 2};
    json forms = json::array();
    for (int li : ls) {
        const auto d = boundary_form(li, traj);
        json j = to_json(d);
        if (fam.closed()) {
            const auto agg = aggregate_roots(d, fam.q);
            json roots = json::array();
            for (const auto& c : agg.per_root)
                roots.push_back(to_json(c));
            j["per_root"] = roots;
            j["aggregate"] = {{"neg", agg.neg}, {"zero", agg.zero}};
            if (fam.q % 2 == 0)
                j["aggregate"]["even_q_split"] = {
                    {"even_r", {{"neg", agg.neg_even}, {"zero", agg.zero_even}}},
                    {"odd_r", {{"neg", agg.neg_odd}, {"zero", agg.zero_odd}}}};
        }
        forms.push_back(j);
    }
    o.emit({{"family", to_json(fam)}, {"n", n}, {"forms", forms}}, out);
    return exit_ok;
}

json index_with_cache(int p, int q, const IndexOptions& opt, const std::string& cache_dir,
                      bool use_cache)
{
    const CacheKey key{p, q, opt.n};
    const auto dir = cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cache_dir);
    const bool cacheable = use_cache && opt.method == IndexMethod::Both;
    if (cacheable) {
        if (auto hit = cache_load(dir, key))
            return *hit;
    }
    json doc = to_json(compute_index(p, q, opt));
    if (cacheable)
        cache_store(dir, key, doc);
    return doc;
}

int cmd_index(int p, int q, const IndexOptions& opt, const std::string& cache_dir, bool use_cache,
              const Output& o, std::ostream& out)
{
    RotationNumber::make(p, q);
    o.emit(index_with_cache(p, q, opt, cache_dir, use_cache), out);
    return exit_ok;
}

struct Row {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::string num(double x)
{
    std::ostringstream s;
    s << std::setprecision(3) << x;
    return s.str();
}

std::vector<Row> verify_family(int p, int q, int n)
{
    std::vector<Row> rows;
    auto run = [&](const std::string& name, const std::function<Row()>& f) {
        try {
            auto r = f();
            r.name = name;
            rows.push_back(r);
        } catch (const std::exception& e) {
            rows.push_back({name, false, std::string("error: ") + e.what()});
        }
    };
    const auto fam = solve_parameter(p, q);
    const auto traj = jacobi_trajectory(fam, n);

    run("rotation angle closes", [&] {
        const double d = std::abs(fam.Xi - pi * p / q);
        return Row{"", d < 1e-12, "|Xi - p pi/q| = " + num(d)};
    });
    run("unit speed", [&] {
        const double d = traj.max_speed_defect();
        return Row{"", d < 1e-10, "defect " + num(d)};
    });
    run("killing residuals", [&] {
        double worst = 0;
        for (const auto& f : kernel_fields(traj, 2 * q * mesh_per_half_period(traj)))
            worst = std::max(worst, kernel_residual(f, separated_coefficients_at(f.l, traj, f.t)).value);
        return Row{"", worst < 1e-6, "max residual " + num(worst)};
    });
    run("l = 0 counts", [&] {
        const int half = q % 2 == 1 ? 2 * q : q;
        const auto s = jacobi_spectrum(0, traj, half, BoundaryCondition::periodic(), Channels::Both, 0.1);
        const int want = q % 2 == 1 ? 2 * q + 4 * p - 1 : q + 2 * p - 1;
        return Row{"", s.neg == want && s.zero == 3 && s.mesh_stable(),
                   "neg " + std::to_string(s.neg) + " (want " + std::to_string(want) + "), zero " +
                       std::to_string(s.zero)};
    });
    run("antiperiodic channel 2", [&] {
        const auto c = antiperiodic_check_l0(traj);
        return Row{"", c.first_negative && c.second_zero && c.correlation > 0.999,
                   "lambda1 " + num(c.lambda1) + ", lambda2 " + num(c.lambda2) + ", corr " +
                       num(c.correlation)};
    });
    run("gram symmetry", [&] {
        double worst = 0;
        for (int l : {1, 2}) {
            const auto g = gram_matrix(l, traj);
            worst = std::max({worst, g.symmetry_defect, g.sigma_defect});
        }
        return Row{"", worst < 1e-8, "max defect " + num(worst)};
    });
    run("root identities", [&] {
        const auto d1 = boundary_form(1, traj);
        const auto d2 = boundary_form(2, traj);
        const double e1 = d1.s2 ? std::abs(*d1.s2 + std::cos(p * pi / q)) : 1.0;
        const double e2 = std::abs(d2.poly(1.0)) / d2.poly.norm();
        return Row{"", e1 < 1e-6 && e2 < 1e-8,
                   "|s2 + cos(p pi/q)| = " + num(e1) + ", |P2(1)|/|P2| = " + num(e2)};
    });
    run("edwards vs direct per root", [&] {
        int mismatches = 0;
        for (int l : {1, 2}) {
            const auto d = boundary_form(l, traj);
            for (int r = 0; r < 2 * q; ++r) {
                const auto c = twisted_counts(d, r, q);
                const auto s = jacobi_spectrum(l, traj, 1, BoundaryCondition::root_of_unity(r, q),
                                               Channels::Both, 0.1);
                if (c.neg != s.neg || c.zero != s.zero)
                    ++mismatches;
            }
        }
        return Row{"", mismatches == 0, std::to_string(mismatches) + " mismatching roots"};
    });
    run("spectral index", [&] {
        const int got = spectral_index(traj);
        const int want = q % 2 == 1 ? 2 * q + 4 * p - 2 : q + 2 * p - 2;
        return Row{"", got == want, std::to_string(got) + " (want " + std::to_string(want) + ")"};
    });
    run("l >= 3 positive", [&] { return Row{"", verify_high_l_positive(3, traj), "Q_3 and spectrum"}; });

    IndexOptions opt;
    opt.n = n;
    opt.method = IndexMethod::Both;
    std::optional<IndexReport> report;
    run("index routes agree", [&] {
        report = compute_index(p, q, opt);
        return Row{"", true,
                   "ind " + std::to_string(report->ind) + ", nul " + std::to_string(report->nul)};
    });
    if (report)
        for (const auto& c : bounds_check(*report))
            rows.push_back({c.name, c.holds, c.detail});
    return rows;
}

int cmd_verify(int p, int q, int n, const Output& o, std::ostream& out)
{
    RotationNumber::make(p, q);
    const auto rows = verify_family(p, q, n);
    std::size_t width = 0;
    for (const auto& r : rows)
        width = std::max(width, r.name.size());
    bool ok = true;
    json j = json::array();
    for (const auto& r : rows) {
        ok = ok && r.pass;
        if (o.json_out.empty())
            out << std::left << std::setw(static_cast<int>(width) + 2) << r.name
                << (r.pass ? "PASS  " : "FAIL  ") << r.detail << '\n';
        j.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    if (!o.json_out.empty())
        o.emit({{"p", p}, {"q", q}, {"n", n}, {"checks", j}}, out);
    return ok ? exit_ok : exit_numerical;
}

int cmd_sweep(const std::string& file, const IndexOptions& base, int jobs, const std::string& cache_dir,
              bool use_cache, const Output& o, std::ostream& out)
{
    std::ifstream in(file);
    if (!in)
        throw ValidationError("cannot read sweep list " + file);
    const auto list = parse_sweep_list(in);
    if (jobs < 1)
        jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    IndexOptions opt = base;
    opt.parallel = jobs == 1;

    std::vector<std::string> lines(list.size());
    std::vector<int> codes(list.size(), exit_ok);
    std::atomic<std::size_t> next{0};
    std::mutex cache_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < list.size(); i = next++) {
            const auto [p, q] = list[i];
            try {
                const json doc = to_json(compute_index(p, q, opt));
                if (use_cache && opt.method == IndexMethod::Both) {
                    const auto dir = cache_dir.empty() ? default_cache_dir()
                                                       : std::filesystem::path(cache_dir);
                    std::lock_guard lock(cache_mutex);
                    cache_store(dir, CacheKey{p, q, opt.n}, doc);
                }
                lines[i] = dump_json(doc);
            } catch (const std::exception& e) {
                codes[i] = exit_code_for(e);
                lines[i] = dump_json(json{{"p", p}, {"q", q}, {"error", e.what()}});
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(list.size())); ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    std::ostringstream text;
    for (const auto& l : lines)
        text << l << '\n';
    if (o.json_out.empty()) {
        out << text.str();
    } else {
        std::ofstream f(o.json_out, std::ios::binary);
        if (!f)
            throw ValidationError("cannot write " + o.json_out);
        f << text.str();
    }
    return *std::max_element(codes.begin(), codes.end());
}

} // namespace

std::vector<std::pair<int, int>> parse_sweep_list(std::istream& in)
{
    std::vector<std::pair<int, int>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::replace(line.begin(), line.end(), '/', ' ');
        std::istringstream ss(line);
        int p = 0, q = 0;
        std::string extra;
        if (!(ss >> p)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            throw ValidationError("sweep list line " + std::to_string(lineno) + ": expected p/q");
        }
        if (!(ss >> q) || (ss >> extra))
            throw ValidationError("sweep list line " + std::to_string(lineno) + ": expected p/q");
        RotationNumber::make(p, q);
        out.emplace_back(p, q);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Morse index and nullity of bipolar Otsuki tori"};
    app.require_subcommand(1);

    FamilyArgs fam_g, fam_s, fam_e;
    Output out_g, out_s, out_e, out_i, out_v, out_w;

    auto* geo = app.add_subcommand("geodesic", "closed geodesic data and trajectory samples");
    fam_g.attach(geo);
    out_g.attach(geo);
    int geo_n = 1024, geo_stride = 16;
    std::string mesh_csv;
    geo->add_option("--n", geo_n, "trajectory intervals per half-period");
    geo->add_option("--stride", geo_stride, "emit every stride-th node");
    geo->add_option("--mesh-csv", mesh_csv, "write the immersion on a 64 x 256 grid as CSV");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues of one separated problem");
    fam_s.attach(spectrum_cmd);
    out_s.attach(spectrum_cmd);
    SpectrumArgs sa;
    spectrum_cmd->add_option("--l", sa.l, "Fourier index");
    spectrum_cmd->add_option("--bc", sa.bc, "periodic, antiperiodic, dirichlet or twisted");
    spectrum_cmd->add_option("--omega-index", sa.omega_index, "r in omega = exp(i pi r / q)");
    spectrum_cmd->add_option("--half-periods", sa.half_periods, "length in half-periods (default 2q or 1)");
    spectrum_cmd->add_option("--channels", sa.channels, "both, first or second");
    spectrum_cmd->add_option("--n", sa.n, "mesh intervals per half-period");
    spectrum_cmd->add_option("--cutoff", sa.cutoff, "report eigenvalues below this value");
    spectrum_cmd->add_option("--solver", sa.solver, "inertia or dense");
    spectrum_cmd->add_flag("--eigenfunctions", sa.eigenfunctions, "also compute oscillation labels");

    auto* edw = app.add_subcommand("edwards", "boundary-form data for l = 1, 2");
    fam_e.attach(edw);
    out_e.attach(edw);
    std::optional<int> edw_l;
    int edw_n = 1024;
    edw->add_option("--l", edw_l, "1 or 2 (default both)");
    edw->add_option("--n", edw_n, "mesh intervals per half-period");

    IndexOptions iopt;
    std::string method = "both", cache_dir;
    bool no_cache = false;
    int ip = 0, iq = 0;
    auto* idx = app.add_subcommand("index", "Morse index and nullity of one family");
    idx->add_option("--p", ip, "rotation number numerator")->required();
    idx->add_option("--q", iq, "rotation number denominator")->required();
    idx->add_option("--method", method, "edwards, direct or both");
    idx->add_option("--n", iopt.n, "mesh intervals per half-period; 2n confirms");
    idx->add_option("--cache-dir", cache_dir, "cache directory (default $OTSUKI_CACHE or ./.cache)");
    idx->add_flag("--no-cache", no_cache, "neither read nor write the cache");
    out_i.attach(idx);

    int vp = 0, vq = 0, vn = 1024;
    auto* ver = app.add_subcommand("verify", "invariant suite for one family");
    ver->add_option("--p", vp, "rotation number numerator")->required();
    ver->add_option("--q", vq, "rotation number denominator")->required();
    ver->add_option("--n", vn, "mesh intervals per half-period");
    out_v.attach(ver);

    std::string sweep_file;
    int jobs = 0;
    IndexOptions sopt;
    std::string sweep_method = "both", sweep_cache;
    bool sweep_no_cache = false;
    auto* swp = app.add_subcommand("sweep", "index for every p/q listed in a file, one JSON line each");
    swp->add_option("file", sweep_file, "list of p/q, one per line")->required();
    swp->add_option("--method", sweep_method, "edwards, direct or both");
    swp->add_option("--n", sopt.n, "mesh intervals per half-period");
    swp->add_option("--jobs", jobs, "parallel families (default: hardware threads)");
    swp->add_option("--cache-dir", sweep_cache, "cache directory");
    swp->add_flag("--no-cache", sweep_no_cache, "do not write the cache");
    out_w.attach(swp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return exit_validation;
    }

    try {
        if (*geo)
            return cmd_geodesic(fam_g, geo_n, geo_stride, mesh_csv, out_g, out);
        if (*spectrum_cmd)
            return cmd_spectrum(fam_s, sa, out_s, out);
        if (*edw)
            return cmd_edwards(fam_e, edw_l, edw_n, out_e, out);
        if (*idx) {
            iopt.method = parse_index_method(method);
            return cmd_index(ip, iq, iopt, cache_dir, !no_cache, out_i, out);
        }
        if (*ver)
            return cmd_verify(vp, vq, vn, out_v, out);
        if (*swp) {
            sopt.method = parse_index_method(sweep_method);
            return cmd_sweep(sweep_file, sopt, jobs, sweep_cache, !sweep_no_cache, out_w, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return exit_validation;
}

} // namespace otsuki
