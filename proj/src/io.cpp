#include "otsuki/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string_view>
#include <fstream>
#include <iostream>

#include "otsuki/errors.hpp"

namespace otsuki {

namespace {

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

json counts(const CountPair& c)
{
    return {{"neg", c.neg}, {"zero", c.zero}};
}

json bc_json(const BoundaryCondition& bc)
{
    json j{{"kind", to_string(bc.kind)}};
    if (bc.kind == BoundaryKind::Twisted) {
        j["omega"] = {bc.omega.real(), bc.omega.imag()};
        if (bc.omega_index >= 0)
            j["omega_index"] = bc.omega_index;
    }
    return j;
}

void write(std::string& out, const json& v, int indent, int depth)
{
    const bool pretty = indent >= 0;
    auto newline = [&](int d) {
        if (pretty) {
            out += '\n';
            out.append(static_cast<std::size_t>(indent * d), ' ');
        }
    };
    switch (v.type()) {
    case json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (const auto& [k, item] : v.items()) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            out += json(k).dump();
            out += pretty ? ": " : ":";
            write(out, item, indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& item : v) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            write(out, item, indent, depth + 1);
        }
        newline(depth);
        out += ']';
        return;
    }
    case json::value_t::number_float: {
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            out += "null";
            return;
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
        // keep the value a float on re-read
        if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos)
            out += ".0";
        return;
    }
    default:
        out += v.dump();
    }
}

} // namespace

std::string dump_json(const json& value, int indent)
{
    std::string out;
    write(out, value, indent, 0);
    return out;
}

json to_json(const GeodesicFamily& f)
{
    json j{{"b", f.b}, {"c", f.c}, {"T", f.T}, {"Xi", f.Xi}};
    if (f.closed()) {
        j["p"] = f.p;
        j["q"] = f.q;
        j["t0"] = f.full_length();
    }
    return j;
}

json to_json(const Trajectory& traj, int stride)
{
    if (stride < 1)
        throw ValidationError("stride must be positive");
    json nodes = json::array();
    for (int k = 0; k <= traj.intervals(); k += stride) {
        const auto s = traj.node(k);
        nodes.push_back({traj.node_time(k), s.phi, s.phidot, s.theta});
    }
    return {{"family", to_json(traj.family())},
            {"intervals", traj.intervals()},
            {"max_speed_defect", traj.max_speed_defect()},
            {"columns", {"t", "phi", "phidot", "theta"}},
            {"nodes", nodes}};
}

json to_json(const SpectrumSummary& s)
{
    json j{{"dim", s.dim},
           {"boundary", bc_json(s.bc)},
           {"n", s.n},
           {"cutoff", s.cutoff},
           {"tau_zero", s.tau_zero},
           {"method", s.method_tag},
           {"eigenvalues", s.eigenvalues},
           {"raw_n", s.coarse},
           {"raw_2n", s.fine},
           {"neg", s.neg},
           {"zero", s.zero},
           {"mesh_stable", s.mesh_stable()}};
    if (s.l >= 0)
        j["l"] = s.l;
    return j;
}

json to_json(const TwistedCount& c)
{
    return {{"omega_index", c.omega_index},
            {"omega", {c.omega.real(), c.omega.imag()}},
            {"neg", c.neg},
            {"zero", c.zero},
            {"form_eigenvalues", c.form_eigenvalues},
            {"near_root", c.near_root}};
}

json to_json(const BoundaryFormData& d)
{
    json a = json::array();
    for (const auto& row : d.gram.a)
        a.push_back(row);
    return {{"l", d.l},
            {"b", d.b},
            {"a", a},
            {"P_coeffs", d.poly.coeffs},
            {"roots", d.poly.roots},
            {"complex_roots", d.poly.complex_pair},
            {"applicability_margin", d.dirichlet.margin},
            {"symmetry_defect", d.gram.symmetry_defect},
            {"sigma_defect", d.gram.sigma_defect},
            {"matching_condition", d.gram.condition},
            {"dirichlet", {{"neg", d.dirichlet.neg}, {"eigenvalues", d.dirichlet.eigenvalues}}}};
}

json to_json(const IndexReport& r)
{
    json per_l = json::array();
    for (const auto& rec : r.per_l) {
        json j{{"l", rec.l}, {"method", rec.method}, {"neg", rec.counts.neg}, {"zero", rec.counts.zero}};
        if (rec.plus && rec.minus)
            j["even_q_split"] = {{"plus", counts(*rec.plus)}, {"minus", counts(*rec.minus)}};
        if (rec.dirichlet_margin)
            j["dirichlet_margin"] = *rec.dirichlet_margin;
        if (rec.s1 || rec.s2)
            j["roots"] = {optional_number(rec.s1), optional_number(rec.s2)};
        if (!rec.per_root.empty()) {
            json roots = json::array();
            for (const auto& c : rec.per_root)
                roots.push_back(to_json(c));
            j["per_root"] = roots;
        }
        per_l.push_back(j);
    }
    json flags{{"edwards_applicable", r.flags.edwards_applicable},
               {"s1", optional_number(r.flags.s1)},
               {"s2", optional_number(r.flags.s2)},
               {"s1_regime", r.flags.s1_regime},
               {"abs_s1_exceeds_s2", r.flags.abs_s1_exceeds_s2 ? json(*r.flags.abs_s1_exceeds_s2)
                                                                : json(nullptr)}};
    json checks = json::array();
    for (const auto& c : bounds_check(r))
        checks.push_back({{"name", c.name}, {"holds", c.holds}, {"detail", c.detail}});
    return {{"p", r.p},
            {"q", r.q},
            {"b", r.b},
            {"T", r.T},
            {"Xi", r.Xi},
            {"n", r.n},
            {"method", to_string(r.method)},
            {"per_l", per_l},
            {"high_l_positive", r.high_l_positive},
            {"ind", r.ind},
            {"nul", r.nul},
            {"bounds", {{"thm_lower", r.bounds.thm_lower},
                        {"thm_upper", r.bounds.thm_upper},
                        {"nul_lower", r.bounds.nul_lower},
                        {"nul_upper", r.bounds.nul_upper},
                        {"ind_s", r.bounds.ind_s},
                        {"rough_upper", r.bounds.rough_upper}}},
            {"bound_checks", checks},
            {"flags", flags}};
}

std::string CacheKey::canonical() const
{
    return std::to_string(p) + "-" + std::to_string(q) + "-" + std::to_string(n) + "-v" +
           std::to_string(version);
}

std::filesystem::path default_cache_dir()
{
    if (const char* env = std::getenv("OTSUKI_CACHE"); env && *env)
        return env;
    return ".cache";
}

void cache_store(const std::filesystem::path& dir, const CacheKey& key, const json& report)
{
    std::filesystem::create_directories(dir);
    const auto path = dir / (key.canonical() + ".json");
    const auto tmp = dir / (key.canonical() + ".json.tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw ValidationError("cannot write cache file " + tmp.string());
        const json doc{{"key", key.canonical()}, {"version", key.version}, {"report", report}};
        out << dump_json(doc, 2) << '\n';
        if (!out)
            throw ValidationError("failed writing cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::optional<json> cache_load(const std::filesystem::path& dir, const CacheKey& key)
{
    const auto path = dir / (key.canonical() + ".json");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    try {
        const auto doc = json::parse(in);
        if (doc.at("key").get<std::string>() != key.canonical() ||
            doc.at("version").get<int>() != key.version) {
            std::cerr << "warning: cache file " << path.string() << " has a mismatched key; ignored\n";
            return std::nullopt;
        }
        return doc.at("report");
    } catch (const json::exception& e) {
        std::cerr << "warning: corrupt cache file " << path.string() << " ignored (" << e.what()
                  << ")\n";
        return std::nullopt;
    }
}

} // namespace otsuki
