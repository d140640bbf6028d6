#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otsuki/edwards.hpp"
#include "otsuki/geodesic.hpp"

namespace otsuki {

enum class IndexMethod { Edwards, Direct, Both };

std::string to_string(IndexMethod method);
/// "edwards", "direct" or "both"; throws ValidationError otherwise.
IndexMethod parse_index_method(const std::string& name);

struct CountPair {
    int neg = 0;
    int zero = 0;

    bool operator==(const CountPair&) const = default;
};

/// Contribution of one Fourier block. For odd q the counts refer to the
/// t0-periodic problem; for even q to the class that survives the
/// quotient (plus for l = 0, 2, minus for l = 1), with both classes kept
/// in `plus` / `minus`.
struct LRecord {
    int l = 0;
    std::string method;
    CountPair counts;
    std::optional<CountPair> plus, minus;
    std::vector<TwistedCount> per_root; // Edwards route only
    std::optional<double> dirichlet_margin;
    std::optional<double> s1, s2;
};

struct IndexBounds {
    int thm_lower = 0;
    int thm_upper = 0;
    int nul_lower = 9;
    int nul_upper = 13;
    int ind_s = 0;
    int rough_upper = 0; // 5 ind_S + 2
};

struct IndexFlags {
    bool edwards_applicable = true;
    std::optional<double> s1, s2; // roots of P_1
    std::string s1_regime;        // "below -1", "above -1" or "none"
    std::optional<bool> abs_s1_exceeds_s2;
};

struct IndexReport {
    int p = 0;
    int q = 0;
    double b = 0.0;
    double T = 0.0;
    double Xi = 0.0;
    int n = 0;
    IndexMethod method = IndexMethod::Both;
    std::vector<LRecord> per_l; // l = 0, 1, 2
    int ind = 0;
    int nul = 0;
    IndexBounds bounds;
    IndexFlags flags;
    bool high_l_positive = false;
};

struct IndexOptions {
    IndexMethod method = IndexMethod::Both;
    int n = 4096; // coarse mesh per half-period; 2n is the confirmation mesh
    double tau_zero = 1e-5;
    bool parallel = true;
};

/// Theorem bounds for the Morse index.
int index_lower_bound(int p, int q);
int index_upper_bound(int p, int q);

/// Morse index and nullity of the bipolar surface for rotation number p/q.
/// Throws InconsistencyError when the routes disagree (method Both) or a
/// count changes between meshes n and 2n, and InapplicableError when
/// method Edwards meets a near-zero Dirichlet eigenvalue.
IndexReport compute_index(int p, int q, const IndexOptions& options = {});

struct BoundCheckItem {
    std::string name;
    bool holds = false;
    std::string detail;
};

/// thm_lower <= ind <= thm_upper, 9 <= nul <= 13, ind <= 5 ind_S + 2.
std::vector<BoundCheckItem> bounds_check(const IndexReport& report);

} // namespace otsuki
