#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mly/classify/classify.hpp"
#include "mly/core/operator_sequence.hpp"
#include "mly/core/vector.hpp"

namespace mly::manifold {

struct Budgets {
    int gamma_steps = 8;              // gamma = 1/(2m) * 2^-k, k < gamma_steps
    std::size_t max_candidates = 64;  // peak-witness directions tried per level
    std::size_t family_cap = 64;      // earliest indices kept per family
    Index burn_in = 1000;             // families only hold indices n > burn_in
    Index horizon = 0;                // 0: the spec's full range

    nlohmann::ordered_json to_json() const;
};

/// One level m of the construction: x_m = z_m + gamma w_m with dip families
/// s^{(m,1)}..s^{(m,m)} and peak family t^{(m)}.
struct Level {
    int m = 0;
    Vector anchor;
    Vector x;
    Vector direction;
    double gamma = 0.0;
    double distance = 0.0;  // ||x_m - z_m||
    double eps = 0.0;       // eps_dip / 2^m
    double peak = 0.0;      // m_peak * m
    std::vector<std::vector<Index>> s;  // s[j - 1] = s^{(m,j)}
    std::vector<Index> t;
};

struct Ledger {
    std::string spec_id;
    classify::Thresholds thresholds;
    Budgets budgets;
    std::uint64_t seed = 0;
    int depth = 0;
    Index horizon = 0;
    std::vector<Level> levels;
    std::optional<int> exhausted_level;  // set when the search ran out of budget
    std::string note;

    bool complete() const { return !exhausted_level && static_cast<int>(levels.size()) == depth; }
    nlohmann::ordered_json to_json() const;
};

/// Builds levels 1..depth near the anchors. Throws InvalidArgument for
/// depth < 1 or fewer anchors than levels, NoSensitivity when the spec shows
/// no mean-sensitivity witness at default thresholds. A level that cannot be
/// certified within budget ends the search; the partial ledger is returned
/// with `exhausted_level` set.
Ledger build_irregular_manifold(const OperatorSequenceSpec& spec, const std::vector<Vector>& anchors, int depth,
                                const classify::Thresholds& thresholds, const Budgets& budgets = {},
                                std::uint64_t seed = 0);

/// Structural re-check of a ledger: nesting, distances and the dip/peak
/// certificates. Returns human-readable violations (empty when sound).
std::vector<std::string> check_ledger(const OperatorSequenceSpec& spec, const Ledger& ledger);

struct ComboResult {
    std::vector<double> alpha;
    int lead = 0;  // l' = first index with alpha != 0 (1-based)
    Index dip_n = 0;
    double dip_value = 0.0;      // min over s^{(D,1)} of A_n(y) / |alpha_l'|
    double dip_threshold = 0.0;  // eps_dip * sum |alpha_l / alpha_l'|
    Index peak_n = 0;
    double peak_value = 0.0;     // max over the l' family of A_n(y) / |alpha_l'|
    bool triangle_ok = true;     // A_n(y) <= sum |alpha_l| A_n(x_l) + 1e-9 on s^{(D,1)}
    bool pass = false;
};

struct SpanReport {
    std::vector<ComboResult> combos;
    std::size_t passed = 0;
    bool triangle_ok = true;

    nlohmann::ordered_json to_json() const;
};

/// Checks random combinations sum alpha_l x_l: a dip on s^{(D,1)} and a peak
/// above m_peak on s^{(D,l'+1)} (or t^{(D)} when l' = D), after scaling so
/// that |alpha_l'| = 1.
SpanReport verify_span_irregular(const OperatorSequenceSpec& spec, const Ledger& ledger, std::size_t n_combos,
                                 std::uint64_t seed = 0);

/// Same check for one given coefficient vector.
ComboResult check_combination(const OperatorSequenceSpec& spec, const Ledger& ledger, const std::vector<double>& alpha);

}  // namespace mly::manifold
