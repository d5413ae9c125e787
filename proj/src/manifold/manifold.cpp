#include "mly/manifold/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mly/cesaro/trace.hpp"
#include "mly/core/error.hpp"

namespace mly::manifold {

using cesaro::CheckpointRule;
using nlohmann::ordered_json;

namespace {

/// A_n(x) at each requested n (sorted, unique).
std::vector<double> averages_at(const OperatorSequenceSpec& spec, const Vector& x, Index horizon,
                                const std::vector<Index>& points) {
    std::vector<double> out;
    if (points.empty()) return out;
    const auto trace = cesaro::compute_trace(spec, x, horizon, CheckpointRule::explicit_points(points));
    out.reserve(points.size());
    for (Index n : points) out.push_back(trace.at(n)->A);
    return out;
}

std::vector<Index> merged(std::initializer_list<const std::vector<Index>*> lists) {
    std::vector<Index> out;
    for (const auto* l : lists) out.insert(out.end(), l->begin(), l->end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Indices of `family` where the averages (looked up in `points`/`values`) pass `keep`.
template <class Keep>
std::vector<Index> filter(const std::vector<Index>& family, const std::vector<Index>& points,
                          const std::vector<double>& values, std::size_t cap, Keep keep) {
    std::vector<Index> out;
    for (Index n : family) {
        const auto it = std::lower_bound(points.begin(), points.end(), n);
        if (keep(values[static_cast<std::size_t>(it - points.begin())])) out.push_back(n);
        if (out.size() == cap) break;
    }
    return out;
}

/// Directions with a known peak: for weighted shifts e_J at every run end J
/// (A_n(e_J) = L_n for n < J), otherwise the classifier's default samples.
/// Largest support first.
std::vector<Vector> peak_pool(const OperatorSequenceSpec& spec, Index horizon, std::size_t cap) {
    std::vector<Vector> pool;
    const WeightSequence* w = spec.shift_weights();
    std::optional<std::vector<Run>> runs;
    if (w) runs = w->runs(1, horizon + 1);
    if (runs) {
        std::vector<Index> ends;
        for (const auto& r : *runs) {
            if (r.end > 2) ends.push_back(r.end);
        }
        std::sort(ends.rbegin(), ends.rend());
        ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
        for (Index j : ends) pool.push_back(Vector::basis(spec.space(), j));
    } else {
        pool = classify::default_samples(spec);
        std::stable_sort(pool.begin(), pool.end(),
                         [](const Vector& a, const Vector& b) { return a.support_max() > b.support_max(); });
    }
    if (pool.size() > cap) pool.resize(cap);
    return pool;
}

ordered_json vector_json(const Vector& v) {
    ordered_json out = ordered_json::array();
    for (const auto& e : v.entries()) out.push_back(ordered_json::array({mly::to_string(e.index), e.value}));
    return out;
}

ordered_json index_list(const std::vector<Index>& v) {
    ordered_json out = ordered_json::array();
    for (Index n : v) out.push_back(mly::to_string(n));
    return out;
}

}  // namespace

ordered_json Budgets::to_json() const {
    return {{"gamma_steps", gamma_steps},
            {"max_candidates", max_candidates},
            {"family_cap", family_cap},
            {"burn_in", mly::to_string(burn_in)},
            {"horizon", mly::to_string(horizon)}};
}

ordered_json Ledger::to_json() const {
    ordered_json out;
    out["spec"] = spec_id;
    out["depth"] = depth;
    out["horizon"] = mly::to_string(horizon);
    out["thresholds"] = thresholds.to_json();
    out["budgets"] = budgets.to_json();
    out["seed"] = seed;
    out["complete"] = complete();
    if (exhausted_level) out["exhausted_level"] = *exhausted_level;
    if (!note.empty()) out["note"] = note;
    out["levels"] = ordered_json::array();
    for (const auto& lv : levels) {
        ordered_json j;
        j["m"] = lv.m;
        j["anchor"] = vector_json(lv.anchor);
        j["x"] = vector_json(lv.x);
        j["direction"] = vector_json(lv.direction);
        j["gamma"] = lv.gamma;
        j["distance"] = lv.distance;
        j["eps"] = lv.eps;
        j["peak"] = lv.peak;
        j["s"] = ordered_json::array();
        j["parents"] = ordered_json::array();
        for (std::size_t k = 0; k < lv.s.size(); ++k) {
            const int jj = static_cast<int>(k) + 1;
            j["s"].push_back(index_list(lv.s[k]));
            const std::string child = "s(" + std::to_string(lv.m) + "," + std::to_string(jj) + ")";
            if (lv.m == 1) j["parents"].push_back(child + " <= dips of x_1");
            else if (jj < lv.m) {
                j["parents"].push_back(child + " <= s(" + std::to_string(lv.m - 1) + "," + std::to_string(jj) + ")");
            } else {
                j["parents"].push_back(child + " <= t(" + std::to_string(lv.m - 1) + ")");
            }
        }
        j["t"] = index_list(lv.t);
        out["levels"].push_back(std::move(j));
    }
    return out;
}

Ledger build_irregular_manifold(const OperatorSequenceSpec& spec, const std::vector<Vector>& anchors, int depth,
                                const classify::Thresholds& thresholds, const Budgets& budgets, std::uint64_t seed) {
    if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be at least 1");
    if (static_cast<int>(anchors.size()) < depth) throw Error(ErrorCode::InvalidArgument, "need one anchor per level");
    if (budgets.gamma_steps < 1 || budgets.family_cap < 1) throw Error(ErrorCode::InvalidArgument, "empty budget");
    thresholds.validate();

    Ledger ledger;
    ledger.spec_id = spec.id();
    ledger.thresholds = thresholds;
    ledger.budgets = budgets;
    ledger.seed = seed;
    ledger.depth = depth;
    classify::Thresholds range;
    range.horizon = budgets.horizon;
    ledger.horizon = range.resolve_horizon(spec);
    const Index H = ledger.horizon;

    // sensitivity is judged at the classifier's default thresholds, not the level thresholds
    classify::Thresholds dichotomy;
    dichotomy.horizon = H;
    if (!classify::dichotomy_report(spec, {}, dichotomy).has(classify::Verdict::MSWitness)) {
        throw Error(ErrorCode::NoSensitivity, "no mean-sensitivity witness for " + spec.id());
    }

    const auto pool = peak_pool(spec, H, budgets.max_candidates);
    const std::size_t cap = budgets.family_cap;

    for (int m = 1; m <= depth; ++m) {
        const double eps_m = thresholds.eps_dip / std::ldexp(1.0, m);
        const double peak_m = thresholds.m_peak * m;
        const Vector& z = anchors[static_cast<std::size_t>(m - 1)];
        const Level* prev = m > 1 ? &ledger.levels.back() : nullptr;

        std::vector<Index> parent_points;
        if (prev) {
            parent_points = prev->t;
            for (const auto& s : prev->s) parent_points = merged({&parent_points, &s});
        }

        bool found = false;
        for (const Vector& w : pool) {
            for (int k = 0; k < budgets.gamma_steps && !found; ++k) {
                const double gamma = std::ldexp(1.0 / (2.0 * m), -k);
                const Vector x = z + w.scaled(gamma / w.norm());
                const double distance = (x - z).norm();
                if (!(distance < 1.0 / m)) continue;

                const auto own = cesaro::compute_trace(spec, x, H, CheckpointRule::block_boundaries());
                Level lv;
                for (const auto& cp : own.checkpoints) {
                    if (cp.n > budgets.burn_in && cp.A > peak_m && lv.t.size() < cap) lv.t.push_back(cp.n);
                }
                if (lv.t.empty()) continue;

                bool ok = true;
                if (!prev) {
                    std::vector<Index> dips;
                    for (const auto& cp : own.checkpoints) {
                        if (cp.n > budgets.burn_in && cp.A < eps_m && dips.size() < cap) dips.push_back(cp.n);
                    }
                    ok = !dips.empty();
                    lv.s.push_back(std::move(dips));
                } else {
                    const auto values = averages_at(spec, x, H, parent_points);
                    auto below = [&](double a) { return a < eps_m; };
                    for (const auto& parent : prev->s) {
                        lv.s.push_back(filter(parent, parent_points, values, cap, below));
                        ok = ok && !lv.s.back().empty();
                    }
                    lv.s.push_back(filter(prev->t, parent_points, values, cap, below));
                    ok = ok && !lv.s.back().empty();
                }
                if (!ok) continue;

                lv.m = m;
                lv.anchor = z;
                lv.x = x;
                lv.direction = w;
                lv.gamma = gamma;
                lv.distance = distance;
                lv.eps = eps_m;
                lv.peak = peak_m;
                ledger.levels.push_back(std::move(lv));
                found = true;
            }
            if (found) break;
        }
        if (!found) {
            ledger.exhausted_level = m;
            ledger.note = "level " + std::to_string(m) + ": search budget exhausted after " +
                          std::to_string(pool.size()) + " directions x " + std::to_string(budgets.gamma_steps) +
                          " gamma steps; this is not evidence against the hypothesis";
            break;
        }
    }
    return ledger;
}

std::vector<std::string> check_ledger(const OperatorSequenceSpec& spec, const Ledger& ledger) {
    std::vector<std::string> issues;
    auto subset = [](const std::vector<Index>& child, const std::vector<Index>& parent) {
        return std::includes(parent.begin(), parent.end(), child.begin(), child.end());
    };
    for (std::size_t k = 0; k < ledger.levels.size(); ++k) {
        const Level& lv = ledger.levels[k];
        const std::string tag = "level " + std::to_string(lv.m) + ": ";
        if (!(lv.distance < 1.0 / lv.m) || std::fabs((lv.x - lv.anchor).norm() - lv.distance) > 1e-15) {
            issues.push_back(tag + "distance to anchor not below 1/m");
        }
        if (static_cast<int>(lv.s.size()) != lv.m) issues.push_back(tag + "wrong number of dip families");
        std::vector<const std::vector<Index>*> families = {&lv.t};
        for (const auto& s : lv.s) families.push_back(&s);
        for (const auto* f : families) {
            if (f->empty()) issues.push_back(tag + "empty family");
            if (!std::is_sorted(f->begin(), f->end()) ||
                std::adjacent_find(f->begin(), f->end()) != f->end()) {
                issues.push_back(tag + "family not strictly increasing");
            }
            if (!f->empty() && f->front() <= ledger.budgets.burn_in) issues.push_back(tag + "index inside burn-in");
        }
        if (k > 0) {
            const Level& prev = ledger.levels[k - 1];
            for (std::size_t j = 0; j + 1 < lv.s.size(); ++j) {
                if (!subset(lv.s[j], prev.s[j])) issues.push_back(tag + "s(m," + std::to_string(j + 1) + ") not nested");
            }
            if (!lv.s.empty() && !subset(lv.s.back(), prev.t)) issues.push_back(tag + "s(m,m) not inside t(m-1)");
        }
        std::vector<Index> dip_points;
        for (const auto& s : lv.s) dip_points = merged({&dip_points, &s});
        const auto dip_values = averages_at(spec, lv.x, ledger.horizon, dip_points);
        for (std::size_t p = 0; p < dip_points.size(); ++p) {
            if (!(dip_values[p] < lv.eps)) issues.push_back(tag + "dip certificate fails at n=" + to_string(dip_points[p]));
        }
        const auto peak_values = averages_at(spec, lv.x, ledger.horizon, lv.t);
        for (std::size_t p = 0; p < lv.t.size(); ++p) {
            if (!(peak_values[p] > lv.peak)) issues.push_back(tag + "peak certificate fails at n=" + to_string(lv.t[p]));
        }
    }
    return issues;
}

ComboResult check_combination(const OperatorSequenceSpec& spec, const Ledger& ledger, const std::vector<double>& alpha) {
    if (ledger.levels.empty()) throw Error(ErrorCode::InvalidArgument, "empty ledger");
    const std::size_t D = ledger.levels.size();
    if (alpha.size() != D) throw Error(ErrorCode::InvalidArgument, "one coefficient per level required");
    const auto lead_it = std::find_if(alpha.begin(), alpha.end(), [](double a) { return a != 0.0; });
    if (lead_it == alpha.end()) throw Error(ErrorCode::ZeroVector, "all coefficients are zero");

    ComboResult r;
    r.alpha = alpha;
    r.lead = static_cast<int>(lead_it - alpha.begin()) + 1;
    const double scale = std::fabs(*lead_it);
    std::vector<double> tilde(D);
    double sum_abs = 0.0;
    for (std::size_t l = 0; l < D; ++l) {
        tilde[l] = alpha[l] / scale;
        sum_abs += std::fabs(tilde[l]);
    }
    std::vector<Vector> xs;
    for (const auto& lv : ledger.levels) xs.push_back(lv.x);
    const Vector y = linear_combination(tilde, xs);

    const Level& top = ledger.levels.back();
    const std::vector<Index>& dip_family = top.s.front();
    const std::vector<Index>& peak_family =
        static_cast<std::size_t>(r.lead) < D ? top.s[static_cast<std::size_t>(r.lead)] : top.t;

    const auto points = merged({&dip_family, &peak_family});
    const auto values = averages_at(spec, y, ledger.horizon, points);
    auto value_at = [&](Index n) {
        return values[static_cast<std::size_t>(std::lower_bound(points.begin(), points.end(), n) - points.begin())];
    };

    r.dip_threshold = ledger.thresholds.eps_dip * sum_abs;
    r.dip_value = INFINITY;
    for (Index n : dip_family) {
        if (value_at(n) < r.dip_value) {
            r.dip_value = value_at(n);
            r.dip_n = n;
        }
    }
    r.peak_value = -1.0;
    for (Index n : peak_family) {
        if (value_at(n) > r.peak_value) {
            r.peak_value = value_at(n);
            r.peak_n = n;
        }
    }

    // triangle inequality on the shared dip family
    std::vector<double> bound(dip_family.size(), 0.0);
    for (std::size_t l = 0; l < D; ++l) {
        if (tilde[l] == 0.0) continue;
        const auto a = averages_at(spec, xs[l], ledger.horizon, dip_family);
        for (std::size_t p = 0; p < a.size(); ++p) bound[p] += std::fabs(tilde[l]) * a[p];
    }
    for (std::size_t p = 0; p < dip_family.size(); ++p) {
        if (value_at(dip_family[p]) > bound[p] + 1e-9) r.triangle_ok = false;
    }

    r.pass = r.dip_value < r.dip_threshold && r.peak_value > ledger.thresholds.m_peak;
    return r;
}

SpanReport verify_span_irregular(const OperatorSequenceSpec& spec, const Ledger& ledger, std::size_t n_combos,
                                 std::uint64_t seed) {
    SpanReport out;
    const std::size_t D = ledger.levels.size();
    if (D == 0) throw Error(ErrorCode::InvalidArgument, "empty ledger");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> lead(0, D - 1);
    for (std::size_t c = 0; c < n_combos; ++c) {
        std::vector<double> alpha(D, 0.0);
        const std::size_t first = lead(rng);
        for (std::size_t l = first; l < D; ++l) alpha[l] = gauss(rng);
        if (alpha[first] == 0.0) alpha[first] = 1.0;
        out.combos.push_back(check_combination(spec, ledger, alpha));
        if (out.combos.back().pass) ++out.passed;
        out.triangle_ok = out.triangle_ok && out.combos.back().triangle_ok;
    }
    return out;
}

ordered_json SpanReport::to_json() const {
    ordered_json out;
    out["combos"] = combos.size();
    out["passed"] = passed;
    out["triangle_ok"] = triangle_ok;
    out["results"] = ordered_json::array();
    for (const auto& c : combos) {
        out["results"].push_back({{"alpha", c.alpha},
                                  {"lead", c.lead},
                                  {"dip_n", mly::to_string(c.dip_n)},
                                  {"dip", c.dip_value},
                                  {"dip_threshold", c.dip_threshold},
                                  {"peak_n", mly::to_string(c.peak_n)},
                                  {"peak", c.peak_value},
                                  {"triangle_ok", c.triangle_ok},
                                  {"pass", c.pass}});
    }
    return out;
}

}  // namespace mly::manifold
