#include "mly/classify/classify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mly/core/error.hpp"

namespace mly::classify {

using cesaro::CesaroTrace;
using cesaro::CheckpointRule;
using nlohmann::ordered_json;

namespace {

constexpr Index kFallbackHorizon = Index{1} << 20;

Vector probe(const Space& s) {
    return s.kind == SpaceKind::EllOne ? Vector::basis(s, 2) : Vector::basis(s, 1);
}

CesaroTrace trace_of(const OperatorSequenceSpec& spec, const Vector& x, Index horizon) {
    return cesaro::compute_trace(spec, x, horizon, CheckpointRule::standard());
}

/// Max of A over checkpoints n in [horizon / 10, horizon].
double tail_max(const CesaroTrace& trace, Index* where) {
    const Index from = trace.horizon / 10;
    double best = 0.0;
    *where = trace.horizon;
    for (const auto& cp : trace.checkpoints) {
        if (cp.n < from) continue;
        if (cp.A > best) {
            best = cp.A;
            *where = cp.n;
        }
    }
    return best;
}

void add_first_and_last(std::vector<Witness>& out, const CesaroTrace& trace, const std::vector<Index>& idx,
                        const std::string& kind) {
    if (idx.empty()) return;
    out.push_back({kind, idx.front(), trace.at(idx.front())->A, "first"});
    if (idx.size() > 1) out.push_back({kind, idx.back(), trace.at(idx.back())->A, "last"});
}

}  // namespace

// ---------------------------------------------------------------------------

void Thresholds::validate() const {
    if (!(eps_dip > 0.0) || !(delta > 0.0) || !(m_peak > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "thresholds must be positive");
    }
    if (!(eps_dip < delta) || !(delta <= m_peak)) {
        throw Error(ErrorCode::InvalidArgument, "thresholds must satisfy eps_dip < delta <= m_peak");
    }
    if (k_growth < 0) throw Error(ErrorCode::InvalidArgument, "k_growth must be non-negative");
}

Index Thresholds::resolve_horizon(const OperatorSequenceSpec& spec) const {
    if (horizon != 0) {
        require_valid_index(horizon);
        if (horizon > spec.defined_until()) {
            throw Error(ErrorCode::ScheduleExhausted,
                        "horizon " + mly::to_string(horizon) + " exceeds the range of " + spec.id());
        }
        return horizon;
    }
    if (spec.norm_profile(probe(spec.space()), 1).has_value()) return spec.defined_until();
    return std::min(kFallbackHorizon, spec.defined_until());
}

ordered_json Thresholds::to_json() const {
    return {{"eps_dip", eps_dip}, {"delta", delta}, {"m_peak", m_peak}, {"k_growth", k_growth}};
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::MeanAsymptoticAtHorizon: return "MeanAsymptoticAtHorizon";
        case Verdict::MeanProximalAtHorizon: return "MeanProximalAtHorizon";
        case Verdict::LiYorkeDelta: return "LiYorkeDelta";
        case Verdict::ExtremeAtHorizon: return "ExtremeAtHorizon";
        case Verdict::SemiIrregularAtHorizon: return "SemiIrregularAtHorizon";
        case Verdict::IrregularAtHorizon: return "IrregularAtHorizon";
        case Verdict::MSWitness: return "MS-witness";
        case Verdict::MEEvidence: return "ME-evidence";
        case Verdict::Positive: return "Positive";
        case Verdict::Negative: return "Negative";
    }
    return "?";
}

bool Report::has(Verdict v) const {
    return std::find(verdicts.begin(), verdicts.end(), v) != verdicts.end();
}

ordered_json Report::to_json() const {
    ordered_json out;
    out["subject"] = subject;
    out["spec"] = spec_id;
    out["verdicts"] = ordered_json::array();
    for (Verdict v : verdicts) out["verdicts"].push_back(to_string(v));
    out["witnesses"] = ordered_json::array();
    for (const auto& w : witnesses) {
        ordered_json j = {{"kind", w.kind}, {"n", mly::to_string(w.n)}, {"value", w.value}};
        if (!w.note.empty()) j["note"] = w.note;
        out["witnesses"].push_back(std::move(j));
    }
    out["thresholds"] = thresholds.to_json();
    out["horizon"] = mly::to_string(horizon);
    out["seed"] = seed;
    if (!notes.empty()) out["notes"] = notes;
    if (!details.empty()) out["details"] = details;
    return out;
}

std::vector<Index> dips(const CesaroTrace& trace, double eps) {
    std::vector<Index> out;
    bool moved = false;
    for (const auto& cp : trace.checkpoints) {
        if (moved && cp.A < eps) out.push_back(cp.n);
        if (cp.A > 0.0) moved = true;
    }
    if (!moved) {
        for (const auto& cp : trace.checkpoints) out.push_back(cp.n);
    }
    return out;
}

std::vector<Index> peaks(const CesaroTrace& trace, double threshold) {
    std::vector<Index> out;
    for (const auto& cp : trace.checkpoints) {
        if (cp.A > threshold) out.push_back(cp.n);
    }
    return out;
}

// ---------------------------------------------------------------------------

AcbEstimate estimate_acb_constant(const OperatorSequenceSpec& spec, const std::vector<Vector>& samples,
                                  Index horizon) {
    AcbEstimate best;
    bool any = false;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        if (samples[s].is_zero()) continue;
        const auto trace = trace_of(spec, samples[s], horizon);
        const double ratio = trace.peak.A / samples[s].norm();
        if (!any || ratio > best.c_hat) best = {ratio, s, trace.peak.n};
        any = true;
    }
    if (!any) throw Error(ErrorCode::EmptySamples, "no nonzero samples");
    return best;
}

std::optional<SensitivityWitness> mean_sensitivity_witness(const OperatorSequenceSpec& spec,
                                                           const std::vector<Vector>& candidates,
                                                           const Thresholds& t) {
    const Index horizon = t.resolve_horizon(spec);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const Vector& y = candidates[c];
        if (y.is_zero()) continue;
        const double norm = y.norm();
        const auto trace = trace_of(spec, y, horizon);
        if (trace.peak.A / norm <= t.m_peak) continue;
        for (const auto& cp : trace.checkpoints) {
            if (cp.A / norm > t.m_peak) return SensitivityWitness{c, cp.n, cp.A, cp.A / norm};
        }
    }
    return std::nullopt;
}

Vector irregularize(const Vector& x, const Vector& x0, double eps) {
    if (x0.is_zero()) throw Error(ErrorCode::ZeroDirection, "x0 must be nonzero");
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    return x + x0.scaled(eps / (2.0 * x0.norm()));
}

std::vector<Vector> default_samples(const OperatorSequenceSpec& spec) {
    const Space& s = spec.space();
    std::vector<Vector> out;
    switch (s.kind) {
        case SpaceKind::RealLine: out.push_back(Vector::real(1.0)); break;
        case SpaceKind::RealFiniteDim: {
            std::vector<Entry> all;
            for (Index j = 1; j <= s.dim; ++j) {
                out.push_back(Vector::basis(s, j));
                all.push_back({j, 1.0});
            }
            if (s.dim > 1) out.emplace_back(s, all);
            break;
        }
        case SpaceKind::EllOne: {
            for (Index j = 2; j <= 9; ++j) out.push_back(Vector::basis(s, j));
            if (const WeightSequence* w = spec.shift_weights()) {
                const Index until = spec.defined_until();
                if (auto runs = w->runs(1, until)) {
                    for (const auto& r : *runs) {
                        if (r.start > 8 && r.start < until) out.push_back(Vector::basis(s, r.start + 1));
                    }
                }
            }
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Report classify_difference(const OperatorSequenceSpec& spec, const Vector& d, const Thresholds& t) {
    t.validate();
    Report r;
    r.subject = "pair";
    r.spec_id = spec.id();
    r.thresholds = t;
    r.horizon = t.resolve_horizon(spec);
    const auto trace = trace_of(spec, d, r.horizon);

    Index tail_at = 0;
    const double tail = tail_max(trace, &tail_at);
    const auto dip_idx = dips(trace, t.eps_dip);
    const bool asymptotic = tail < t.eps_dip;
    const bool proximal = !dip_idx.empty();
    const double max_a = trace.peak.A;

    if (asymptotic) r.verdicts.push_back(Verdict::MeanAsymptoticAtHorizon);
    if (proximal) r.verdicts.push_back(Verdict::MeanProximalAtHorizon);
    if (proximal && !asymptotic && max_a >= t.delta) r.verdicts.push_back(Verdict::LiYorkeDelta);
    if (proximal && !asymptotic && max_a >= t.m_peak) r.verdicts.push_back(Verdict::ExtremeAtHorizon);

    r.witnesses.push_back({"tail-max", tail_at, tail, "max over the last decade"});
    add_first_and_last(r.witnesses, trace, dip_idx, "dip");
    r.witnesses.push_back({"max", trace.peak.n, max_a, ""});
    r.witnesses.push_back({"min", trace.trough.n, trace.trough.A, ""});
    if (r.verdicts.empty()) r.notes.push_back("no dip below eps_dip within the horizon");
    r.details["difference_norm"] = d.norm();
    r.details["dip_count"] = dip_idx.size();
    r.details["block_accelerated"] = trace.block_accelerated;
    return r;
}

Report classify_pair(const OperatorSequenceSpec& spec, const Vector& x, const Vector& y, const Thresholds& t) {
    if (x == y) throw Error(ErrorCode::DegeneratePair, "x and y coincide");
    Report r = classify_difference(spec, x - y, t);
    r.subject = "pair(" + x.to_string() + "," + y.to_string() + ")";
    return r;
}

Report detect_irregular_vector(const OperatorSequenceSpec& spec, const Vector& x, const Thresholds& t) {
    if (x.is_zero()) throw Error(ErrorCode::ZeroVector, "x must be nonzero");
    t.validate();
    Report r;
    r.subject = "vector(" + x.to_string() + ")";
    r.spec_id = spec.id();
    r.thresholds = t;
    r.horizon = t.resolve_horizon(spec);
    const auto trace = trace_of(spec, x, r.horizon);
    const auto dip_idx = dips(trace, t.eps_dip);
    const auto semi = peaks(trace, t.delta);
    const auto full = peaks(trace, t.m_peak);
    if (!dip_idx.empty() && !semi.empty()) r.verdicts.push_back(Verdict::SemiIrregularAtHorizon);
    if (!dip_idx.empty() && !full.empty()) r.verdicts.push_back(Verdict::IrregularAtHorizon);
    add_first_and_last(r.witnesses, trace, dip_idx, "dip");
    add_first_and_last(r.witnesses, trace, full.empty() ? semi : full, "peak");
    r.witnesses.push_back({"max", trace.peak.n, trace.peak.A, ""});
    if (r.verdicts.empty()) {
        r.notes.push_back(dip_idx.empty() ? "no dip below eps_dip within the horizon"
                                          : "no peak above delta within the horizon");
    }
    return r;
}

Report dichotomy_report(const OperatorSequenceSpec& spec, const std::vector<Vector>& samples, const Thresholds& t) {
    t.validate();
    Report r;
    r.subject = "sequence";
    r.spec_id = spec.id();
    r.thresholds = t;
    r.horizon = t.resolve_horizon(spec);
    const std::vector<Vector> use = samples.empty() ? default_samples(spec) : samples;
    r.details["samples"] = use.size();
    if (auto w = mean_sensitivity_witness(spec, use, t)) {
        r.verdicts.push_back(Verdict::MSWitness);
        r.witnesses.push_back({"peak", w->n, w->normalized, "sample " + use[w->candidate].to_string()});
        return r;
    }
    const auto acb = estimate_acb_constant(spec, use, r.horizon);
    r.verdicts.push_back(Verdict::MEEvidence);
    r.witnesses.push_back({"acb", acb.n, acb.c_hat, "sample " + use[acb.sample].to_string()});
    r.details["C_hat"] = acb.c_hat;
    r.notes.push_back("no normalized average above m_peak within the horizon");
    return r;
}

// ---------------------------------------------------------------------------

SubmultResult check_submultiplicative(const OperatorSequenceSpec& spec, const std::vector<Vector>& samples,
                                      const std::vector<std::pair<Index, Index>>& index_pairs) {
    SubmultResult out;
    double worst = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const Vector& z = samples[s];
        if (z.is_zero()) continue;
        for (const auto& [i, m] : index_pairs) {
            const double lhs = spec.image_norm(checked_add(i, m), z);
            const double rhs = spec.apply(i, spec.apply(m, z)).norm();
            if (rhs == 0.0) {
                if (lhs == 0.0) {
                    ++out.skipped;
                    continue;
                }
                out.violation = SubmultResult::Violation{s, i, m, lhs};
                return out;
            }
            ++out.checked;
            worst = std::max(worst, lhs / rhs);
        }
    }
    out.c_min = worst;
    return out;
}

std::vector<std::pair<Index, Index>> index_grid(Index limit) {
    std::vector<std::pair<Index, Index>> out;
    for (Index i = 1; i <= limit; ++i) {
        for (Index m = 1; m <= limit; ++m) out.emplace_back(i, m);
    }
    return out;
}

CommuteProfile check_almost_commuting(const OperatorSequenceSpec& spec, const Vector& x, Index k, Index horizon,
                                      double tol) {
    if (k > horizon) throw Error(ErrorCode::InvalidArgument, "k must not exceed the horizon");
    CommuteProfile out;
    out.tol = tol;
    const Vector tk = spec.apply(k, x);
    const Index from = horizon / 10;
    for (Index i : cesaro::geometric_grid(horizon, 1.1)) {
        // both parities matter for alternating rules
        for (Index j : {i, i + 1}) {
            if (j > horizon || (!out.points.empty() && out.points.back().first >= j)) continue;
            const double diff = (spec.apply(j, tk) - spec.apply(k, spec.apply(j, x))).norm();
            out.points.emplace_back(j, diff);
            if (j >= from) out.tail_max = std::max(out.tail_max, diff);
        }
    }
    out.persists = out.tail_max > tol;
    return out;
}

InvariantReport verify_invariant_subspace(const OperatorSequenceSpec& spec, const std::vector<Vector>& samples,
                                          const std::vector<Index>& n_sequence, const std::vector<Index>& k_set,
                                          double tol) {
    if (n_sequence.empty()) throw Error(ErrorCode::InvalidArgument, "empty N sequence");
    InvariantReport out;
    out.tol = tol;
    const Index horizon = *std::max_element(n_sequence.begin(), n_sequence.end());
    for (Index k : k_set) {
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const Vector image = spec.apply(k, samples[s]);
            double worst = 0.0;
            if (!image.is_zero()) {
                const auto trace =
                    cesaro::compute_trace(spec, image, horizon, CheckpointRule::explicit_points(n_sequence));
                for (Index n : n_sequence) worst = std::max(worst, trace.at(n)->A);
            }
            out.rows.push_back({k, s, worst});
            out.max_observed = std::max(out.max_observed, worst);
        }
    }
    out.holds = out.max_observed < tol;
    return out;
}

Report mly_criterion_check(const OperatorSequenceSpec& spec, const std::vector<Vector>& x0, const Thresholds& t,
                           std::uint64_t seed) {
    t.validate();
    if (x0.empty()) throw Error(ErrorCode::EmptySamples, "X0 must be nonempty");
    Report r;
    r.subject = "sequence";
    r.spec_id = spec.id();
    r.thresholds = t;
    r.horizon = t.resolve_horizon(spec);
    r.seed = seed;

    bool dips_ok = true;
    for (const auto& x : x0) {
        const auto trace = trace_of(spec, x, r.horizon);
        const auto d = dips(trace, t.eps_dip);
        if (d.empty()) {
            dips_ok = false;
            r.notes.push_back("no dip for sample " + x.to_string());
        } else {
            r.witnesses.push_back({"dip", d.front(), trace.at(d.front())->A, "sample " + x.to_string()});
        }
    }

    // span search: samples, pairwise sums and differences, random unit combinations
    std::vector<Vector> candidates = x0;
    for (std::size_t a = 0; a < x0.size(); ++a) {
        for (std::size_t b = a + 1; b < x0.size(); ++b) {
            candidates.push_back(x0[a] + x0[b]);
            candidates.push_back(x0[a] - x0[b]);
        }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int c = 0; c < 200; ++c) {
        std::vector<double> alpha(x0.size());
        for (double& a : alpha) a = gauss(rng);
        Vector y = linear_combination(alpha, x0);
        if (!y.is_zero()) candidates.push_back(y.scaled(1.0 / y.norm()));
    }

    struct Growth {
        double ratio;
        Index n;
    };
    std::vector<std::optional<Growth>> growth(candidates.size());
    auto growth_of = [&](std::size_t c) -> const std::optional<Growth>& {
        if (!growth[c] && !candidates[c].is_zero()) {
            const auto trace = trace_of(spec, candidates[c], r.horizon);
            growth[c] = Growth{trace.peak.A / candidates[c].norm(), trace.peak.n};
        }
        return growth[c];
    };

    bool growth_ok = true;
    for (int k = 1; k <= t.k_growth; ++k) {
        bool found = false;
        for (std::size_t c = 0; c < candidates.size() && !found; ++c) {
            const auto& g = growth_of(c);
            if (g && g->ratio >= k) {
                r.witnesses.push_back({"growth", g->n, g->ratio,
                                       "k=" + std::to_string(k) + " y=" + candidates[c].to_string()});
                found = true;
            }
        }
        if (!found) {
            growth_ok = false;
            r.notes.push_back("no y in the span search with A_N(y) >= " + std::to_string(k) + "||y||");
            break;
        }
    }
    double best = 0.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (const auto& g = growth_of(c)) best = std::max(best, g->ratio);
    }
    r.details["candidates"] = candidates.size();
    r.details["best_growth"] = best;
    r.details["dips_ok"] = dips_ok;
    r.details["growth_ok"] = growth_ok;
    r.verdicts.push_back(dips_ok && growth_ok ? Verdict::Positive : Verdict::Negative);
    return r;
}

}  // namespace mly::classify
