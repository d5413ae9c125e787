#include "mly/shiftlab/shiftlab.hpp"

#include <algorithm>
#include <cmath>

#include "mly/core/error.hpp"
#include "mly/core/kahan.hpp"
#include "mly/core/operator_sequence.hpp"

namespace mly::shiftlab {

namespace {

constexpr Index kMaxStreamed = 50'000'000;

using Kind = cesaro::CheckpointRule::Kind;

std::vector<Index> requested_points(const cesaro::CheckpointRule& rule, Index horizon) {
    std::vector<Index> pts;
    switch (rule.kind) {
        case Kind::All:
            if (horizon > kMaxStreamed) throw Error(ErrorCode::InvalidArgument, "rule 'all' refused for this horizon");
            for (Index n = 1; n <= horizon; ++n) pts.push_back(n);
            break;
        case Kind::Geometric:
        case Kind::Default: pts = cesaro::geometric_grid(horizon, rule.ratio); break;
        case Kind::Explicit:
            for (Index n : rule.points) {
                if (n <= horizon) pts.push_back(n);
            }
            break;
        case Kind::BlockBoundaries: break;
    }
    pts.push_back(horizon);
    return pts;
}

bool wants_run_ends(const cesaro::CheckpointRule& rule) {
    return rule.kind == Kind::BlockBoundaries || rule.kind == Kind::Default;
}

void sort_unique(std::vector<Index>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

const LambdaPoint* LambdaProfile::at(Index n) const {
    auto it = std::lower_bound(points.begin(), points.end(), n,
                               [](const LambdaPoint& p, Index key) { return p.n < key; });
    return it != points.end() && it->n == n ? &*it : nullptr;
}

LambdaProfile lambda_profile(const WeightSequence& weights, Index horizon, const cesaro::CheckpointRule& rule) {
    require_valid_index(horizon);
    if (horizon > weights.defined_until()) {
        throw Error(ErrorCode::ScheduleExhausted, "weights are defined only up to " + mly::to_string(weights.defined_until()));
    }
    LambdaProfile out;
    out.horizon = horizon;
    std::vector<Index> pts = requested_points(rule, horizon);
    bool first = true;
    auto track = [&](Index n, double S) {
        const double L = S / to_double(n);
        if (first || L > out.max_L) {
            out.max_L = L;
            out.argmax = n;
            first = false;
        }
    };

    if (auto runs = weights.runs(1, horizon + 1)) {
        // L is monotone along a run, so run ends carry the maximum
        std::vector<Index> ends;
        for (const auto& r : *runs) ends.push_back(r.end - 1);
        if (wants_run_ends(rule)) pts.insert(pts.end(), ends.begin(), ends.end());
        sort_unique(pts);
        std::vector<Index> visit = pts;
        visit.insert(visit.end(), ends.begin(), ends.end());
        sort_unique(visit);

        CompensatedSum base;
        std::size_t r = 0;
        auto p = pts.begin();
        for (Index n : visit) {
            while ((*runs)[r].end <= n) {
                base.add(to_double((*runs)[r].end - (*runs)[r].start) * std::fabs((*runs)[r].value));
                ++r;
            }
            const double S = base.value() + to_double(n - (*runs)[r].start + 1) * std::fabs((*runs)[r].value);
            track(n, S);
            if (p != pts.end() && *p == n) {
                out.points.push_back({n, S, S / to_double(n)});
                ++p;
            }
        }
        return out;
    }

    if (horizon > kMaxStreamed) {
        throw Error(ErrorCode::InvalidArgument, "index-by-index weights are limited to horizon 5e7");
    }
    sort_unique(pts);
    CompensatedSum sum;
    auto p = pts.begin();
    for (Index n = 1; n <= horizon; ++n) {
        sum.add(std::fabs(weights.at(n)));
        track(n, sum.value());
        if (p != pts.end() && *p == n) {
            out.points.push_back({n, sum.value(), sum.value() / to_double(n)});
            ++p;
        }
    }
    return out;
}

const char* to_string(LambdaVerdict v) {
    return v == LambdaVerdict::UnboundedEvidence ? "UnboundedEvidence" : "BoundedAtHorizon";
}

LambdaCriterion lambda_criterion(const WeightSequence& weights, Index horizon, double m) {
    const auto profile = lambda_profile(weights, horizon);
    return {profile.max_L, profile.argmax,
            profile.max_L > m ? LambdaVerdict::UnboundedEvidence : LambdaVerdict::BoundedAtHorizon};
}

VanishingReport verify_bounded_implies_vanishing(const WeightSequence& weights, const Vector& x, double eps,
                                                 Index horizon) {
    if (x.space().kind != SpaceKind::EllOne) throw Error(ErrorCode::SpaceMismatch, "x must lie in l1");
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    VanishingReport out;
    out.eps = eps;
    out.C = lambda_profile(weights, horizon).max_L;
    const double norm = x.norm();

    // N0: first split with tail mass below eps / C
    const auto entries = x.entries();
    std::vector<double> tail(entries.size() + 1, 0.0);
    for (std::size_t k = entries.size(); k-- > 0;) tail[k] = tail[k + 1] + std::fabs(entries[k].value);
    if (out.C == 0.0) {
        out.bound = eps;
        out.n0_tail = 0;
        out.n1_average = 1;
    } else {
        out.bound = eps + eps * eps / out.C;
        // sum_{j > N} |x_j| = tail[k] for the first entry k with index > N
        std::size_t k = 0;
        while (k < entries.size() && !(tail[k] < eps / out.C)) ++k;
        out.n0_tail = k == 0 ? 0 : entries[k - 1].index;
        const double head = norm * weights.abs_prefix_sum(out.n0_tail);
        const double need = head * out.C / (eps * eps);
        out.n1_average = need >= to_double(kMaxIndex) ? kMaxIndex : std::max<Index>(1, static_cast<Index>(std::ceil(need)));
    }

    const auto spec = OperatorSequenceSpec::shift_powers(weights, "shift(" + weights.describe() + ")");
    out.trace = cesaro::compute_trace(spec, x, horizon);
    std::vector<Index> ns;
    for (const auto& cp : out.trace.checkpoints) ns.push_back(cp.n);
    const auto lambda = lambda_profile(weights, horizon, cesaro::CheckpointRule::explicit_points(ns));
    const double lambda_n0 = weights.abs_prefix_sum(out.n0_tail);
    for (const auto& cp : out.trace.checkpoints) {
        if (out.C > 0.0) {
            const double lambda_n = lambda.at(cp.n)->S;
            const double split = (norm * lambda_n0 + (eps / out.C) * std::max(0.0, lambda_n - lambda_n0)) / to_double(cp.n);
            if (cp.A > split * (1 + 1e-12)) out.split_bound_ok = false;
        }
        if (cp.n < out.n1_average) continue;
        ++out.checked;
        out.max_after = std::max(out.max_after, cp.A);
    }
    out.holds = out.max_after <= out.bound;
    return out;
}

AsymptoticReport mean_asymptotic_core(const WeightSequence& weights, const std::vector<std::pair<Vector, Vector>>& pairs,
                                      Index horizon) {
    const auto spec = OperatorSequenceSpec::shift_powers(weights, "shift(" + weights.describe() + ")");
    AsymptoticReport out;
    for (const auto& [x, y] : pairs) {
        if (x.space().kind != SpaceKind::EllOne || y.space().kind != SpaceKind::EllOne) {
            throw Error(ErrorCode::SpaceMismatch, "pairs must lie in l1");
        }
        const Vector d = x - y;
        AsymptoticRow row;
        row.support = d.support_max();
        const Index frozen_from = row.support > 1 ? row.support - 1 : 1;
        row.bound = d.norm() * weights.abs_prefix_sum(row.support > 0 ? row.support - 1 : 0);
        const auto trace = cesaro::compute_trace(spec, d, horizon);
        row.tail_average = trace.last().A;
        bool have_frozen = false;
        for (const auto& cp : trace.checkpoints) {
            const double nA = cp.S;
            if (nA > row.bound * (1 + 1e-12)) row.holds = false;
            if (cp.n >= frozen_from) {
                if (!have_frozen) {
                    row.frozen_sum = nA;
                    have_frozen = true;
                } else if (std::fabs(nA - row.frozen_sum) > 1e-12 * std::max(1.0, row.frozen_sum)) {
                    row.holds = false;
                }
            }
        }
        out.holds = out.holds && row.holds;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace mly::shiftlab
