#include "mly/cesaro/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mly/core/error.hpp"
#include "mly/core/kahan.hpp"

namespace mly::cesaro {
namespace {

// Exhaustive checkpointing beyond this many indices is refused.
constexpr Index kMaxAllCheckpoints = 50'000'000;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool exact_eligible(const OperatorSequenceSpec& spec, const Vector& x) {
    return spec.kind() == SequenceKind::ScalarBlockSchedule && x.space().kind == SpaceKind::RealLine;
}

void validate(const OperatorSequenceSpec& spec, const Vector& x, Index horizon) {
    if (horizon == 0) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1");
    require_valid_index(horizon);
    if (!(spec.space() == x.space())) {
        throw Error(ErrorCode::SpaceMismatch, "vector in " + x.space().to_string() + ", sequence acts on " +
                                                  spec.space().to_string());
    }
}

/// Rule checkpoints other than block boundaries, plus the horizon.
std::vector<Index> rule_points(const CheckpointRule& rule, Index horizon) {
    std::vector<Index> pts;
    switch (rule.kind) {
        case CheckpointRule::Kind::Geometric:
        case CheckpointRule::Kind::Default:
            pts = geometric_grid(horizon, rule.ratio);
            break;
        case CheckpointRule::Kind::Explicit:
            for (Index p : rule.points) {
                if (p >= 1 && p <= horizon) pts.push_back(p);
            }
            break;
        case CheckpointRule::Kind::All:
        case CheckpointRule::Kind::BlockBoundaries:
            break;
    }
    pts.push_back(horizon);
    return pts;
}

bool wants_boundaries(const CheckpointRule& rule) {
    return rule.kind == CheckpointRule::Kind::BlockBoundaries || rule.kind == CheckpointRule::Kind::Default;
}

void append_segment_ends(const std::vector<NormSegment>& segments, Index horizon, std::vector<Index>& pts) {
    for (const auto& s : segments) {
        if (s.start > horizon) break;
        pts.push_back(s.start);
        pts.push_back(std::min(s.end - 1, horizon));
    }
}

void sort_unique(std::vector<Index>& pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

void check_all_budget(Index horizon) {
    if (horizon > kMaxAllCheckpoints) {
        throw Error(ErrorCode::InvalidArgument, "checkpoint rule 'all' refused for horizon " + to_string(horizon));
    }
}

void insert_sorted(std::vector<Checkpoint>& cps, const Checkpoint& cp) {
    auto it = std::lower_bound(cps.begin(), cps.end(), cp.n,
                               [](const Checkpoint& c, Index key) { return c.n < key; });
    if (it == cps.end() || it->n != cp.n) cps.insert(it, cp);
}

void finalize(CesaroTrace& trace) {
    insert_sorted(trace.checkpoints, trace.peak);
    insert_sorted(trace.checkpoints, trace.trough);
}

void track(CesaroTrace& trace, const Checkpoint& cp, bool first) {
    if (first || cp.A > trace.peak.A) trace.peak = cp;
    if (first || cp.A < trace.trough.A) trace.trough = cp;
}

}  // namespace

CheckpointRule CheckpointRule::geometric(double ratio) {
    if (!(ratio > 1.0) || !std::isfinite(ratio)) {
        throw Error(ErrorCode::InvalidArgument, "geometric checkpoint ratio must exceed 1");
    }
    return {Kind::Geometric, ratio, {}};
}

CheckpointRule CheckpointRule::explicit_points(std::vector<Index> points) {
    sort_unique(points);
    return {Kind::Explicit, 1.1, std::move(points)};
}

std::string CheckpointRule::describe() const {
    switch (kind) {
        case Kind::All: return "all";
        case Kind::Geometric: return "geometric:" + fmt(ratio);
        case Kind::BlockBoundaries: return "blocks";
        case Kind::Default: return "default";
        case Kind::Explicit: return "explicit:" + std::to_string(points.size());
    }
    return "?";
}

std::vector<Index> geometric_grid(Index horizon, double ratio) {
    if (!(ratio > 1.0)) throw Error(ErrorCode::InvalidArgument, "geometric checkpoint ratio must exceed 1");
    std::vector<Index> out;
    Index g = 1;
    while (g <= horizon) {
        out.push_back(g);
        const long double next = static_cast<long double>(g) * static_cast<long double>(ratio);
        Index candidate = next >= static_cast<long double>(kMaxIndex) ? kMaxIndex : static_cast<Index>(next);
        if (candidate <= g) candidate = g + 1;
        if (candidate <= g) break;
        g = candidate;
    }
    if (out.empty() || out.back() != horizon) out.push_back(horizon);
    return out;
}

Rational Checkpoint::exact_average() const {
    if (!exact_sum) throw Error(ErrorCode::InvalidArgument, "checkpoint carries no exact sum");
    return *exact_sum / Rational::from_index(n);
}

const Checkpoint* CesaroTrace::at(Index n) const {
    auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), n,
                               [](const Checkpoint& c, Index key) { return c.n < key; });
    return (it != checkpoints.end() && it->n == n) ? &*it : nullptr;
}

CesaroTrace stream_trace(const OperatorSequenceSpec& spec, const Vector& x, Index horizon, const CheckpointRule& rule) {
    validate(spec, x, horizon);
    CesaroTrace trace;
    trace.horizon = horizon;
    trace.spec_id = spec.id();
    trace.vector_id = x.to_string();
    trace.xnorm = x.norm();
    trace.exact = exact_eligible(spec, x);

    const bool every = rule.kind == CheckpointRule::Kind::All;
    if (every) check_all_budget(horizon);
    std::vector<Index> pts = rule_points(rule, horizon);
    if (wants_boundaries(rule)) {
        if (spec.kind() == SequenceKind::ScalarBlockSchedule || spec.kind() == SequenceKind::WeightedShiftPowers) {
            if (auto profile = spec.norm_profile(x, horizon)) append_segment_ends(*profile, horizon, pts);
        }
    }
    sort_unique(pts);

    const BlockSchedule* schedule = trace.exact ? spec.block_schedule() : nullptr;
    std::size_t block_pos = schedule ? schedule->block_position(1) : 0;
    Rational exact_sum(0);
    CompensatedSum sum;
    auto next_pt = pts.begin();

    for (Index i = 1; i <= horizon; ++i) {
        Checkpoint cp{i, 0.0, 0.0, std::nullopt};
        if (schedule) {
            while (schedule->blocks()[block_pos].end <= i) ++block_pos;
            exact_sum += schedule->blocks()[block_pos].effective().abs();
            cp.exact_sum = exact_sum;
            cp.S = exact_sum.to_double() * trace.xnorm;
            cp.A = (exact_sum / Rational::from_index(i)).to_double() * trace.xnorm;
        } else {
            sum.add(spec.image_norm(i, x));
            cp.S = sum.value();
            cp.A = cp.S / to_double(i);
        }
        track(trace, cp, i == 1);
        const bool recorded = every || (next_pt != pts.end() && *next_pt == i);
        if (next_pt != pts.end() && *next_pt == i) ++next_pt;
        if (recorded) trace.checkpoints.push_back(std::move(cp));
    }
    finalize(trace);
    return trace;
}

CesaroTrace block_trace(const OperatorSequenceSpec& spec, const Vector& x, Index horizon, const CheckpointRule& rule) {
    validate(spec, x, horizon);
    auto profile = spec.norm_profile(x, horizon);
    if (!profile) {
        throw Error(ErrorCode::NotBlockStructured, "sequence " + spec.id() + " has no piecewise-constant norm profile");
    }
    const auto& segments = *profile;

    CesaroTrace trace;
    trace.horizon = horizon;
    trace.spec_id = spec.id();
    trace.vector_id = x.to_string();
    trace.xnorm = x.norm();
    trace.block_accelerated = true;
    trace.exact = x.space().kind == SpaceKind::RealLine &&
                  std::all_of(segments.begin(), segments.end(), [](const NormSegment& s) { return s.exact.has_value(); });

    if (trace.exact) {
        // the exact path needs the full sum (and its ratio to the horizon) to fit in 128 bits
        try {
            Rational total(0);
            for (const auto& s : segments) total += *s.exact * Rational::from_index(s.end - s.start);
            (void)(total / Rational::from_index(horizon));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Overflow) throw;
            trace.exact = false;
        }
    }

    const bool every = rule.kind == CheckpointRule::Kind::All;
    if (every) check_all_budget(horizon);
    std::vector<Index> pts = rule_points(rule, horizon);
    if (wants_boundaries(rule)) append_segment_ends(segments, horizon, pts);
    sort_unique(pts);

    // A_n is monotone on every segment, so the extremes sit on segment ends.
    std::vector<Index> ends;
    append_segment_ends(segments, horizon, ends);
    sort_unique(ends);

    std::size_t seg = 0;
    CompensatedSum base;
    Rational exact_base(0);
    auto evaluate = [&](Index n) {
        while (segments[seg].end <= n) {
            const NormSegment& s = segments[seg];
            base.add(to_double(s.end - s.start) * s.value);
            if (trace.exact) exact_base += *s.exact * Rational::from_index(s.end - s.start);
            ++seg;
        }
        const NormSegment& s = segments[seg];
        const Index within = n - s.start + 1;
        Checkpoint cp{n, 0.0, 0.0, std::nullopt};
        if (trace.exact) {
            const Rational total = exact_base + *s.exact * Rational::from_index(within);
            cp.exact_sum = total;
            cp.S = total.to_double() * trace.xnorm;
            cp.A = (total / Rational::from_index(n)).to_double() * trace.xnorm;
        } else {
            cp.S = base.value() + to_double(within) * s.value;
            cp.A = cp.S / to_double(n);
        }
        return cp;
    };

    // merge-walk the recorded points and the segment ends in one ascending pass
    auto p = pts.begin();
    auto e = ends.begin();
    Index all_cursor = 1;
    bool first = true;
    while (true) {
        Index n = 0;
        bool record = false;
        bool candidate = false;
        const bool have_all = every && all_cursor <= horizon;
        const Index next_rule = have_all ? all_cursor : (p != pts.end() ? *p : 0);
        const bool have_rule = have_all || p != pts.end();
        const bool have_end = e != ends.end();
        if (!have_rule && !have_end) break;
        if (have_rule && (!have_end || next_rule <= *e)) n = next_rule;
        else n = *e;
        if (have_rule && next_rule == n) {
            record = true;
            if (have_all) ++all_cursor;
            while (p != pts.end() && *p <= n) ++p;
        }
        if (have_end && *e == n) {
            candidate = true;
            ++e;
        }
        const Checkpoint cp = evaluate(n);
        if (candidate || record) track(trace, cp, first);
        first = false;
        if (record) trace.checkpoints.push_back(cp);
    }
    finalize(trace);
    return trace;
}

CesaroTrace compute_trace(const OperatorSequenceSpec& spec, const Vector& x, Index horizon, const CheckpointRule& rule) {
    validate(spec, x, horizon);
    if (spec.norm_profile(x, horizon)) return block_trace(spec, x, horizon, rule);
    return stream_trace(spec, x, horizon, rule);
}

ExtremaSummary extrema(const CesaroTrace& trace, double eps, double peak_threshold) {
    if (trace.checkpoints.empty()) throw Error(ErrorCode::InvalidArgument, "empty trace");
    if (eps < 0.0 || peak_threshold < 0.0) throw Error(ErrorCode::InvalidArgument, "thresholds must be >= 0");
    ExtremaSummary out;
    out.argmax = trace.peak.n;
    out.max_average = trace.peak.A;
    for (const auto& cp : trace.checkpoints) {
        if (cp.A < eps) out.dip_witnesses.push_back(cp.n);
        if (cp.A > peak_threshold) out.peak_witnesses.push_back(cp.n);
    }
    for (Index start = 1; start <= trace.horizon; start *= 10) {
        double lo = INFINITY;
        for (auto it = trace.checkpoints.rbegin(); it != trace.checkpoints.rend() && it->n >= start; ++it) {
            lo = std::min(lo, it->A);
        }
        out.running_min_tail.push_back({start, lo});
        if (start > trace.horizon / 10) break;
    }
    return out;
}

std::vector<Index> extract_subsequence(const CesaroTrace& trace, DipBelow predicate) {
    std::vector<Index> out;
    for (const auto& cp : trace.checkpoints) {
        if (cp.A < predicate.eps) out.push_back(cp.n);
    }
    if (out.empty()) throw Error(ErrorCode::EmptySelection, "no checkpoint with A_n < " + fmt(predicate.eps));
    return out;
}

std::vector<Index> extract_subsequence(const CesaroTrace& trace, PeakAbove predicate) {
    std::vector<Index> out;
    for (const auto& cp : trace.checkpoints) {
        if (cp.A > predicate.threshold) out.push_back(cp.n);
    }
    if (out.empty()) throw Error(ErrorCode::EmptySelection, "no checkpoint with A_n > " + fmt(predicate.threshold));
    return out;
}

void write_csv(const CesaroTrace& trace, std::ostream& out, const std::vector<std::string>& preamble) {
    for (const auto& line : preamble) out << "# " << line << '\n';
    out << "n,S,A\n";
    for (const auto& cp : trace.checkpoints) out << to_string(cp.n) << ',' << fmt(cp.S) << ',' << fmt(cp.A) << '\n';
}

}  // namespace mly::cesaro
