#include "mly/core/operator_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include "mly/core/error.hpp"
#include "mly/core/kahan.hpp"

namespace mly {
namespace {

struct ScalarBlocks {
    std::shared_ptr<const BlockSchedule> schedule;
};
struct ShiftPowers {
    WeightSequence weights;
};
struct ScaledIdentity {
    ScalarRule rule;
};
struct Scaling {
    std::vector<double> head;
    double tail;
    double weight(Index j) const {
        return j <= static_cast<Index>(head.size()) ? head[static_cast<std::size_t>(j - 1)] : tail;
    }
};
struct Composite {
    std::vector<OperatorSequenceSpec> components;
    CompositeRule rule;
};

/// sum_{idx > i} |x_idx|
double tail_mass(const Vector& x, Index i) {
    CompensatedSum sum;
    for (const auto& e : x.entries()) {
        if (e.index > i) sum.add(std::fabs(e.value));
    }
    return sum.value();
}

}  // namespace

struct OperatorSequenceSpec::State {
    Space space;
    std::string id;
    std::variant<ScalarBlocks, ShiftPowers, ScaledIdentity, Scaling, Composite> kind;
};

ScalarRule ScalarRule::constant_value(const Rational& c) {
    const double v = c.to_double();
    return {"const(" + c.to_string() + ")", [v](Index) { return v; }, c};
}

ScalarRule ScalarRule::power_of_two_spike() {
    return {"power2-spike",
            [](Index i) {
                // i = 2^n with n >= 1 (T_1 = I)
                if (i < 2 || (i & (i - 1)) != 0) return 1.0;
                int n = 0;
                while (i > 1) {
                    i >>= 1;
                    ++n;
                }
                return static_cast<double>(n);
            },
            std::nullopt};
}

OperatorSequenceSpec OperatorSequenceSpec::scalar_blocks(Space space, std::shared_ptr<const BlockSchedule> schedule,
                                                         std::string id) {
    if (!schedule) throw Error(ErrorCode::InvalidArgument, "null schedule");
    return OperatorSequenceSpec(std::make_shared<const State>(State{space, std::move(id), ScalarBlocks{std::move(schedule)}}));
}

OperatorSequenceSpec OperatorSequenceSpec::shift_powers(WeightSequence weights, std::string id) {
    return OperatorSequenceSpec(
        std::make_shared<const State>(State{Space::ell_one(), std::move(id), ShiftPowers{std::move(weights)}}));
}

OperatorSequenceSpec OperatorSequenceSpec::scaled_identity(Space space, ScalarRule rule, std::string id) {
    if (!rule.eval) throw Error(ErrorCode::InvalidArgument, "scalar rule without evaluator");
    return OperatorSequenceSpec(std::make_shared<const State>(State{space, std::move(id), ScaledIdentity{std::move(rule)}}));
}

OperatorSequenceSpec OperatorSequenceSpec::coordinate_scaling(Space space, std::vector<double> head, double tail,
                                                              std::string id) {
    if (space.kind == SpaceKind::RealFiniteDim && head.size() > space.dim) {
        throw Error(ErrorCode::SpaceMismatch, "more scaling weights than coordinates");
    }
    for (double w : head) {
        if (!std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "scaling weight must be finite");
    }
    if (!std::isfinite(tail)) throw Error(ErrorCode::InvalidArgument, "scaling weight must be finite");
    return OperatorSequenceSpec(
        std::make_shared<const State>(State{space, std::move(id), Scaling{std::move(head), tail}}));
}

OperatorSequenceSpec OperatorSequenceSpec::composite(std::vector<OperatorSequenceSpec> components, CompositeRule rule,
                                                     std::string id) {
    if (components.empty()) throw Error(ErrorCode::InvalidArgument, "composite needs components");
    const Space space = components.front().space();
    for (const auto& c : components) {
        if (!(c.space() == space)) throw Error(ErrorCode::SpaceMismatch, "composite components disagree on space");
    }
    return OperatorSequenceSpec(
        std::make_shared<const State>(State{space, std::move(id), Composite{std::move(components), rule}}));
}

SequenceKind OperatorSequenceSpec::kind() const noexcept {
    switch (state_->kind.index()) {
        case 0: return SequenceKind::ScalarBlockSchedule;
        case 1: return SequenceKind::WeightedShiftPowers;
        case 2: return SequenceKind::ScaledIdentityAt;
        case 3: return SequenceKind::CoordinateScaling;
        default: return SequenceKind::Composite;
    }
}

const Space& OperatorSequenceSpec::space() const noexcept { return state_->space; }
const std::string& OperatorSequenceSpec::id() const noexcept { return state_->id; }

const BlockSchedule* OperatorSequenceSpec::block_schedule() const noexcept {
    if (const auto* k = std::get_if<ScalarBlocks>(&state_->kind)) return k->schedule.get();
    return nullptr;
}

const WeightSequence* OperatorSequenceSpec::shift_weights() const noexcept {
    if (const auto* k = std::get_if<ShiftPowers>(&state_->kind)) return &k->weights;
    return nullptr;
}

void OperatorSequenceSpec::check(Index i, const Vector& x) const {
    require_valid_index(i);
    if (!(x.space() == state_->space)) {
        throw Error(ErrorCode::SpaceMismatch, "vector in " + x.space().to_string() + ", sequence acts on " +
                                                  state_->space.to_string());
    }
}

Vector OperatorSequenceSpec::apply(Index i, const Vector& x) const {
    check(i, x);
    const auto& kind = state_->kind;
    if (const auto* k = std::get_if<ScalarBlocks>(&kind)) {
        return x.scaled(k->schedule->multiplier_at(i).to_double());
    }
    if (const auto* k = std::get_if<ShiftPowers>(&kind)) {
        if (i >= x.support_max()) return Vector(x.space());
        const double lambda = k->weights.at(i);
        std::vector<Entry> out;
        for (const auto& e : x.entries()) {
            if (e.index > i) out.push_back({e.index - i, lambda * e.value});
        }
        return Vector(x.space(), std::move(out));
    }
    if (const auto* k = std::get_if<ScaledIdentity>(&kind)) {
        return x.scaled(k->rule.eval(i));
    }
    if (const auto* k = std::get_if<Scaling>(&kind)) {
        std::vector<Entry> out;
        for (const auto& e : x.entries()) out.push_back({e.index, k->weight(e.index) * e.value});
        return Vector(x.space(), std::move(out));
    }
    const auto& c = std::get<Composite>(kind);
    if (c.rule == CompositeRule::Alternate) {
        return c.components[static_cast<std::size_t>((i - 1) % c.components.size())].apply(i, x);
    }
    Vector out = x;
    for (auto it = c.components.rbegin(); it != c.components.rend(); ++it) out = it->apply(i, out);
    return out;
}

double OperatorSequenceSpec::image_norm(Index i, const Vector& x) const {
    check(i, x);
    const auto& kind = state_->kind;
    if (const auto* k = std::get_if<ScalarBlocks>(&kind)) {
        return std::fabs(k->schedule->multiplier_at(i).to_double()) * x.norm();
    }
    if (const auto* k = std::get_if<ShiftPowers>(&kind)) {
        if (i >= x.support_max()) return 0.0;
        return std::fabs(k->weights.at(i)) * tail_mass(x, i);
    }
    if (const auto* k = std::get_if<ScaledIdentity>(&kind)) {
        return std::fabs(k->rule.eval(i)) * x.norm();
    }
    return apply(i, x).norm();
}

double OperatorSequenceSpec::operator_norm_bound(Index i) const {
    require_valid_index(i);
    const auto& kind = state_->kind;
    if (const auto* k = std::get_if<ScalarBlocks>(&kind)) {
        return std::fabs(k->schedule->multiplier_at(i).to_double());
    }
    if (const auto* k = std::get_if<ShiftPowers>(&kind)) {
        // ||B^i|| = 1 on l^1
        return std::fabs(k->weights.at(i));
    }
    if (const auto* k = std::get_if<ScaledIdentity>(&kind)) return std::fabs(k->rule.eval(i));
    if (const auto* k = std::get_if<Scaling>(&kind)) {
        double bound = std::fabs(k->tail);
        for (double w : k->head) bound = std::max(bound, std::fabs(w));
        return bound;
    }
    const auto& c = std::get<Composite>(kind);
    if (c.rule == CompositeRule::Alternate) {
        return c.components[static_cast<std::size_t>((i - 1) % c.components.size())].operator_norm_bound(i);
    }
    double bound = 1.0;
    for (const auto& comp : c.components) bound *= comp.operator_norm_bound(i);
    return bound;
}

Index OperatorSequenceSpec::defined_until() const noexcept {
    const auto& kind = state_->kind;
    if (const auto* k = std::get_if<ScalarBlocks>(&kind)) return k->schedule->last_index();
    if (const auto* k = std::get_if<ShiftPowers>(&kind)) return k->weights.defined_until();
    if (const auto* k = std::get_if<Composite>(&kind)) {
        Index until = kMaxIndex;
        for (const auto& comp : k->components) until = std::min(until, comp.defined_until());
        return until;
    }
    return kMaxIndex;
}

std::optional<std::vector<NormSegment>> OperatorSequenceSpec::norm_profile(const Vector& x, Index horizon) const {
    if (horizon == 0) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
    check(horizon, x);
    const Index end = horizon + 1;
    const double xnorm = x.norm();
    std::vector<NormSegment> out;
    const auto& kind = state_->kind;

    if (const auto* k = std::get_if<ScalarBlocks>(&kind)) {
        if (horizon > k->schedule->last_index()) {
            throw Error(ErrorCode::ScheduleExhausted, "horizon " + to_string(horizon) + " beyond schedule coverage " +
                                                          to_string(k->schedule->last_index()));
        }
        for (const auto& b : k->schedule->blocks()) {
            if (b.start >= end) break;
            const Rational m = b.effective().abs();
            out.push_back({b.start, std::min(b.end, end), m.to_double() * xnorm, m});
        }
        return out;
    }
    if (const auto* k = std::get_if<ScaledIdentity>(&kind)) {
        if (!k->rule.constant) return std::nullopt;
        const Rational m = k->rule.constant->abs();
        out.push_back({1, end, m.to_double() * xnorm, m});
        return out;
    }
    if (std::holds_alternative<Scaling>(kind)) {
        out.push_back({1, end, apply(1, x).norm(), std::nullopt});
        return out;
    }
    if (const auto* k = std::get_if<ShiftPowers>(&kind)) {
        const Index support = x.support_max();
        const Index live_end = std::min(support, end);  // ||T_i x|| = 0 for i >= support
        if (live_end > 1) {
            auto weights = k->weights.runs(1, live_end);
            if (!weights) return std::nullopt;
            // tail mass is constant on [j_k, j_{k+1}) between consecutive support indices
            const auto entries = x.entries();
            std::vector<double> suffix(entries.size() + 1, 0.0);
            {
                CompensatedSum sum;
                for (std::size_t p = entries.size(); p-- > 0;) {
                    sum.add(std::fabs(entries[p].value));
                    suffix[p] = sum.value();
                }
            }
            std::vector<Run> tails;
            Index cursor = 1;
            for (std::size_t p = 0; p < entries.size() && cursor < live_end; ++p) {
                const Index stop = std::min(entries[p].index, live_end);
                if (stop > cursor) tails.push_back({cursor, stop, suffix[p]});
                cursor = std::max(cursor, stop);
            }
            std::size_t a = 0;
            std::size_t b = 0;
            Index pos = 1;
            while (pos < live_end) {
                while ((*weights)[a].end <= pos) ++a;
                while (tails[b].end <= pos) ++b;
                const Index stop = std::min((*weights)[a].end, tails[b].end);
                out.push_back({pos, stop, std::fabs((*weights)[a].value) * tails[b].value, std::nullopt});
                pos = stop;
            }
        }
        const Index zero_from = std::max<Index>(live_end, 1);
        if (zero_from < end) out.push_back({zero_from, end, 0.0, std::nullopt});
        return out;
    }
    return std::nullopt;
}

}  // namespace mly
