#include "mly/core/weights.hpp"

#include <cmath>
#include <cstdio>

#include "mly/core/error.hpp"
#include "mly/core/kahan.hpp"

namespace mly {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double schedule_value(const WeightSequence::FromSchedule& rule, const Block& b) {
    if (b.op == BlockOperator::Zero) return rule.off_value;
    return rule.on_value ? *rule.on_value : b.multiplier.to_double();
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

WeightSequence WeightSequence::constant(double c) {
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "weight must be finite");
    return WeightSequence(Constant{c});
}

WeightSequence WeightSequence::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw Error(ErrorCode::InvalidArgument, "polynomial needs coefficients");
    for (double c : coeffs) {
        if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "coefficient must be finite");
    }
    return WeightSequence(Polynomial{std::move(coeffs)});
}

WeightSequence WeightSequence::from_schedule(std::shared_ptr<const BlockSchedule> schedule,
                                             double off_value, std::optional<double> on_value) {
    if (!schedule) throw Error(ErrorCode::InvalidArgument, "null schedule");
    return WeightSequence(FromSchedule{std::move(schedule), off_value, on_value});
}

double WeightSequence::at(Index i) const {
    require_valid_index(i);
    return std::visit(
        overloaded{
            [](const Constant& r) { return r.c; },
            [i](const Polynomial& r) {
                const double x = to_double(i);
                double acc = 0.0;
                for (auto it = r.coeffs.rbegin(); it != r.coeffs.rend(); ++it) acc = acc * x + *it;
                if (!std::isfinite(acc)) throw Error(ErrorCode::Overflow, "polynomial weight overflows binary64");
                return acc;
            },
            [i](const FromSchedule& r) { return schedule_value(r, r.schedule->block_at(i)); },
        },
        rule_);
}

std::optional<std::vector<Run>> WeightSequence::runs(Index first, Index last_exclusive) const {
    std::vector<Run> out;
    if (first >= last_exclusive) return out;
    return std::visit(
        overloaded{
            [&](const Constant& r) -> std::optional<std::vector<Run>> {
                out.push_back({first, last_exclusive, r.c});
                return out;
            },
            [&](const Polynomial& r) -> std::optional<std::vector<Run>> {
                for (std::size_t k = 1; k < r.coeffs.size(); ++k) {
                    if (r.coeffs[k] != 0.0) return std::nullopt;
                }
                out.push_back({first, last_exclusive, r.coeffs.front()});
                return out;
            },
            [&](const FromSchedule& r) -> std::optional<std::vector<Run>> {
                if (last_exclusive > r.schedule->coverage_end()) {
                    throw Error(ErrorCode::ScheduleExhausted,
                                "weights requested up to " + to_string(last_exclusive - 1) +
                                    " beyond schedule coverage");
                }
                const auto blocks = r.schedule->blocks();
                for (std::size_t k = r.schedule->block_position(first); k < blocks.size(); ++k) {
                    const Block& b = blocks[k];
                    if (b.start >= last_exclusive) break;
                    const Index s = b.start < first ? first : b.start;
                    const Index e = b.end > last_exclusive ? last_exclusive : b.end;
                    out.push_back({s, e, schedule_value(r, b)});
                }
                return out;
            },
        },
        rule_);
}

double WeightSequence::abs_prefix_sum(Index n) const {
    if (n == 0) return 0.0;
    if (auto rs = runs(1, n + 1)) {
        CompensatedSum sum;
        for (const auto& r : *rs) sum.add(to_double(r.end - r.start) * std::fabs(r.value));
        return sum.value();
    }
    CompensatedSum sum;
    for (Index i = 1; i <= n; ++i) sum.add(std::fabs(at(i)));
    return sum.value();
}

Index WeightSequence::defined_until() const noexcept {
    if (const auto* r = std::get_if<FromSchedule>(&rule_)) return r->schedule->last_index();
    return kMaxIndex;
}

std::string WeightSequence::describe() const {
    return std::visit(
        overloaded{
            [](const Constant& r) { return "const(" + fmt(r.c) + ")"; },
            [](const Polynomial& r) {
                std::string s = "poly(";
                for (std::size_t k = 0; k < r.coeffs.size(); ++k) s += (k ? "," : "") + fmt(r.coeffs[k]);
                return s + ")";
            },
            [](const FromSchedule& r) {
                std::string s = "schedule(" + std::string(to_string(r.schedule->tag())) + ",until=" +
                                to_string(r.schedule->last_index()) + ",off=" + fmt(r.off_value);
                if (r.on_value) s += ",on=" + fmt(*r.on_value);
                return s + ")";
            },
        },
        rule_);
}

}  // namespace mly
