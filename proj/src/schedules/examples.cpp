#include "mly/schedules/examples.hpp"

#include <json.hpp>

#include "mly/core/error.hpp"

namespace mly::schedules {
namespace {

Index factorial(int n) {
    Index out = 1;
    for (int k = 2; k <= n; ++k) out = checked_mul(out, static_cast<Index>(k));
    return out;
}

void require_positive(int n, const char* what) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be >= 1");
}

}  // namespace

Index factorial_a(int n) {
    require_positive(n, "factorial block index");
    return checked_mul(2, factorial(n)) - 1;
}

Index factorial_b(int n) {
    require_positive(n, "factorial block index");
    return checked_add(factorial(n + 1), factorial(n)) - 1;
}

Index cubic_c(int n) {
    require_positive(n, "cubic block index");
    Index c = 1;
    for (int k = 1; k < n; ++k) c = checked_add(cubic_d(k), static_cast<Index>(k));
    return c;
}

Index cubic_d(int n) {
    require_positive(n, "cubic block index");
    const Index c = cubic_c(n);
    const auto cube = static_cast<Index>(n) * static_cast<Index>(n) * static_cast<Index>(n);
    return checked_add(c, checked_mul(cube, c));
}

std::shared_ptr<const BlockSchedule> factorial_schedule(int depth) {
    if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
    if (depth > kMaxFactorialDepth) {
        throw Error(ErrorCode::Overflow, "factorial schedule depth " + std::to_string(depth) +
                                             " needs a_{depth+1} beyond 2^127 - 1");
    }
    std::vector<Block> blocks;
    for (int n = 1; n <= depth; ++n) {
        const Index a = factorial_a(n);
        const Index b = factorial_b(n);
        const Index next = factorial_a(n + 1);
        blocks.push_back({a, b, Rational(0), BlockOperator::Zero});
        blocks.push_back({b, next, Rational(2), BlockOperator::Identity});
    }
    return std::make_shared<const BlockSchedule>(std::move(blocks), GeneratorTag::Factorial);
}

std::shared_ptr<const BlockSchedule> cubic_schedule(int depth) {
    if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
    if (depth > kMaxCubicDepth) {
        throw Error(ErrorCode::Overflow, "cubic schedule depth " + std::to_string(depth) +
                                             " needs c_{depth+1} beyond 2^127 - 1");
    }
    std::vector<Block> blocks;
    Index c = 1;
    for (int n = 1; n <= depth; ++n) {
        const auto cube = static_cast<Index>(n) * static_cast<Index>(n) * static_cast<Index>(n);
        const Index d = checked_add(c, checked_mul(cube, c));
        const Index next = checked_add(d, static_cast<Index>(n));
        blocks.push_back({c, d, Rational(0), BlockOperator::Zero});
        blocks.push_back({d, next, Rational::from_index(next), BlockOperator::Identity});
        c = next;
    }
    return std::make_shared<const BlockSchedule>(std::move(blocks), GeneratorTag::Cubic);
}

OperatorSequenceSpec factorial_example(int depth, Space space) {
    return OperatorSequenceSpec::scalar_blocks(space, factorial_schedule(depth),
                                               "factorial(depth=" + std::to_string(depth) + ")");
}

OperatorSequenceSpec cubic_example(int depth, Space space) {
    return OperatorSequenceSpec::scalar_blocks(space, cubic_schedule(depth),
                                               "cubic(depth=" + std::to_string(depth) + ")");
}

OperatorSequenceSpec power2_spike_example(Space space) {
    return OperatorSequenceSpec::scaled_identity(space, ScalarRule::power_of_two_spike(), "power2");
}

OperatorSequenceSpec constant_example(const Rational& c, Space space) {
    return OperatorSequenceSpec::scaled_identity(space, ScalarRule::constant_value(c), "const(" + c.to_string() + ")");
}

OperatorSequenceSpec constant_shift(double c) {
    auto w = WeightSequence::constant(c);
    return OperatorSequenceSpec::shift_powers(w, "shift(" + w.describe() + ")");
}

OperatorSequenceSpec alternating_shift_scaling() {
    const auto diag = OperatorSequenceSpec::coordinate_scaling(Space::ell_one(), {1.0, 2.0}, 1.0, "diag(1,2,1,...)");
    return OperatorSequenceSpec::composite({constant_shift(1.0), diag}, CompositeRule::Alternate,
                                           "alternate(B^i,diag(1,2,1,...))");
}

OperatorSequenceSpec cubic_weighted_shift(int depth) {
    return OperatorSequenceSpec::shift_powers(WeightSequence::from_schedule(cubic_schedule(depth)),
                                              "cubic-shift(depth=" + std::to_string(depth) + ")");
}

ClosedForm closed_form_factorial_average(int n, FactorialPoint at, double xnorm) {
    if (n < 2 || n > 20) throw Error(ErrorCode::Overflow, "closed forms are evaluated for 2 <= n <= 20");
    const Rational fn = Rational::from_index(factorial(n));
    const Rational fn1 = Rational::from_index(factorial(n + 1));
    if (at == FactorialPoint::EndOfZeroBlock) {
        // f(b_n - 1) = 2(n! - 1) / ((n+1)! + n! - 2)
        return {Rational(2) * (fn - Rational(1)) / (fn1 + fn - Rational(2)), factorial_b(n) - 1, xnorm};
    }
    // f(a_{n+1} - 1) = 2((n+1)! - 1) / (2(n+1)! - 2)
    return {Rational(2) * (fn1 - Rational(1)) / (Rational(2) * fn1 - Rational(2)), factorial_a(n + 1) - 1, xnorm};
}

Rational cubic_partial_sum_at_dip(int n) {
    require_positive(n, "cubic block index");
    Rational sum(0);
    for (int j = 2; j <= n; ++j) sum += Rational(j - 1) * Rational::from_index(cubic_c(j));
    return sum;
}

Rational cubic_partial_sum_at_peak(int n) {
    return cubic_partial_sum_at_dip(n + 1);
}

std::string dump_schedule_json(const BlockSchedule& schedule) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& b : schedule.blocks()) {
        out.push_back({{"start", to_string(b.start)},
                       {"end", to_string(b.end)},
                       {"multiplier", b.effective().to_string()}});
    }
    return out.dump(2);
}

std::shared_ptr<const BlockSchedule> load_schedule_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("schedule JSON: ") + e.what());
    }
    if (!doc.is_array()) throw Error(ErrorCode::InvalidArgument, "schedule JSON must be an array");
    std::vector<Block> blocks;
    for (const auto& item : doc) {
        auto field = [&](const char* key) -> std::string {
            if (!item.contains(key)) throw Error(ErrorCode::InvalidArgument, std::string("block missing ") + key);
            const auto& v = item.at(key);
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer()) return std::to_string(v.get<long long>());
            throw Error(ErrorCode::InvalidArgument, std::string("block field ") + key + " must be a decimal string");
        };
        const Rational m = Rational::parse(field("multiplier"));
        blocks.push_back({parse_index(field("start")), parse_index(field("end")), m,
                          m.is_zero() ? BlockOperator::Zero : BlockOperator::Identity});
    }
    return std::make_shared<const BlockSchedule>(std::move(blocks), GeneratorTag::Custom);
}

}  // namespace mly::schedules
