#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mly/core/block_schedule.hpp"
#include "mly/core/index.hpp"

namespace mly {

/// A maximal run [start, end) on which a sequence is constant.
struct Run {
    Index start;
    Index end;
    double value;
};

/// The scalar sequence (lambda_i) multiplying the shift powers.
class WeightSequence {
public:
    struct Constant {
        double c;
    };
    struct Polynomial {
        std::vector<double> coeffs;  // lambda_i = sum_k coeffs[k] * i^k
    };
    struct FromSchedule {
        std::shared_ptr<const BlockSchedule> schedule;
        double off_value;                // value on Zero blocks
        std::optional<double> on_value;  // value on Identity blocks; nullopt = block multiplier
    };

    static WeightSequence constant(double c);
    static WeightSequence polynomial(std::vector<double> coeffs);
    static WeightSequence from_schedule(std::shared_ptr<const BlockSchedule> schedule,
                                        double off_value = 0.0,
                                        std::optional<double> on_value = std::nullopt);

    /// lambda_i; throws ScheduleExhausted past a schedule's coverage.
    double at(Index i) const;

    /// Runs covering [first, last_exclusive) when the sequence is piecewise
    /// constant there; nullopt for polynomial rules of positive degree.
    std::optional<std::vector<Run>> runs(Index first, Index last_exclusive) const;

    /// sum_{i <= n} |lambda_i|, compensated.
    double abs_prefix_sum(Index n) const;

    /// Largest index at which at() is defined.
    Index defined_until() const noexcept;

    std::string describe() const;

private:
    using Rule = std::variant<Constant, Polynomial, FromSchedule>;
    explicit WeightSequence(Rule rule) : rule_(std::move(rule)) {}
    Rule rule_;
};

}  // namespace mly
