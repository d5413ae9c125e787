#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mly/core/block_schedule.hpp"
#include "mly/core/rational.hpp"
#include "mly/core/vector.hpp"
#include "mly/core/weights.hpp"

namespace mly {

/// index -> scalar rule for T_i = rule(i) * I. `constant` is set when the
/// rule does not depend on i, which lets traces skip per-index evaluation.
struct ScalarRule {
    std::string name;
    std::function<double(Index)> eval;
    std::optional<Rational> constant;

    static ScalarRule constant_value(const Rational& c);
    /// n at i = 2^n (n >= 1), 1 elsewhere.
    static ScalarRule power_of_two_spike();
};

enum class SequenceKind { ScalarBlockSchedule, WeightedShiftPowers, ScaledIdentityAt, CoordinateScaling, Composite };
enum class CompositeRule {
    Alternate,  // T_i = components[(i-1) mod k]_i
    Product,    // T_i = components[0]_i o components[1]_i o ...
};

/// One constant piece of the orbit-norm profile i -> ||T_i x||.
/// `exact` is the norm divided by ||x||, present only when it is an exact
/// rational (scalar block schedules).
struct NormSegment {
    Index start;
    Index end;  // exclusive
    double value;
    std::optional<Rational> exact;
};

/// Immutable description of a sequence (T_i) of bounded operators.
/// Copies share state.
class OperatorSequenceSpec {
public:
    static OperatorSequenceSpec scalar_blocks(Space space, std::shared_ptr<const BlockSchedule> schedule,
                                              std::string id);
    static OperatorSequenceSpec shift_powers(WeightSequence weights, std::string id);
    static OperatorSequenceSpec scaled_identity(Space space, ScalarRule rule, std::string id);
    /// (T_i x)_j = w_j x_j for every i, with w_j = head[j-1] for j <= head.size() and `tail` beyond.
    static OperatorSequenceSpec coordinate_scaling(Space space, std::vector<double> head, double tail,
                                                   std::string id);
    static OperatorSequenceSpec composite(std::vector<OperatorSequenceSpec> components, CompositeRule rule,
                                          std::string id);

    SequenceKind kind() const noexcept;
    const Space& space() const noexcept;
    const std::string& id() const noexcept;

    /// T_i x. Throws SpaceMismatch, IndexOverflow, ScheduleExhausted.
    Vector apply(Index i, const Vector& x) const;
    /// ||T_i x||, without materializing the image for scalar and shift kinds.
    double image_norm(Index i, const Vector& x) const;
    /// A finite bound on ||T_i||.
    double operator_norm_bound(Index i) const;

    /// Schedule for ScalarBlockSchedule specs, else nullptr.
    const BlockSchedule* block_schedule() const noexcept;
    /// Weights for WeightedShiftPowers specs, else nullptr.
    const WeightSequence* shift_weights() const noexcept;

    /// Piecewise-constant pieces of i -> ||T_i x|| tiling [1, horizon], or
    /// nullopt when the profile is not known to be piecewise constant.
    std::optional<std::vector<NormSegment>> norm_profile(const Vector& x, Index horizon) const;

    /// Largest index at which every T_i is defined.
    Index defined_until() const noexcept;

    struct State;

private:
    explicit OperatorSequenceSpec(std::shared_ptr<const State> state) : state_(std::move(state)) {}
    void check(Index i, const Vector& x) const;
    std::shared_ptr<const State> state_;
};

}  // namespace mly
