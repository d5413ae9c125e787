#pragma once

// Generators for the explicit operator sequences studied in the lab and
// exact evaluators for their displayed Cesaro partial sums.

#include <iosfwd>
#include <memory>
#include <string>

#include "mly/core/block_schedule.hpp"
#include "mly/core/operator_sequence.hpp"
#include "mly/core/rational.hpp"

namespace mly::schedules {

inline constexpr int kMaxFactorialDepth = 32;
inline constexpr int kMaxCubicDepth = 15;

/// a_n = 2 n! - 1 and b_n = (n+1)! + n! - 1, exact. Throws Overflow past 2^127 - 1.
Index factorial_a(int n);
Index factorial_b(int n);
/// c_1 = 1, d_n = c_n + n^3 c_n, c_{n+1} = d_n + n, exact.
Index cubic_c(int n);
Index cubic_d(int n);

/// Zero on [a_n, b_n), 2I on [b_n, a_{n+1}) for n = 1..depth; covers [1, a_{depth+1}).
std::shared_ptr<const BlockSchedule> factorial_schedule(int depth);
/// Zero on [c_n, d_n), c_{n+1} I on [d_n, c_{n+1}) for n = 1..depth; covers [1, c_{depth+1}).
std::shared_ptr<const BlockSchedule> cubic_schedule(int depth);

OperatorSequenceSpec factorial_example(int depth, Space space = Space::real_line());
OperatorSequenceSpec cubic_example(int depth, Space space = Space::real_line());
/// T_i = n I at i = 2^n (n >= 1), T_i = I otherwise.
OperatorSequenceSpec power2_spike_example(Space space = Space::real_line());
/// T_i = c I for every i.
OperatorSequenceSpec constant_example(const Rational& c, Space space = Space::real_line());

/// T_i = lambda B^i on l^1 with lambda == c.
OperatorSequenceSpec constant_shift(double c = 1.0);
/// T_i = lambda_i B^i with lambda_i the cubic schedule values (0 on [c_n, d_n), c_{n+1} on [d_n, c_{n+1})).
OperatorSequenceSpec cubic_weighted_shift(int depth = kMaxCubicDepth);
/// Odd i: B^i. Even i: the diagonal diag(1, 2, 1, 1, ...). Does not almost-commute.
OperatorSequenceSpec alternating_shift_scaling();

enum class FactorialPoint { EndOfZeroBlock, EndOfOnBlock };

/// A_k / |x| at k = b_n - 1 (EndOfZeroBlock) or k = a_{n+1} - 1 (EndOfOnBlock),
/// as an exact rational. Valid for 2 <= n <= 20.
struct ClosedForm {
    Rational coefficient;  // A_k = coefficient * |x|
    Index at;              // the index k
    double xnorm;
    double value() const { return coefficient.to_double() * xnorm; }
};
ClosedForm closed_form_factorial_average(int n, FactorialPoint at, double xnorm = 1.0);

/// sum_{j=2}^{n} (j-1) c_j, the exact value of S_{d_n - 1} / |x| for the cubic example.
Rational cubic_partial_sum_at_dip(int n);
/// sum_{j=2}^{n+1} (j-1) c_j, the exact value of S_{c_{n+1} - 1} / |x|.
Rational cubic_partial_sum_at_peak(int n);

/// JSON array of {start, end, multiplier}, integers as decimal strings.
std::string dump_schedule_json(const BlockSchedule& schedule);
/// Inverse of dump_schedule_json; multiplier "0" marks a Zero block. Tag is Custom.
std::shared_ptr<const BlockSchedule> load_schedule_json(const std::string& text);

}  // namespace mly::schedules
