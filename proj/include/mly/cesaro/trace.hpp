#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mly/core/operator_sequence.hpp"
#include "mly/core/rational.hpp"
#include "mly/core/vector.hpp"

namespace mly::cesaro {

/// Which indices n a trace records.
struct CheckpointRule {
    enum class Kind { All, Geometric, BlockBoundaries, Default, Explicit };

    Kind kind = Kind::Default;
    double ratio = 1.1;
    std::vector<Index> points;  // Explicit only

    static CheckpointRule all() { return {Kind::All, 1.1, {}}; }
    static CheckpointRule geometric(double ratio);
    static CheckpointRule block_boundaries() { return {Kind::BlockBoundaries, 1.1, {}}; }
    /// Block boundaries united with a ratio-1.1 geometric grid.
    static CheckpointRule standard() { return {Kind::Default, 1.1, {}}; }
    static CheckpointRule explicit_points(std::vector<Index> points);

    std::string describe() const;
};

/// Geometric index grid 1 = g_0 < g_1 < ... <= horizon with
/// g_{k+1} = max(g_k + 1, floor(ratio * g_k)); horizon always included.
std::vector<Index> geometric_grid(Index horizon, double ratio);

struct Checkpoint {
    Index n;
    double S;  // sum_{i <= n} ||T_i x||
    double A;  // S / n
    /// Exact-path only: S / ||x|| as a rational.
    std::optional<Rational> exact_sum;

    /// A_n / ||x|| exactly; requires exact_sum.
    Rational exact_average() const;
};

/// Checkpointed Cesaro averages of one orbit. Besides the rule's checkpoints
/// the trace always records the horizon and the indices of the global
/// maximum and minimum of A_n over 1..horizon.
struct CesaroTrace {
    std::vector<Checkpoint> checkpoints;
    Index horizon = 0;
    std::string spec_id;
    std::string vector_id;
    double xnorm = 0.0;
    bool exact = false;
    bool block_accelerated = false;
    Checkpoint peak{};    // max_n A_n, earliest on ties
    Checkpoint trough{};  // min_n A_n, earliest on ties

    /// Checkpoint at exactly n, or nullptr.
    const Checkpoint* at(Index n) const;
    const Checkpoint& last() const { return checkpoints.back(); }
};

/// Index-by-index evaluation of ||T_i x||: O(horizon) work, O(#checkpoints) memory.
CesaroTrace stream_trace(const OperatorSequenceSpec& spec, const Vector& x, Index horizon,
                         const CheckpointRule& rule = CheckpointRule::standard());

/// O(#segments) evaluation from the piecewise-constant norm profile.
/// Throws NotBlockStructured when the spec has no such profile for x.
CesaroTrace block_trace(const OperatorSequenceSpec& spec, const Vector& x, Index horizon,
                        const CheckpointRule& rule = CheckpointRule::standard());

/// block_trace when available, otherwise stream_trace.
CesaroTrace compute_trace(const OperatorSequenceSpec& spec, const Vector& x, Index horizon,
                          const CheckpointRule& rule = CheckpointRule::standard());

struct TailMinimum {
    Index window_start;
    double min_average;
};

struct ExtremaSummary {
    std::vector<TailMinimum> running_min_tail;  // windows starting at 1, 10, 100, ...
    Index argmax = 0;
    double max_average = 0.0;
    std::vector<Index> dip_witnesses;   // A_n < eps
    std::vector<Index> peak_witnesses;  // A_n > M
};

ExtremaSummary extrema(const CesaroTrace& trace, double eps, double peak_threshold);

struct DipBelow {
    double eps;
};
struct PeakAbove {
    double threshold;
};

/// Checkpoint indices with A_n < eps (resp. A_n > M), strictly increasing.
/// Throws EmptySelection when none qualifies.
std::vector<Index> extract_subsequence(const CesaroTrace& trace, DipBelow predicate);
std::vector<Index> extract_subsequence(const CesaroTrace& trace, PeakAbove predicate);

/// CSV with header `n,S,A`; `preamble` lines are written first, each prefixed by "# ".
void write_csv(const CesaroTrace& trace, std::ostream& out, const std::vector<std::string>& preamble = {});

}  // namespace mly::cesaro
