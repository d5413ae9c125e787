#pragma once

#include <utility>
#include <vector>

#include "mly/cesaro/trace.hpp"
#include "mly/core/weights.hpp"

namespace mly::shiftlab {

struct LambdaPoint {
    Index n;
    double S;  // sum_{i <= n} |lambda_i|
    double L;  // S / n
};

/// Partial averages L_n of |lambda_i|. Piecewise-constant weights are walked
/// run by run; polynomial weights are summed index by index (horizon <= 5e7).
struct LambdaProfile {
    std::vector<LambdaPoint> points;
    Index horizon = 0;
    double max_L = 0.0;
    Index argmax = 0;  // earliest on ties

    const LambdaPoint* at(Index n) const;
};

LambdaProfile lambda_profile(const WeightSequence& weights, Index horizon,
                             const cesaro::CheckpointRule& rule = cesaro::CheckpointRule::standard());

enum class LambdaVerdict { UnboundedEvidence, BoundedAtHorizon };

const char* to_string(LambdaVerdict v);

struct LambdaCriterion {
    double max_L;
    Index witness;
    LambdaVerdict verdict;  // UnboundedEvidence iff max_L > M
};

LambdaCriterion lambda_criterion(const WeightSequence& weights, Index horizon, double m);

/// Tail-split check of A_n(x) under T_i = lambda_i B^i for weights with
/// L_n <= C on [1, horizon].
struct VanishingReport {
    double C = 0.0;
    double eps = 0.0;
    double bound = 0.0;   // eps + eps^2 / C
    Index n0_tail = 0;    // min N with sum_{j > N} |x_j| < eps / C
    Index n1_average = 0; // min n with ||x|| Lambda(N0) / n <= eps^2 / C
    std::size_t checked = 0;
    double max_after = 0.0;  // max A_n over checkpoints n >= n1_average
    bool holds = true;       // max_after <= bound
    bool split_bound_ok = true;  // A_n <= (||x|| Lambda(N0) + (eps/C)(Lambda(n) - Lambda(N0))) / n everywhere
    cesaro::CesaroTrace trace;
};

/// Throws SpaceMismatch unless x lies in l^1.
VanishingReport verify_bounded_implies_vanishing(const WeightSequence& weights, const Vector& x, double eps,
                                                 Index horizon);

/// Difference traces of finitely supported pairs: with J the support of
/// d = x - y, n A_n(d) is frozen from n = J - 1 on and bounded by
/// ||d|| Lambda(J - 1).
struct AsymptoticRow {
    Index support = 0;
    double frozen_sum = 0.0;  // n A_n(d) for n >= J - 1
    double bound = 0.0;       // ||d|| Lambda(J - 1)
    double tail_average = 0.0;  // A at the horizon
    bool holds = true;
};

struct AsymptoticReport {
    std::vector<AsymptoticRow> rows;
    bool holds = true;
};

AsymptoticReport mean_asymptotic_core(const WeightSequence& weights, const std::vector<std::pair<Vector, Vector>>& pairs,
                                      Index horizon);

}  // namespace mly::shiftlab
