#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mly/cesaro/trace.hpp"
#include "mly/core/operator_sequence.hpp"
#include "mly/core/vector.hpp"

namespace mly::classify {

/// Finite-horizon tolerances. Requires 0 < eps_dip < delta <= m_peak.
struct Thresholds {
    double eps_dip = 0.05;
    double delta = 1.0;
    double m_peak = 10.0;
    Index horizon = 0;  // 0: the spec's full range
    int k_growth = 4;

    void validate() const;
    /// `horizon` if set, else the largest index the spec is defined at.
    Index resolve_horizon(const OperatorSequenceSpec& spec) const;
    nlohmann::ordered_json to_json() const;
};

enum class Verdict {
    MeanAsymptoticAtHorizon,
    MeanProximalAtHorizon,
    LiYorkeDelta,
    ExtremeAtHorizon,
    SemiIrregularAtHorizon,
    IrregularAtHorizon,
    MSWitness,
    MEEvidence,
    Positive,
    Negative,
};

std::string to_string(Verdict v);

struct Witness {
    std::string kind;  // "dip", "peak", "max", "tail-max", "acb", "growth", ...
    Index n;
    double value;
    std::string note;
};

struct Report {
    std::string subject;  // "sequence", "pair(x,y)", "vector(x)"
    std::string spec_id;
    std::vector<Verdict> verdicts;
    std::vector<Witness> witnesses;
    Thresholds thresholds;
    Index horizon = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();

    bool has(Verdict v) const;
    nlohmann::ordered_json to_json() const;
};

/// Dip indices (A_n < eps) of a trace. A dip only counts after the orbit
/// has shown positive mass, i.e. strictly after the first checkpoint with
/// A_n > 0; an identically zero trace dips everywhere.
std::vector<Index> dips(const cesaro::CesaroTrace& trace, double eps);

/// Checkpoints with A_n > threshold.
std::vector<Index> peaks(const cesaro::CesaroTrace& trace, double threshold);

// -- absolute Cesaro boundedness and sensitivity ---------------------------

struct AcbEstimate {
    double c_hat = 0.0;
    std::size_t sample = 0;  // position in the sample list
    Index n = 0;
};

/// max over samples and n <= horizon of A_n(x)/||x||. Zero samples are
/// skipped; throws EmptySamples when nothing remains.
AcbEstimate estimate_acb_constant(const OperatorSequenceSpec& spec, const std::vector<Vector>& samples,
                                  Index horizon);

struct SensitivityWitness {
    std::size_t candidate;
    Index n;
    double average;     // A_n(y)
    double normalized;  // A_n(y) / ||y||
};

/// First candidate (in list order) whose normalized average exceeds m_peak,
/// with the earliest such checkpoint.
std::optional<SensitivityWitness> mean_sensitivity_witness(const OperatorSequenceSpec& spec,
                                                           const std::vector<Vector>& candidates,
                                                           const Thresholds& t);

/// y = x + (eps / (2 ||x0||)) x0. Throws ZeroDirection, InvalidArgument.
Vector irregularize(const Vector& x, const Vector& x0, double eps);

/// Candidate directions used when the caller supplies none: 1 on the line,
/// the basis and its sum in R^d, and for weighted shifts e_2..e_9 plus e_{s+1}
/// for every run start s of the weights below the spec's range.
std::vector<Vector> default_samples(const OperatorSequenceSpec& spec);

// -- pairs and vectors -----------------------------------------------------

/// Pair taxonomy of the orbit difference d (what classify_pair runs on x - y).
Report classify_difference(const OperatorSequenceSpec& spec, const Vector& d, const Thresholds& t);

/// Throws DegeneratePair when x == y.
Report classify_pair(const OperatorSequenceSpec& spec, const Vector& x, const Vector& y, const Thresholds& t);

/// Throws ZeroVector.
Report detect_irregular_vector(const OperatorSequenceSpec& spec, const Vector& x, const Thresholds& t);

/// Exactly one of MSWitness / MEEvidence.
Report dichotomy_report(const OperatorSequenceSpec& spec, const std::vector<Vector>& samples, const Thresholds& t);

// -- structural checks -----------------------------------------------------

struct SubmultResult {
    std::optional<double> c_min;  // set when no violation was found
    struct Violation {
        std::size_t sample;
        Index i, m;
        double lhs;  // ||T_{i+m} z|| > 0 while ||T_i T_m z|| = 0
    };
    std::optional<Violation> violation;
    std::size_t checked = 0;
    std::size_t skipped = 0;  // 0/0 ratios
};

/// max ||T_{i+m} z|| / ||T_i T_m z|| over samples and pairs.
SubmultResult check_submultiplicative(const OperatorSequenceSpec& spec, const std::vector<Vector>& samples,
                                      const std::vector<std::pair<Index, Index>>& index_pairs);

/// All (i, m) with 1 <= i, m <= limit.
std::vector<std::pair<Index, Index>> index_grid(Index limit);

struct CommuteProfile {
    std::vector<std::pair<Index, double>> points;  // (i, ||T_i T_k x - T_k T_i x||)
    double tail_max = 0.0;                         // over the last decade of i
    bool persists = false;                         // tail_max > tol
    double tol = 0.0;
};

CommuteProfile check_almost_commuting(const OperatorSequenceSpec& spec, const Vector& x, Index k, Index horizon,
                                      double tol = 0.1);

struct InvariantReport {
    struct Row {
        Index k;
        std::size_t sample;
        double max_average;  // max over the N sequence of A_N(T_k x)
    };
    std::vector<Row> rows;
    double max_observed = 0.0;
    bool holds = true;
    double tol = 0.0;
};

/// Checks that A_N(T_k x) stays below tol along the supplied N sequence.
InvariantReport verify_invariant_subspace(const OperatorSequenceSpec& spec, const std::vector<Vector>& samples,
                                          const std::vector<Index>& n_sequence, const std::vector<Index>& k_set,
                                          double tol);

/// Positive iff every sample dips below eps_dip and, for each k <= k_growth,
/// some nonzero y in the span search reaches A_N(y) >= k ||y||.
Report mly_criterion_check(const OperatorSequenceSpec& spec, const std::vector<Vector>& x0, const Thresholds& t,
                           std::uint64_t seed = 0);

}  // namespace mly::classify
