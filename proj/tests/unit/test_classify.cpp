#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mly/classify/classify.hpp"
#include "mly/core/error.hpp"
#include "mly/schedules/examples.hpp"

using namespace mly;
using namespace mly::classify;
namespace sch = mly::schedules;

namespace {

Vector e(Index j) { return Vector::basis(Space::ell_one(), j); }

Thresholds thresholds(double eps, double delta, double m, Index horizon = 0) {
    Thresholds t;
    t.eps_dip = eps;
    t.delta = delta;
    t.m_peak = m;
    t.horizon = horizon;
    return t;
}

template <class F>
void expect_code(ErrorCode code, F&& f) {
    try {
        f();
        FAIL("expected " << to_string(code));
    } catch (const Error& err) {
        CHECK(err.code() == code);
    }
}

}  // namespace

TEST_CASE("thresholds validate their ordering") {
    CHECK_NOTHROW(Thresholds{}.validate());
    CHECK_THROWS_AS(thresholds(1.0, 0.5, 2.0).validate(), Error);
    CHECK_THROWS_AS(thresholds(0.1, 3.0, 2.0).validate(), Error);
    CHECK_THROWS_AS(thresholds(0.0, 1.0, 2.0).validate(), Error);
    CHECK(thresholds(0.1, 1, 2, 0).resolve_horizon(sch::factorial_example(3)) == sch::factorial_a(4) - 1);
    CHECK(Thresholds{}.resolve_horizon(sch::power2_spike_example()) == (Index{1} << 20));
    expect_code(ErrorCode::ScheduleExhausted,
                [] { thresholds(0.1, 1, 2, 1000).resolve_horizon(sch::factorial_example(3)); });
}

TEST_CASE("estimate_acb_constant") {
    const auto p2 = estimate_acb_constant(sch::power2_spike_example(), {Vector::real(1.0)}, Index{1} << 20);
    CHECK(p2.c_hat == 1.375);
    CHECK(p2.n == 8);

    const auto twice = estimate_acb_constant(sch::constant_example(Rational(2)), {Vector::real(-3.5)}, 1000);
    CHECK(twice.c_hat == doctest::Approx(2.0).epsilon(1e-15));

    // A_n(e_j) = min(n, j-1)/n, which equals 1 for n <= j - 1
    std::vector<Vector> basis;
    for (Index j = 2; j <= 10; ++j) basis.push_back(e(j));
    const auto one = estimate_acb_constant(sch::constant_shift(1.0), basis, 1000);
    CHECK(one.c_hat == 1.0);
    CHECK(one.sample == 0);
    CHECK(one.n == 1);

    expect_code(ErrorCode::EmptySamples, [] { estimate_acb_constant(sch::constant_shift(1.0), {}, 10); });
    expect_code(ErrorCode::EmptySamples,
                [] { estimate_acb_constant(sch::constant_shift(1.0), {Vector::zero(Space::ell_one())}, 10); });
}

TEST_CASE("mean_sensitivity_witness") {
    const auto w = mean_sensitivity_witness(sch::cubic_example(15), {Vector::real(1.0)}, thresholds(0.05, 1, 5));
    REQUIRE(w.has_value());
    CHECK(w->normalized > 5.0);
    // first exceedance is inside the on-block [d_5, c_6), at A ~ 5.03
    CHECK(w->n >= sch::cubic_d(5));
    CHECK(w->n < sch::cubic_c(6));

    std::vector<Vector> basis;
    for (Index j = 2; j <= 40; ++j) basis.push_back(e(j));
    CHECK_FALSE(mean_sensitivity_witness(sch::constant_shift(1.0), basis, thresholds(0.05, 1, 1)).has_value());

    const auto shift = sch::cubic_weighted_shift(15);
    const Index k = sch::cubic_c(5) - 1;
    const auto sw = mean_sensitivity_witness(shift, {e(2), e(k + 1)}, thresholds(0.05, 1, 3));
    REQUIRE(sw.has_value());
    CHECK(sw->candidate == 1);
    const double lambda_avg = shift.shift_weights()->abs_prefix_sum(sw->n) / to_double(sw->n);
    CHECK(sw->average == doctest::Approx(lambda_avg).epsilon(1e-12));
}

TEST_CASE("irregularize") {
    const Vector x0 = Vector::parse(Space::ell_one(), "3:2");
    const Vector y = irregularize(Vector::zero(Space::ell_one()), x0, 0.1);
    CHECK(y.norm() == doctest::Approx(0.05));
    CHECK(y == x0.scaled(0.025));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> val(-4.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector x(Space::ell_one(), {{1, val(rng)}, {4, val(rng)}});
        const Vector d(Space::ell_one(), {{2, val(rng)}, {4, val(rng)}, {9, val(rng)}});
        const double eps = std::fabs(val(rng)) + 1e-3;
        CHECK((x - irregularize(x, d, eps)).norm() / eps == doctest::Approx(0.5).epsilon(1e-12));
    }
    expect_code(ErrorCode::ZeroDirection, [] { irregularize(Vector::real(1.0), Vector::real(0.0), 0.1); });

    // a bounded-looking start inherits the growth of the direction
    const auto cubic = sch::cubic_example(9);
    const Vector z = irregularize(Vector::real(0.0), Vector::real(1.0), 0.1);
    const auto r = detect_irregular_vector(cubic, z, thresholds(0.001, 0.1, 0.4));
    CHECK(r.has(Verdict::IrregularAtHorizon));
}

TEST_CASE("classify_pair: factorial pair (3, 1)") {
    const auto fact = sch::factorial_example(12);
    const Index horizon = sch::factorial_a(12);
    // the difference has norm 2, so dips are 2 f(b_n - 1) ~ 4/(n + 2): about 0.31 by a_12
    const auto strict = classify_pair(fact, Vector::real(3.0), Vector::real(1.0), thresholds(0.1, 1, 10, horizon));
    CHECK_FALSE(strict.has(Verdict::LiYorkeDelta));
    CHECK_FALSE(strict.has(Verdict::MeanAsymptoticAtHorizon));
    const double last_dip = 2.0 * sch::closed_form_factorial_average(11, sch::FactorialPoint::EndOfZeroBlock).value();
    CHECK(last_dip == doctest::Approx(0.3077).epsilon(1e-3));

    const auto loose = classify_pair(fact, Vector::real(3.0), Vector::real(1.0), thresholds(0.35, 1, 10, horizon));
    CHECK(loose.has(Verdict::MeanProximalAtHorizon));
    CHECK(loose.has(Verdict::LiYorkeDelta));
    CHECK_FALSE(loose.has(Verdict::ExtremeAtHorizon));

    expect_code(ErrorCode::DegeneratePair,
                [&] { classify_pair(fact, Vector::real(2.0), Vector::real(2.0) + Vector::real(0.0), Thresholds{}); });
}

TEST_CASE("classify_pair: cubic pair (1, 0) is extreme") {
    const auto cubic = sch::cubic_example(10);
    const auto r = classify_pair(cubic, Vector::real(1.0), Vector::real(0.0), thresholds(0.05, 1, 8, sch::cubic_c(10)));
    CHECK(r.has(Verdict::ExtremeAtHorizon));
    CHECK(r.has(Verdict::LiYorkeDelta));
    const auto json = r.to_json();
    CHECK(json["verdicts"].size() == r.verdicts.size());
    for (const auto& key : {"subject", "verdicts", "witnesses", "thresholds", "horizon", "seed"}) {
        CHECK(json.contains(key));
    }
    CHECK(json["horizon"] == to_string(sch::cubic_c(10)));
    CHECK(json["witnesses"][0]["n"].is_string());
}

TEST_CASE("pair verdicts agree with the classification of x - y") {
    // finitely supported differences are mean asymptotic on shifts
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    const auto shift = sch::cubic_weighted_shift(10);
    for (int trial = 0; trial < 10; ++trial) {
        const Vector x(Space::ell_one(), {{2, val(rng)}, {30, val(rng)}, {sch::cubic_c(6), val(rng)}});
        const Vector y(Space::ell_one(), {{3, val(rng)}, {30, val(rng)}});
        const auto t = thresholds(0.05, 0.5, 2.0);
        CHECK(classify_pair(shift, x, y, t).verdicts == classify_difference(shift, x - y, t).verdicts);
        const auto r = classify_pair(shift, x, y, t);
        CHECK(r.has(Verdict::MeanAsymptoticAtHorizon));
        CHECK_FALSE(r.has(Verdict::LiYorkeDelta));
    }
}

TEST_CASE("detect_irregular_vector") {
    auto t = thresholds(0.2, 0.5, 10);
    const auto fact = detect_irregular_vector(sch::factorial_example(12), Vector::real(1.0), t);
    CHECK(fact.has(Verdict::SemiIrregularAtHorizon));
    CHECK_FALSE(fact.has(Verdict::IrregularAtHorizon));

    const auto cubic = detect_irregular_vector(sch::cubic_example(9), Vector::real(1.0),
                                               thresholds(0.05, 1, 7, sch::cubic_c(9)));
    CHECK(cubic.has(Verdict::IrregularAtHorizon));
    const auto peak = std::find_if(cubic.witnesses.begin(), cubic.witnesses.end(),
                                   [](const Witness& w) { return w.kind == "max"; });
    REQUIRE(peak != cubic.witnesses.end());
    CHECK(peak->value >= 8.0);

    const auto e5 = detect_irregular_vector(sch::constant_shift(1.0), e(5), thresholds(0.05, 1, 10));
    CHECK(e5.verdicts.empty());
    expect_code(ErrorCode::ZeroVector,
                [] { detect_irregular_vector(sch::cubic_example(3), Vector::real(0.0), Thresholds{}); });
}

TEST_CASE("scrambled line: any two multiples of an irregular u form a Li-Yorke pair") {
    const auto cubic = sch::cubic_example(10);
    const Vector u = Vector::real(1.0);
    const auto base = cesaro::compute_trace(cubic, u, sch::cubic_c(10));
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = val(rng), b = val(rng);
        const double delta = 0.5 * std::fabs(a - b) * base.peak.A;
        const auto r = classify_pair(cubic, Vector::real(a), Vector::real(b),
                                     thresholds(std::min(0.05, delta / 2), delta, std::max(delta, 10.0),
                                                sch::cubic_c(10)));
        CHECK(r.has(Verdict::LiYorkeDelta));
    }
}

TEST_CASE("enlarging the horizon keeps recorded witnesses valid") {
    const auto cubic = sch::cubic_example(10);
    const auto small = cesaro::compute_trace(cubic, Vector::real(1.0), sch::cubic_c(8));
    for (Index n : dips(small, 0.05)) {
        const auto big = cesaro::compute_trace(cubic, Vector::real(1.0), sch::cubic_c(10),
                                               cesaro::CheckpointRule::explicit_points({n}));
        CHECK(big.at(n)->A < 0.05);
        CHECK(big.at(n)->A == small.at(n)->A);
    }
}

TEST_CASE("dichotomy_report emits exactly one verdict") {
    const auto cubic = dichotomy_report(sch::cubic_example(15), {}, Thresholds{});
    CHECK(cubic.verdicts == std::vector<Verdict>{Verdict::MSWitness});

    Thresholds t;
    t.horizon = Index{1} << 20;
    const auto p2 = dichotomy_report(sch::power2_spike_example(), {Vector::real(1.0)}, t);
    CHECK(p2.verdicts == std::vector<Verdict>{Verdict::MEEvidence});
    CHECK(p2.details["C_hat"] == 1.375);

    const auto twice = dichotomy_report(sch::constant_example(Rational(2)), {}, Thresholds{});
    CHECK(twice.verdicts == std::vector<Verdict>{Verdict::MEEvidence});
    CHECK(twice.details["C_hat"].get<double>() == doctest::Approx(2.0));

    CHECK(dichotomy_report(sch::constant_shift(1.0), {}, Thresholds{}).verdicts ==
          std::vector<Verdict>{Verdict::MEEvidence});
    CHECK(dichotomy_report(sch::cubic_weighted_shift(), {}, Thresholds{}).verdicts ==
          std::vector<Verdict>{Verdict::MSWitness});
}

TEST_CASE("check_submultiplicative") {
    const auto pairs = index_grid(12);
    const auto one = check_submultiplicative(sch::constant_shift(1.0), {e(5), e(9) + e(30)}, pairs);
    REQUIRE(one.c_min.has_value());
    CHECK(*one.c_min == 1.0);
    CHECK(one.skipped > 0);

    const auto twice = check_submultiplicative(sch::constant_example(Rational(2)), {Vector::real(1.5)}, pairs);
    REQUIRE(twice.c_min.has_value());
    CHECK(*twice.c_min == 0.5);

    const auto fact = sch::factorial_example(4);
    const auto v = check_submultiplicative(fact, {Vector::real(1.0)}, pairs);
    REQUIRE(v.violation.has_value());
    CHECK_FALSE(v.c_min.has_value());
    CHECK(fact.image_norm(v.violation->i + v.violation->m, Vector::real(1.0)) > 0.0);
    CHECK((fact.image_norm(v.violation->m, Vector::real(1.0)) == 0.0 ||
           fact.image_norm(v.violation->i, Vector::real(1.0)) == 0.0));
}

TEST_CASE("check_almost_commuting") {
    const auto scalar = check_almost_commuting(sch::cubic_example(5), Vector::real(1.0), 3, 10'000);
    for (const auto& [i, d] : scalar.points) CHECK(d == 0.0);
    CHECK_FALSE(scalar.persists);

    const auto shift = check_almost_commuting(sch::constant_shift(0.5), e(3) + e(8), 2, 5'000);
    for (const auto& [i, d] : shift.points) CHECK(d == 0.0);

    const auto alt = check_almost_commuting(sch::alternating_shift_scaling(), e(1) + e(2), 1, 10'000, 0.1);
    CHECK(alt.persists);
    CHECK(alt.tail_max == 1.0);
    CHECK_THROWS_AS(check_almost_commuting(sch::cubic_example(5), Vector::real(1.0), 20, 10), Error);
}

TEST_CASE("verify_invariant_subspace") {
    const std::vector<Index> ns = {1000, 10'000, 100'000, 1'000'000};
    const auto shift = verify_invariant_subspace(sch::constant_shift(1.0), {e(4), e(7)}, ns, {1, 2, 3}, 0.01);
    CHECK(shift.holds);
    CHECK(shift.max_observed == doctest::Approx(5.0 / 1000.0));

    const auto zero = verify_invariant_subspace(sch::constant_shift(1.0), {Vector::zero(Space::ell_one())}, ns, {1}, 1e-9);
    CHECK(zero.holds);
    CHECK(zero.max_observed == 0.0);

    std::vector<Index> dips_at;
    for (int n = 6; n <= 8; ++n) dips_at.push_back(sch::cubic_d(n) - 1);
    const auto scalar = verify_invariant_subspace(sch::cubic_example(9), {Vector::real(1.0)}, dips_at, {1, 2, 3}, 0.1);
    CHECK(scalar.holds);
}

TEST_CASE("mly_criterion_check") {
    const auto shift = sch::cubic_weighted_shift();
    std::vector<Vector> x0 = {e(2)};
    for (int p = 1; p <= 4; ++p) x0.push_back(e(sch::cubic_c(p + 1)));
    Thresholds t;
    t.k_growth = 4;
    const auto pos = mly_criterion_check(shift, x0, t, 0);
    CHECK(pos.verdicts == std::vector<Verdict>{Verdict::Positive});
    CHECK(std::count_if(pos.witnesses.begin(), pos.witnesses.end(),
                        [](const Witness& w) { return w.kind == "growth"; }) == 4);

    // first coordinates only: the weights seen are 0, 3, 0, 0, 0, so growth stops at 3/2
    std::vector<Vector> low;
    for (Index j = 2; j <= 6; ++j) low.push_back(e(j));
    const auto neg = mly_criterion_check(shift, low, t, 0);
    CHECK(neg.has(Verdict::Negative));
    CHECK(neg.details["best_growth"] == 1.5);

    CHECK(mly_criterion_check(sch::constant_shift(1.0), low, t, 0).has(Verdict::Negative));
    CHECK(mly_criterion_check(shift, {Vector::zero(Space::ell_one())}, t, 0).has(Verdict::Negative));
    CHECK(mly_criterion_check(shift, x0, t, 7).to_json() == mly_criterion_check(shift, x0, t, 7).to_json());
}
