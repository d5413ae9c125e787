#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mly/cesaro/trace.hpp"
#include "mly/core/error.hpp"
#include "mly/core/kahan.hpp"
#include "mly/schedules/examples.hpp"
#include "oracles.hpp"

using namespace mly;
using namespace mly::cesaro;
namespace sch = mly::schedules;

TEST_CASE("stream_trace: spec examples") {
    const auto fact = sch::factorial_example(3);
    const auto t = stream_trace(fact, Vector::real(1.0), 6, CheckpointRule::all());
    REQUIRE(t.exact);
    CHECK(t.checkpoints.size() == 6);
    CHECK(t.last().exact_average() == Rational(1, 3));
    CHECK(t.last().S == 2.0);

    const auto zero = stream_trace(sch::cubic_example(4), Vector::real(0.0), 5000);
    for (const auto& cp : zero.checkpoints) CHECK(cp.A == 0.0);

    const auto shift = stream_trace(sch::constant_shift(1.0), Vector::basis(Space::ell_one(), 1), 100);
    for (const auto& cp : shift.checkpoints) CHECK(cp.A == 0.0);
}

TEST_CASE("block_trace: spec examples") {
    const auto cubic = block_trace(sch::cubic_example(3), Vector::real(1.0), 814);
    REQUIRE(cubic.exact);
    const Checkpoint* cp = cubic.at(814);
    REQUIRE(cp != nullptr);
    CHECK(*cp->exact_sum == Rational(2506));
    CHECK(cp->exact_average() == Rational(2506, 814));
    CHECK(cp->A >= 3.0);

    const auto fact = block_trace(sch::factorial_example(2), Vector::real(1.0), 10);
    CHECK(fact.at(10)->exact_average() == Rational(1));
    CHECK(*fact.at(10)->exact_sum == Rational(10));

    try {
        block_trace(sch::power2_spike_example(), Vector::real(1.0), 100);
        FAIL("expected NotBlockStructured");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotBlockStructured);
    }
}

TEST_CASE("block_trace agrees with stream_trace on random horizons") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::uint64_t> pick(1, 1'000'000);
    std::vector<Index> horizons;
    for (int k = 0; k < 200; ++k) horizons.push_back(pick(rng));
    const auto rule = CheckpointRule::explicit_points(horizons);
    for (const auto& spec : {sch::factorial_example(9), sch::cubic_example(5)}) {
        const auto streamed = stream_trace(spec, Vector::real(1.0), 1'000'000, rule);
        for (Index h : horizons) {
            const auto blocked = block_trace(spec, Vector::real(1.0), h, CheckpointRule::block_boundaries());
            const Checkpoint* s = streamed.at(h);
            REQUIRE(s != nullptr);
            CHECK(std::fabs(s->A - blocked.last().A) <= 1e-12);
            CHECK(*s->exact_sum == *blocked.last().exact_sum);
        }
    }
}

TEST_CASE("block_trace on weighted shifts matches a brute-force oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    const auto spec = sch::cubic_weighted_shift(4);
    const oracle::Cubic ref(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> dense(70, 0.0);
        std::vector<Entry> entries;
        for (int j = 1; j < 70; j += 1 + trial % 7) {
            dense[j] = val(rng);
            entries.push_back({static_cast<Index>(j), dense[j]});
        }
        const Vector x(Space::ell_one(), entries);
        const auto t = block_trace(spec, x, 200, CheckpointRule::all());
        for (std::uint64_t n : {1u, 2u, 3u, 26u, 27u, 28u, 60u, 69u, 150u, 200u}) {
            const double expected = oracle::shift_average([&](std::uint64_t i) { return static_cast<double>(ref.multiplier(i)); },
                                                          dense, n);
            CHECK(t.at(n)->A == doctest::Approx(expected).epsilon(1e-13));
        }
    }
}

TEST_CASE("trace invariants: S non-decreasing and A = S / n") {
    const auto t = compute_trace(sch::cubic_example(8), Vector::real(-2.5), sch::cubic_c(9) - 1);
    for (std::size_t k = 1; k < t.checkpoints.size(); ++k) {
        CHECK(t.checkpoints[k].n > t.checkpoints[k - 1].n);
        CHECK(t.checkpoints[k].S >= t.checkpoints[k - 1].S);
    }
    for (const auto& cp : t.checkpoints) {
        CHECK(cp.A == doctest::Approx(cp.S / to_double(cp.n)).epsilon(1e-15));
        CHECK(cp.exact_average() * Rational(5, 2) == *cp.exact_sum * Rational(5, 2) / Rational::from_index(cp.n));
    }
}

TEST_CASE("extrema: spec examples") {
    const auto fact = compute_trace(sch::factorial_example(10), Vector::real(1.0), sch::factorial_a(11) - 1);
    const auto ex = extrema(fact, 0.2, 10.0);
    const Index b10 = sch::factorial_b(10) - 1;
    CHECK(std::find(ex.dip_witnesses.begin(), ex.dip_witnesses.end(), b10) != ex.dip_witnesses.end());
    CHECK(fact.at(b10)->exact_average() ==
          sch::closed_form_factorial_average(10, sch::FactorialPoint::EndOfZeroBlock).coefficient);
    CHECK(fact.at(b10)->A == doctest::Approx(0.1667).epsilon(1e-3));
    CHECK(ex.peak_witnesses.empty());

    const auto cubic = compute_trace(sch::cubic_example(8), Vector::real(1.0), sch::cubic_c(9) - 1);
    const auto cx = extrema(cubic, 0.1, 8.0);
    REQUIRE_FALSE(cx.peak_witnesses.empty());
    CHECK(cx.peak_witnesses.back() == sch::cubic_c(9) - 1);
    CHECK(cx.argmax == sch::cubic_c(9) - 1);

    const auto zero = compute_trace(sch::cubic_example(4), Vector::real(0.0), 1000);
    CHECK(extrema(zero, 0.0, 1e-9).peak_witnesses.empty());
    CHECK_FALSE(ex.running_min_tail.empty());
    CHECK(ex.running_min_tail.front().window_start == 1);
}

TEST_CASE("extract_subsequence: spec examples") {
    const auto fact = compute_trace(sch::factorial_example(10), Vector::real(1.0), sch::factorial_a(11) - 1);
    const auto dips = extract_subsequence(fact, DipBelow{0.3});
    for (int n = 5; n <= 10; ++n) {
        CHECK(std::find(dips.begin(), dips.end(), sch::factorial_b(n) - 1) != dips.end());
    }
    CHECK(std::find(dips.begin(), dips.end(), sch::factorial_b(4) - 1) == dips.end());
    CHECK(std::is_sorted(dips.begin(), dips.end()));

    const auto cubic = compute_trace(sch::cubic_example(6), Vector::real(1.0), sch::cubic_c(7) - 1);
    const auto peaks = extract_subsequence(cubic, PeakAbove{2.0});
    CHECK(std::find(peaks.begin(), peaks.end(), Index{814}) != peaks.end());
    try {
        extract_subsequence(cubic, DipBelow{0.0});
        FAIL("expected EmptySelection");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptySelection);
    }
}

TEST_CASE("factorial averages: decreasing on zero blocks, increasing on on-blocks (exhaustive below a_6)") {
    const Index limit = sch::factorial_a(6) - 1;
    const auto t = stream_trace(sch::factorial_example(5), Vector::real(1.0), limit, CheckpointRule::all());
    for (int n = 1; n <= 5; ++n) {
        for (Index k = sch::factorial_a(n); k + 1 < sch::factorial_b(n); ++k) {
            CHECK(t.at(k + 1)->exact_average() <= t.at(k)->exact_average());
        }
        for (Index k = sch::factorial_b(n); k + 1 < sch::factorial_a(n + 1) && k + 1 <= limit; ++k) {
            CHECK(t.at(k + 1)->exact_average() >= t.at(k)->exact_average());
        }
    }
}

TEST_CASE("cubic averages grow: A_{c_{n+1}-1} >= n for n <= 8") {
    const auto t = compute_trace(sch::cubic_example(8), Vector::real(1.0), sch::cubic_c(9) - 1);
    for (int n = 1; n <= 8; ++n) {
        const Checkpoint* cp = t.at(sch::cubic_c(n + 1) - 1);
        REQUIRE(cp != nullptr);
        CHECK(cp->exact_average() >= Rational(n));
        CHECK(*cp->exact_sum == sch::cubic_partial_sum_at_peak(n));
    }
}

TEST_CASE("homogeneity, subadditivity and the pair-difference identity") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    const auto spec = sch::cubic_weighted_shift(5);
    const Index horizon = 100'000;
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Entry> ex, ey;
        for (Index j = 2; j < 40; j += 3) ex.push_back({j, val(rng)});
        for (Index j = 1; j < 35; j += 4) ey.push_back({j, val(rng)});
        const Vector x(Space::ell_one(), ex), y(Space::ell_one(), ey);
        const double alpha = val(rng);
        const auto tx = compute_trace(spec, x, horizon);
        const auto ty = compute_trace(spec, y, horizon, CheckpointRule::explicit_points([&] {
            std::vector<Index> v;
            for (const auto& cp : tx.checkpoints) v.push_back(cp.n);
            return v;
        }()));
        const auto tax = compute_trace(spec, x.scaled(alpha), horizon);
        const auto tsum = compute_trace(spec, x + y, horizon);
        const auto tdiff = stream_trace(spec, x - y, 200, CheckpointRule::all());
        for (const auto& cp : tx.checkpoints) {
            if (const Checkpoint* s = tax.at(cp.n)) {
                CHECK(std::fabs(s->A - std::fabs(alpha) * cp.A) <= 1e-12 * std::max(1.0, s->A));
            }
            if (const Checkpoint* s = tsum.at(cp.n); s && ty.at(cp.n)) {
                CHECK(s->A <= cp.A + ty.at(cp.n)->A + 1e-12);
            }
        }
        // sum_i ||T_i x - T_i y|| computed pairwise equals the trace of x - y
        long double pairwise = 0;
        for (Index i = 1; i <= 200; ++i) {
            pairwise += (spec.apply(i, x) - spec.apply(i, y)).norm();
            if (i % 50 == 0) {
                CHECK(std::fabs(static_cast<double>(pairwise / static_cast<long double>(i)) - tdiff.at(i)->A) <=
                      1e-12 * std::max(1.0, tdiff.at(i)->A));
            }
        }
    }
}

TEST_CASE("checkpoint rules") {
    const auto grid = geometric_grid(100, 1.1);
    CHECK(grid.front() == 1);
    CHECK(grid.back() == 100);
    for (Index k = 1; k <= 10; ++k) CHECK(std::find(grid.begin(), grid.end(), k) != grid.end());
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    CHECK_THROWS_AS(CheckpointRule::geometric(1.0), Error);

    const auto t = compute_trace(sch::power2_spike_example(), Vector::real(1.0), Index{1} << 20);
    CHECK(t.peak.n == 8);
    CHECK(t.peak.A == 1.375);
    CHECK(t.at(8) != nullptr);

    const auto blocks = compute_trace(sch::factorial_example(4), Vector::real(1.0), 100, CheckpointRule::block_boundaries());
    for (int n = 1; n <= 3; ++n) {
        CHECK(blocks.at(sch::factorial_b(n) - 1) != nullptr);
        CHECK(blocks.at(sch::factorial_a(n + 1) - 1) != nullptr);
    }
    CHECK_THROWS_AS(compute_trace(sch::factorial_example(2), Vector::real(1.0), 11), Error);
    CHECK_THROWS_AS(compute_trace(sch::factorial_example(2), Vector::basis(Space::ell_one(), 2), 5), Error);
}

TEST_CASE("CSV export") {
    const auto t = stream_trace(sch::factorial_example(2), Vector::real(1.0), 6, CheckpointRule::all());
    std::ostringstream out;
    write_csv(t, out, {"tool=mlylab"});
    const std::string text = out.str();
    CHECK(text.rfind("# tool=mlylab\nn,S,A\n1,0,0\n2,2,1\n", 0) == 0);
    CHECK(text.find("\n6,2,0.33333333333333331\n") != std::string::npos);
}
