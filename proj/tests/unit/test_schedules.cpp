#include <doctest.h>

#include <json.hpp>

#include "mly/core/error.hpp"
#include "mly/schedules/examples.hpp"
#include "oracles.hpp"

using namespace mly;
using namespace mly::schedules;

namespace {

struct Expected {
    Index start, end;
    Wide multiplier;
};

void check_blocks(const BlockSchedule& s, std::initializer_list<Expected> expected) {
    REQUIRE(s.blocks().size() == expected.size());
    std::size_t k = 0;
    for (const auto& e : expected) {
        const Block& b = s.blocks()[k++];
        CHECK(b.start == e.start);
        CHECK(b.end == e.end);
        CHECK(b.effective() == Rational(e.multiplier));
    }
}

}  // namespace

TEST_CASE("factorial schedule blocks") {
    check_blocks(*factorial_schedule(2), {{1, 2, 0}, {2, 3, 2}, {3, 7, 0}, {7, 11, 2}});
    check_blocks(*factorial_schedule(1), {{1, 2, 0}, {2, 3, 2}});
    CHECK(factorial_a(3) == 11);
    CHECK(factorial_b(3) == 29);
    CHECK(factorial_a(4) == 47);
}

TEST_CASE("factorial boundaries interleave: a_n < b_n < a_{n+1}") {
    for (int n = 1; n <= kMaxFactorialDepth; ++n) {
        CHECK(factorial_a(n) < factorial_b(n));
        CHECK(factorial_b(n) < factorial_a(n + 1));
        CHECK(factorial_a(n) == oracle::a(n));
        CHECK(factorial_b(n) == oracle::b(n));
    }
    CHECK(factorial_schedule(kMaxFactorialDepth)->coverage_end() == oracle::a(kMaxFactorialDepth + 1));
    try {
        factorial_schedule(33);
        FAIL("expected Overflow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Overflow);
    }
}

TEST_CASE("cubic schedule blocks and recurrence") {
    check_blocks(*cubic_schedule(2), {{1, 2, 0}, {2, 3, 3}, {3, 27, 0}, {27, 29, 29}});
    CHECK(cubic_c(4) == 815);
    CHECK(cubic_d(3) == 812);
    CHECK(cubic_c(5) == 52979);
    CHECK(cubic_d(4) == 52975);
    const oracle::Cubic ref(kMaxCubicDepth);
    CHECK(cubic_c(1) == 1);
    for (int n = 1; n <= kMaxCubicDepth; ++n) {
        CHECK(cubic_d(n) == cubic_c(n) + static_cast<Index>(n * n * n) * cubic_c(n));
        CHECK(cubic_c(n + 1) == cubic_d(n) + static_cast<Index>(n));
        CHECK(cubic_c(n + 1) == ref.c[n + 1]);
    }
    CHECK_THROWS_AS(cubic_schedule(kMaxCubicDepth + 1), Error);
}

TEST_CASE("power-of-two spike rule") {
    const auto spec = power2_spike_example();
    const Vector one = Vector::real(1.0);
    CHECK(spec.image_norm(4, one) == 2.0);
    CHECK(spec.image_norm(5, one) == 1.0);
    CHECK(spec.image_norm(Index{1} << 20, one) == 20.0);
    CHECK(spec.image_norm((Index{1} << 20) + 1, one) == 1.0);
}

TEST_CASE("factorial closed forms: spec anchors") {
    const auto zero2 = closed_form_factorial_average(2, FactorialPoint::EndOfZeroBlock);
    CHECK(zero2.coefficient == Rational(1, 3));
    CHECK(zero2.at == 6);
    const auto on2 = closed_form_factorial_average(2, FactorialPoint::EndOfOnBlock);
    CHECK(on2.coefficient == Rational(1));
    CHECK(on2.at == 10);
    CHECK(closed_form_factorial_average(3, FactorialPoint::EndOfZeroBlock, 2.0).value() ==
          doctest::Approx(2.0 * 10.0 / 28.0));
    CHECK_THROWS_AS(closed_form_factorial_average(1, FactorialPoint::EndOfOnBlock), Error);
    CHECK_THROWS_AS(closed_form_factorial_average(21, FactorialPoint::EndOfOnBlock), Error);
}

TEST_CASE("factorial closed forms agree with exact brute force for n <= 8") {
    for (int n = 2; n <= 8; ++n) {
        for (auto at : {FactorialPoint::EndOfZeroBlock, FactorialPoint::EndOfOnBlock}) {
            const auto form = closed_form_factorial_average(n, at);
            const oracle::u128 k = at == FactorialPoint::EndOfZeroBlock ? oracle::b(n) - 1 : oracle::a(n + 1) - 1;
            const oracle::u128 s = oracle::brute_sum(oracle::factorial_multiplier, k);
            CHECK(form.at == k);
            CHECK(form.coefficient == Rational(static_cast<Wide>(s), static_cast<Wide>(k)));
        }
    }
}

TEST_CASE("factorial closed forms: dips decrease, peaks are exactly ||x||") {
    // n = 2 gives 1/3 and n = 3 gives 5/14, so the decrease starts at n = 3
    CHECK(closed_form_factorial_average(2, FactorialPoint::EndOfZeroBlock).coefficient == Rational(1, 3));
    Rational previous(1);
    for (int n = 3; n <= 20; ++n) {
        const auto dip = closed_form_factorial_average(n, FactorialPoint::EndOfZeroBlock).coefficient;
        CHECK(dip < previous);
        previous = dip;
        CHECK(closed_form_factorial_average(n, FactorialPoint::EndOfOnBlock).coefficient == Rational(1));
    }
}

TEST_CASE("cubic exact partial sums match brute force") {
    const oracle::Cubic ref(6);
    auto mult = [&](oracle::u128 i) { return ref.multiplier(i); };
    for (int n = 2; n <= 4; ++n) {
        CHECK(cubic_partial_sum_at_dip(n) == Rational(static_cast<Wide>(oracle::brute_sum(mult, ref.d[n] - 1))));
        CHECK(cubic_partial_sum_at_peak(n) == Rational(static_cast<Wide>(oracle::brute_sum(mult, ref.c[n + 1] - 1))));
    }
    CHECK(cubic_partial_sum_at_peak(3) == Rational(2506));
}

TEST_CASE("schedule JSON uses decimal strings and round-trips") {
    const auto s = cubic_schedule(kMaxCubicDepth);
    const std::string text = dump_schedule_json(*s);
    const auto doc = nlohmann::json::parse(text);
    REQUIRE(doc.is_array());
    CHECK(doc[0]["start"] == "1");
    CHECK(doc[1]["multiplier"] == "3");
    CHECK(doc.back()["end"] == to_string(cubic_c(kMaxCubicDepth + 1)));
    const auto back = load_schedule_json(text);
    REQUIRE(back->blocks().size() == s->blocks().size());
    for (std::size_t k = 0; k < back->blocks().size(); ++k) {
        CHECK(back->blocks()[k].start == s->blocks()[k].start);
        CHECK(back->blocks()[k].end == s->blocks()[k].end);
        CHECK(back->blocks()[k].effective() == s->blocks()[k].effective());
    }
    CHECK(back->tag() == GeneratorTag::Custom);
    CHECK_THROWS_AS(load_schedule_json(R"([{"start":"2","end":"5","multiplier":"1"}])"), Error);
    CHECK_THROWS_AS(load_schedule_json(R"({"start":"1"})"), Error);
}
