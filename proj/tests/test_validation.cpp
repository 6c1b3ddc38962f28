#include <sstream>

#include "doctest.h"
#include "positlab/oracle.hpp"
#include "positlab/validation.hpp"
#include "support.hpp"

using namespace positlab;
using testsupport::P;

TEST_CASE("enumerate small rings")
{
    auto e3 = enumerate(PositConfig(3, 0));
    REQUIRE(e3.size() == 8);
    CHECK_FALSE(e3[0].value.has_value());
    CHECK(e3[0].pattern.is_nar());
    const char* vals[] = {"-2", "-1", "-1/2", "0", "1/2", "1", "2"};
    for (int i = 0; i < 7; ++i) {
        REQUIRE(e3[i + 1].value.has_value());
        CHECK(*e3[i + 1].value == BigRational::parse(vals[i]));
    }
    auto e2 = enumerate(PositConfig(2, 0));
    REQUIRE(e2.size() == 4);
    CHECK(e2[0].pattern.is_nar());
    CHECK(*e2[1].value == BigRational(-1));
    CHECK(*e2[2].value == BigRational(0));
    CHECK(*e2[3].value == BigRational(1));

    for (unsigned n = 2; n <= 12; ++n) {
        for (unsigned es = 0; es <= 3; ++es) {
            auto e = enumerate(PositConfig(n, es));
            REQUIRE(e.size() == (std::size_t{1} << n));
            // oracle round trip and strictly increasing values after NaR
            for (std::size_t i = 1; i < e.size(); ++i) {
                REQUIRE(oracle_round(PositConfig(n, es), *e[i].value) == e[i].pattern);
                if (i > 1) {
                    REQUIRE(*e[i - 1].value < *e[i].value);
                }
            }
        }
    }
    CHECK(enumerate(PositConfig(16, 1)).size() == 65536);
    CHECK_THROWS_AS(enumerate(PositConfig(21, 1)), std::invalid_argument);
}

TEST_CASE("exhaustive checks")
{
    auto add8 = exhaustive_check(PositConfig(8, 0), BinaryOp::Add);
    CHECK(add8.cases == 65536);
    CHECK(add8.pass());
    CHECK(add8.to_string(false) == "PASS posit<8,0> add 65536 0\n");

    auto div6 = exhaustive_check(PositConfig(6, 1), BinaryOp::Div);
    CHECK(div6.cases == 4096);
    CHECK(div6.pass());

    for (BinaryOp op : {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div}) {
        for (PositConfig c : {PositConfig(5, 2), PositConfig(4, 0), PositConfig(7, 3)}) {
            auto r = exhaustive_check(c, op);
            CHECK(r.pass());
            CHECK(r.cases == (std::uint64_t{1} << (2 * c.nbits)));
        }
        CHECK(exhaustive_check(PositConfig(8, 0), op, ArithPath::Fast).pass());
    }
    CHECK_THROWS_AS(exhaustive_check(PositConfig(11, 0), BinaryOp::Add), std::invalid_argument);
}

TEST_CASE("parallel and serial exhaustive checks agree")
{
    PositConfig c(7, 1);
    auto fn = inject_fault(inject_fault(op_function(BinaryOp::Mul), P(c, 0x21), P(c, 0x33)), P(c, 0x7F), P(c, 0x01));
    auto par = exhaustive_check(c, BinaryOp::Mul, fn);
    auto ser = exhaustive_check_serial(c, BinaryOp::Mul, fn);
    CHECK(par.to_string(false) == ser.to_string(false));
    CHECK(par.mismatches.size() == 2);
}

TEST_CASE("injected fault is reported exactly once")
{
    PositConfig c(8, 0);
    PositPattern a = P(c, 0x45);
    PositPattern b = P(c, 0x3A);
    auto faulty = inject_fault(op_function(BinaryOp::Add), a, b);
    auto rep = exhaustive_check(c, BinaryOp::Add, faulty);
    REQUIRE(rep.mismatches.size() == 1);
    const auto& m = rep.mismatches[0];
    CHECK(m.a == a);
    CHECK(m.b == b);
    PositPattern correct = oracle_round(c, *value_of(a) + *value_of(b));
    CHECK(m.expected == correct);
    CHECK(m.actual == PositPattern::from_bits(c, correct.low64() + 1));
    std::string text = rep.to_string(false);
    CHECK(text == "MISMATCH op=add a=0x45 b=0x3A expected=" + correct.hex() + " actual=" + m.actual.hex() +
                      "\nFAIL posit<8,0> add 65536 1\n");
    CHECK_FALSE(rep.pass());

    auto rr = randomized_check(PositConfig(32, 2), BinaryOp::Mul,
                               inject_fault(op_function(BinaryOp::Mul), PositPattern::maxpos(PositConfig(32, 2)),
                                            PositPattern::minpos(PositConfig(32, 2))),
                               10, 1);
    CHECK(rr.mismatches.size() == 1);
}

TEST_CASE("embedding checks")
{
    auto e4 = embedding_check(PositConfig(4, 0));
    CHECK(e4.cases == 16);
    CHECK(e4.pass());
    auto e8 = embedding_check(PositConfig(8, 0));
    CHECK(e8.cases == 256);
    CHECK(e8.pass());
    CHECK(e8.to_string(false) == "PASS posit<8,0> embed 256 0\n");
    for (unsigned n = 2; n <= 12; ++n) {
        for (unsigned es = 0; es <= 2; ++es) {
            REQUIRE(embedding_check(PositConfig(n, es)).pass());
        }
    }
    CHECK(embed(PositPattern::zero(PositConfig(6, 1))).is_zero());
    CHECK(embed(PositPattern::nar(PositConfig(6, 1))).is_nar());
    CHECK_THROWS_AS(embedding_check(PositConfig(13, 0)), std::invalid_argument);
}

TEST_CASE("boundary set")
{
    PositConfig c(32, 2);
    auto b = boundary_patterns(c);
    auto has = [&](const PositPattern& p) { return std::find(b.begin(), b.end(), p) != b.end(); };
    CHECK(has(PositPattern::zero(c)));
    CHECK(has(PositPattern::nar(c)));
    CHECK(has(PositPattern::minpos(c)));
    CHECK(has(negate(PositPattern::minpos(c))));
    CHECK(has(PositPattern::maxpos(c)));
    CHECK(has(negate(PositPattern::maxpos(c))));
    CHECK(has(P(c, 0x40000000)));
    CHECK(has(P(c, 0x40000001)));
    CHECK(has(P(c, 0x3FFFFFFF)));
    CHECK(has(P(c, 0xC0000000)));
    CHECK(has(P(c, 0x60000000)));  // useed
    CHECK(has(P(c, 0x20000000)));  // 1/useed
    CHECK(std::is_sorted(b.begin(), b.end(), [](const auto& x, const auto& y) { return x.bits() < y.bits(); }));
    CHECK(std::adjacent_find(b.begin(), b.end()) == b.end());
    CHECK(boundary_patterns(PositConfig(2, 0)).size() == 4);
}

TEST_CASE("randomized checks")
{
    PositConfig c(32, 2);
    auto r = randomized_check(c, BinaryOp::Mul, 20000, 7);
    CHECK(r.pass());
    auto core = boundary_patterns(c).size() * 16 - 64;
    CHECK(r.cases == core + 20000);
    // every boundary pattern is exercised even with one trial
    CHECK(randomized_check(c, BinaryOp::Add, 1, 7).cases == core + 1);

    auto again = randomized_check(c, BinaryOp::Mul, 20000, 7);
    CHECK(again.to_string(false) == r.to_string(false));

    for (PositConfig w : {PositConfig(16, 1), PositConfig(64, 3)}) {
        for (BinaryOp op : {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div}) {
            CHECK(randomized_check(w, op, 300, 11).pass());
        }
    }
    CHECK(randomized_check(PositConfig(100, 4), BinaryOp::Mul, 100, 11).pass());
    CHECK(randomized_check(PositConfig(100, 4), BinaryOp::Sub, 100, 11).pass());
    CHECK(randomized_check(PositConfig(64, 3), BinaryOp::Div, 2000, 3, ArithPath::Fast).pass());
    CHECK_THROWS_AS(randomized_check(c, BinaryOp::Add, 0, 1), std::invalid_argument);
}

TEST_CASE("host conversion corner cases")
{
    for (PositConfig c : {PositConfig(32, 2), PositConfig(16, 1), PositConfig(64, 3), PositConfig(64, 0),
                          PositConfig(128, 4)}) {
        auto r = conversion_check(c);
        CAPTURE(c.to_string());
        CHECK(r.pass());
        CHECK(r.cases == boundary_patterns(c).size());
    }
}

TEST_CASE("names")
{
    CHECK(parse_op("div") == BinaryOp::Div);
    CHECK_THROWS_AS(parse_op("pow"), std::invalid_argument);
    CHECK(parse_path("fast") == ArithPath::Fast);
    CHECK_THROWS_AS(parse_path("slow"), std::invalid_argument);
}
