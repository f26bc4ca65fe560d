#include <catch2/catch_amalgamated.hpp>

#include "pacil/rational.hpp"
#include "pacil/rng.hpp"

using namespace pacil;

TEST_CASE("rationals are canonical") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational(3, -6).den() == 2);
    CHECK(Rational(0, 7) == Rational(0));
    CHECK_THROWS_AS(Rational(1, 0), Error);
}

TEST_CASE("rational arithmetic and parsing") {
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 2) * Rational(2, 3) == Rational(1, 3));
    CHECK((Rational(7, 2)).floor_long() == 3);
    CHECK((Rational(7, 2)).ceil_long() == 4);
    CHECK((Rational(-7, 2)).floor_long() == -4);

    CHECK(*Rational::parse("3/4") == Rational(3, 4));
    CHECK(*Rational::parse("-12") == Rational(-12));
    CHECK(*Rational::parse("32.15") == Rational(643, 20));
    CHECK(*Rational::parse("-0.5") == Rational(-1, 2));
    CHECK(!Rational::parse("1/0"));
    CHECK(!Rational::parse("abc"));
    CHECK(!Rational::parse(""));
}

TEST_CASE("rendering round-trips") {
    CHECK(Rational(3, 4).to_string() == "3/4");
    CHECK(Rational(-5).to_string() == "-5");
    CHECK(Rational(643, 20).to_decimal_string() == "32.15");
    CHECK(Rational(1, 3).to_decimal_string() == "1/3");  // no finite expansion
    CHECK(Rational(-1, 8).to_decimal_string() == "-0.125");
    CHECK(Rational(0).to_decimal_string() == "0");

    SplitMix64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        auto n = static_cast<long>(rng.next() % 2001) - 1000;
        auto d = static_cast<long>(rng.next() % 40) + 1;
        Rational r(n, d);
        CHECK(*Rational::parse(r.to_string()) == r);
        CHECK(*Rational::parse(r.to_decimal_string()) == r);
    }
}

TEST_CASE("double conversion is exact") {
    Rational r = Rational::from_double(0.1);
    CHECK(r != Rational(1, 10));  // 0.1 is not exactly representable
    CHECK(r.to_double() == 0.1);
    CHECK(Rational::from_double(0.25) == Rational(1, 4));
}

TEST_CASE("delta rationals order lexicographically") {
    DeltaRational a(Rational(1), Rational(0));
    DeltaRational b(Rational(1), Rational(-1));
    DeltaRational c(Rational(1), Rational(1));
    CHECK(b < a);
    CHECK(a < c);
    CHECK(b < c);
    CHECK(DeltaRational(Rational(0), Rational(500)) < DeltaRational(Rational(1, 1000)));

    SplitMix64 rng(11);
    auto rnd = [&] {
        return DeltaRational(Rational(static_cast<long>(rng.next() % 11) - 5, 2),
                             Rational(static_cast<long>(rng.next() % 7) - 3));
    };
    for (int i = 0; i < 2000; ++i) {
        DeltaRational x = rnd(), y = rnd(), z = rnd();
        CHECK((x + y) - y == x);
        CHECK(Rational(2) * (x + y) == Rational(2) * x + Rational(2) * y);
        if (x < y && y < z) CHECK(x < z);
        CHECK((x < y) == !(x >= y));
    }
}
