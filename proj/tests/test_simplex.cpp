#include <catch2/catch_amalgamated.hpp>

#include "pacil/simplex.hpp"
#include "test_support.hpp"

using namespace pacil;

namespace {

ConjunctiveFormula parse_all(std::initializer_list<const char*> atoms, VariableTable& t) {
    ConjunctiveFormula f;
    for (const char* a : atoms) f.add(parse_linear_atom(a, t));
    return f;
}

}  // namespace

TEST_CASE("check_feasible decides simple systems") {
    VariableTable t;
    CHECK(!check_feasible(parse_all({"x >= 0", "x <= -1"}, t)).is_sat());

    VariableTable t2;
    Verdict v = check_feasible(parse_all({"x > 0", "x < 1"}, t2));
    REQUIRE(v.is_sat());
    Assignment m = concretize(*v.model, parse_all({"x > 0", "x < 1"}, t2));
    Rational x = m.at(*t2.find("x"));
    CHECK(x > Rational(0));
    CHECK(x < Rational(1));

    // empty formula is TRUE with the empty model
    Verdict e = check_feasible(ConjunctiveFormula{});
    CHECK(e.is_sat());
    CHECK(e.model->empty());

    // constant atoms decide directly
    VariableTable t3;
    CHECK(check_feasible(parse_all({"0 <= 1"}, t3)).is_sat());
    CHECK(!check_feasible(parse_all({"1 <= 0"}, t3)).is_sat());
    CHECK(!check_feasible(parse_all({"0 < 0"}, t3)).is_sat());
}

TEST_CASE("the watch knowledge base forces stress to 47") {
    VariableTable t;
    ConjunctiveFormula kb = parse_all({"stress = hr - 5*ox + 450", "ox >= 90", "ox <= 100",
                                       "hr >= 40", "hr <= 200", "hr = 92", "ox = 99",
                                       "stress > 50"},
                                      t);
    CHECK(!check_feasible(kb).is_sat());

    ConjunctiveFormula sat = parse_all({"stress = hr - 5*ox + 450", "ox >= 90", "ox <= 100",
                                        "hr >= 40", "hr <= 200", "hr = 92", "ox = 99"},
                                       t);
    Verdict v = check_feasible(sat);
    REQUIRE(v.is_sat());
    Assignment m = concretize(*v.model, sat);
    CHECK(m.at(*t.find("stress")) == Rational(47));
}

TEST_CASE("neq atoms are rejected by check_feasible but handled by entails") {
    VariableTable t;
    ConjunctiveFormula f = parse_all({"x != 0"}, t);
    CHECK_THROWS_AS(check_feasible(f), UnexpectedNeqError);

    // kb with != splits: x != 0 and 0 <= x <= 1 entails x <= 1
    ConjunctiveFormula kb = parse_all({"x != 0", "x >= 0", "x <= 1"}, t);
    CHECK(entails(kb, {parse_linear_atom("x <= 1", t)}));
    CHECK(!entails(kb, {parse_linear_atom("x > 1/2", t)}));
    // and the query side may carry != too
    CHECK(entails(kb, {parse_linear_atom("x != 2", t)}));
}

TEST_CASE("entails matches its definition") {
    VariableTable t;
    CHECK(entails(parse_all({"x >= 3"}, t), {parse_linear_atom("x > 2", t)}));
    CHECK(!entails(parse_all({"x >= 3"}, t), {parse_linear_atom("x > 4", t)}));

    // inconsistent kb entails anything (vacuous)
    ConjunctiveFormula bad = parse_all({"x <= 1", "x >= 2"}, t);
    CHECK(entails(bad, {parse_linear_atom("x > 100", t)}));

    // conjunction query: all atoms must follow
    ConjunctiveFormula kb = parse_all({"x >= 1", "x <= 2"}, t);
    CHECK(entails(kb, {parse_linear_atom("x >= 1", t), parse_linear_atom("x <= 2", t)}));
    CHECK(!entails(kb, {parse_linear_atom("x >= 1", t), parse_linear_atom("x <= 3/2", t)}));
}

TEST_CASE("concretize handles pure and delta models") {
    VariableTable t;
    Variable x = t.intern("x");

    DeltaModel pure{{x, DeltaRational(Rational(3))}};
    ConjunctiveFormula f = parse_all({"x = 3"}, t);
    CHECK(concretize(pure, f).at(x) == Rational(3));

    DeltaModel upper{{x, DeltaRational(Rational(1), Rational(-1))}};
    ConjunctiveFormula g = parse_all({"x < 1"}, t);
    Rational cx = concretize(upper, g).at(x);
    CHECK(cx < Rational(1));

    DeltaModel wrong{{x, DeltaRational(Rational(2))}};
    CHECK_THROWS_AS(concretize(wrong, g), Error);
}

TEST_CASE("unsat is monotone under conjunction") {
    pactest::Gen gen(550);
    int unsat_seen = 0;
    for (int i = 0; i < 400; ++i) {
        VariableTable vt;
        ConjunctiveFormula f = gen.conjunction(vt, 3, static_cast<int>(gen.uniform(1, 6)));
        if (check_feasible(f).is_sat()) continue;
        ++unsat_seen;
        ConjunctiveFormula g = f;
        g.conjoin(gen.conjunction(vt, 3, 2));
        CHECK(!check_feasible(g).is_sat());
    }
    CHECK(unsat_seen > 20);
}

TEST_CASE("verdicts are deterministic") {
    pactest::Gen gen(660);
    for (int i = 0; i < 200; ++i) {
        VariableTable vt;
        ConjunctiveFormula f = gen.conjunction(vt, 4, static_cast<int>(gen.uniform(1, 8)));
        Verdict a = check_feasible(f);
        Verdict b = check_feasible(f);
        CHECK(a.is_sat() == b.is_sat());
        if (a.is_sat()) CHECK(*a.model == *b.model);
    }
}

TEST_CASE("sat models satisfy every atom after concretization") {
    pactest::Gen gen(770);
    int sat_seen = 0;
    for (int i = 0; i < 500; ++i) {
        VariableTable vt;
        ConjunctiveFormula f = gen.conjunction(vt, 3, static_cast<int>(gen.uniform(1, 6)));
        Verdict v = check_feasible(f);
        if (!v.is_sat()) continue;
        ++sat_seen;
        Assignment m = concretize(*v.model, f);
        for (const auto& atom : f.atoms()) CHECK(atom.satisfies(m));
    }
    CHECK(sat_seen > 100);
}
