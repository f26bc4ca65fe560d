#include <catch2/catch_amalgamated.hpp>

#include <mpfr.h>

#include <algorithm>

#include "pacil/pac.hpp"
#include "test_support.hpp"

using namespace pacil;

namespace {

/// Independent oracle for the sample count: 256-bit MPFR evaluation with
/// directed rounding on both sides, so the ceiling is certified.
long sample_count_mpfr(const Rational& gamma, const Rational& delta) {
    auto eval = [&](mpfr_rnd_t rnd) {
        mpfr_t num, den, x, factor_num, factor_den, out;
        mpfr_inits2(256, num, den, x, factor_num, factor_den, out, nullptr);
        // ln(1/delta), rounded in the requested direction (log is monotone)
        mpfr_set_z(num, delta.den().get_mpz_t(), rnd);
        mpfr_set_z(den, delta.num().get_mpz_t(), rnd == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD);
        mpfr_div(x, num, den, rnd);
        mpfr_log(x, x, rnd);
        // 1 / (2 gamma^2)
        mpfr_set_z(factor_num, gamma.den().get_mpz_t(), rnd);
        mpfr_mul(factor_num, factor_num, factor_num, rnd);
        mpfr_set_z(factor_den, gamma.num().get_mpz_t(), rnd == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD);
        mpfr_mul(factor_den, factor_den, factor_den, rnd == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD);
        mpfr_mul_ui(factor_den, factor_den, 2, rnd == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD);
        mpfr_div(factor_num, factor_num, factor_den, rnd);
        mpfr_mul(out, x, factor_num, rnd);
        mpfr_ceil(out, out);
        long r = mpfr_get_si(out, MPFR_RNDN);
        mpfr_clears(num, den, x, factor_num, factor_den, out, nullptr);
        return r;
    };
    long lo = eval(MPFR_RNDD), hi = eval(MPFR_RNDU);
    REQUIRE(lo == hi);
    return lo;
}

struct Watch {
    VariableTable table;
    Variable hr, ox, stress;
    ConjunctiveFormula kb;
    std::vector<LinearAtom> query;

    Watch() : hr(table.intern("hr")), ox(table.intern("ox")), stress(table.intern("stress")) {
        kb.add(parse_linear_atom("stress = hr - 5*ox + 450", table));
        kb.add(parse_linear_atom("ox >= 90", table));
        kb.add(parse_linear_atom("ox <= 100", table));
        kb.add(parse_linear_atom("hr >= 40", table));
        kb.add(parse_linear_atom("hr <= 200", table));
        query = parse_query("stress - 50 > 0", table);
    }

    std::vector<PartialInterval> readings() const {
        PartialInterval p1, p2, p3;
        p1.set_point(hr, Rational(150));
        p1.set_point(ox, Rational(91));
        p2.set_point(hr, Rational(92));
        p2.set_point(ox, Rational(99));
        p3.set_point(hr, Rational(160));
        return {p1, p2, p3};
    }
};

}  // namespace

TEST_CASE("grounding emits one atom per finite bound") {
    VariableTable t;
    Variable x = t.intern("x"), y = t.intern("y");
    PartialInterval phi;
    phi.set(x, Rational(1), Rational(5));
    phi.set(y, Rational(2), Rational(6));
    ConjunctiveFormula g = ground(phi);
    CHECK(g.size() == 4);
    CHECK(g.satisfies({{x, Rational(4)}, {y, Rational(5)}}));
    CHECK(!g.satisfies({{x, Rational(6)}, {y, Rational(5)}}));
    CHECK(!g.satisfies({{x, Rational(1)}, {y, Rational(1)}}));

    PartialInterval masked;
    masked.mask(x);
    masked.mask(y);
    CHECK(ground(masked).empty());

    PartialInterval point;
    point.set_point(x, Rational(92));
    ConjunctiveFormula gp = ground(point);
    CHECK(gp.size() == 2);
    CHECK(gp.satisfies({{x, Rational(92)}}));
    CHECK(!gp.satisfies({{x, Rational(919, 10)}}));
}

TEST_CASE("grounding soundness on random intervals") {
    pactest::Gen gen(909);
    for (int i = 0; i < 1000; ++i) {
        VariableTable vt;
        PartialInterval phi;
        Assignment inside;
        for (int k = 0; k < 3; ++k) {
            Variable v = vt.intern("v" + std::to_string(k));
            long kind = gen.uniform(0, 3);
            if (kind == 0) {
                phi.mask(v);
                inside.emplace(v, gen.small_rational());
            } else {
                Rational lo = gen.small_rational();
                Rational hi = lo + gen.small_rational(0, 4);
                if (kind == 1) phi.set(v, lo, hi);
                if (kind == 2) phi.set(v, lo, std::nullopt);
                if (kind == 3) phi.set(v, std::nullopt, hi);
                inside.emplace(v, kind == 3 ? hi : lo);
            }
        }
        CHECK(phi.contains(inside));
        CHECK(ground(phi).satisfies(inside));

        // violating a finite bound falsifies the grounding
        for (const auto& [v, iv] : phi.bounds()) {
            if (iv.lower) {
                Assignment out = inside;
                out[v] = *iv.lower - Rational(1);
                CHECK(!ground(phi).satisfies(out));
            }
        }
    }
}

TEST_CASE("witnessing is entailment from the grounding") {
    VariableTable t;
    Variable x = t.intern("x");
    PartialInterval six;
    six.set_point(x, Rational(6));
    CHECK(witnessed(six, parse_query("x > 5", t)));

    PartialInterval masked;
    masked.mask(x);
    CHECK(!witnessed(masked, parse_query("x > 5", t)));

    PartialInterval band;
    band.set(x, Rational(1), Rational(2));
    CHECK(witnessed(band, parse_query("x >= 1", t)));
}

TEST_CASE("sample_count matches the high-precision oracle") {
    CHECK(sample_count(Rational(1, 10), Rational(1, 20)) == 150);
    CHECK(sample_count(Rational(1, 20), Rational(1, 100)) == 922);
    CHECK(sample_count_mpfr(Rational(1, 10), Rational(1, 20)) == 150);
    CHECK(sample_count_mpfr(Rational(1, 20), Rational(1, 100)) == 922);

    // delta chosen just above 1/e^2, so ln(1/delta) sits just below 2
    Rational near_e2(1353353, 10000000);
    CHECK(sample_count(Rational(1, 2), near_e2) == 4);

    pactest::Gen gen(111);
    for (int i = 0; i < 60; ++i) {
        Rational gamma(gen.uniform(1, 99), 100);
        Rational delta(gen.uniform(1, 99), 100);
        CHECK(sample_count(gamma, delta) == sample_count_mpfr(gamma, delta));
    }

    CHECK_THROWS_AS(sample_count(Rational(0), Rational(1, 2)), OutOfRangeError);
    CHECK_THROWS_AS(sample_count(Rational(1, 2), Rational(1)), OutOfRangeError);
}

TEST_CASE("decide_pac on the watch fixture") {
    Watch w;
    Decision d = decide_pac(w.kb, w.query, Rational(3, 5), w.readings());
    CHECK(d.accepted());
    CHECK(d.budget == 1);
    CHECK(d.failed_count == 1);
    REQUIRE(d.per_sample.size() == 3);
    CHECK(d.per_sample[0] == SampleOutcome::entailed);
    CHECK(d.per_sample[1] == SampleOutcome::not_entailed);
    CHECK(d.per_sample[2] == SampleOutcome::entailed);

    // zero budget: the single failure rejects
    Decision strict = decide_pac(w.kb, w.query, Rational(0), w.readings());
    CHECK(!strict.accepted());
    CHECK(strict.per_sample.size() == 2);  // early exit at the failure

    Decision full = decide_pac(w.kb, w.query, Rational(0), w.readings(), DecideOptions{true});
    CHECK(!full.accepted());
    CHECK(full.per_sample.size() == 3);
}

TEST_CASE("fully masked samples reject whenever the kb alone is silent") {
    Watch w;
    PartialInterval masked;
    std::vector<PartialInterval> samples(4, masked);
    Decision d = decide_pac(w.kb, w.query, Rational(3, 4), samples);
    CHECK(!d.accepted());

    // and per sample, a masked interval behaves exactly like entailment from
    // the kb alone
    CHECK(entails(w.kb, w.query) == false);
    ConjunctiveFormula kb_plus = w.kb;
    kb_plus.conjoin(ground(masked));
    CHECK(entails(kb_plus, w.query) == false);
}

TEST_CASE("decide_pac budget is monotone in epsilon") {
    Watch w;
    auto readings = w.readings();
    bool accepted_before = false;
    for (long num = 0; num <= 10; ++num) {
        Decision d = decide_pac(w.kb, w.query, Rational(num, 10), readings);
        if (accepted_before) CHECK(d.accepted());
        accepted_before = d.accepted();
    }
}

TEST_CASE("permuting samples never changes the verdict") {
    Watch w;
    auto samples = w.readings();
    std::sort(samples.begin(), samples.end(),
              [](const PartialInterval& a, const PartialInterval& b) {
                  return a.bounds().size() < b.bounds().size();
              });
    for (const Rational& eps : {Rational(0), Rational(1, 3), Rational(3, 5), Rational(1)}) {
        Decision base = decide_pac(w.kb, w.query, eps, w.readings());
        Decision perm = decide_pac(w.kb, w.query, eps, samples);
        CHECK(base.accepted() == perm.accepted());
    }
}

TEST_CASE("decide_pac validates its inputs") {
    Watch w;
    CHECK_THROWS_AS(decide_pac(w.kb, w.query, Rational(1, 2), {}), EmptySampleListError);
    CHECK_THROWS_AS(decide_pac(w.kb, w.query, Rational(2), w.readings()), OutOfRangeError);
}

TEST_CASE("blur respects its trivial modes") {
    VariableTable t;
    Variable x = t.intern("x"), y = t.intern("y");
    BlurConfig config;
    config.box = {{x, {Rational(0), Rational(10)}}, {y, {Rational(0), Rational(10)}}};
    Assignment point{{x, Rational(4)}, {y, Rational(5)}};

    SplitMix64 rng(42);
    PartialInterval identity = blur(point, config, rng);
    CHECK(identity.bounds().at(x).is_point());
    CHECK(*identity.bounds().at(x).lower == Rational(4));
    CHECK(*identity.bounds().at(y).lower == Rational(5));

    config.mask_probability = Rational(1);
    PartialInterval masked = blur(point, config, rng);
    CHECK(masked.bounds().at(x).is_masked());
    CHECK(masked.bounds().at(y).is_masked());

    config.mask_probability = Rational(-1);
    CHECK_THROWS_AS(blur(point, config, rng), InvalidConfigError);
    config.mask_probability = Rational(0);
    config.noise_std = -0.5;
    CHECK_THROWS_AS(blur(point, config, rng), InvalidConfigError);
}

TEST_CASE("noiseless blur always contains the true point") {
    VariableTable t;
    Variable x = t.intern("x"), y = t.intern("y");
    BlurConfig config;
    config.box = {{x, {Rational(0), Rational(1)}}, {y, {Rational(0), Rational(1)}}};
    config.mask_probability = Rational(1, 4);

    SplitMix64 rng(4242);
    for (int i = 0; i < 2000; ++i) {
        Assignment point{{x, rng.next_unit_rational()}, {y, rng.next_unit_rational()}};
        PartialInterval phi = blur(point, config, rng);
        CHECK(phi.contains(point));
    }
}

TEST_CASE("noisy blur stays inside the box and keeps ordered bounds") {
    VariableTable t;
    Variable x = t.intern("x"), y = t.intern("y"), z = t.intern("z");
    BlurConfig config;
    config.box = {{x, {Rational(0), Rational(1)}},
                  {y, {Rational(0), Rational(1)}},
                  {z, {Rational(0), Rational(1)}}};
    config.noise_std = 0.1;

    SplitMix64 rng(31337);
    for (int i = 0; i < 500; ++i) {
        Assignment point{
            {x, rng.next_unit_rational()}, {y, rng.next_unit_rational()}, {z, rng.next_unit_rational()}};
        PartialInterval phi = blur(point, config, rng);
        for (const auto& [v, iv] : phi.bounds()) {
            REQUIRE(iv.lower);
            REQUIRE(iv.upper);
            CHECK(*iv.lower <= *iv.upper);
            CHECK(*iv.lower >= Rational(0));
            CHECK(*iv.upper <= Rational(1));
        }
    }
}
