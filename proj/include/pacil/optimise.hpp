#pragma once

#include <cassert>
#include <vector>

#include "pacil/errors.hpp"
#include "pacil/linarith.hpp"
#include "pacil/pac.hpp"
#include "pacil/rational.hpp"

namespace pacil {

enum class Goal { maximise, minimise };

inline std::string_view goal_token(Goal g) {
    return g == Goal::maximise ? "maximise" : "minimise";
}

struct OptimiseResult {
    /// Final estimate in the original problem's orientation: the last
    /// rejected bound of the internal maximise-form search, negated back
    /// when the goal is minimise.
    Rational estimate;
    /// Final bracket of the internal maximise form: bracket_low was
    /// rejected, bracket_high accepted, bracket_low <= bracket_high.
    Rational bracket_low, bracket_high;
    long decide_calls = 0;
    Goal goal = Goal::maximise;
};

struct OptimiseOptions {
    /// Doubling stops and reports unbounded once |b| exceeds 2^this.
    int magnitude_cap_exp = 128;
};

/// Bound search for the objective: probe bounds b with the accept/reject
/// test on the query b >= f (internally maximising, so f is negated first
/// when minimising), widen by doubling until the verdict flips, then halve
/// the bracket exactly accuracy_a times. The returned bracket endpoints keep
/// the invariant "low rejected, high accepted" through every step.
inline OptimiseResult optimise_pac(const ConjunctiveFormula& kb, const LinearExpr& objective,
                                   const Rational& epsilon, int accuracy_a,
                                   const std::vector<PartialInterval>& samples, Goal goal,
                                   const OptimiseOptions& options = {}) {
    if (samples.empty()) throw EmptySampleListError();
    if (accuracy_a < 1) throw OutOfRangeError("accuracy must be >= 1");

    LinearExpr f = goal == Goal::minimise ? -objective : objective;
    long calls = 0;
    auto accepts = [&](const Rational& b) {
        ++calls;
        LinearExpr e = f;
        e.add_constant(-b);  // b >= f  <=>  f - b <= 0
        return decide_pac(kb, {LinearAtom(std::move(e), Relation::le)}, epsilon, samples)
            .accepted();
    };

    Rational cap(1);
    for (int i = 0; i < options.magnitude_cap_exp; ++i) cap *= Rational(2);

    Rational low, high;
    if (accepts(Rational(0))) {
        if (!accepts(Rational(-1))) {
            low = Rational(-1);
            high = Rational(0);
        } else {
            Rational b(-2);
            while (accepts(b)) {
                b *= Rational(2);
                if (b.abs() > cap)
                    throw UnboundedError(goal == Goal::minimise ? UnboundedError::Direction::above
                                                                : UnboundedError::Direction::below);
            }
            low = b;
            high = b / Rational(2);
        }
    } else {
        if (accepts(Rational(1))) {
            low = Rational(0);
            high = Rational(1);
        } else {
            Rational b(2);
            while (!accepts(b)) {
                b *= Rational(2);
                if (b > cap)
                    throw UnboundedError(goal == Goal::minimise ? UnboundedError::Direction::below
                                                                : UnboundedError::Direction::above);
            }
            low = b / Rational(2);
            high = b;
        }
    }

    for (int i = 0; i < accuracy_a; ++i) {
        Rational mid = (low + high) / Rational(2);
        if (accepts(mid)) high = mid;
        else low = mid;
        assert(low < high);
    }

    OptimiseResult r;
    r.bracket_low = low;
    r.bracket_high = high;
    r.estimate = goal == Goal::minimise ? -low : low;
    r.decide_calls = calls;
    r.goal = goal;
    return r;
}

/// Sample count for the optimisation guarantee. The underlying concentration
/// bound leaves its constants unspecified; we expose the same Hoeffding-form
/// count as sample_count, which the accept/reject analysis already uses.
inline long optimise_sample_count(const Rational& gamma, const Rational& delta_conf) {
    return sample_count(gamma, delta_conf);
}

}  // namespace pacil
