#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "pacil/errors.hpp"
#include "pacil/linarith.hpp"
#include "pacil/rational.hpp"

namespace pacil {

using DeltaModel = std::map<Variable, DeltaRational>;

/// Result of a feasibility check. When SAT, the model satisfies every atom
/// of the input with delta read as a sufficiently small positive rational;
/// concretize() picks such a value.
struct Verdict {
    enum class Status { sat, unsat };
    Status status;
    std::optional<DeltaModel> model;

    bool is_sat() const { return status == Status::sat; }
};

/// General simplex over bound-constrained variables, exact rationals with
/// delta-rational bounds for strictness. Invariants maintained throughout:
/// the valuation satisfies every tableau equation, and every nonbasic
/// variable lies within its bounds. Pivoting uses Bland's rule (lowest
/// variable index), which rules out cycling.
class SimplexTableau {
public:
    explicit SimplexTableau(std::size_t structural_count) : nvars_(structural_count) {
        lower_.resize(nvars_);
        upper_.resize(nvars_);
    }

    /// Adds a slack variable defined as the given combination of structural
    /// variables; returns its id. Must be called before solve().
    std::size_t add_slack(std::vector<std::pair<std::size_t, Rational>> definition) {
        std::size_t id = nvars_++;
        lower_.emplace_back();
        upper_.emplace_back();
        pending_.emplace_back(id, std::move(definition));
        return id;
    }

    /// Tightens the lower bound; false means the bounds alone are inconsistent.
    bool assert_lower(std::size_t v, DeltaRational b) {
        if (!lower_[v] || *lower_[v] < b) lower_[v] = std::move(b);
        return !upper_[v] || *lower_[v] <= *upper_[v];
    }
    bool assert_upper(std::size_t v, DeltaRational b) {
        if (!upper_[v] || b < *upper_[v]) upper_[v] = std::move(b);
        return !lower_[v] || *lower_[v] <= *upper_[v];
    }

    bool solve() {
        materialize();
        // Clamp nonbasic (structural) variables into their bounds; every
        // slack starts basic with value 0 consistent with the all-zero point.
        for (std::size_t v = 0; v < nvars_; ++v) {
            if (row_of_[v] >= 0) continue;
            if (lower_[v] && val_[v] < *lower_[v]) update_nonbasic(v, *lower_[v]);
            else if (upper_[v] && val_[v] > *upper_[v]) update_nonbasic(v, *upper_[v]);
        }
        for (;;) {
            // Bland: violating basic variable of lowest index.
            std::size_t viol = nvars_;
            bool below = false;
            for (std::size_t v = 0; v < nvars_; ++v) {
                if (row_of_[v] < 0) continue;
                if (lower_[v] && val_[v] < *lower_[v]) {
                    viol = v;
                    below = true;
                    break;
                }
                if (upper_[v] && val_[v] > *upper_[v]) {
                    viol = v;
                    below = false;
                    break;
                }
            }
            if (viol == nvars_) return true;

            auto r = static_cast<std::size_t>(row_of_[viol]);
            std::size_t entering = nvars_;
            for (std::size_t j = 0; j < nvars_; ++j) {
                if (row_of_[j] >= 0 || j == viol) continue;
                int s = rows_[r][j].sign();
                if (s == 0) continue;
                bool can_increase = !upper_[j] || val_[j] < *upper_[j];
                bool can_decrease = !lower_[j] || val_[j] > *lower_[j];
                bool ok = below ? (s > 0 ? can_increase : can_decrease)
                                : (s > 0 ? can_decrease : can_increase);
                if (ok) {
                    entering = j;
                    break;
                }
            }
            if (entering == nvars_) return false;
            pivot_and_update(r, entering, below ? *lower_[viol] : *upper_[viol]);
        }
    }

    const DeltaRational& value(std::size_t v) const { return val_[v]; }
    std::uint64_t pivot_count() const { return pivots_; }

private:
    void materialize() {
        val_.assign(nvars_, DeltaRational());
        row_of_.assign(nvars_, -1);
        rows_.clear();
        basic_.clear();
        for (auto& [id, def] : pending_) {
            std::vector<Rational> row(nvars_, Rational(0));
            for (auto& [v, c] : def) row[v] = c;
            row_of_[id] = static_cast<std::ptrdiff_t>(rows_.size());
            rows_.push_back(std::move(row));
            basic_.push_back(id);
        }
        pending_.clear();
    }

    void update_nonbasic(std::size_t v, const DeltaRational& target) {
        DeltaRational diff = target - val_[v];
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const Rational& c = rows_[r][v];
            if (!c.is_zero()) val_[basic_[r]] += c * diff;
        }
        val_[v] = target;
    }

    void pivot_and_update(std::size_t r, std::size_t entering, const DeltaRational& target) {
        std::size_t leaving = basic_[r];
        const Rational a = rows_[r][entering];
        DeltaRational theta = (target - val_[leaving]) / a;
        val_[leaving] = target;
        val_[entering] += theta;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (k == r) continue;
            const Rational& c = rows_[k][entering];
            if (!c.is_zero()) val_[basic_[k]] += c * theta;
        }

        // Re-solve row r for the entering variable, then substitute it away
        // from every other row.
        Rational inv = a.reciprocal();
        std::vector<Rational> newrow(nvars_, Rational(0));
        for (std::size_t v = 0; v < nvars_; ++v) {
            if (v == entering || v == leaving) continue;
            if (!rows_[r][v].is_zero()) newrow[v] = -(rows_[r][v] * inv);
        }
        newrow[leaving] = inv;
        rows_[r] = std::move(newrow);
        basic_[r] = entering;
        row_of_[entering] = static_cast<std::ptrdiff_t>(r);
        row_of_[leaving] = -1;

        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (k == r) continue;
            Rational c = rows_[k][entering];
            if (c.is_zero()) continue;
            rows_[k][entering] = Rational(0);
            for (std::size_t v = 0; v < nvars_; ++v) {
                if (!rows_[r][v].is_zero()) rows_[k][v] += c * rows_[r][v];
            }
        }
        ++pivots_;
    }

    std::size_t nvars_;
    std::vector<std::optional<DeltaRational>> lower_, upper_;
    std::vector<DeltaRational> val_;
    std::vector<std::vector<Rational>> rows_;
    std::vector<std::size_t> basic_;
    std::vector<std::ptrdiff_t> row_of_;
    std::vector<std::pair<std::size_t, std::vector<std::pair<std::size_t, Rational>>>> pending_;
    std::uint64_t pivots_ = 0;
};

namespace detail {

struct FeasibilityStats {
    std::uint64_t pivots = 0;
};

inline Verdict check_feasible_impl(const ConjunctiveFormula& formula, FeasibilityStats* stats) {
    // Local dense variable ids, ordered by global index for determinism.
    std::map<Variable, std::size_t> local;
    std::vector<Variable> order;
    for (const auto& atom : formula.atoms()) {
        if (atom.relation() == Relation::neq) throw UnexpectedNeqError();
        for (const auto& [v, c] : atom.expr().coeffs()) {
            if (local.emplace(v, 0).second) order.push_back(v);
        }
    }
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i) local[order[i]] = i;

    SimplexTableau tableau(order.size());
    std::map<std::vector<std::pair<std::size_t, Rational>>, std::size_t> slack_of;

    for (const auto& atom : formula.atoms()) {
        const LinearExpr& e = atom.expr();
        Relation rel = atom.relation();
        if (e.is_constant()) {
            int s = e.constant().sign();
            bool ok = rel == Relation::le ? s <= 0 : rel == Relation::lt ? s < 0 : s == 0;
            if (!ok) return {Verdict::Status::unsat, std::nullopt};
            continue;
        }

        std::size_t target;
        Rational scale(1);  // target bound applies to scale * (linear part)
        if (e.coeffs().size() == 1) {
            const auto& [v, c] = *e.coeffs().begin();
            target = local[v];
            scale = c;
        } else {
            std::vector<std::pair<std::size_t, Rational>> def;
            def.reserve(e.coeffs().size());
            for (const auto& [v, c] : e.coeffs()) def.emplace_back(local[v], c);
            auto it = slack_of.find(def);
            if (it == slack_of.end()) {
                target = tableau.add_slack(def);
                slack_of.emplace(std::move(def), target);
            } else {
                target = it->second;
            }
        }

        // scale * x  rel  -c0. For the single-variable case divide through by
        // the coefficient, flipping the inequality when it is negative.
        Rational rhs = -e.constant() / scale;
        bool flipped = scale.sign() < 0;
        bool ok = true;
        switch (rel) {
            case Relation::le:
                ok = flipped ? tableau.assert_lower(target, DeltaRational(rhs))
                             : tableau.assert_upper(target, DeltaRational(rhs));
                break;
            case Relation::lt:
                ok = flipped ? tableau.assert_lower(target, DeltaRational(rhs, Rational(1)))
                             : tableau.assert_upper(target, DeltaRational(rhs, Rational(-1)));
                break;
            case Relation::eq:
                ok = tableau.assert_lower(target, DeltaRational(rhs)) &&
                     tableau.assert_upper(target, DeltaRational(rhs));
                break;
            default:
                throw UnexpectedNeqError();
        }
        if (!ok) return {Verdict::Status::unsat, std::nullopt};
    }

    bool sat = tableau.solve();
    if (stats) stats->pivots += tableau.pivot_count();
    if (!sat) return {Verdict::Status::unsat, std::nullopt};

    DeltaModel model;
    for (const auto& [v, idx] : local) model.emplace(v, tableau.value(idx));
    return {Verdict::Status::sat, std::move(model)};
}

}  // namespace detail

/// Sound and complete satisfiability check for a conjunction of {<=, <, =}
/// atoms over the rationals. Strict atoms are encoded as delta-rational
/// bounds (e < 0 becomes e <= -delta). Deterministic for a fixed input.
/// The empty formula is SAT with the empty model.
inline Verdict check_feasible(const ConjunctiveFormula& formula) {
    return detail::check_feasible_impl(formula, nullptr);
}

namespace detail {

/// Expands != atoms by two-way case split; the result is a disjunction of
/// NEQ-free conjunctions equivalent to the input.
inline std::vector<ConjunctiveFormula> expand_neq(const ConjunctiveFormula& formula) {
    std::vector<ConjunctiveFormula> cases{ConjunctiveFormula()};
    for (const auto& atom : formula.atoms()) {
        if (atom.relation() != Relation::neq) {
            for (auto& c : cases) c.add(atom);
            continue;
        }
        LinearAtom lo(atom.expr(), Relation::lt);
        LinearAtom hi(atom.expr(), Relation::gt);
        std::vector<ConjunctiveFormula> split;
        split.reserve(cases.size() * 2);
        for (const auto& c : cases) {
            ConjunctiveFormula a = c, b = c;
            a.add(lo);
            b.add(hi);
            split.push_back(std::move(a));
            split.push_back(std::move(b));
        }
        cases = std::move(split);
    }
    return cases;
}

}  // namespace detail

/// Does kb entail the conjunction of the query atoms? Checked as
/// infeasibility of kb together with each disjunct of the negated query.
/// An inconsistent kb entails everything (vacuous entailment) -- by design:
/// the accept/reject loop counts such samples as entailed.
inline bool entails(const ConjunctiveFormula& kb, const std::vector<LinearAtom>& query) {
    std::vector<LinearAtom> disjuncts;
    for (const auto& atom : query) {
        auto negs = atom.negate();
        disjuncts.insert(disjuncts.end(), negs.begin(), negs.end());
    }
    std::vector<ConjunctiveFormula> kb_cases = detail::expand_neq(kb);
    for (const auto& kb_case : kb_cases) {
        for (const auto& d : disjuncts) {
            ConjunctiveFormula f = kb_case;
            f.add(d);
            if (check_feasible(f).is_sat()) return false;
        }
    }
    return true;
}

/// Substitutes a concrete positive rational for delta, small enough that the
/// resulting assignment satisfies every atom of the formula. When no delta
/// component is active, delta* = 1 and the real parts come back unchanged.
inline Assignment concretize(const DeltaModel& model, const ConjunctiveFormula& formula) {
    // Each atom evaluates to A + B*delta; collect the sup of admissible delta.
    std::optional<Rational> cap;
    for (const auto& atom : formula.atoms()) {
        Rational a = atom.expr().constant();
        Rational b(0);
        for (const auto& [v, c] : atom.expr().coeffs()) {
            auto it = model.find(v);
            if (it == model.end()) throw MissingVariableError(v.name());
            a += c * it->second.real();
            b += c * it->second.delta();
        }
        switch (atom.relation()) {
            case Relation::le:
            case Relation::lt: {
                bool strict = atom.relation() == Relation::lt;
                if (a.sign() > 0 || (a.is_zero() && (b.sign() > 0 || (strict && b.is_zero()))))
                    throw Error("concretize: model does not satisfy the formula");
                if (a.sign() < 0 && b.sign() > 0) {
                    Rational limit = -a / b;
                    if (!cap || limit < *cap) cap = limit;
                }
                break;
            }
            case Relation::eq:
                if (!a.is_zero() || !b.is_zero())
                    throw Error("concretize: model does not satisfy an equality");
                break;
            case Relation::neq:
                // A != 0 with B = 0 always survives; otherwise any delta
                // smaller than |A/B| does. A = B = 0 cannot be fixed.
                if (a.is_zero() && b.is_zero())
                    throw Error("concretize: model does not satisfy a disequality");
                if (!a.is_zero() && !b.is_zero()) {
                    Rational limit = (a / b).abs();
                    if (!cap || limit < *cap) cap = limit;
                }
                break;
            default:
                break;
        }
    }
    Rational delta = cap ? *cap / Rational(2) : Rational(1);
    Assignment out;
    for (const auto& [v, dv] : model) out.emplace(v, dv.real() + dv.delta() * delta);
    return out;
}

}  // namespace pacil
