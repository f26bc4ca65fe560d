#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "pacil/errors.hpp"
#include "pacil/linarith.hpp"

namespace pacil {

enum class FmStatus { sat, unsat };

/// Fourier-Motzkin variable elimination, kept deliberately independent of
/// the simplex path so the two can cross-check each other. Exponential in
/// the worst case, hence the hard size limits (<= 5 variables, <= 12 atoms).
inline FmStatus fm_feasible(const ConjunctiveFormula& formula) {
    struct Row {
        std::map<std::uint32_t, Rational> coeffs;
        Rational constant;
        bool strict;  // sum + constant < 0 when true, <= 0 otherwise
    };

    std::set<std::uint32_t> vars;
    for (const auto& atom : formula.atoms()) {
        if (atom.relation() == Relation::neq) throw UnexpectedNeqError();
        for (const auto& [v, c] : atom.expr().coeffs()) vars.insert(v.index());
    }
    if (vars.size() > 5) throw SizeLimitError("fm_feasible: more than 5 variables");
    if (formula.size() > 12) throw SizeLimitError("fm_feasible: more than 12 atoms");

    // A constant row decides itself; returns false on violation.
    auto constant_ok = [](const Row& r) {
        int s = r.constant.sign();
        return r.strict ? s < 0 : s <= 0;
    };

    std::vector<Row> rows;
    auto push = [&](Row r) -> bool {
        if (r.coeffs.empty()) return constant_ok(r);
        rows.push_back(std::move(r));
        return true;
    };

    for (const auto& atom : formula.atoms()) {
        Row r;
        for (const auto& [v, c] : atom.expr().coeffs()) r.coeffs.emplace(v.index(), c);
        r.constant = atom.expr().constant();
        switch (atom.relation()) {
            case Relation::le:
                r.strict = false;
                if (!push(r)) return FmStatus::unsat;
                break;
            case Relation::lt:
                r.strict = true;
                if (!push(r)) return FmStatus::unsat;
                break;
            case Relation::eq: {
                Row neg;
                for (const auto& [v, c] : r.coeffs) neg.coeffs.emplace(v, -c);
                neg.constant = -r.constant;
                r.strict = neg.strict = false;
                if (!push(r) || !push(neg)) return FmStatus::unsat;
                break;
            }
            default:
                throw UnexpectedNeqError();
        }
    }

    for (std::uint32_t v : vars) {
        std::vector<Row> uppers, lowers, rest;
        for (auto& r : rows) {
            auto it = r.coeffs.find(v);
            if (it == r.coeffs.end()) rest.push_back(std::move(r));
            else if (it->second.sign() > 0) uppers.push_back(std::move(r));
            else lowers.push_back(std::move(r));
        }
        rows = std::move(rest);
        for (const auto& u : uppers) {
            for (const auto& l : lowers) {
                // Positive multipliers cancel v: (-l_v)*u + (u_v)*l.
                Rational mu = -l.coeffs.at(v);
                Rational ml = u.coeffs.at(v);
                Row comb;
                comb.strict = u.strict || l.strict;
                comb.constant = mu * u.constant + ml * l.constant;
                for (const auto& [w, c] : u.coeffs)
                    if (w != v) comb.coeffs.emplace(w, mu * c);
                for (const auto& [w, c] : l.coeffs) {
                    if (w == v) continue;
                    auto [it, inserted] = comb.coeffs.emplace(w, ml * c);
                    if (!inserted) {
                        it->second += ml * c;
                        if (it->second.is_zero()) comb.coeffs.erase(it);
                    }
                }
                if (!push(std::move(comb))) return FmStatus::unsat;
            }
        }
    }
    return FmStatus::sat;
}

}  // namespace pacil
