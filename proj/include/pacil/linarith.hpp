#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pacil/errors.hpp"
#include "pacil/rational.hpp"

namespace pacil {

/// Named variable with a dense index. Within one problem, names are unique
/// and indices are contiguous from 0 (enforced by VariableTable); ordering
/// and equality go by index only.
class Variable {
public:
    Variable(std::string name, std::uint32_t index) : name_(std::move(name)), index_(index) {}

    const std::string& name() const { return name_; }
    std::uint32_t index() const { return index_; }

    friend bool operator==(const Variable& a, const Variable& b) { return a.index_ == b.index_; }
    friend bool operator!=(const Variable& a, const Variable& b) { return a.index_ != b.index_; }
    friend bool operator<(const Variable& a, const Variable& b) { return a.index_ < b.index_; }

private:
    std::string name_;
    std::uint32_t index_;
};

/// Interns names to dense indices at problem construction.
class VariableTable {
public:
    Variable intern(std::string_view name) {
        auto it = by_name_.find(std::string(name));
        if (it != by_name_.end()) return vars_[it->second];
        auto idx = static_cast<std::uint32_t>(vars_.size());
        vars_.emplace_back(std::string(name), idx);
        by_name_.emplace(std::string(name), idx);
        return vars_.back();
    }

    std::optional<Variable> find(std::string_view name) const {
        auto it = by_name_.find(std::string(name));
        if (it == by_name_.end()) return std::nullopt;
        return vars_[it->second];
    }

    const Variable& at(std::uint32_t index) const { return vars_.at(index); }
    std::size_t size() const { return vars_.size(); }
    auto begin() const { return vars_.begin(); }
    auto end() const { return vars_.end(); }

private:
    std::vector<Variable> vars_;
    std::map<std::string, std::uint32_t> by_name_;
};

using Assignment = std::map<Variable, Rational>;

/// Sum coeff*var + constant. Zero coefficients are never stored.
class LinearExpr {
public:
    LinearExpr() = default;
    explicit LinearExpr(Rational constant) : constant_(std::move(constant)) {}

    static LinearExpr term(const Variable& v, Rational coeff) {
        LinearExpr e;
        e.add_term(v, std::move(coeff));
        return e;
    }

    void add_term(const Variable& v, const Rational& coeff) {
        if (coeff.is_zero()) return;
        auto [it, inserted] = coeffs_.emplace(v, coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second.is_zero()) coeffs_.erase(it);
        }
    }
    void add_constant(const Rational& c) { constant_ += c; }

    const std::map<Variable, Rational>& coeffs() const { return coeffs_; }
    const Rational& constant() const { return constant_; }
    Rational coeff(const Variable& v) const {
        auto it = coeffs_.find(v);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }
    bool is_constant() const { return coeffs_.empty(); }

    LinearExpr operator-() const {
        LinearExpr e(-constant_);
        for (const auto& [v, c] : coeffs_) e.coeffs_.emplace(v, -c);
        return e;
    }
    LinearExpr& operator+=(const LinearExpr& o) {
        for (const auto& [v, c] : o.coeffs_) add_term(v, c);
        constant_ += o.constant_;
        return *this;
    }
    LinearExpr& operator-=(const LinearExpr& o) { return *this += -o; }
    LinearExpr& operator*=(const Rational& k) {
        if (k.is_zero()) {
            coeffs_.clear();
            constant_ = Rational(0);
            return *this;
        }
        for (auto& [v, c] : coeffs_) c *= k;
        constant_ *= k;
        return *this;
    }
    friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
    friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
    friend LinearExpr operator*(LinearExpr a, const Rational& k) { return a *= k; }
    friend LinearExpr operator*(const Rational& k, LinearExpr a) { return a *= k; }

    friend bool operator==(const LinearExpr& a, const LinearExpr& b) {
        return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
    }

    /// Exact value under the assignment; every variable with a nonzero
    /// coefficient must be bound.
    Rational evaluate(const Assignment& assignment) const {
        Rational v = constant_;
        for (const auto& [var, c] : coeffs_) {
            auto it = assignment.find(var);
            if (it == assignment.end()) throw MissingVariableError(var.name());
            v += c * it->second;
        }
        return v;
    }

    /// Canonical text form: "c*v + ... + const" with rationals as p/q.
    std::string render() const {
        std::ostringstream os;
        bool first = true;
        for (const auto& [v, c] : coeffs_) {
            if (!first) os << " + ";
            os << c.to_string() << "*" << v.name();
            first = false;
        }
        if (!constant_.is_zero() || first) {
            if (!first) os << " + ";
            os << constant_.to_string();
        }
        return os.str();
    }

private:
    std::map<Variable, Rational> coeffs_;
    Rational constant_;
};

/// Relations on expr vs 0. ge/gt are accepted at construction and rewritten
/// to le/lt by negating the expression, so a stored atom's relation is one
/// of {le, lt, eq, neq}.
enum class Relation { le, lt, ge, gt, eq, neq };

inline std::string_view relation_token(Relation r) {
    switch (r) {
        case Relation::le: return "<=";
        case Relation::lt: return "<";
        case Relation::ge: return ">=";
        case Relation::gt: return ">";
        case Relation::eq: return "=";
        case Relation::neq: return "!=";
    }
    return "?";
}

class LinearAtom {
public:
    LinearAtom(LinearExpr expr, Relation rel) : expr_(std::move(expr)), rel_(rel) {
        if (rel_ == Relation::ge) {
            expr_ = -expr_;
            rel_ = Relation::le;
        } else if (rel_ == Relation::gt) {
            expr_ = -expr_;
            rel_ = Relation::lt;
        }
    }

    const LinearExpr& expr() const { return expr_; }
    Relation relation() const { return rel_; }

    bool satisfies(const Assignment& assignment) const {
        Rational v = expr_.evaluate(assignment);
        switch (rel_) {
            case Relation::le: return v.sign() <= 0;
            case Relation::lt: return v.sign() < 0;
            case Relation::eq: return v.is_zero();
            case Relation::neq: return !v.is_zero();
            default: return false;  // unreachable: ge/gt are canonicalized away
        }
    }

    /// Classical negation as a disjunction of atoms whose models are exactly
    /// the complement:
    ///   !(e <= 0) -> [e > 0];  !(e < 0) -> [e >= 0]
    ///   !(e  = 0) -> [e < 0, e > 0];  !(e != 0) -> [e = 0]
    std::vector<LinearAtom> negate() const {
        switch (rel_) {
            case Relation::le: return {LinearAtom(expr_, Relation::gt)};
            case Relation::lt: return {LinearAtom(expr_, Relation::ge)};
            case Relation::eq:
                return {LinearAtom(expr_, Relation::lt), LinearAtom(expr_, Relation::gt)};
            case Relation::neq: return {LinearAtom(expr_, Relation::eq)};
            default: return {};  // unreachable
        }
    }

    friend bool operator==(const LinearAtom& a, const LinearAtom& b) {
        return a.rel_ == b.rel_ && a.expr_ == b.expr_;
    }

    std::string render() const {
        std::ostringstream os;
        os << expr_.render() << " " << relation_token(rel_) << " 0";
        return os.str();
    }

private:
    LinearExpr expr_;
    Relation rel_;
};

/// Ordered conjunction of atoms; the empty formula is TRUE.
class ConjunctiveFormula {
public:
    ConjunctiveFormula() = default;
    explicit ConjunctiveFormula(std::vector<LinearAtom> atoms) : atoms_(std::move(atoms)) {}

    void add(LinearAtom atom) { atoms_.push_back(std::move(atom)); }
    void conjoin(const ConjunctiveFormula& other) {
        atoms_.insert(atoms_.end(), other.atoms_.begin(), other.atoms_.end());
    }

    const std::vector<LinearAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    bool contains_neq() const {
        for (const auto& a : atoms_)
            if (a.relation() == Relation::neq) return true;
        return false;
    }

    bool satisfies(const Assignment& assignment) const {
        for (const auto& a : atoms_)
            if (!a.satisfies(assignment)) return false;
        return true;
    }

    std::string render() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (i) os << "  &&  ";
            os << atoms_[i].render();
        }
        return os.str();
    }

private:
    std::vector<LinearAtom> atoms_;
};

// --- text format -----------------------------------------------------------
//
// expr  := ['-'] term (('+'|'-') term)*
// term  := rational '*' ident | rational | ident
// atom  := expr relop expr        (canonical output always uses "... relop 0")
// relop := '<=' | '<' | '>=' | '>' | '=' | '!='
//
// Rationals accept "p", "p/q" and decimals; idents are [A-Za-z_][A-Za-z0-9_]*.

namespace detail {

class ExprParser {
public:
    ExprParser(std::string_view text, VariableTable& table) : in_(text), table_(table) {}

    LinearExpr parse_expr() {
        LinearExpr e;
        skip_ws();
        bool negative = consume('-');
        parse_term(e, negative);
        for (;;) {
            skip_ws();
            if (consume('+')) parse_term(e, false);
            else if (consume('-')) parse_term(e, true);
            else break;
        }
        return e;
    }

    std::optional<Relation> parse_relop() {
        skip_ws();
        if (consume('<')) return consume('=') ? Relation::le : Relation::lt;
        if (consume('>')) return consume('=') ? Relation::ge : Relation::gt;
        if (consume('=')) return Relation::eq;
        if (consume('!')) return consume('=') ? std::optional<Relation>(Relation::neq) : std::nullopt;
        return std::nullopt;
    }

    bool at_end() {
        skip_ws();
        return pos_ == in_.size();
    }

    [[noreturn]] void fail(const std::string& reason) {
        throw Error(reason + " in '" + std::string(in_) + "'");
    }

private:
    void parse_term(LinearExpr& e, bool negative) {
        skip_ws();
        while (consume('-')) {  // signed coefficients, e.g. "+ -5*ox"
            negative = !negative;
            skip_ws();
        }
        if (pos_ >= in_.size()) fail("expected term");
        if (is_ident_start(in_[pos_])) {
            Rational c = negative ? Rational(-1) : Rational(1);
            e.add_term(table_.intern(parse_ident()), c);
            return;
        }
        Rational c = parse_rational();
        if (negative) c = -c;
        skip_ws();
        if (consume('*')) {
            skip_ws();
            if (pos_ >= in_.size() || !is_ident_start(in_[pos_])) fail("expected identifier after '*'");
            e.add_term(table_.intern(parse_ident()), c);
        } else {
            e.add_constant(c);
        }
    }

    Rational parse_rational() {
        std::size_t start = pos_;
        while (pos_ < in_.size() &&
               (std::isdigit(static_cast<unsigned char>(in_[pos_])) || in_[pos_] == '/' ||
                in_[pos_] == '.'))
            ++pos_;
        auto r = Rational::parse(in_.substr(start, pos_ - start));
        if (!r) fail("bad rational '" + std::string(in_.substr(start, pos_ - start)) + "'");
        return *r;
    }

    std::string parse_ident() {
        std::size_t start = pos_;
        while (pos_ < in_.size() && is_ident_char(in_[pos_])) ++pos_;
        return std::string(in_.substr(start, pos_ - start));
    }

    static bool is_ident_start(char c) {
        return c == '_' || std::isalpha(static_cast<unsigned char>(c));
    }
    static bool is_ident_char(char c) {
        return c == '_' || std::isalnum(static_cast<unsigned char>(c));
    }

    void skip_ws() {
        while (pos_ < in_.size() && (in_[pos_] == ' ' || in_[pos_] == '\t')) ++pos_;
    }
    bool consume(char c) {
        if (pos_ < in_.size() && in_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string_view in_;
    std::size_t pos_ = 0;
    VariableTable& table_;
};

}  // namespace detail

inline LinearExpr parse_linear_expr(std::string_view text, VariableTable& table) {
    detail::ExprParser p(text, table);
    LinearExpr e = p.parse_expr();
    if (!p.at_end()) p.fail("trailing input after expression");
    return e;
}

inline LinearAtom parse_linear_atom(std::string_view text, VariableTable& table) {
    detail::ExprParser p(text, table);
    LinearExpr lhs = p.parse_expr();
    auto rel = p.parse_relop();
    if (!rel) p.fail("expected relational operator");
    LinearExpr rhs = p.parse_expr();
    if (!p.at_end()) p.fail("trailing input after atom");
    return LinearAtom(lhs - rhs, *rel);
}

/// Atoms joined by "&&", interpreted as a conjunction.
inline std::vector<LinearAtom> parse_query(std::string_view text, VariableTable& table) {
    std::vector<LinearAtom> atoms;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t sep = text.find("&&", start);
        std::string_view piece =
            sep == std::string_view::npos ? text.substr(start) : text.substr(start, sep - start);
        atoms.push_back(parse_linear_atom(piece, table));
        if (sep == std::string_view::npos) break;
        start = sep + 2;
    }
    return atoms;
}

}  // namespace pacil
