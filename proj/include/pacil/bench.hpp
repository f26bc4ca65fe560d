#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pacil/errors.hpp"
#include "pacil/linarith.hpp"
#include "pacil/optimise.hpp"
#include "pacil/pac.hpp"
#include "pacil/rng.hpp"
#include "pacil/simplex.hpp"

namespace pacil {

/// A benchmark problem: bounded domain box, hard constraints carving the
/// feasible region out of the box, and a linear objective.
struct ProblemSpec {
    std::string name;
    VariableTable variables;
    std::vector<std::pair<Rational, Rational>> domain_box;  // by variable index
    ConjunctiveFormula hard_constraints;
    LinearExpr objective;
    Goal goal = Goal::maximise;
    std::optional<Rational> true_optimum;

    int dims() const { return static_cast<int>(variables.size()); }

    ConjunctiveFormula box_formula() const {
        ConjunctiveFormula f;
        for (std::size_t i = 0; i < domain_box.size(); ++i) {
            const Variable& v = variables.at(static_cast<std::uint32_t>(i));
            LinearExpr lo(domain_box[i].first);
            lo.add_term(v, Rational(-1));
            f.add(LinearAtom(std::move(lo), Relation::le));
            LinearExpr hi(-domain_box[i].second);
            hi.add_term(v, Rational(1));
            f.add(LinearAtom(std::move(hi), Relation::le));
        }
        return f;
    }

    /// Box and hard constraints together; this is the knowledge base the
    /// experiment pipeline hands to the PAC procedures.
    ConjunctiveFormula region_formula() const {
        ConjunctiveFormula f = box_formula();
        f.conjoin(hard_constraints);
        return f;
    }

    std::map<Variable, std::pair<Rational, Rational>> box_map() const {
        std::map<Variable, std::pair<Rational, Rational>> m;
        for (std::size_t i = 0; i < domain_box.size(); ++i)
            m.emplace(variables.at(static_cast<std::uint32_t>(i)), domain_box[i]);
        return m;
    }
};

enum class Label { positive, negative };

struct LabelledSample {
    Assignment point;
    Label label = Label::positive;
    std::optional<PartialInterval> blurred;
};

// --- exact LP optimum via the feasibility engine ----------------------------

namespace detail {

/// Simplest rational (minimal denominator, then minimal magnitude) in the
/// closed interval [lo, hi]; Stern-Brocot descent.
inline Rational simplest_in(const Rational& lo, const Rational& hi) {
    if (lo == hi) return lo;
    if (lo.sign() <= 0 && hi.sign() >= 0) return Rational(0);
    if (hi.sign() < 0) return -simplest_in(-hi, -lo);
    Rational lo_ceil(lo.ceil());
    if (lo_ceil <= hi) return lo_ceil;
    Rational whole(lo.floor());
    return whole + simplest_in((hi - whole).reciprocal(), (lo - whole).reciprocal()).reciprocal();
}

}  // namespace detail

/// Exact optimum of a linear objective over a feasible region, computed by
/// bisection on feasibility queries region && (f >= b). Candidates from the
/// shrinking bracket are verified by the attainment pair SAT(f = cand) /
/// UNSAT(f > cand), so the returned value is the exact rational optimum.
/// The box argument supplies an initial upper bound for the bracket.
inline Rational exact_lp_optimum(const ConjunctiveFormula& region, const LinearExpr& objective,
                                 Goal goal,
                                 const std::map<Variable, std::pair<Rational, Rational>>& box) {
    LinearExpr f = goal == Goal::minimise ? -objective : objective;

    Verdict v = check_feasible(region);
    if (!v.is_sat()) throw InfeasibleProblemError("region is infeasible");
    Assignment start = concretize(*v.model, region);
    // Samples may not bind every objective variable if the region does not
    // mention it; require the box to cover all of them.
    Rational low = f.constant();
    for (const auto& [var, c] : f.coeffs()) {
        auto it = start.find(var);
        if (it != start.end()) {
            low += c * it->second;
            continue;
        }
        auto bt = box.find(var);
        if (bt == box.end()) throw MissingVariableError(var.name());
        low += c * (c.sign() > 0 ? bt->second.first : bt->second.second);
    }
    Rational high = f.constant();
    for (const auto& [var, c] : f.coeffs()) {
        auto it = box.find(var);
        if (it == box.end()) throw MissingVariableError(var.name());
        high += c * (c.sign() > 0 ? it->second.second : it->second.first);
    }

    auto sat_at_least = [&](const Rational& b, bool strict) {
        ConjunctiveFormula q = region;
        LinearExpr e = -f;
        e.add_constant(b);  // b - f <= 0  <=>  f >= b
        q.add(LinearAtom(std::move(e), strict ? Relation::lt : Relation::le));
        return check_feasible(q).is_sat();
    };

    for (;;) {
        Rational cand = detail::simplest_in(low, high);
        if (sat_at_least(cand, false) && !sat_at_least(cand, true))
            return goal == Goal::minimise ? -cand : cand;
        Rational mid = (low + high) / Rational(2);
        if (sat_at_least(mid, false)) low = mid;
        else high = mid;
    }
}

// --- generated problem families ----------------------------------------------

namespace detail {

/// Random objective: coefficients and constant uniform dyadics in [-1, 1].
inline LinearExpr random_objective(const VariableTable& vars, SplitMix64& rng) {
    LinearExpr f;
    for (const auto& v : vars) {
        Rational c = Rational(2) * rng.next_unit_rational() - Rational(1);
        f.add_term(v, c);
    }
    f.add_constant(Rational(2) * rng.next_unit_rational() - Rational(1));
    return f;
}

inline void finish_generated(ProblemSpec& spec) {
    spec.true_optimum =
        exact_lp_optimum(spec.region_formula(), spec.objective, spec.goal, spec.box_map());
}

}  // namespace detail

/// The prism family on [0,1]^n, n in 2..4: for every variable pair (i, j)
/// the same triangular cross-section in the (x_i, x_j) plane, extended along
/// the remaining axes, giving 3 * n(n-1)/2 hard constraints. The objective
/// is random, the geometry deterministic.
inline ProblemSpec gen_simplexn(int n, SplitMix64& rng) {
    if (n < 2 || n > 4) throw OutOfRangeError("simplexn supports n in 2..4");
    ProblemSpec spec;
    spec.name = "simplexn";
    for (int i = 0; i < n; ++i) spec.variables.intern("x" + std::to_string(i + 1));
    spec.domain_box.assign(static_cast<std::size_t>(n), {Rational(0), Rational(1)});

    // Triangle with vertices (0,0), (1,0), (1/2,1) in the (x_i, x_j) plane:
    //   x_j >= 0,  2*x_i - x_j >= 0,  2*x_i + x_j <= 2.
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const Variable& xi = spec.variables.at(static_cast<std::uint32_t>(i));
            const Variable& xj = spec.variables.at(static_cast<std::uint32_t>(j));
            spec.hard_constraints.add(LinearAtom(LinearExpr::term(xj, Rational(1)), Relation::ge));
            LinearExpr left = LinearExpr::term(xi, Rational(2)) - LinearExpr::term(xj, Rational(1));
            spec.hard_constraints.add(LinearAtom(std::move(left), Relation::ge));
            LinearExpr right = LinearExpr::term(xi, Rational(2)) + LinearExpr::term(xj, Rational(1));
            right.add_constant(Rational(-2));
            spec.hard_constraints.add(LinearAtom(std::move(right), Relation::le));
        }
    }
    spec.objective = detail::random_objective(spec.variables, rng);
    spec.goal = Goal::maximise;
    detail::finish_generated(spec);
    return spec;
}

/// Axis-aligned hypercube drawn strictly inside [0,1]^n with slack on every
/// face: x_i in [a_i, b_i], a_i in [1/20, 2/5], b_i in [3/5, 19/20].
inline ProblemSpec gen_cuben(int n, SplitMix64& rng) {
    if (n < 2 || n > 4) throw OutOfRangeError("cuben supports n in 2..4");
    ProblemSpec spec;
    spec.name = "cuben";
    for (int i = 0; i < n; ++i) spec.variables.intern("x" + std::to_string(i + 1));
    spec.domain_box.assign(static_cast<std::size_t>(n), {Rational(0), Rational(1)});

    for (int i = 0; i < n; ++i) {
        const Variable& xi = spec.variables.at(static_cast<std::uint32_t>(i));
        Rational a = Rational(1, 20) + rng.next_unit_rational() * Rational(7, 20);
        Rational b = Rational(3, 5) + rng.next_unit_rational() * Rational(7, 20);
        LinearExpr lo(a);
        lo.add_term(xi, Rational(-1));
        spec.hard_constraints.add(LinearAtom(std::move(lo), Relation::le));
        LinearExpr hi(-b);
        hi.add_term(xi, Rational(1));
        spec.hard_constraints.add(LinearAtom(std::move(hi), Relation::le));
    }
    spec.objective = detail::random_objective(spec.variables, rng);
    spec.goal = Goal::maximise;
    detail::finish_generated(spec);
    return spec;
}

// --- problem file format -----------------------------------------------------
//
// Line-oriented text; '#' starts a comment, blank lines ignored.
//   name: <string>            header, optional
//   dims: <int>               header, optional (validated against var lines)
//   goal: maximise|minimise   required for optimisation problems
//   optimum: <rational>       optional
//   var <name> <lo> <hi>      one per variable; lo/hi admit -inf / inf
//   con <atom>                hard constraint, e.g. "12*x1 + 9*x2 >= 60"
//   obj <expr>                linear objective
//
// Knowledge-base files use the same grammar with goal/obj omitted.

/// A knowledge base loaded from file: variable bounds plus constraints.
struct KnowledgeBase {
    VariableTable variables;
    std::vector<VarInterval> box;  // by variable index; infinite ends allowed
    ConjunctiveFormula constraints;

    ConjunctiveFormula formula() const {
        ConjunctiveFormula f;
        for (std::size_t i = 0; i < box.size(); ++i) {
            const Variable& v = variables.at(static_cast<std::uint32_t>(i));
            if (box[i].lower) {
                LinearExpr e(*box[i].lower);
                e.add_term(v, Rational(-1));
                f.add(LinearAtom(std::move(e), Relation::le));
            }
            if (box[i].upper) {
                LinearExpr e(-*box[i].upper);
                e.add_term(v, Rational(1));
                f.add(LinearAtom(std::move(e), Relation::le));
            }
        }
        f.conjoin(constraints);
        return f;
    }
};

namespace detail {

struct ParsedProblemFile {
    std::map<std::string, std::string> headers;
    VariableTable variables;
    std::vector<VarInterval> box;
    ConjunctiveFormula constraints;
    std::optional<LinearExpr> objective;
};

inline std::optional<Rational> parse_bound_token(const std::string& tok, bool lower) {
    if (lower && tok == "-inf") return std::nullopt;
    if (!lower && tok == "inf") return std::nullopt;
    auto r = Rational::parse(tok);
    if (!r) throw Error("bad bound '" + tok + "'");
    return r;
}

inline ParsedProblemFile parse_problem_stream(std::istream& in) {
    ParsedProblemFile out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        try {
            if (word == "var") {
                std::string name, lo, hi;
                if (!(ls >> name >> lo >> hi)) throw Error("var needs <name> <lo> <hi>");
                if (out.variables.find(name)) throw Error("duplicate variable '" + name + "'");
                out.variables.intern(name);
                VarInterval iv{parse_bound_token(lo, true), parse_bound_token(hi, false)};
                if (iv.lower && iv.upper && *iv.upper < *iv.lower)
                    throw Error("empty bounds for '" + name + "'");
                out.box.push_back(iv);
            } else if (word == "con") {
                std::string rest;
                std::getline(ls, rest);
                out.constraints.add(parse_linear_atom(rest, out.variables));
            } else if (word == "obj") {
                std::string rest;
                std::getline(ls, rest);
                if (out.objective) throw Error("multiple obj lines");
                out.objective = parse_linear_expr(rest, out.variables);
            } else if (!word.empty() && word.back() == ':') {
                std::string value;
                std::getline(ls, value);
                auto b = value.find_first_not_of(" \t");
                auto e = value.find_last_not_of(" \t");
                out.headers[word.substr(0, word.size() - 1)] =
                    b == std::string::npos ? "" : value.substr(b, e - b + 1);
            } else {
                throw Error("unknown directive '" + word + "'");
            }
        } catch (const Error& err) {
            throw ParseError(lineno, err.what());
        }
    }
    return out;
}

}  // namespace detail

inline KnowledgeBase load_knowledge_base(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    auto parsed = detail::parse_problem_stream(in);
    KnowledgeBase kb;
    kb.variables = std::move(parsed.variables);
    kb.box = std::move(parsed.box);
    kb.constraints = std::move(parsed.constraints);
    return kb;
}

/// Loads and validates an optimisation problem: finite box, objective, goal,
/// and a feasibility check of box plus hard constraints.
inline ProblemSpec load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    auto parsed = detail::parse_problem_stream(in);

    ProblemSpec spec;
    auto name_it = parsed.headers.find("name");
    spec.name = name_it != parsed.headers.end() ? name_it->second : path.stem().string();
    spec.variables = std::move(parsed.variables);
    spec.hard_constraints = std::move(parsed.constraints);

    for (std::size_t i = 0; i < parsed.box.size(); ++i) {
        const auto& iv = parsed.box[i];
        if (!iv.lower || !iv.upper)
            throw ParseError(0, "problem file requires finite bounds for every variable");
        spec.domain_box.emplace_back(*iv.lower, *iv.upper);
    }
    if (spec.variables.size() == 0) throw ParseError(0, "problem file declares no variables");

    auto dims_it = parsed.headers.find("dims");
    if (dims_it != parsed.headers.end() &&
        std::to_string(spec.variables.size()) != dims_it->second)
        throw ParseError(0, "dims header does not match the var lines");

    auto goal_it = parsed.headers.find("goal");
    if (goal_it == parsed.headers.end()) throw ParseError(0, "missing goal header");
    if (goal_it->second == "maximise") spec.goal = Goal::maximise;
    else if (goal_it->second == "minimise") spec.goal = Goal::minimise;
    else throw ParseError(0, "goal must be maximise or minimise");

    if (!parsed.objective) throw ParseError(0, "missing obj line");
    spec.objective = std::move(*parsed.objective);

    auto opt_it = parsed.headers.find("optimum");
    if (opt_it != parsed.headers.end()) {
        auto r = Rational::parse(opt_it->second);
        if (!r) throw ParseError(0, "bad optimum value");
        spec.true_optimum = *r;
    }

    if (!check_feasible(spec.region_formula()).is_sat())
        throw InfeasibleProblemError("problem '" + spec.name + "' has an empty feasible region");
    return spec;
}

inline void write_problem(std::ostream& os, const ProblemSpec& spec) {
    os << "name: " << spec.name << "\n";
    os << "dims: " << spec.dims() << "\n";
    os << "goal: " << goal_token(spec.goal) << "\n";
    if (spec.true_optimum) os << "optimum: " << spec.true_optimum->to_string() << "\n";
    for (std::size_t i = 0; i < spec.domain_box.size(); ++i) {
        os << "var " << spec.variables.at(static_cast<std::uint32_t>(i)).name() << " "
           << spec.domain_box[i].first.to_string() << " " << spec.domain_box[i].second.to_string()
           << "\n";
    }
    for (const auto& atom : spec.hard_constraints.atoms()) os << "con " << atom.render() << "\n";
    os << "obj " << spec.objective.render() << "\n";
}

// --- dataset file format -------------------------------------------------------
//
// One sample per line:  label;x1,...,xd;lo1,hi1,...,lod,hid
// label is pos or neg; rationals as p/q; -inf / inf mark masked bounds.
// The third field is empty when the sample carries no blurred view.

inline void write_dataset(std::ostream& os, const std::vector<LabelledSample>& samples,
                          const VariableTable& variables) {
    for (const auto& s : samples) {
        os << (s.label == Label::positive ? "pos" : "neg") << ";";
        for (std::size_t i = 0; i < variables.size(); ++i) {
            if (i) os << ",";
            os << s.point.at(variables.at(static_cast<std::uint32_t>(i))).to_string();
        }
        os << ";";
        if (s.blurred) {
            for (std::size_t i = 0; i < variables.size(); ++i) {
                const auto& iv = s.blurred->bounds().at(variables.at(static_cast<std::uint32_t>(i)));
                if (i) os << ",";
                os << (iv.lower ? iv.lower->to_string() : "-inf") << ","
                   << (iv.upper ? iv.upper->to_string() : "inf");
            }
        }
        os << "\n";
    }
}

inline std::vector<LabelledSample> load_dataset(std::istream& in, const VariableTable& variables) {
    std::vector<LabelledSample> out;
    std::string line;
    int lineno = 0;
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (;;) {
            auto p = s.find(sep, start);
            parts.push_back(s.substr(start, p - start));
            if (p == std::string::npos) break;
            start = p + 1;
        }
        return parts;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line, ';');
        if (fields.size() != 3) throw ParseError(lineno, "expected label;point;intervals");
        LabelledSample s;
        if (fields[0] == "pos") s.label = Label::positive;
        else if (fields[0] == "neg") s.label = Label::negative;
        else throw ParseError(lineno, "label must be pos or neg");

        auto coords = split(fields[1], ',');
        if (coords.size() != variables.size())
            throw ParseError(lineno, "wrong point dimension");
        for (std::size_t i = 0; i < coords.size(); ++i) {
            auto r = Rational::parse(coords[i]);
            if (!r) throw ParseError(lineno, "bad coordinate '" + coords[i] + "'");
            s.point.emplace(variables.at(static_cast<std::uint32_t>(i)), *r);
        }

        if (!fields[2].empty()) {
            auto ends = split(fields[2], ',');
            if (ends.size() != 2 * variables.size())
                throw ParseError(lineno, "wrong interval dimension");
            PartialInterval blur;
            for (std::size_t i = 0; i < variables.size(); ++i) {
                std::optional<Rational> lo, hi;
                try {
                    lo = detail::parse_bound_token(ends[2 * i], true);
                    hi = detail::parse_bound_token(ends[2 * i + 1], false);
                } catch (const Error& err) {
                    throw ParseError(lineno, err.what());
                }
                blur.set(variables.at(static_cast<std::uint32_t>(i)), lo, hi);
            }
            s.blurred = std::move(blur);
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<LabelledSample> load_dataset(const std::filesystem::path& path,
                                                const VariableTable& variables) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    return load_dataset(in, variables);
}

// --- dataset generation --------------------------------------------------------

/// Draws count samples: the first floor(count * pos_ratio) uniformly from
/// the feasible region, the rest uniformly from box minus region, both by
/// rejection over the domain box. Each sample's label is then flipped with
/// probability outlier_ratio, and every positively-labelled sample gets a
/// blurred view with sigma = noise_n / sqrt(dims). Per-index substreams keep
/// the output independent of generation order.
inline std::vector<LabelledSample> sample_dataset(const ProblemSpec& spec, long count,
                                                  const Rational& pos_ratio,
                                                  const Rational& noise_n,
                                                  const Rational& outlier_ratio,
                                                  SplitMix64& rng) {
    if (count <= 0) throw OutOfRangeError("dataset size must be positive");
    if (pos_ratio.sign() < 0 || pos_ratio > Rational(1))
        throw OutOfRangeError("pos_ratio must lie in [0, 1]");
    if (noise_n.sign() < 0) throw OutOfRangeError("noise must be >= 0");
    if (outlier_ratio.sign() < 0 || outlier_ratio > Rational(1))
        throw OutOfRangeError("outlier ratio must lie in [0, 1]");

    long n_pos = (pos_ratio * Rational(count)).floor_long();
    BlurConfig blur_config{spec.box_map(), Rational(0),
                           noise_n.to_double() / std::sqrt(static_cast<double>(spec.dims()))};

    // Acceptance-rate floor of 1e-4, enforced as an attempt cap per sample.
    constexpr long kMaxAttempts = 100000;

    std::uint64_t base = rng.next();
    std::vector<LabelledSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        SplitMix64 stream(rng::derive(base, {static_cast<std::uint64_t>(i)}));
        bool want_positive = i < n_pos;
        LabelledSample s;
        bool found = false;
        for (long attempt = 0; attempt < kMaxAttempts; ++attempt) {
            Assignment point;
            for (std::size_t d = 0; d < spec.domain_box.size(); ++d) {
                const auto& [lo, hi] = spec.domain_box[d];
                Rational x = lo + stream.next_unit_rational() * (hi - lo);
                point.emplace(spec.variables.at(static_cast<std::uint32_t>(d)), x);
            }
            if (spec.hard_constraints.satisfies(point) == want_positive) {
                s.point = std::move(point);
                found = true;
                break;
            }
        }
        if (!found)
            throw RejectionBudgetError("rejection sampling acceptance rate below 1e-4 for '" +
                                       spec.name + "'");
        s.label = want_positive ? Label::positive : Label::negative;
        if (stream.next_unit_rational() < outlier_ratio)
            s.label = s.label == Label::positive ? Label::negative : Label::positive;
        if (s.label == Label::positive) s.blurred = blur(s.point, blur_config, stream);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace pacil
