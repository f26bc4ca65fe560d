#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "pacil/errors.hpp"
#include "pacil/exact_log.hpp"
#include "pacil/linarith.hpp"
#include "pacil/rng.hpp"
#include "pacil/simplex.hpp"

namespace pacil {

/// Per-variable interval with optional infinite ends; nullopt stands for
/// -inf (lower) or +inf (upper). A fully masked variable is (-inf, +inf),
/// a point observation has lower = upper.
struct VarInterval {
    std::optional<Rational> lower, upper;

    bool is_point() const { return lower && upper && *lower == *upper; }
    bool is_masked() const { return !lower && !upper; }
    bool contains(const Rational& x) const {
        return (!lower || *lower <= x) && (!upper || x <= *upper);
    }
};

/// A blurred example: interval bounds per variable.
class PartialInterval {
public:
    void set(const Variable& v, std::optional<Rational> lo, std::optional<Rational> hi) {
        if (lo && hi && *hi < *lo)
            throw InvalidConfigError("interval with lower > upper for " + v.name());
        bounds_[v] = VarInterval{std::move(lo), std::move(hi)};
    }
    void set_point(const Variable& v, const Rational& x) { set(v, x, x); }
    void mask(const Variable& v) { set(v, std::nullopt, std::nullopt); }

    const std::map<Variable, VarInterval>& bounds() const { return bounds_; }
    bool empty() const { return bounds_.empty(); }

    /// True when the assignment lies inside every bound.
    bool contains(const Assignment& point) const {
        for (const auto& [v, iv] : bounds_) {
            auto it = point.find(v);
            if (it == point.end()) throw MissingVariableError(v.name());
            if (!iv.contains(it->second)) return false;
        }
        return true;
    }

private:
    std::map<Variable, VarInterval> bounds_;
};

/// The grounding of a blurred example: one atom per finite bound
/// (v >= lo and/or v <= hi); infinite bounds contribute nothing, so a fully
/// masked example grounds to the empty conjunction (TRUE).
inline ConjunctiveFormula ground(const PartialInterval& phi) {
    ConjunctiveFormula f;
    for (const auto& [v, iv] : phi.bounds()) {
        if (iv.lower) {
            LinearExpr e(*iv.lower);
            e.add_term(v, Rational(-1));
            f.add(LinearAtom(std::move(e), Relation::le));  // lo - v <= 0
        }
        if (iv.upper) {
            LinearExpr e(-*iv.upper);
            e.add_term(v, Rational(1));
            f.add(LinearAtom(std::move(e), Relation::le));  // v - hi <= 0
        }
    }
    return f;
}

/// A formula is witnessed true under phi when it holds for every assignment
/// phi permits, i.e. the grounding entails it.
inline bool witnessed(const PartialInterval& phi, const std::vector<LinearAtom>& psi) {
    return entails(ground(phi), psi);
}

/// m = ceil(ln(1/delta) / (2*gamma^2)), evaluated with certified rational
/// log bounds so the ceiling is exact.
inline long sample_count(const Rational& gamma, const Rational& delta_conf) {
    if (gamma.sign() <= 0 || gamma >= Rational(1))
        throw OutOfRangeError("gamma must lie in (0, 1)");
    if (delta_conf.sign() <= 0 || delta_conf >= Rational(1))
        throw OutOfRangeError("delta must lie in (0, 1)");
    Rational factor = (Rational(2) * gamma * gamma).reciprocal();
    for (int terms = 32; terms <= (1 << 20); terms *= 2) {
        RationalBounds ln = ln_bounds(delta_conf.reciprocal(), terms);
        Rational lo = factor * ln.lo, hi = factor * ln.hi;
        if (lo.ceil() == hi.ceil()) return lo.ceil_long();
    }
    throw Error("sample_count: log bounds failed to separate a ceiling");
}

/// Parameter bundle for the accept/reject test. epsilon is the validity
/// slack, gamma the accuracy, delta_conf the confidence.
struct PacParams {
    Rational epsilon, gamma, delta_conf;

    void validate() const {
        if (epsilon.sign() < 0 || epsilon > Rational(1))
            throw OutOfRangeError("epsilon must lie in [0, 1]");
        if (gamma.sign() <= 0 || gamma >= Rational(1))
            throw OutOfRangeError("gamma must lie in (0, 1)");
        if (delta_conf.sign() <= 0 || delta_conf >= Rational(1))
            throw OutOfRangeError("delta must lie in (0, 1)");
    }
    /// epsilon + gamma <= 1 is recommended, not enforced.
    bool recommended() const { return epsilon + gamma <= Rational(1); }
};

enum class SampleOutcome { entailed, not_entailed };

struct Decision {
    enum class Verdict { accept, reject };
    Verdict verdict;
    long failed_count = 0;
    long budget = 0;
    /// Outcomes for the samples actually evaluated; shorter than the input
    /// when the reject threshold cut the loop early.
    std::vector<SampleOutcome> per_sample;

    bool accepted() const { return verdict == Verdict::accept; }
};

struct DecideOptions {
    /// Evaluate every sample even after the verdict is forced (diagnostics).
    bool evaluate_all = false;
};

/// The accept/reject sampling test: budget B = floor(epsilon * m); a sample
/// fails when kb plus its grounding does not entail the query; reject as
/// soon as FAILED exceeds B, accept after all m samples otherwise.
inline Decision decide_pac(const ConjunctiveFormula& kb, const std::vector<LinearAtom>& query,
                           const Rational& epsilon, const std::vector<PartialInterval>& samples,
                           const DecideOptions& options = {}) {
    if (samples.empty()) throw EmptySampleListError();
    if (epsilon.sign() < 0 || epsilon > Rational(1))
        throw OutOfRangeError("epsilon must lie in [0, 1]");

    Decision d;
    // Exact rational product before the floor; no float boundary surprises
    // when epsilon * m is integral.
    d.budget = (epsilon * Rational(static_cast<long>(samples.size()))).floor_long();
    d.verdict = Decision::Verdict::accept;
    for (const auto& sample : samples) {
        ConjunctiveFormula f = kb;
        f.conjoin(ground(sample));
        bool ok = entails(f, query);
        d.per_sample.push_back(ok ? SampleOutcome::entailed : SampleOutcome::not_entailed);
        if (!ok && ++d.failed_count > d.budget) {
            d.verdict = Decision::Verdict::reject;
            if (!options.evaluate_all) break;
        }
    }
    return d;
}

/// Blurring configuration: the domain box, the probability that a variable
/// is masked outright, and the Gaussian noise level.
struct BlurConfig {
    std::map<Variable, std::pair<Rational, Rational>> box;
    Rational mask_probability;
    double noise_std = 0.0;

    void validate() const {
        if (mask_probability.sign() < 0 || mask_probability > Rational(1))
            throw InvalidConfigError("mask probability must lie in [0, 1]");
        if (!(noise_std >= 0.0)) throw InvalidConfigError("noise std must be >= 0");
        for (const auto& [v, b] : box)
            if (b.second < b.first) throw InvalidConfigError("empty domain box for " + v.name());
    }
};

/// Blurs a point into per-variable intervals. Per variable, independently:
/// with probability mask_probability emit (-inf, +inf); otherwise perturb
/// the value by Gaussian noise (clipped to the box) and centre an interval
/// of total width 4*ln(d)*sigma on it, clipped to the box. ln(d) is floored
/// at 1 for d <= 2, where the formula would otherwise shrink past the
/// +-2 sigma coverage it is meant to give. With sigma = 0 the interval is
/// the exact point; the output always contains the noisy observation.
inline PartialInterval blur(const Assignment& point, const BlurConfig& config, SplitMix64& rng) {
    config.validate();
    std::size_t d = config.box.size();
    if (d == 0) throw InvalidConfigError("blur: empty domain box");
    double lnd = std::max(std::log(static_cast<double>(d)), 1.0);
    Rational half_width = Rational::from_double(2.0 * lnd * config.noise_std);

    PartialInterval out;
    for (const auto& [v, x] : point) {
        auto bit = config.box.find(v);
        if (bit == config.box.end())
            throw InvalidConfigError("blur: no domain box for " + v.name());
        const auto& [lo, hi] = bit->second;

        if (rng.next_unit_rational() < config.mask_probability) {
            out.mask(v);
            continue;
        }
        if (config.noise_std == 0.0) {
            out.set_point(v, x);
            continue;
        }
        double noisy = x.to_double() + rng.next_gaussian() * config.noise_std;
        Rational centre = Rational::from_double(noisy);
        centre = std::max(lo, std::min(hi, centre));
        out.set(v, std::max(lo, centre - half_width), std::min(hi, centre + half_width));
    }
    return out;
}

}  // namespace pacil
