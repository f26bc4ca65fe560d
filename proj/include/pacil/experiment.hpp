#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pacil/bench.hpp"
#include "pacil/errors.hpp"
#include "pacil/optimise.hpp"
#include "pacil/rng.hpp"

namespace pacil {

/// Estimates within this band of the stored optimum still count as on the
/// correct side; it absorbs the rounding of published optima and the final
/// bracket gap of the bound search.
inline const Rational& feasibility_tolerance() {
    static const Rational tol(1, 1000000);
    return tol;
}

struct ExperimentConfig {
    std::string problem;  // family name (simplexn, cuben, optionally with a
                          // trailing dimension, e.g. simplexn3), a known
                          // problem name (pollution, police), or a .prob path
    std::uint64_t seed = 111921;
    std::vector<long> sample_sizes = {50, 100, 200, 300, 400, 500};
    int runs = 10;
    Rational noise;
    Rational outliers;
    std::optional<Rational> epsilon;  // default depends on noise/outliers
    int accuracy = 60;
    std::filesystem::path output = "results.csv";
    std::filesystem::path data_dir = "data";
    bool verbose = false;

    /// Noisy or outlier-laden runs default to a 95% validity target
    /// (epsilon = 0.05); clean runs default to epsilon = 0.
    Rational effective_epsilon() const {
        if (epsilon) return *epsilon;
        return (noise.sign() > 0 || outliers.sign() > 0) ? Rational(1, 20) : Rational(0);
    }
};

struct BenchRow {
    std::string problem;
    int dims = 0;
    long samples = 0;
    int run = 0;
    std::uint64_t seed = 0;
    Rational noise;
    Rational outliers;
    std::optional<Rational> estimate;  // absent when no estimate was found
    std::optional<Rational> true_optimum;
    bool feasible = false;
    bool found = false;
    long runtime_ms = 0;
    long decide_calls = 0;
};

inline bool estimate_feasible(const Rational& estimate, const Rational& optimum, Goal goal) {
    if (goal == Goal::minimise) return estimate >= optimum - feasibility_tolerance();
    return estimate <= optimum + feasibility_tolerance();
}

namespace detail {

struct ProblemFamily {
    std::string family;       // simplexn | cuben | file
    std::vector<int> dims;    // generated families iterate these
    std::filesystem::path path;  // for file-backed problems
};

inline ProblemFamily resolve_problem(const std::string& name,
                                     const std::filesystem::path& data_dir) {
    auto generated = [&](std::string_view family) -> std::optional<ProblemFamily> {
        if (name == family) return ProblemFamily{std::string(family), {2, 3, 4}, {}};
        if (name.size() == family.size() + 1 && name.starts_with(family)) {
            int d = name.back() - '0';
            if (d >= 2 && d <= 4) return ProblemFamily{std::string(family), {d}, {}};
        }
        return std::nullopt;
    };
    if (auto f = generated("simplexn")) return *f;
    if (auto f = generated("cuben")) return *f;
    if (std::filesystem::exists(name)) return {"file", {0}, name};
    std::filesystem::path shipped = data_dir / (name + ".prob");
    if ((name == "pollution" || name == "police") && std::filesystem::exists(shipped))
        return {"file", {0}, shipped};
    throw Error("unknown problem '" + name + "' (expected simplexn, cuben, pollution, police, or a .prob path)");
}

/// Positively-labelled samples carry the blurred views the optimiser consumes.
inline std::vector<PartialInterval> positive_views(const std::vector<LabelledSample>& dataset) {
    std::vector<PartialInterval> views;
    for (const auto& s : dataset)
        if (s.label == Label::positive && s.blurred) views.push_back(*s.blurred);
    return views;
}

}  // namespace detail

/// Runs the full experiment grid: for every dimension of the problem family,
/// every sample size and every run index, generate a dataset and search the
/// objective bound. Substreams are derived per grid cell from
/// (seed, problem, dims, size index, run), so extending the grid never
/// perturbs existing cells. Failed searches record found = false and the grid
/// continues.
inline std::vector<BenchRow> run_bench(const ExperimentConfig& config, std::ostream* log = nullptr) {
    auto family = detail::resolve_problem(config.problem, config.data_dir);
    Rational eps = config.effective_epsilon();

    std::optional<ProblemSpec> loaded;
    if (family.family == "file") loaded = load_problem(family.path);

    std::vector<BenchRow> rows;
    for (int dims : family.dims) {
        for (std::size_t si = 0; si < config.sample_sizes.size(); ++si) {
            for (int run = 0; run < config.runs; ++run) {
                std::uint64_t cell =
                    rng::derive(config.seed, {rng::fnv1a(family.family == "file" ? loaded->name
                                                                                 : family.family),
                                              static_cast<std::uint64_t>(dims),
                                              static_cast<std::uint64_t>(si),
                                              static_cast<std::uint64_t>(run)});

                const ProblemSpec* prob;
                std::optional<ProblemSpec> generated;
                if (family.family == "simplexn") {
                    SplitMix64 prng(rng::derive(cell, {0}));
                    generated = gen_simplexn(dims, prng);
                    prob = &*generated;
                } else if (family.family == "cuben") {
                    SplitMix64 prng(rng::derive(cell, {0}));
                    generated = gen_cuben(dims, prng);
                    prob = &*generated;
                } else {
                    prob = &*loaded;
                }

                BenchRow row;
                row.problem = prob->name;
                row.dims = prob->dims();
                row.samples = config.sample_sizes[si];
                row.run = run;
                row.seed = config.seed;
                row.noise = config.noise;
                row.outliers = config.outliers;
                row.true_optimum = prob->true_optimum;

                SplitMix64 drng(rng::derive(cell, {1}));
                auto dataset = sample_dataset(*prob, config.sample_sizes[si], Rational(1, 2),
                                              config.noise, config.outliers, drng);
                auto views = detail::positive_views(dataset);

                auto t0 = std::chrono::steady_clock::now();
                try {
                    OptimiseResult res = optimise_pac(prob->region_formula(), prob->objective, eps,
                                                      config.accuracy, views, prob->goal);
                    row.found = true;
                    row.estimate = res.estimate;
                    row.decide_calls = res.decide_calls;
                    if (row.true_optimum)
                        row.feasible = estimate_feasible(res.estimate, *row.true_optimum, prob->goal);
                } catch (const UnboundedError&) {
                    row.found = false;
                } catch (const EmptySampleListError&) {
                    row.found = false;
                }
                auto t1 = std::chrono::steady_clock::now();
                row.runtime_ms =
                    std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

                if (log && config.verbose) {
                    *log << prob->name << " dims=" << row.dims << " m=" << row.samples
                         << " run=" << run << " -> "
                         << (row.found ? row.estimate->to_decimal_string() : std::string("none"))
                         << " (" << row.runtime_ms << " ms)\n";
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

inline const char* kCsvHeader =
    "problem,dims,samples,run,seed,noise,outliers,estimate,true_optimum,feasible,found,"
    "runtime_ms,decide_calls";

inline void write_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
    os << kCsvHeader << "\n";
    for (const auto& r : rows) {
        os << r.problem << "," << r.dims << "," << r.samples << "," << r.run << "," << r.seed
           << "," << r.noise.to_decimal_string() << "," << r.outliers.to_decimal_string() << ","
           << (r.estimate ? r.estimate->to_decimal_string() : "") << ","
           << (r.true_optimum ? r.true_optimum->to_decimal_string() : "") << ","
           << (r.feasible ? 1 : 0) << "," << (r.found ? 1 : 0) << "," << r.runtime_ms << ","
           << r.decide_calls << "\n";
    }
}

inline std::vector<BenchRow> read_csv(std::istream& in) {
    std::vector<BenchRow> rows;
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw ParseError(1, "bad CSV header");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (;;) {
            auto p = line.find(',', start);
            f.push_back(line.substr(start, p - start));
            if (p == std::string::npos) break;
            start = p + 1;
        }
        if (f.size() != 13) throw ParseError(lineno, "expected 13 columns");
        BenchRow r;
        r.problem = f[0];
        r.dims = std::stoi(f[1]);
        r.samples = std::stol(f[2]);
        r.run = std::stoi(f[3]);
        r.seed = std::stoull(f[4]);
        auto rat = [&](const std::string& s) {
            auto v = Rational::parse(s);
            if (!v) throw ParseError(lineno, "bad rational '" + s + "'");
            return *v;
        };
        r.noise = rat(f[5]);
        r.outliers = rat(f[6]);
        if (!f[7].empty()) r.estimate = rat(f[7]);
        if (!f[8].empty()) r.true_optimum = rat(f[8]);
        r.feasible = f[9] == "1";
        r.found = f[10] == "1";
        r.runtime_ms = std::stol(f[11]);
        r.decide_calls = std::stol(f[12]);
        rows.push_back(std::move(r));
    }
    return rows;
}

struct BenchSummary {
    long total = 0;
    long found = 0;
    long feasible = 0;
};

inline BenchSummary summarize(const std::vector<BenchRow>& rows) {
    BenchSummary s;
    for (const auto& r : rows) {
        ++s.total;
        if (r.found) ++s.found;
        if (r.feasible) ++s.feasible;
    }
    return s;
}

inline void print_summary(std::ostream& os, const std::vector<BenchRow>& rows) {
    BenchSummary s = summarize(rows);
    auto pct = [&](long k) {
        return s.total == 0 ? 0.0 : 100.0 * static_cast<double>(k) / static_cast<double>(s.total);
    };
    os << "runs:     " << s.total << "\n";
    os << "found:    " << s.found << " (" << pct(s.found) << "%)\n";
    os << "feasible: " << s.feasible << " (" << pct(s.feasible) << "%)\n";
}

}  // namespace pacil
