// pac-implicit: decide entailment queries against blurred samples, search
// objective bounds, and run benchmark grids.
//
// Exit codes: 0 success / Accept, 1 Reject, 2 usage or input errors,
// 3 objective unbounded.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pacil/bench.hpp"
#include "pacil/experiment.hpp"
#include "pacil/optimise.hpp"
#include "pacil/pac.hpp"

namespace {

using namespace pacil;

Rational parse_rational_flag(const std::string& text, const std::string& flag) {
    auto r = Rational::parse(text);
    if (!r) throw CLI::ValidationError(flag, "expected a rational like 0.05 or 1/20");
    return *r;
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("PAC_IMPLICIT_DATA")) return env;
#ifdef PACIL_DEFAULT_DATA_DIR
    return PACIL_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

std::vector<PartialInterval> sample_views(const std::vector<LabelledSample>& dataset,
                                          bool positives_only) {
    std::vector<PartialInterval> views;
    for (const auto& s : dataset) {
        if (positives_only && s.label != Label::positive) continue;
        if (s.blurred) {
            views.push_back(*s.blurred);
        } else {
            PartialInterval point;
            for (const auto& [v, x] : s.point) point.set_point(v, x);
            views.push_back(std::move(point));
        }
    }
    return views;
}

int cmd_decide(const std::string& kb_path, const std::string& query_text,
               const std::string& data_path, const std::string& epsilon_text,
               const std::string& gamma_text, const std::string& delta_text, bool evaluate_all,
               bool verbose) {
    KnowledgeBase kb = load_knowledge_base(kb_path);
    std::vector<LinearAtom> query = parse_query(query_text, kb.variables);
    auto dataset = load_dataset(data_path, kb.variables);
    auto samples = sample_views(dataset, false);
    Rational epsilon = parse_rational_flag(epsilon_text, "--epsilon");

    if (!gamma_text.empty() && !delta_text.empty()) {
        PacParams params{epsilon, parse_rational_flag(gamma_text, "--gamma"),
                         parse_rational_flag(delta_text, "--delta")};
        params.validate();
        long required = sample_count(params.gamma, params.delta_conf);
        std::cout << "required samples for (gamma, delta): " << required << "\n";
        if (static_cast<long>(samples.size()) < required)
            std::cerr << "warning: only " << samples.size() << " samples provided\n";
        if (!params.recommended())
            std::cerr << "warning: epsilon + gamma > 1; the accept/reject bands overlap\n";
    }

    Decision d = decide_pac(kb.formula(), query, epsilon, samples, DecideOptions{evaluate_all});
    std::cout << (d.accepted() ? "Accept" : "Reject") << "\n";
    std::cout << "m=" << samples.size() << " B=" << d.budget << " FAILED=" << d.failed_count
              << "\n";
    if (verbose) {
        for (std::size_t i = 0; i < d.per_sample.size(); ++i)
            std::cout << "sample " << (i + 1) << ": "
                      << (d.per_sample[i] == SampleOutcome::entailed ? "entailed" : "not entailed")
                      << "\n";
    }
    return d.accepted() ? 0 : 1;
}

int cmd_optimise(const std::string& problem, const std::string& data_path,
                 const std::string& epsilon_text, int accuracy,
                 const std::filesystem::path& data_dir, bool verbose) {
    auto family = detail::resolve_problem(problem, data_dir);
    if (family.family != "file")
        throw Error("optimise needs a problem file; generated families are for bench");
    ProblemSpec spec = load_problem(family.path);
    auto dataset = load_dataset(data_path, spec.variables);
    auto views = sample_views(dataset, true);
    Rational epsilon = parse_rational_flag(epsilon_text, "--epsilon");

    auto t0 = std::chrono::steady_clock::now();
    OptimiseResult res =
        optimise_pac(spec.region_formula(), spec.objective, epsilon, accuracy, views, spec.goal);
    auto t1 = std::chrono::steady_clock::now();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

    std::cout << "estimate: " << res.estimate.to_decimal_string() << " (exact "
              << res.estimate.to_string() << ")\n";
    std::cout << "bracket:  [" << res.bracket_low.to_decimal_string() << ", "
              << res.bracket_high.to_decimal_string() << "] (" << goal_token(res.goal)
              << ", internal maximise form)\n";
    std::cout << "decide_calls: " << res.decide_calls << "\n";
    std::cout << "time_ms: " << ms << "\n";
    if (verbose && spec.true_optimum)
        std::cout << "stored optimum: " << spec.true_optimum->to_decimal_string() << "\n";
    return 0;
}

int cmd_bench(ExperimentConfig config) {
    auto rows = run_bench(config, &std::cout);
    std::ofstream out(config.output);
    if (!out) throw Error("cannot write " + config.output.string());
    write_csv(out, rows);
    std::cout << "wrote " << rows.size() << " rows to " << config.output.string() << "\n";
    print_summary(std::cout, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implicit PAC reasoning over linear real arithmetic"};
    app.require_subcommand(1);

    std::string kb_path, query_text, data_path, problem;
    std::string epsilon_text = "0", gamma_text, delta_text;
    bool evaluate_all = false, verbose = false;
    int accuracy = 60;
    std::string data_dir = default_data_dir().string();

    auto* decide = app.add_subcommand("decide", "Accept/reject a query against samples");
    decide->add_option("kb", kb_path, "knowledge base file")->required();
    decide->add_option("query", query_text, "query atoms joined by &&")->required();
    decide->add_option("data", data_path, "dataset file")->required();
    decide->add_option("--epsilon", epsilon_text, "validity slack (default 0)");
    decide->add_option("--gamma", gamma_text, "accuracy, reports the required sample count");
    decide->add_option("--delta", delta_text, "confidence, reports the required sample count");
    decide->add_flag("--evaluate-all", evaluate_all, "evaluate every sample even after rejecting");
    decide->add_flag("-v,--verbose", verbose);

    auto* optimise = app.add_subcommand("optimise", "Estimate the optimal objective bound");
    optimise->add_option("problem", problem, "problem name or .prob path")->required();
    optimise->add_option("data", data_path, "dataset file")->required();
    optimise->add_option("--epsilon", epsilon_text, "validity slack (default 0)");
    optimise->add_option("--accuracy", accuracy, "bracket halvings (default 60)");
    optimise->add_option("--data-dir", data_dir, "directory with shipped .prob files");
    optimise->add_flag("-v,--verbose", verbose);

    ExperimentConfig config;
    std::string noise_text = "0", outliers_text = "0", bench_epsilon_text;
    std::string output = "results.csv";
    auto* bench = app.add_subcommand("bench", "Run the benchmark grid and emit CSV");
    bench->add_option("problem", problem, "simplexn[2-4], cuben[2-4], pollution, police, or path")
        ->required();
    bench->add_option("-s,--seed", config.seed, "rng seed (default 111921)");
    bench->add_option("--samples", config.sample_sizes, "sample sizes (default 50..500)")
        ->delimiter(',');
    bench->add_option("--runs", config.runs, "runs per size (default 10)");
    bench->add_option("-n,--noise", noise_text, "noise level, std = n/sqrt(dims)");
    bench->add_option("-o,--outliers", outliers_text, "label-flip probability");
    bench->add_option("--epsilon", bench_epsilon_text,
                      "validity slack (default 0.05 when noisy, else 0)");
    bench->add_option("--accuracy", config.accuracy, "bracket halvings (default 60)");
    bench->add_option("--output", output, "CSV output path (default results.csv)");
    bench->add_option("--data-dir", data_dir, "directory with shipped .prob files");
    bench->add_flag("-v,--verbose", config.verbose);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (decide->parsed())
            return cmd_decide(kb_path, query_text, data_path, epsilon_text, gamma_text, delta_text,
                              evaluate_all, verbose);
        if (optimise->parsed())
            return cmd_optimise(problem, data_path, epsilon_text, accuracy, data_dir, verbose);
        config.problem = problem;
        config.noise = parse_rational_flag(noise_text, "--noise");
        config.outliers = parse_rational_flag(outliers_text, "--outliers");
        if (!bench_epsilon_text.empty())
            config.epsilon = parse_rational_flag(bench_epsilon_text, "--epsilon");
        config.output = output;
        config.data_dir = data_dir;
        return cmd_bench(std::move(config));
    } catch (const UnboundedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
