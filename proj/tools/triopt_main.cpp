#include "triopt/commands.hpp"
#include "triopt/errors.hpp"
#include "triopt/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

using triopt::RunConfig;

void add_ordering_flags(CLI::App* cmd, triopt::OrderingConfig& cfg) {
    cmd->add_option("--eta", cfg.eta, "Kernel regularization eta");
    cmd->add_option("--zeta", cfg.zeta, "Downdate stability floor zeta");
    cmd->add_option("--tau", cfg.tau, "Periodic re-inversion period tau");
    cmd->add_flag("--sm,!--no-sm", cfg.use_downdate, "Use the Sherman-Morrison downdate");
}

void add_opt_flags(CLI::App* cmd, triopt::OptConfig& cfg) {
    cmd->add_option("--lambda", cfg.lambda, "L1 weight lambda");
    cmd->add_option("--epsilon", cfg.epsilon, "Charbonnier epsilon");
    cmd->add_option("--max-iter", cfg.max_iter, "Optimizer iteration budget");
    cmd->add_option("--threshold", cfg.w_threshold, "Post-optimization weight threshold");
    cmd->add_option("--tol", cfg.tol, "Relative objective decrease tolerance");
}

void load_config_file(const std::string& path, RunConfig& cfg) {
    if (!path.empty()) cfg = triopt::read_json(path).get<RunConfig>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TriOpt linear causal discovery: Stein ordering plus upper triangular optimization"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a ground-truth DAG and SEM samples");
    sim->add_option("--config", config_path, "JSON config file (flags override)");
    std::string family = cfg.graph.family;
    int degree = cfg.graph.degree, dim = cfg.graph.d, n = cfg.data.n;
    double weight_scale = cfg.graph.weight_scale, noise_scale = cfg.data.noise_scale;
    std::string noise = cfg.data.noise, out_dir = cfg.out_dir;
    std::uint64_t seed = cfg.data.seed;
    sim->add_option("--graph", family, "Graph family: ER or SF");
    sim->add_option("--degree", degree, "ER degree (e = degree*d) or SF attachment k");
    sim->add_option("--d", dim, "Number of variables");
    sim->add_option("--weight-scale", weight_scale, "Edge weight scale alpha");
    sim->add_option("--n", n, "Number of samples");
    sim->add_option("--noise", noise, "Noise family: gaussian_ev, gumbel, exponential");
    sim->add_option("--noise-scale", noise_scale, "Noise scale");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--out-dir", out_dir, "Output directory");

    // order
    auto* ord = app.add_subcommand("order", "Stein ancestral ordering of a CSV dataset");
    triopt::OrderArgs order_args;
    ord->add_option("--input", order_args.input, "Input data CSV")->required();
    ord->add_option("--output", order_args.output, "Output permutation JSON");
    ord->add_option("--diagnostics", order_args.diagnostics, "Per-round diagnostics JSONL");
    add_ordering_flags(ord, order_args.ordering);

    // learn
    auto* lrn = app.add_subcommand("learn", "Triangular optimization under a fixed ordering");
    triopt::LearnArgs learn_args;
    bool no_threshold = false;
    lrn->add_option("--input", learn_args.input, "Input data CSV")->required();
    lrn->add_option("--order", learn_args.order_file, "Ordering JSON")->required();
    lrn->add_option("--output", learn_args.output_csv, "Output adjacency CSV");
    lrn->add_option("--json", learn_args.output_json, "Optional JSON edge list output");
    lrn->add_flag("--no-threshold", no_threshold, "Emit raw weights without thresholding");
    add_opt_flags(lrn, learn_args.opt);

    // discover
    auto* dis = app.add_subcommand("discover", "Full pipeline: ordering plus optimization");
    triopt::DiscoverArgs discover_args;
    bool discover_no_threshold = false;
    dis->add_option("--input", discover_args.input, "Input data CSV")->required();
    dis->add_option("--truth", discover_args.truth, "Optional truth adjacency CSV for metrics");
    dis->add_option("--out-dir", discover_args.out_dir, "Output directory");
    dis->add_flag("--no-threshold", discover_no_threshold, "Skip weight thresholding");
    add_ordering_flags(dis, discover_args.ordering);
    add_opt_flags(dis, discover_args.opt);

    // eval
    auto* evl = app.add_subcommand("eval", "Compare an estimated graph against the truth");
    triopt::EvalArgs eval_args;
    evl->add_option("--pred", eval_args.pred, "Estimated adjacency CSV")->required();
    evl->add_option("--truth", eval_args.truth, "Truth adjacency CSV")->required();
    evl->add_option("--order", eval_args.order_file, "Optional ordering JSON");
    evl->add_option("--output", eval_args.output, "Optional JSON output path");

    // perturb-study
    auto* pst = app.add_subcommand("perturb-study",
                                   "Robustness of the optimization phase to ordering errors");
    triopt::PerturbStudyArgs study_args;
    std::vector<double> fractions_pct = {1, 5, 10, 20};
    pst->add_option("--graph", study_args.graph.family, "Graph family: ER or SF");
    pst->add_option("--degree", study_args.graph.degree, "Graph degree");
    pst->add_option("--d", study_args.graph.d, "Number of variables");
    pst->add_option("--n", study_args.data.n, "Number of samples");
    pst->add_option("--noise", study_args.data.noise, "Noise family");
    pst->add_option("--seed", study_args.data.seed, "Base seed");
    pst->add_option("--seeds", study_args.seeds, "Seeds per cell");
    pst->add_option("--fractions", fractions_pct, "Perturbation percentages");
    pst->add_option("--kinds", study_args.kinds, "Perturbation kinds");
    pst->add_option("--output", study_args.output, "Output JSON path");
    add_opt_flags(pst, study_args.opt);

    // bench
    auto* bch = app.add_subcommand("bench", "Wall-clock grid for ordering and optimization");
    triopt::BenchArgs bench_args;
    bch->add_option("--d-values", bench_args.d_values, "Grid of variable counts");
    bch->add_option("--n-values", bench_args.n_values, "Grid of sample counts");
    bch->add_option("--repeats", bench_args.repeats, "Repetitions per cell (median reported)");
    bch->add_option("--seed", bench_args.seed, "RNG seed");
    bch->add_option("--graph", bench_args.graph.family, "Graph family for the data");
    bch->add_option("--degree", bench_args.graph.degree, "Graph degree");
    bch->add_option("--output", bench_args.output, "Output JSON path");

    // selftest
    app.add_subcommand("selftest", "Run the oracle battery and report per-property results");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            load_config_file(config_path, cfg);
            if (sim->count("--graph")) cfg.graph.family = family;
            if (sim->count("--degree")) cfg.graph.degree = degree;
            if (sim->count("--d")) cfg.graph.d = dim;
            if (sim->count("--weight-scale")) cfg.graph.weight_scale = weight_scale;
            if (sim->count("--n")) cfg.data.n = n;
            if (sim->count("--noise")) cfg.data.noise = noise;
            if (sim->count("--noise-scale")) cfg.data.noise_scale = noise_scale;
            if (sim->count("--seed")) cfg.data.seed = seed;
            if (sim->count("--out-dir")) cfg.out_dir = out_dir;
            triopt::cmd_simulate(cfg);
        } else if (ord->parsed()) {
            const auto report = triopt::cmd_order(order_args);
            std::printf("%s\n", report.dump(2).c_str());
        } else if (lrn->parsed()) {
            learn_args.apply_threshold = !no_threshold;
            const auto report = triopt::cmd_learn(learn_args);
            std::printf("%s\n", report.dump(2).c_str());
        } else if (dis->parsed()) {
            discover_args.apply_threshold = !discover_no_threshold;
            const auto report = triopt::cmd_discover(discover_args);
            std::printf("%s\n", report.dump(2).c_str());
        } else if (evl->parsed()) {
            const auto metrics = triopt::cmd_eval(eval_args);
            std::printf("%s\n", metrics.dump(2).c_str());
        } else if (pst->parsed()) {
            study_args.fractions.clear();
            for (double pct : fractions_pct) study_args.fractions.push_back(pct / 100.0);
            const auto result = triopt::cmd_perturb_study(study_args);
            std::printf("%s\n", result.dump(2).c_str());
        } else if (bch->parsed()) {
            const auto result = triopt::cmd_bench(bench_args);
            // aligned text table alongside the JSON
            std::printf("%6s %6s %14s %14s %14s %10s\n", "d", "n", "order-sm(s)",
                        "order-nosm(s)", "optimize(s)", "speedup");
            for (const auto& row : result.at("rows")) {
                std::printf("%6d %6d %14.3f %14.3f %14.3f %10.2f\n", row.at("d").get<int>(),
                            row.at("n").get<int>(), row.at("ordering_sm_seconds").get<double>(),
                            row.at("ordering_nosm_seconds").get<double>(),
                            row.at("optimization_seconds").get<double>(),
                            row.at("speedup_sm_over_nosm").get<double>());
            }
            std::printf("%s\n", result.dump(2).c_str());
        } else {
            return triopt::cmd_selftest() == 0 ? 0 : 1;
        }
    } catch (const triopt::ParseError& e) {
        std::fprintf(stderr, "parse error (row %zu): %s\n", e.row, e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
