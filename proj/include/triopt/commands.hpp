#pragma once

#include "triopt/stein_order.hpp"
#include "triopt/tri_opt.hpp"
#include "triopt/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace triopt {

inline constexpr int kReportSchemaVersion = 1;

NoiseFamily parse_noise_family(const std::string& name);
std::string noise_family_name(NoiseFamily family);

struct GraphConfig {
    std::string family = "ER";  // ER or SF
    int degree = 1;             // ER degree, or SF attachment count k
    int d = 100;
    double weight_scale = 1.0;
};

struct DataConfig {
    int n = 2000;
    std::string noise = "gaussian_ev";
    double noise_scale = 1.0;
    std::uint64_t seed = 0;
};

/// Full pipeline configuration; round-trips losslessly through JSON.
struct RunConfig {
    GraphConfig graph;
    DataConfig data;
    OrderingConfig ordering;
    OptConfig opt;
    std::string out_dir = ".";
    bool apply_threshold = true;
};

void to_json(nlohmann::json& j, const GraphConfig& c);
void from_json(const nlohmann::json& j, GraphConfig& c);
void to_json(nlohmann::json& j, const DataConfig& c);
void from_json(const nlohmann::json& j, DataConfig& c);
void to_json(nlohmann::json& j, const OrderingConfig& c);
void from_json(const nlohmann::json& j, OrderingConfig& c);
void to_json(nlohmann::json& j, const OptConfig& c);
void from_json(const nlohmann::json& j, OptConfig& c);
void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Generates a ground-truth DAG and SEM samples; writes data.csv, truth.csv
/// and truth.json under cfg.out_dir. Deterministic from the seed.
void cmd_simulate(const RunConfig& cfg);

struct OrderArgs {
    std::string input;
    std::string output = "order.json";
    std::string diagnostics;  // optional JSONL path
    OrderingConfig ordering;
};

/// Stein ordering of a CSV dataset; writes the permutation and, when asked,
/// per-round diagnostics as JSON lines.
nlohmann::json cmd_order(const OrderArgs& args);

struct LearnArgs {
    std::string input;
    std::string order_file;
    std::string output_csv = "bhat.csv";
    std::string output_json;  // optional edge-list output
    OptConfig opt;
    bool apply_threshold = true;
};

/// Triangular optimization under a fixed ordering; writes the estimated
/// adjacency as CSV (and JSON edge list when requested).
nlohmann::json cmd_learn(const LearnArgs& args);

struct DiscoverArgs {
    std::string input;
    std::string truth;  // optional truth adjacency CSV; adds metrics to the report
    std::string out_dir = ".";
    OrderingConfig ordering;
    OptConfig opt;
    bool apply_threshold = true;
};

/// Full pipeline: center, order, permute, optimize, threshold, unpermute.
/// Writes bhat.csv, order.json and report.json; returns the report.
nlohmann::json cmd_discover(const DiscoverArgs& args);

struct EvalArgs {
    std::string pred;
    std::string truth;
    std::string order_file;  // optional; adds order_divergence
    std::string output;      // optional; otherwise caller prints
};

nlohmann::json cmd_eval(const EvalArgs& args);

struct PerturbStudyArgs {
    GraphConfig graph{.family = "ER", .degree = 1, .d = 100, .weight_scale = 1.0};
    DataConfig data{.n = 5000, .noise = "gaussian_ev", .noise_scale = 1.0, .seed = 0};
    OptConfig opt;
    std::vector<std::string> kinds = {"random_shuffle", "block_reversal", "adjacent_swap",
                                      "ancestor_swap", "hub_swap"};
    std::vector<double> fractions = {0.01, 0.05, 0.10, 0.20};
    int seeds = 5;
    std::string output;
};

/// Ground-truth-ordering robustness sweep: perturbation kinds x fractions,
/// mean and std of F1 and SHD per cell over the seeds.
nlohmann::json cmd_perturb_study(const PerturbStudyArgs& args);

struct BenchArgs {
    std::vector<int> d_values = {100};
    std::vector<int> n_values = {2000};
    int repeats = 3;
    std::uint64_t seed = 0;
    GraphConfig graph{.family = "ER", .degree = 1, .d = 0, .weight_scale = 1.0};
    OrderingConfig ordering;
    OptConfig opt;
    std::string output;
};

/// Wall-clock grid: ordering with and without the downdate plus the
/// optimization phase, median over repeats, with speedup ratios.
nlohmann::json cmd_bench(const BenchArgs& args);

/// Oracle battery; prints one pass/fail line per property, returns the
/// number of failures.
int cmd_selftest();

/// In-memory pipeline used by discover and the studies. The data must be
/// raw (uncentered) sample rows.
struct PipelineResult {
    CausalOrder order;
    WeightedDag b_hat;
    OrderingTrace trace;
    OptimizeInfo opt_info;
    double ordering_seconds = 0.0;
    double optimization_seconds = 0.0;
};

PipelineResult run_pipeline(const DataMatrix& data, const OrderingConfig& ordering_cfg,
                            const OptConfig& opt_cfg, bool apply_threshold);

/// Optimization phase only, under a caller-supplied ordering.
WeightedDag learn_with_order(const DataMatrix& data, const CausalOrder& order,
                             const OptConfig& opt_cfg, bool apply_threshold,
                             OptimizeInfo* info = nullptr);

}  // namespace triopt
