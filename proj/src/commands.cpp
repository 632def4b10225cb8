#include "triopt/commands.hpp"

#include "triopt/errors.hpp"
#include "triopt/graph_sim.hpp"
#include "triopt/io.hpp"
#include "triopt/linalg.hpp"
#include "triopt/metrics.hpp"
#include "triopt/oracle.hpp"
#include "triopt/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace triopt {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd out;
    if (v.empty()) return out;
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size()));
    return out;
}

WeightedDag generate_truth(const GraphConfig& g, std::uint64_t seed) {
    WeightedDag skeleton;
    if (g.family == "ER") {
        skeleton = gen_er_dag(g.d, g.degree, seed);
    } else if (g.family == "SF") {
        skeleton = gen_sf_dag(g.d, g.degree, seed);
    } else {
        throw Error("unknown graph family '" + g.family + "' (expected ER or SF)");
    }
    return sample_weights(skeleton, g.weight_scale, seed + 1);
}

DataMatrix generate_data(const WeightedDag& truth, const DataConfig& d) {
    NoiseSpec noise;
    noise.family = parse_noise_family(d.noise);
    noise.scale = d.noise_scale;
    return sample_sem(truth, d.n, noise, d.seed + 2);
}

PerturbKind parse_perturb_kind(const std::string& name) {
    if (name == "random_shuffle") return PerturbKind::random_shuffle;
    if (name == "block_reversal") return PerturbKind::block_reversal;
    if (name == "adjacent_swap") return PerturbKind::adjacent_swap;
    if (name == "ancestor_swap") return PerturbKind::ancestor_swap;
    if (name == "hub_swap") return PerturbKind::hub_swap;
    throw Error("unknown perturbation kind '" + name + "'");
}

BinaryGraph binary_from_matrix(const Matrix& m) {
    WeightedDag tmp;
    tmp.dim = static_cast<int>(m.rows());
    tmp.weights = m;
    tmp.topo_order.resize(tmp.dim);
    std::iota(tmp.topo_order.begin(), tmp.topo_order.end(), 0);
    return binarize(tmp);
}

}  // namespace

NoiseFamily parse_noise_family(const std::string& name) {
    if (name == "gaussian_ev") return NoiseFamily::gaussian_ev;
    if (name == "gumbel") return NoiseFamily::gumbel;
    if (name == "exponential") return NoiseFamily::exponential;
    throw Error("unknown noise family '" + name +
                "' (expected gaussian_ev, gumbel or exponential)");
}

std::string noise_family_name(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::gaussian_ev: return "gaussian_ev";
        case NoiseFamily::gumbel: return "gumbel";
        case NoiseFamily::exponential: return "exponential";
    }
    return "gaussian_ev";
}

void to_json(nlohmann::json& j, const GraphConfig& c) {
    j = {{"family", c.family}, {"degree", c.degree}, {"d", c.d}, {"weight_scale", c.weight_scale}};
}
void from_json(const nlohmann::json& j, GraphConfig& c) {
    c.family = j.value("family", c.family);
    c.degree = j.value("degree", c.degree);
    c.d = j.value("d", c.d);
    c.weight_scale = j.value("weight_scale", c.weight_scale);
}
void to_json(nlohmann::json& j, const DataConfig& c) {
    j = {{"n", c.n}, {"noise", c.noise}, {"noise_scale", c.noise_scale}, {"seed", c.seed}};
}
void from_json(const nlohmann::json& j, DataConfig& c) {
    c.n = j.value("n", c.n);
    c.noise = j.value("noise", c.noise);
    c.noise_scale = j.value("noise_scale", c.noise_scale);
    c.seed = j.value("seed", c.seed);
}
void to_json(nlohmann::json& j, const OrderingConfig& c) {
    j = {{"eta", c.eta}, {"zeta", c.zeta}, {"tau", c.tau}, {"use_downdate", c.use_downdate}};
}
void from_json(const nlohmann::json& j, OrderingConfig& c) {
    c.eta = j.value("eta", c.eta);
    c.zeta = j.value("zeta", c.zeta);
    c.tau = j.value("tau", c.tau);
    c.use_downdate = j.value("use_downdate", c.use_downdate);
}
void to_json(nlohmann::json& j, const OptConfig& c) {
    j = {{"lambda", c.lambda},           {"epsilon", c.epsilon},
         {"max_iter", c.max_iter},       {"w_threshold", c.w_threshold},
         {"tol", c.tol},                 {"lbfgs_memory", c.lbfgs_memory},
         {"armijo_c", c.armijo_c},       {"backtrack_factor", c.backtrack_factor}};
}
void from_json(const nlohmann::json& j, OptConfig& c) {
    c.lambda = j.value("lambda", c.lambda);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.max_iter = j.value("max_iter", c.max_iter);
    c.w_threshold = j.value("w_threshold", c.w_threshold);
    c.tol = j.value("tol", c.tol);
    c.lbfgs_memory = j.value("lbfgs_memory", c.lbfgs_memory);
    c.armijo_c = j.value("armijo_c", c.armijo_c);
    c.backtrack_factor = j.value("backtrack_factor", c.backtrack_factor);
}
void to_json(nlohmann::json& j, const RunConfig& c) {
    j = {{"graph", c.graph},
         {"data", c.data},
         {"ordering", c.ordering},
         {"opt", c.opt},
         {"out_dir", c.out_dir},
         {"apply_threshold", c.apply_threshold}};
}
void from_json(const nlohmann::json& j, RunConfig& c) {
    if (j.contains("graph")) j.at("graph").get_to(c.graph);
    if (j.contains("data")) j.at("data").get_to(c.data);
    if (j.contains("ordering")) j.at("ordering").get_to(c.ordering);
    if (j.contains("opt")) j.at("opt").get_to(c.opt);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.apply_threshold = j.value("apply_threshold", c.apply_threshold);
}

void cmd_simulate(const RunConfig& cfg) {
    const WeightedDag truth = generate_truth(cfg.graph, cfg.data.seed);
    const DataMatrix data = generate_data(truth, cfg.data);
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    write_csv_matrix(dir / "data.csv", data.values);
    write_csv_matrix(dir / "truth.csv", truth.weights);
    write_json(dir / "truth.json", dag_to_json(truth));
}

PipelineResult run_pipeline(const DataMatrix& data, const OrderingConfig& ordering_cfg,
                            const OptConfig& opt_cfg, bool apply_threshold) {
    PipelineResult out;
    const DataMatrix centered = center(data);

    auto t0 = Clock::now();
    out.order = order(centered, ordering_cfg, &out.trace);
    out.ordering_seconds = seconds_since(t0);

    t0 = Clock::now();
    const DataMatrix xpi = permute_data(centered, out.order);
    Matrix w = optimize(xpi, opt_cfg, &out.opt_info);
    if (apply_threshold) w = threshold(w, opt_cfg.w_threshold);
    out.b_hat = unpermute(w, out.order);
    out.optimization_seconds = seconds_since(t0);
    return out;
}

WeightedDag learn_with_order(const DataMatrix& data, const CausalOrder& order,
                             const OptConfig& opt_cfg, bool apply_threshold,
                             OptimizeInfo* info) {
    const DataMatrix centered = data.centered ? data : center(data);
    const DataMatrix xpi = permute_data(centered, order);
    Matrix w = optimize(xpi, opt_cfg, info);
    if (apply_threshold) w = threshold(w, opt_cfg.w_threshold);
    return unpermute(w, order);
}

nlohmann::json cmd_order(const OrderArgs& args) {
    DataMatrix data;
    data.values = read_csv_matrix(args.input);
    if (data.n() < 2) {
        throw InsufficientSamplesError("order: need at least 2 samples");
    }
    OrderingTrace trace;
    const auto t0 = Clock::now();
    const CausalOrder result = order(center(data), args.ordering, &trace);
    const double elapsed = seconds_since(t0);

    write_order_json(args.output, result);
    if (!args.diagnostics.empty()) {
        std::ofstream out(args.diagnostics, std::ios::binary);
        if (!out) throw IoError("cannot write " + args.diagnostics);
        for (std::size_t r = 0; r < trace.rounds.size(); ++r) {
            const auto& round = trace.rounds[r];
            nlohmann::json line = {{"round", r},
                                   {"leaf", round.leaf},
                                   {"fallback", round.fallback},
                                   {"rebuilt", round.rebuilt}};
            if (std::isfinite(round.alpha)) {
                line["alpha"] = round.alpha;
            } else {
                line["alpha"] = nullptr;
            }
            out << line.dump() << '\n';
        }
    }
    return {{"order", result.perm},
            {"fallback_events", trace.fallback_events},
            {"rebuilds", trace.rebuild_count},
            {"seconds", elapsed}};
}

nlohmann::json cmd_learn(const LearnArgs& args) {
    DataMatrix data;
    data.values = read_csv_matrix(args.input);
    const CausalOrder ord = read_order_json(args.order_file);
    OptimizeInfo info;
    const WeightedDag b_hat = learn_with_order(data, ord, args.opt, args.apply_threshold, &info);
    write_csv_matrix(args.output_csv, b_hat.weights);
    if (!args.output_json.empty()) {
        write_json(args.output_json, dag_to_json(b_hat));
    }
    return {{"iterations", info.iterations},
            {"objective", info.objective_value},
            {"edges", binarize(b_hat).adjacency.sum()}};
}

nlohmann::json cmd_discover(const DiscoverArgs& args) {
    DataMatrix data;
    data.values = read_csv_matrix(args.input);
    if (data.n() < 2) {
        throw InsufficientSamplesError("discover: need at least 2 samples");
    }
    const PipelineResult res = run_pipeline(data, args.ordering, args.opt, args.apply_threshold);

    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    write_csv_matrix(dir / "bhat.csv", res.b_hat.weights);
    write_order_json((dir / "order.json").string(), res.order);

    nlohmann::json report = {
        {"schema_version", kReportSchemaVersion},
        {"n", data.n()},
        {"d", data.d()},
        {"order", res.order.perm},
        {"ordering_seconds", res.ordering_seconds},
        {"optimization_seconds", res.optimization_seconds},
        {"fallback_events", res.trace.fallback_events},
        {"rebuilds", res.trace.rebuild_count},
        {"iterations", res.opt_info.iterations},
        {"objective", res.opt_info.objective_value},
        {"use_downdate", args.ordering.use_downdate},
        {"threshold_applied", args.apply_threshold},
    };
    if (!args.truth.empty()) {
        const BinaryGraph truth = binary_from_matrix(read_csv_matrix(args.truth));
        const BinaryGraph pred = binarize(res.b_hat);
        const ShdResult s = shd(pred, truth);
        report["metrics"] = {{"shd", s.raw},
                             {"normalized_shd", s.normalized},
                             {"f1", f1(pred, truth)},
                             {"order_divergence", order_divergence(res.order, truth)}};
    }
    write_json(dir / "report.json", report);
    return report;
}

nlohmann::json cmd_eval(const EvalArgs& args) {
    const BinaryGraph pred = binary_from_matrix(read_csv_matrix(args.pred));
    const BinaryGraph truth = binary_from_matrix(read_csv_matrix(args.truth));
    const ShdResult s = shd(pred, truth);
    nlohmann::json out = {
        {"shd", s.raw}, {"normalized_shd", s.normalized}, {"f1", f1(pred, truth)}};
    if (!args.order_file.empty()) {
        out["order_divergence"] = order_divergence(read_order_json(args.order_file), truth);
    }
    if (!args.output.empty()) write_json(args.output, out);
    return out;
}

nlohmann::json cmd_perturb_study(const PerturbStudyArgs& args) {
    nlohmann::json cells = nlohmann::json::array();
    for (const std::string& kind_name : args.kinds) {
        const PerturbKind kind = parse_perturb_kind(kind_name);
        for (double fraction : args.fractions) {
            std::vector<double> f1s, shds, nshds;
            for (int s = 0; s < args.seeds; ++s) {
                GraphConfig g = args.graph;
                DataConfig dc = args.data;
                dc.seed = args.data.seed + static_cast<std::uint64_t>(s) * 1000003ULL;
                const WeightedDag truth_dag = generate_truth(g, dc.seed);
                const DataMatrix data = generate_data(truth_dag, dc);
                const BinaryGraph truth = binarize(truth_dag);

                CausalOrder gt_order;
                gt_order.perm = truth_dag.topo_order;
                PerturbSpec spec;
                spec.kind = kind;
                spec.fraction = fraction;
                spec.seed = dc.seed + 7;
                const CausalOrder perturbed = perturb(gt_order, truth, spec);

                const WeightedDag b_hat =
                    learn_with_order(data, perturbed, args.opt, /*apply_threshold=*/true);
                const BinaryGraph pred = binarize(b_hat);
                const ShdResult sr = shd(pred, truth);
                f1s.push_back(f1(pred, truth));
                shds.push_back(sr.raw);
                nshds.push_back(sr.normalized);
            }
            const MeanStd f1_stats = mean_std(f1s);
            const MeanStd shd_stats = mean_std(shds);
            const MeanStd nshd_stats = mean_std(nshds);
            cells.push_back({{"kind", kind_name},
                             {"fraction", fraction},
                             {"seeds", args.seeds},
                             {"f1_mean", f1_stats.mean},
                             {"f1_std", f1_stats.std},
                             {"shd_mean", shd_stats.mean},
                             {"shd_std", shd_stats.std},
                             {"normalized_shd_mean", nshd_stats.mean},
                             {"normalized_shd_std", nshd_stats.std}});
        }
    }
    nlohmann::json out = {{"graph", args.graph},
                          {"n", args.data.n},
                          {"noise", args.data.noise},
                          {"cells", cells}};
    if (!args.output.empty()) write_json(args.output, out);
    return out;
}

nlohmann::json cmd_bench(const BenchArgs& args) {
    nlohmann::json rows = nlohmann::json::array();
    for (int d : args.d_values) {
        for (int n : args.n_values) {
            GraphConfig g = args.graph;
            g.d = d;
            DataConfig dc;
            dc.n = n;
            dc.seed = args.seed;
            const WeightedDag truth = generate_truth(g, dc.seed);
            const DataMatrix data = generate_data(truth, dc);
            const DataMatrix centered = center(data);

            std::vector<double> t_sm, t_nosm, t_opt;
            CausalOrder ord_sm;
            for (int rep = 0; rep < args.repeats; ++rep) {
                OrderingConfig oc = args.ordering;
                oc.use_downdate = true;
                auto t0 = Clock::now();
                ord_sm = order(centered, oc);
                t_sm.push_back(seconds_since(t0));

                oc.use_downdate = false;
                t0 = Clock::now();
                order(centered, oc);
                t_nosm.push_back(seconds_since(t0));

                t0 = Clock::now();
                const DataMatrix xpi = permute_data(centered, ord_sm);
                optimize(xpi, args.opt);
                t_opt.push_back(seconds_since(t0));
            }
            const double m_sm = median(t_sm);
            const double m_nosm = median(t_nosm);
            const double m_opt = median(t_opt);
            rows.push_back({{"d", d},
                            {"n", n},
                            {"ordering_sm_seconds", m_sm},
                            {"ordering_nosm_seconds", m_nosm},
                            {"optimization_seconds", m_opt},
                            {"speedup_sm_over_nosm", m_nosm / std::max(m_sm, 1e-12)}});
        }
    }
    nlohmann::json out = {{"repeats", args.repeats}, {"rows", rows}};
    if (!args.output.empty()) write_json(args.output, out);
    return out;
}

int cmd_selftest() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
        if (!ok) ++failures;
    };
    Rng rng(20240601ULL);

    // dense_inverse basics
    {
        const Matrix id = Matrix::Identity(4, 4);
        check("dense_inverse(identity) == identity",
              (dense_inverse(id) - id).norm() < 1e-12);
        Matrix diag = Matrix::Zero(2, 2);
        diag(0, 0) = 2.0;
        diag(1, 1) = 4.0;
        Matrix expect = Matrix::Zero(2, 2);
        expect(0, 0) = 0.5;
        expect(1, 1) = 0.25;
        check("dense_inverse(diag(2,4)) == diag(0.5,0.25)",
              (dense_inverse(diag) - expect).norm() < 1e-14);
    }

    // dense_inverse double composition on conditioned inputs
    {
        bool ok = true;
        for (int trial = 0; trial < 10; ++trial) {
            const int n = 6 + static_cast<int>(rng.uniform_int(10));
            Matrix x(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) x(i, j) = rng.normal();
            Matrix a = x * x.transpose() + 0.5 * static_cast<double>(n) * Matrix::Identity(n, n);
            const Matrix back = dense_inverse(dense_inverse(a));
            ok = ok && (back - a).norm() / a.norm() < 1e-8;
        }
        check("dense_inverse o dense_inverse == identity map", ok);
    }

    // Sherman-Morrison downdate against the dense oracle
    {
        bool ok = true;
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 4 + static_cast<int>(rng.uniform_int(17));
            Matrix x(n, n + 2);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n + 2; ++j) x(i, j) = rng.normal();
            Matrix a = x * x.transpose() + static_cast<double>(n) * Matrix::Identity(n, n);
            Vector u(n);
            for (int i = 0; i < n; ++i) u(i) = 0.3 * rng.normal();
            KernelState state;
            state.kinv = dense_inverse(a);
            state.reinvert_period = 1000;
            state.alpha_floor = 1e-7;
            if (sm_downdate(state, u) != DowndateOutcome::applied) continue;
            const Matrix direct = dense_inverse(a - u * u.transpose());
            ok = ok && (state.kinv - direct).norm() / direct.norm() < 1e-9;
        }
        check("sm_downdate matches dense inverse of A - uu^T", ok);
    }

    // population covariance closed forms
    {
        WeightedDag chain;
        chain.dim = 2;
        chain.weights = Matrix::Zero(2, 2);
        chain.weights(0, 1) = 1.5;
        chain.topo_order = {0, 1};
        const Matrix sigma = population_covariance(chain, Vector::Ones(2));
        Matrix expect(2, 2);
        expect << 1.0, 1.5, 1.5, 1.0 + 1.5 * 1.5;
        check("population_covariance(2-chain) matches hand expansion",
              (sigma - expect).norm() < 1e-12);
    }

    // Theorem-style exact recovery and rescale invariance
    {
        bool recover_ok = true, rescale_ok = true, bias_ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            const int d = 3 + static_cast<int>(rng.uniform_int(6));
            WeightedDag dag = sample_weights(gen_er_dag(d, 2, 100 + trial), 1.0, 200 + trial);
            Vector omega(d);
            for (int i = 0; i < d; ++i) omega(i) = 0.5 + rng.uniform01() * 2.0;
            const PopulationModel model = make_population_model(dag, omega);
            const Matrix rec = population_recover(model);
            recover_ok = recover_ok && (rec - dag.weights).cwiseAbs().maxCoeff() < 1e-10;

            const PopulationModel scaled = make_population_model(dag, 3.7 * omega);
            rescale_ok = rescale_ok &&
                         (population_recover(scaled) - rec).cwiseAbs().maxCoeff() < 1e-9;

            // reversing one true edge in the order biases the recovery
            std::vector<std::pair<int, int>> edges;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    if (dag.weights(a, b) != 0.0) edges.emplace_back(a, b);
            if (!edges.empty()) {
                const auto [i, j] = edges[rng.uniform_int(edges.size())];
                CausalOrder wrong;
                wrong.perm = dag.topo_order;
                std::vector<int> pos = inverse_permutation(wrong.perm);
                std::swap(wrong.perm[pos[i]], wrong.perm[pos[j]]);
                const Matrix biased = population_recover(model, wrong);
                bias_ok = bias_ok && biased(i, j) == 0.0 &&
                          (biased - dag.weights).norm() > 1e-8;
            }
        }
        check("population_recover equals true weights (d<=8)", recover_ok);
        check("population_recover invariant to common variance rescale", rescale_ok);
        check("reversed edge forces zero and biases other coefficients", bias_ok);
    }

    return failures;
}

}  // namespace triopt
