#include "cli.hpp"

#include <sys/resource.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "sybilblind/analysis.hpp"
#include "sybilblind/error.hpp"
#include "sybilblind/graph_io.hpp"
#include "sybilblind/pipeline.hpp"
#include "sybilblind/sampler.hpp"
#include "sybilblind/synth.hpp"

#ifndef SYBILBLIND_VERSION
#define SYBILBLIND_VERSION "unknown"
#endif

namespace sybilblind::cli {
namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 14695981039346656037ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex16(std::uint64_t x) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = digits[x & 0xF];
    return s;
}

std::size_t default_workers() {
    const char* env = std::getenv("SYBILBLIND_WORKERS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (*end != '\0' || v < 1) throw UsageError("SYBILBLIND_WORKERS must be a positive integer, got '" + std::string(env) + "'");
    return static_cast<std::size_t>(v);
}

long peak_memory_kb() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) return -1;
    return usage.ru_maxrss;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write error on " + path);
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out << text;
    if (!out) throw DataError("write error on " + path);
}

// Collects what a manifest needs while a subcommand runs.
class RunRecord {
public:
    RunRecord(std::string subcommand, std::vector<std::string> argv)
        : subcommand_(std::move(subcommand)), argv_(std::move(argv)), start_(std::chrono::steady_clock::now()) {}

    void input(const std::string& path) { inputs_.push_back(path); }
    void output(const std::string& path) { outputs_.push_back(path); }

    void write(const std::string& path, json config, std::uint64_t seed, json result,
               const std::optional<std::string>& stdout_text) const {
        json m;
        m["tool"] = "sybilblind";
        m["version"] = SYBILBLIND_VERSION;
        m["subcommand"] = subcommand_;
        m["argv"] = argv_;
        m["config"] = std::move(config);
        m["seed"] = seed;
        json inputs = json::array();
        for (const auto& p : inputs_) inputs.push_back({{"path", p}, {"fnv1a64", file_digest(p)}});
        m["inputs"] = std::move(inputs);
        json outputs = json::array();
        for (const auto& p : outputs_) outputs.push_back({{"path", p}, {"fnv1a64", file_digest(p)}});
        m["outputs"] = std::move(outputs);
        if (stdout_text) m["stdout_fnv1a64"] = hex16(fnv1a(*stdout_text));
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        m["wall_clock_seconds"] = elapsed.count();
        m["peak_memory_kb"] = peak_memory_kb();
        m["result"] = std::move(result);
        write_json(m, path);
    }

private:
    std::string subcommand_;
    std::vector<std::string> argv_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Option groups shared between subcommands.

struct GraphOpts {
    std::string path;
    std::string mode = "undirected";
};

void add_graph_options(CLI::App* sub, GraphOpts& o) {
    sub->add_option("--graph", o.path, "Edge list file (`u v` per line)")->required();
    sub->add_option("--graph-mode", o.mode,
                    "undirected edge list, or a directed follow list converted by mutual or union reciprocity")
        ->check(CLI::IsMember({"undirected", "mutual", "union"}))
        ->capture_default_str();
}

struct InputGraph {
    Graph graph;
    IdMap ids;
    std::optional<DirectedEdgeList> directed;
};

InputGraph load_input_graph(const GraphOpts& o, RunRecord& record) {
    record.input(o.path);
    InputGraph in;
    if (o.mode == "undirected") {
        auto loaded = load_undirected(o.path);
        in.graph = std::move(loaded.graph);
        in.ids = std::move(loaded.ids);
        return in;
    }
    auto loaded = load_directed(o.path);
    in.graph = from_directed(loaded.list, o.mode == "mutual" ? Reciprocity::mutual : Reciprocity::either);
    in.ids = std::move(loaded.ids);
    in.directed = std::move(loaded.list);
    return in;
}

struct SamplerOpts {
    std::string kind = "uniform";
    std::string feature_file;
    std::string follow_graph;
    std::size_t pool = 1000;
};

void add_sampler_options(CLI::App* sub, SamplerOpts& o) {
    sub->add_option("--sampler", o.kind, "Training-sample strategy")
        ->check(CLI::IsMember({"uniform", "fbr"}))
        ->capture_default_str();
    sub->add_option("--feature-file", o.feature_file, "`node_id,score` CSV for the fbr sampler (low = suspect)");
    sub->add_option("--follow-graph", o.follow_graph, "Directed follow list to compute follow-back rates from");
    sub->add_option("--pool", o.pool, "Pool size K of the fbr sampler")->capture_default_str();
}

std::vector<double> fbr_from_follow_graph(const std::string& path, const IdMap& ids) {
    auto follows = load_directed(path);
    auto rates = compute_fbr(follows.list);
    std::vector<double> scores(ids.size(), 1.0);  // nodes that follow nobody
    for (std::size_t u = 0; u < ids.size(); ++u) {
        if (auto f = follows.ids.find(ids.original(static_cast<NodeId>(u)))) scores[u] = rates[*f];
    }
    return scores;
}

SamplerConfig resolve_sampler(const SamplerOpts& o, const InputGraph& in, RunRecord& record) {
    if (o.kind == "uniform") {
        if (!o.feature_file.empty() || !o.follow_graph.empty()) {
            throw UsageError("--feature-file and --follow-graph need --sampler fbr");
        }
        return UniformSampling{};
    }
    if (!o.feature_file.empty() && !o.follow_graph.empty()) {
        throw UsageError("give at most one of --feature-file and --follow-graph");
    }
    FeatureRefinedSampling fbr;
    fbr.pool = o.pool;
    if (!o.feature_file.empty()) {
        record.input(o.feature_file);
        fbr.scores = load_node_values(o.feature_file, in.ids);
    } else if (!o.follow_graph.empty()) {
        record.input(o.follow_graph);
        fbr.scores = fbr_from_follow_graph(o.follow_graph, in.ids);
    } else if (in.directed) {
        fbr.scores = compute_fbr(*in.directed);
    } else {
        throw UsageError("--sampler fbr needs --feature-file, --follow-graph, or a directed --graph-mode");
    }
    return fbr;
}

json sampler_json(const SamplerOpts& o) {
    json j;
    j["kind"] = o.kind;
    if (o.kind == "fbr") {
        j["pool"] = o.pool;
        if (!o.feature_file.empty()) j["feature_file"] = o.feature_file;
        if (!o.follow_graph.empty()) j["follow_graph"] = o.follow_graph;
    }
    return j;
}

struct PipelineOpts {
    std::size_t n = 10;
    std::size_t k = 100;
    std::size_t kappa = 10;
    double theta = 0.4;
    double w = 0.0;
    double gain = 0.5;
    std::size_t max_iter = 30;
    double epsilon = 1e-6;
    bool fixed_iterations = false;
    std::string selection = "homophily";
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::size_t threads_per_trial = 1;
    CLI::Option* w_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
};

void add_pipeline_options(CLI::App* sub, PipelineOpts& o) {
    sub->add_option("--n", o.n, "Sampling size per set")->capture_default_str();
    sub->add_option("--k", o.k, "Number of sampling trials")->capture_default_str();
    sub->add_option("--kappa", o.kappa, "Trials kept by homophily before the entropy pick")->capture_default_str();
    sub->add_option("--theta", o.theta, "Prior offset of labeled nodes")->capture_default_str();
    o.w_opt = sub->add_option("--w", o.w, "Edge homophily strength (default: calibrated from --gain)");
    sub->add_option("--gain", o.gain, "Linear propagation gain used to calibrate w")->capture_default_str();
    sub->add_option("--max-iter", o.max_iter, "Propagation sweeps T")->capture_default_str();
    sub->add_option("--epsilon", o.epsilon, "Stop once no posterior moves by this much")->capture_default_str();
    sub->add_flag("--fixed-iterations", o.fixed_iterations, "Always run --max-iter sweeps");
    sub->add_option("--selection", o.selection, "Primary aggregation metric")
        ->check(CLI::IsMember({"homophily", "entropy"}))
        ->capture_default_str();
    sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    o.workers_opt = sub->add_option("--workers", o.workers, "Trials run in parallel (default: SYBILBLIND_WORKERS or 1)");
    sub->add_option("--threads-per-trial", o.threads_per_trial, "Threads inside one propagation")
        ->capture_default_str();
}

SybilBlindConfig to_config(PipelineOpts& o) {
    if (o.workers_opt->count() == 0) o.workers = default_workers();
    SybilBlindConfig cfg;
    cfg.n = o.n;
    cfg.k = o.k;
    cfg.kappa = o.kappa;
    cfg.detector.theta = o.theta;
    if (o.w_opt->count() > 0) cfg.detector.w = o.w;
    cfg.detector.gain = o.gain;
    cfg.detector.max_iterations = o.max_iter;
    cfg.detector.epsilon = o.epsilon;
    cfg.detector.fixed_iterations = o.fixed_iterations;
    cfg.selection = o.selection == "entropy" ? SelectionOrder::entropy_first : SelectionOrder::homophily_first;
    cfg.master_seed = o.seed;
    cfg.worker_count = o.workers;
    cfg.threads_per_trial = o.threads_per_trial;
    return cfg;
}

json config_json(const SybilBlindConfig& cfg) {
    json j;
    j["n"] = cfg.n;
    j["k"] = cfg.k;
    j["kappa"] = cfg.kappa;
    j["theta"] = cfg.detector.theta;
    if (cfg.detector.w) {
        j["w"] = *cfg.detector.w;
    } else {
        j["w"] = nullptr;
    }
    j["gain"] = cfg.detector.gain;
    j["max_iterations"] = cfg.detector.max_iterations;
    j["epsilon"] = cfg.detector.epsilon;
    j["fixed_iterations"] = cfg.detector.fixed_iterations;
    j["selection"] = cfg.selection == SelectionOrder::entropy_first ? "entropy" : "homophily";
    j["master_seed"] = cfg.master_seed;
    j["worker_count"] = cfg.worker_count;
    j["threads_per_trial"] = cfg.threads_per_trial;
    return j;
}

struct ScenarioOpts {
    std::size_t benign_nodes = 10'000;
    std::size_t benign_m = 4;
    std::string benign_graph;
    double sybil_fraction = 0.2;
    std::string sybil_count = "total";
    std::size_t sybil_m = 0;
    std::size_t attack_edges = 500;
    std::uint64_t seed = 0;
};

void add_scenario_options(CLI::App* sub, ScenarioOpts& o, const std::string& seed_flag) {
    sub->add_option("--benign-nodes", o.benign_nodes, "Size of the generated benign region")->capture_default_str();
    sub->add_option("--benign-m", o.benign_m, "Edges per new node in the benign region")->capture_default_str();
    sub->add_option("--benign-graph", o.benign_graph, "Use this edge list as the benign region instead");
    sub->add_option("--sybil-fraction", o.sybil_fraction, "Sybil fraction r")->capture_default_str();
    sub->add_option("--sybil-count", o.sybil_count, "r is a fraction of all nodes or of the benign nodes")
        ->check(CLI::IsMember({"total", "benign"}))
        ->capture_default_str();
    sub->add_option("--sybil-m", o.sybil_m, "Edges per new Sybil node (0: match the benign degree)")
        ->capture_default_str();
    sub->add_option("--attack-edges", o.attack_edges, "Benign-Sybil edges g")->capture_default_str();
    sub->add_option(seed_flag, o.seed, "Scenario seed")->capture_default_str();
}

ScenarioSpec to_spec(const ScenarioOpts& o, RunRecord& record) {
    ScenarioSpec spec;
    if (!o.benign_graph.empty()) {
        record.input(o.benign_graph);
        spec.benign_source = std::filesystem::path(o.benign_graph);
    } else {
        spec.benign_source = PaSource{o.benign_nodes, o.benign_m};
    }
    spec.sybil_fraction = o.sybil_fraction;
    spec.convention = o.sybil_count == "benign" ? SybilCount::of_benign : SybilCount::of_total;
    spec.sybil_attachment = o.sybil_m;
    spec.num_attack_edges = o.attack_edges;
    spec.seed = o.seed;
    return spec;
}

json spec_json(const ScenarioOpts& o) {
    json j;
    if (o.benign_graph.empty()) {
        j["benign_nodes"] = o.benign_nodes;
        j["benign_m"] = o.benign_m;
    } else {
        j["benign_graph"] = o.benign_graph;
    }
    j["sybil_fraction"] = o.sybil_fraction;
    j["sybil_count"] = o.sybil_count;
    j["sybil_m"] = o.sybil_m;
    j["attack_edges"] = o.attack_edges;
    j["seed"] = o.seed;
    return j;
}

json bound_json(const BoundReport& b) {
    json j;
    j["n"] = b.n;
    j["r"] = b.r;
    j["tau"] = b.tau;
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    j["k_min"] = b.k_min;
    j["k_max"] = b.k_max;
    j["lower_exceeds_upper"] = b.lower_exceeds_upper;
    return j;
}

// Sends text to `out`, or to a file when `path` is non-empty.
void emit(const std::string& text, const std::string& path, std::ostream& out, RunRecord& record) {
    if (path.empty()) {
        out << text;
    } else {
        write_text(text, path);
        record.output(path);
    }
}

// ---------------------------------------------------------------------------
// Subcommands.

struct Context {
    std::vector<std::string> argv;
    std::ostream& out;
    std::ostream& err;
};

struct SynthCmd {
    ScenarioOpts scenario;
    std::string prefix;
    bool header = false;

    void attach(CLI::App* sub) {
        add_scenario_options(sub, scenario, "--seed");
        sub->add_option("--out-prefix", prefix, "Writes <prefix>.edges, <prefix>.labels.csv")->required();
        sub->add_flag("--header", header, "Write a CSV header row");
    }

    void run(Context& ctx) {
        RunRecord record("synth", ctx.argv);
        auto s = build_scenario(to_spec(scenario, record));
        const auto ids = IdMap::identity(s.graph.num_nodes());
        write_edge_list(s.graph, ids, prefix + ".edges");
        record.output(prefix + ".edges");
        write_labels(s.truth, ids, prefix + ".labels.csv", header);
        record.output(prefix + ".labels.csv");
        json result;
        result["num_nodes"] = s.graph.num_nodes();
        result["num_edges"] = s.graph.num_edges();
        result["num_benign"] = s.num_benign;
        result["num_sybil"] = s.num_sybil;
        result["num_attack_edges"] = s.num_attack_edges;
        result["sybil_attachment"] = s.sybil_attachment;
        record.write(prefix + ".manifest.json", spec_json(scenario), scenario.seed, result, std::nullopt);
    }
};

struct SampleCmd {
    GraphOpts graph;
    SamplerOpts sampler;
    std::size_t n = 10;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::string labels;
    std::string out;
    bool header = false;

    void attach(CLI::App* sub) {
        add_graph_options(sub, graph);
        add_sampler_options(sub, sampler);
        sub->add_option("--n", n, "Sampling size per set")->capture_default_str();
        sub->add_option("--seed", seed, "Master seed")->capture_default_str();
        sub->add_option("--trial", trial, "Trial index; the sample equals that trial of `detect`")
            ->capture_default_str();
        sub->add_option("--labels", labels, "Ground-truth labels; prints the sample's noise report");
        sub->add_option("--out", out, "`node_id,assigned_label` output file")->required();
        sub->add_flag("--header", header, "Write a CSV header row");
    }

    void run(Context& ctx) {
        RunRecord record("sample", ctx.argv);
        auto in = load_input_graph(graph, record);
        auto cfg = resolve_sampler(sampler, in, record);
        if (std::holds_alternative<FeatureRefinedSampling>(cfg)) {
            const auto& fbr = std::get<FeatureRefinedSampling>(cfg);
            if (n > fbr.pool) throw InvalidArgument("sampling size n exceeds pool size K");
        }
        auto sample = draw_sample(cfg, in.graph.num_nodes(), n, trial_seed(seed, trial));

        std::ostringstream rows;
        if (header) rows << "node_id,assigned_label\n";
        for (NodeId u : sample.benign) rows << in.ids.original(u) << ",0\n";
        for (NodeId u : sample.sybil) rows << in.ids.original(u) << ",1\n";
        write_text(rows.str(), out);
        record.output(out);

        json result;
        result["sample_digest"] = sample_digest(sample);
        std::optional<std::string> printed;
        if (!labels.empty()) {
            record.input(labels);
            auto truth = load_labels(labels, in.ids);
            auto report = noise_report(sample, truth);
            json nr;
            nr["n_bb"] = report.n_bb;
            nr["n_bs"] = report.n_bs;
            nr["n_sb"] = report.n_sb;
            nr["n_ss"] = report.n_ss;
            nr["alpha_b"] = report.alpha_b;
            nr["alpha_s"] = report.alpha_s;
            nr["polarity"] = to_string(report.polarity);
            printed = nr.dump(2) + "\n";
            ctx.out << *printed;
            result["noise"] = nr;
        }
        json config;
        config["graph"] = graph.path;
        config["graph_mode"] = graph.mode;
        config["sampler"] = sampler_json(sampler);
        config["n"] = n;
        config["trial"] = trial;
        record.write(out + ".manifest.json", config, seed, result, printed);
    }
};

struct DetectCmd {
    GraphOpts graph;
    SamplerOpts sampler;
    PipelineOpts pipeline;
    std::string prefix;
    bool header = false;

    void attach(CLI::App* sub) {
        add_graph_options(sub, graph);
        add_sampler_options(sub, sampler);
        add_pipeline_options(sub, pipeline);
        sub->add_option("--out-prefix", prefix,
                        "Writes <prefix>.posteriors.csv, <prefix>.ranking.csv, <prefix>.report.json")
            ->required();
        sub->add_flag("--header", header, "Write CSV header rows");
    }

    void run(Context& ctx) {
        RunRecord record("detect", ctx.argv);
        auto cfg = to_config(pipeline);
        auto in = load_input_graph(graph, record);
        cfg.sampler = resolve_sampler(sampler, in, record);
        auto result = run_sybilblind(in.graph, cfg);

        write_node_values(result.aggregated, in.ids, prefix + ".posteriors.csv", header, "posterior");
        record.output(prefix + ".posteriors.csv");

        std::ostringstream ranking;
        if (header) ranking << "node_id,posterior\n";
        for (NodeId u : result.ranking) ranking << in.ids.original(u) << ',' << format_double(result.aggregated[u]) << '\n';
        write_text(ranking.str(), prefix + ".ranking.csv");
        record.output(prefix + ".ranking.csv");

        json report;
        report["num_nodes"] = in.graph.num_nodes();
        report["num_edges"] = in.graph.num_edges();
        report["w"] = result.w;
        report["selected_trial"] = result.selected_trial_index;
        json trials = json::array();
        for (const auto& d : result.trials) {
            trials.push_back({{"trial", d.trial_index},
                              {"h", d.h},
                              {"e", d.e},
                              {"s", d.s},
                              {"iterations", d.iterations},
                              {"sample_digest", d.sample_digest}});
        }
        report["trials"] = std::move(trials);
        write_json(report, prefix + ".report.json");
        record.output(prefix + ".report.json");

        json config = config_json(cfg);
        config["graph"] = graph.path;
        config["graph_mode"] = graph.mode;
        config["sampler"] = sampler_json(sampler);
        json summary;
        summary["w"] = result.w;
        summary["selected_trial"] = result.selected_trial_index;
        summary["peak_retained_vectors"] = result.peak_retained_vectors;
        record.write(prefix + ".manifest.json", config, cfg.master_seed, summary, std::nullopt);
        (void)ctx;
    }
};

struct EvalCmd {
    std::string posteriors;
    std::string labels;
    std::string out;
    std::string manifest;

    void attach(CLI::App* sub) {
        sub->add_option("--posteriors", posteriors, "`node_id,posterior` file")->required();
        sub->add_option("--labels", labels, "`node_id,label` file (1 = Sybil)")->required();
        sub->add_option("--out", out, "Write the JSON result here instead of stdout");
        sub->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json when --out is set)");
    }

    void run(Context& ctx) {
        RunRecord record("eval", ctx.argv);
        record.input(posteriors);
        record.input(labels);
        auto ids = ids_from_csv(posteriors);
        auto values = load_node_values(posteriors, ids);
        auto truth = load_labels(labels, ids, true);
        json result;
        result["num_nodes"] = truth.size();
        result["num_sybils"] = truth.num_sybils();
        result["auc"] = auc(values, truth);
        result["fnr"] = fnr(values, truth);
        const std::string text = result.dump(2) + "\n";
        emit(text, out, ctx.out, record);
        const std::string mpath = !manifest.empty() ? manifest : (!out.empty() ? out + ".manifest.json" : "");
        if (!mpath.empty()) {
            record.write(mpath, json::object(), 0, result, out.empty() ? std::optional(text) : std::nullopt);
        }
    }
};

struct BoundsCmd {
    std::size_t n = 0;
    double r = 0.0;
    double tau = 0.0;
    std::size_t mc_trials = 0;
    std::uint64_t seed = 0;
    std::string manifest;

    void attach(CLI::App* sub) {
        sub->add_option("--n", n, "Sampling size")->required();
        sub->add_option("--r", r, "Sybil fraction")->required();
        sub->add_option("--tau", tau, "Noise tolerance")->required();
        sub->add_option("--mc-trials", mc_trials, "Also estimate the probability by simulation");
        sub->add_option("--seed", seed, "Seed of the simulation")->capture_default_str();
        sub->add_option("--manifest", manifest, "Write a manifest here");
    }

    void run(Context& ctx) {
        RunRecord record("bounds", ctx.argv);
        json result = bound_json(noise_bounds(n, r, tau));
        if (n <= kMaxExactSampleSize) result["exact_independent"] = noise_prob_independent(n, r, tau);
        if (mc_trials > 0) {
            auto mc = noise_prob_mc_independent(n, r, tau, mc_trials, seed);
            result["mc_estimate"] = mc.estimate;
            result["mc_standard_error"] = mc.standard_error;
            result["mc_trials"] = mc.trials;
        }
        const std::string text = result.dump(2) + "\n";
        ctx.out << text;
        if (!manifest.empty()) record.write(manifest, {{"n", n}, {"r", r}, {"tau", tau}}, seed, result, text);
    }
};

struct SweepCmd {
    ScenarioOpts scenario;
    PipelineOpts pipeline;
    std::string axis;
    std::vector<double> values;
    std::string out;
    std::string manifest;
    bool header = false;

    void attach(CLI::App* sub) {
        add_scenario_options(sub, scenario, "--scenario-seed");
        add_pipeline_options(sub, pipeline);
        sub->add_option("--axis", axis, "Parameter to vary")
            ->check(CLI::IsMember({"attack-edges", "sybil-fraction", "n", "k"}))
            ->required();
        sub->add_option("--values", values, "Comma-separated values")->delimiter(',')->required();
        sub->add_option("--out", out, "Write the CSV here instead of stdout");
        sub->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json when --out is set)");
        sub->add_flag("--header", header, "Write a CSV header row");
    }

    void run(Context& ctx) {
        RunRecord record("sweep", ctx.argv);
        auto cfg = to_config(pipeline);
        auto spec = to_spec(scenario, record);
        SweepAxis ax = SweepAxis::attack_edges;
        if (axis == "sybil-fraction") ax = SweepAxis::sybil_fraction;
        if (axis == "n") ax = SweepAxis::sampling_size;
        if (axis == "k") ax = SweepAxis::trials;
        auto points = sweep(ax, values, spec, cfg);
        std::ostringstream csv;
        write_sweep_csv(csv, points, header);
        emit(csv.str(), out, ctx.out, record);
        const std::string mpath = !manifest.empty() ? manifest : (!out.empty() ? out + ".manifest.json" : "");
        if (!mpath.empty()) {
            json config = config_json(cfg);
            config["scenario"] = spec_json(scenario);
            config["axis"] = axis;
            config["values"] = values;
            json result = json::array();
            for (const auto& p : points) {
                result.push_back({{"value", p.value}, {"auc", p.auc}, {"selected_trial", p.selected_trial}});
            }
            record.write(mpath, config, cfg.master_seed, result,
                         out.empty() ? std::optional(csv.str()) : std::nullopt);
        }
    }
};

struct ReplayCmd {
    std::string manifest;
    bool verify = true;

    void attach(CLI::App* sub) {
        sub->add_option("--manifest", manifest, "Manifest of the run to repeat")->required();
        sub->add_flag("!--no-verify", verify, "Skip comparing output digests with the manifest");
    }

    int run(Context& ctx) {
        std::ifstream in(manifest);
        if (!in) throw DataError("cannot open " + manifest);
        json m;
        try {
            m = json::parse(in);
        } catch (const json::exception& e) {
            throw DataError(manifest + ": " + e.what());
        }
        if (!m.contains("argv") || !m["argv"].is_array()) throw DataError(manifest + ": no argv recorded");
        auto argv = m["argv"].get<std::vector<std::string>>();
        if (argv.empty() || argv.front() == "replay") throw DataError(manifest + ": argv does not name a run");

        std::ostringstream captured;
        const int code = dispatch(argv, captured, ctx.err);
        ctx.out << captured.str();
        if (code != kExitOk || !verify) return code;

        bool same = true;
        for (const auto& o : m.value("outputs", json::array())) {
            const auto path = o.at("path").get<std::string>();
            if (file_digest(path) != o.at("fnv1a64").get<std::string>()) {
                ctx.err << "replay: " << path << " differs from the recorded run\n";
                same = false;
            }
        }
        if (m.contains("stdout_fnv1a64") && hex16(fnv1a(captured.str())) != m["stdout_fnv1a64"].get<std::string>()) {
            ctx.err << "replay: standard output differs from the recorded run\n";
            same = false;
        }
        return same ? kExitOk : kExitData;
    }
};

}  // namespace

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return hex16(fnv1a(bytes));
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sybil detection from randomly labeled sampling trials", "sybilblind"};
    app.set_version_flag("--version", SYBILBLIND_VERSION);
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    SynthCmd synth;
    SampleCmd sample;
    DetectCmd detect;
    EvalCmd eval;
    BoundsCmd bounds;
    SweepCmd sweep_cmd;
    ReplayCmd replay;
    auto* synth_app = app.add_subcommand("synth", "Generate a benign + Sybil scenario with ground truth");
    auto* sample_app = app.add_subcommand("sample", "Draw one training sample");
    auto* detect_app = app.add_subcommand("detect", "Run the detection pipeline on a graph");
    auto* eval_app = app.add_subcommand("eval", "AUC and false negative rate of a posterior file");
    auto* bounds_app = app.add_subcommand("bounds", "Bounds on the chance of a low-noise sample");
    auto* sweep_app = app.add_subcommand("sweep", "AUC across values of one scenario or pipeline parameter");
    auto* replay_app = app.add_subcommand("replay", "Repeat the run recorded in a manifest");
    synth.attach(synth_app);
    sample.attach(sample_app);
    detect.attach(detect_app);
    eval.attach(eval_app);
    bounds.attach(bounds_app);
    sweep_cmd.attach(sweep_app);
    replay.attach(replay_app);

    if (!args.empty() && !args.front().starts_with('-') && app.get_subcommand_no_throw(args.front()) == nullptr) {
        err << "error: unknown subcommand '" << args.front() << "'\n" << app.help();
        return kExitUsage;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Context ctx{args, out, err};
    try {
        if (*synth_app) synth.run(ctx);
        if (*sample_app) sample.run(ctx);
        if (*detect_app) detect.run(ctx);
        if (*eval_app) eval.run(ctx);
        if (*bounds_app) bounds.run(ctx);
        if (*sweep_app) sweep_cmd.run(ctx);
        if (*replay_app) return replay.run(ctx);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

}  // namespace sybilblind::cli
