// bnfuse command line: validate, fuse, and query multi-author Bayes nets.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnfuse/compromise.hpp"
#include "bnfuse/dot.hpp"
#include "bnfuse/fusion.hpp"
#include "bnfuse/net_io.hpp"
#include "bnfuse/random_nets.hpp"

namespace fs = std::filesystem;
using namespace bnfuse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << text;
}

ParsedNet load_net(const fs::path& path) {
    try {
        ParsedNet net = parse_net(read_file(path));
        if (net.name.empty()) net.name = path.stem().string();
        return net;
    } catch (const Error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string format_probability(double p) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.6f", p);
    return buffer;
}

std::string format_distribution(const NodeId& variable,
                                const std::vector<std::string>& states,
                                const std::vector<double>& dist) {
    std::ostringstream out;
    for (std::size_t s = 0; s < states.size(); ++s) {
        if (s) out << "  ";
        out << variable << "=" << states[s] << " " << format_probability(dist[s]);
    }
    return out.str();
}

std::map<NodeId, std::string> parse_evidence(const std::string& text) {
    std::map<NodeId, std::string> evidence;
    if (text.empty()) return evidence;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
            throw ValidationError("evidence entries look like var=state; got '" +
                                  item + "'");
        evidence[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return evidence;
}

std::vector<double> parse_weights(const std::string& text) {
    std::vector<double> weights;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            std::size_t used = 0;
            double w = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            weights.push_back(w);
        } catch (const std::exception&) {
            throw ValidationError("bad weight '" + item + "'");
        }
    }
    return weights;
}

fs::path derived_output(const fs::path& base, const std::string& tag) {
    fs::path out = base;
    out.replace_filename(base.stem().string() + "." + tag +
                         base.extension().string());
    return out;
}

// --- fuse ----------------------------------------------------------------

struct FuseArgs {
    std::vector<std::string> inputs;
    std::string out_path;
    std::string trace_path;
    std::string dot_path;
    bool checked = false;
};

int cmd_fuse(const FuseArgs& args) {
    if (args.inputs.size() < 2)
        throw ValidationError("fuse needs at least two net files");

    std::vector<ParsedNet> docs;
    std::vector<Dag> structures;
    for (const auto& file : args.inputs) {
        docs.push_back(load_net(file));
        structures.push_back(docs.back().structure());
    }

    FusionOptions options;
    options.checked = args.checked;
    MultiFusionResult result = fuse_many(structures, options);

    std::string fused_doc = write_net(result.fused, "fused");
    if (args.out_path.empty()) {
        std::cout << fused_doc;
    } else {
        fs::path out(args.out_path);
        write_file(out, fused_doc);
        for (std::size_t i = 0; i < result.transformed.size(); ++i) {
            std::ostringstream tag;
            tag << "net" << i + 1;
            write_file(derived_output(out, tag.str()),
                       write_net(result.transformed[i],
                                 docs[i].name + "-transformed"));
        }
    }

    if (!args.trace_path.empty()) {
        std::ostringstream log;
        for (std::size_t i = 1; i < result.traces.size(); ++i) {
            log << "# pass " << i << ": " << docs[i].name << " into consensus\n";
            log << result.traces[i].to_log();
        }
        write_file(args.trace_path, log.str());
    }

    if (!args.dot_path.empty())
        write_file(args.dot_path,
                   fused_to_dot(result.fused, result.transformed, "fused"));

    std::cerr << "fused " << args.inputs.size() << " nets: "
              << result.fused.nodes().size() << " nodes, "
              << result.fused.arcs().size() << " arcs\n";
    return kExitOk;
}

// --- compromise / infer --------------------------------------------------

struct CompromiseArgs {
    std::vector<std::string> inputs;
    std::string mode = "both";
    std::string target;
    std::string evidence;
    std::string weights;
    bool checked = false;
};

void print_header(const NodeId& target,
                  const std::map<NodeId, std::string>& evidence) {
    std::cout << "target: " << target << "\n";
    std::cout << "evidence:";
    if (evidence.empty()) std::cout << " (none)";
    for (const auto& [var, state] : evidence) std::cout << " " << var << "=" << state;
    std::cout << "\n";
}

int cmd_compromise(const CompromiseArgs& args) {
    if (args.inputs.size() < 2)
        throw ValidationError("compromise needs at least two net files");
    if (args.target.empty()) throw ValidationError("--query is required");

    std::vector<DiscreteBayesNet> nets;
    for (const auto& file : args.inputs) {
        ParsedNet doc = load_net(file);
        if (!doc.is_bayes())
            throw ValidationError(file + ": compromise needs CPTs in every net");
        nets.push_back(doc.bayes());
    }

    CompromiseWeights weights =
        args.weights.empty() ? CompromiseWeights::equal(nets.size())
                             : CompromiseWeights(parse_weights(args.weights));
    auto evidence = parse_evidence(args.evidence);

    FusionOptions options;
    options.checked = args.checked;

    print_header(args.target, evidence);
    if (args.mode == "prior") {
        DiscreteBayesNet consensus = prior_compromise(nets, weights, options);
        auto dist = query(consensus, args.target, evidence);
        std::cout << "prior compromise: "
                  << format_distribution(args.target,
                                         consensus.domain(args.target), dist)
                  << "\n";
        return kExitOk;
    }
    if (args.mode == "posterior") {
        PosteriorCompromise result =
            posterior_compromise(nets, weights, args.target, evidence);
        for (std::size_t dropped : result.dropped_authors)
            std::cout << "author " << dropped + 1
                      << " dropped: evidence impossible under its net\n";
        std::cout << "posterior compromise: "
                  << format_distribution(args.target,
                                         nets.front().domain(args.target),
                                         result.distribution)
                  << "\n";
        return kExitOk;
    }
    if (args.mode != "both")
        throw ValidationError("--mode must be prior, posterior, or both");

    CompromiseReport report =
        compare_compromises(nets, weights, args.target, evidence, options);
    for (std::size_t i = 0; i < report.per_author.size(); ++i) {
        std::cout << "author " << i + 1 << " posterior: ";
        if (report.per_author[i].empty())
            std::cout << "(no posterior: evidence impossible or variable unknown)";
        else
            std::cout << format_distribution(args.target, report.target_states,
                                             report.per_author[i]);
        std::cout << "\n";
    }
    for (std::size_t dropped : report.dropped_authors)
        std::cout << "author " << dropped + 1
                  << " dropped from the posterior compromise\n";
    std::cout << "posterior compromise: "
              << format_distribution(args.target, report.target_states,
                                     report.posterior)
              << "\n";
    std::cout << "prior compromise: "
              << format_distribution(args.target, report.target_states,
                                     report.prior)
              << "\n";
    return kExitOk;
}

struct InferArgs {
    std::string input;
    std::string target;
    std::string evidence;
};

int cmd_infer(const InferArgs& args) {
    if (args.target.empty()) throw ValidationError("--query is required");
    ParsedNet doc = load_net(args.input);
    if (!doc.is_bayes())
        throw ValidationError(args.input + ": inference needs CPTs");
    auto evidence = parse_evidence(args.evidence);
    auto dist = query(doc.bayes(), args.target, evidence);
    print_header(args.target, evidence);
    std::cout << "posterior: "
              << format_distribution(args.target,
                                     doc.bayes().domain(args.target), dist)
              << "\n";
    return kExitOk;
}

// --- gen-random ----------------------------------------------------------

struct GenArgs {
    int nodes = 0;
    double density = 0.0;
    std::uint64_t seed = 0;
    bool pair = false;
    bool cpt = false;
    std::string out_path;
};

int cmd_gen_random(const GenArgs& args) {
    auto make_doc = [&](std::uint64_t seed, const std::string& name) {
        Dag dag = random_dag(args.nodes, args.density, seed);
        if (args.cpt)
            return write_net(with_random_binary_cpts(dag, seed ^ 0x5bd1e995u),
                             name);
        return write_net(dag, name);
    };
    std::ostringstream base;
    base << "random-n" << args.nodes << "-s" << args.seed;

    if (args.pair) {
        if (args.out_path.empty())
            throw ValidationError("--pair needs --out <prefix>");
        std::uint64_t second_seed = args.seed ^ 0x9e3779b97f4a7c15ull;
        write_file(args.out_path + ".1.json", make_doc(args.seed, base.str() + "-1"));
        write_file(args.out_path + ".2.json",
                   make_doc(second_seed, base.str() + "-2"));
        std::cerr << "wrote " << args.out_path << ".1.json and "
                  << args.out_path << ".2.json\n";
        return kExitOk;
    }
    std::string doc = make_doc(args.seed, base.str());
    if (args.out_path.empty())
        std::cout << doc;
    else
        write_file(args.out_path, doc);
    return kExitOk;
}

// --- bench ---------------------------------------------------------------

struct BenchArgs {
    std::string sizes = "8,16,32";
    int trials = 3;
    double density = 0.3;
    std::uint64_t seed = 42;
    int complete = 0;
    bool checked = false;
};

Dag complete_dag(int n, bool reversed_order) {
    Dag base = random_dag(n, 0.0, 1); // just the named nodes
    std::vector<NodeId> names(base.nodes().begin(), base.nodes().end());
    std::set<Arc> arcs;
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            arcs.insert(reversed_order ? Arc{names[j], names[i]}
                                       : Arc{names[i], names[j]});
    return Dag(base.nodes(), std::move(arcs));
}

int cmd_bench(const BenchArgs& args) {
    if (args.trials < 1) throw ValidationError("--trials must be positive");
    std::vector<int> sizes;
    {
        std::stringstream stream(args.sizes);
        std::string item;
        while (std::getline(stream, item, ',')) {
            try {
                std::size_t used = 0;
                int n = std::stoi(item, &used);
                if (used != item.size() || n < 1)
                    throw std::invalid_argument(item);
                sizes.push_back(n);
            } catch (const std::exception&) {
                throw ValidationError("bad size '" + item + "'");
            }
        }
    }
    if (sizes.empty()) throw ValidationError("--sizes lists no sizes");

    FusionOptions options;
    options.checked = args.checked;

    std::printf("%-10s %7s %8s %9s %9s %8s %8s %10s %10s\n", "case", "trials",
                "density", "mean_ms", "max_ms", "mean_rev", "max_rev",
                "mean_merge", "max_merge");
    auto run_case = [&](const std::string& label, int trials, double density,
                        auto make_pair) {
        double total_ms = 0.0, worst_ms = 0.0;
        long long total_rev = 0, worst_rev = 0, total_merge = 0, worst_merge = 0;
        for (int t = 0; t < trials; ++t) {
            auto [first, second] = make_pair(t);
            auto start = std::chrono::steady_clock::now();
            FusionResult result = fuse_dags(first, second, options);
            auto stop = std::chrono::steady_clock::now();
            double ms =
                std::chrono::duration<double, std::milli>(stop - start).count();
            total_ms += ms;
            worst_ms = std::max(worst_ms, ms);
            // fuse_dags enforces the iteration bounds on every run; the
            // table just reports the counters it saw.
            total_rev += result.trace.reversal_iterations;
            worst_rev = std::max<long long>(worst_rev,
                                            result.trace.reversal_iterations);
            total_merge += result.trace.merge_iterations;
            worst_merge =
                std::max<long long>(worst_merge, result.trace.merge_iterations);
        }
        std::printf("%-10s %7d %8.2f %9.3f %9.3f %8.1f %8lld %10.1f %10lld\n",
                    label.c_str(), trials, density, total_ms / trials, worst_ms,
                    double(total_rev) / trials, worst_rev,
                    double(total_merge) / trials, worst_merge);
    };

    for (int n : sizes) {
        std::ostringstream label;
        label << "n=" << n;
        run_case(label.str(), args.trials, args.density, [&](int t) {
            std::uint64_t s = args.seed + 1000003ull * t + 17ull * n;
            return std::make_pair(random_dag(n, args.density, s),
                                  random_dag(n, args.density,
                                             s ^ 0x9e3779b97f4a7c15ull));
        });
    }
    if (args.complete > 0) {
        std::ostringstream label;
        label << "K" << args.complete;
        run_case(label.str(), 1, 1.0, [&](int) {
            return std::make_pair(complete_dag(args.complete, true),
                                  complete_dag(args.complete, false));
        });
    }
    return kExitOk;
}

// --- export-dot / validate -----------------------------------------------

int cmd_export_dot(const std::string& input, const std::string& out_path) {
    ParsedNet doc = load_net(input);
    std::string dot = to_dot(doc.structure(), doc.name);
    if (out_path.empty())
        std::cout << dot;
    else
        write_file(out_path, dot);
    return kExitOk;
}

int cmd_validate(const std::vector<std::string>& inputs) {
    bool all_ok = true;
    for (const auto& file : inputs) {
        try {
            ParsedNet doc = load_net(file);
            std::cout << file << ": ok ("
                      << (doc.is_bayes() ? "bayes net" : "structure") << ", "
                      << doc.structure().nodes().size() << " nodes, "
                      << doc.structure().arcs().size() << " arcs)\n";
        } catch (const Error& e) {
            std::cout << file << ": invalid: " << e.what() << "\n";
            all_ok = false;
        }
    }
    return all_ok ? kExitOk : kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuse multi-author Bayes nets into one consensus structure "
                 "and compare prior vs posterior compromise"};
    app.require_subcommand(1);

    FuseArgs fuse_args;
    auto* fuse_cmd =
        app.add_subcommand("fuse", "Fuse two or more nets into a consensus DAG");
    fuse_cmd->add_option("inputs", fuse_args.inputs, "net files (first seeds the fusion)")
        ->required();
    fuse_cmd->add_option("--out", fuse_args.out_path,
                         "fused net file; transformed inputs land next to it");
    fuse_cmd->add_option("--trace", fuse_args.trace_path, "event log file");
    fuse_cmd->add_option("--dot", fuse_args.dot_path, "graphviz export file");
    fuse_cmd->add_flag("--checked", fuse_args.checked,
                       "verify algorithm invariants after every mutation");

    CompromiseArgs comp_args;
    auto* comp_cmd = app.add_subcommand(
        "compromise", "Prior/posterior compromise over several author nets");
    comp_cmd->add_option("inputs", comp_args.inputs, "net files with CPTs")
        ->required();
    comp_cmd->add_option("--mode", comp_args.mode, "prior, posterior, or both");
    comp_cmd->add_option("--query", comp_args.target, "target variable")
        ->required();
    comp_cmd->add_option("--evidence", comp_args.evidence,
                         "comma list of var=state");
    comp_cmd->add_option("--weights", comp_args.weights,
                         "comma list of author weights");
    comp_cmd->add_flag("--checked", comp_args.checked,
                       "verify fusion invariants");

    InferArgs infer_args;
    auto* infer_cmd =
        app.add_subcommand("infer", "Posterior query on a single net");
    infer_cmd->add_option("input", infer_args.input, "net file with CPTs")
        ->required();
    infer_cmd->add_option("--query", infer_args.target, "target variable")
        ->required();
    infer_cmd->add_option("--evidence", infer_args.evidence,
                          "comma list of var=state");

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen-random", "Seeded random net files");
    gen_cmd->add_option("--nodes", gen_args.nodes, "node count")->required();
    gen_cmd->add_option("--density", gen_args.density, "arc probability in [0,1]")
        ->required();
    gen_cmd->add_option("--seed", gen_args.seed, "RNG seed");
    gen_cmd->add_flag("--pair", gen_args.pair, "write a fusion pair");
    gen_cmd->add_flag("--cpt", gen_args.cpt, "attach random binary CPTs");
    gen_cmd->add_option("--out", gen_args.out_path, "output file (or prefix with --pair)");

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand(
        "bench", "Fusion timing and iteration counters on random pairs");
    bench_cmd->add_option("--sizes", bench_args.sizes, "comma list of node counts");
    bench_cmd->add_option("--trials", bench_args.trials, "trials per size");
    bench_cmd->add_option("--density", bench_args.density, "arc probability");
    bench_cmd->add_option("--seed", bench_args.seed, "RNG seed");
    bench_cmd->add_option("--complete", bench_args.complete,
                          "also run the opposed complete-graph worst case");
    bench_cmd->add_flag("--checked", bench_args.checked,
                        "verify algorithm invariants while timing");

    std::string dot_input, dot_out;
    auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz export of one net");
    dot_cmd->add_option("input", dot_input, "net file")->required();
    dot_cmd->add_option("--out", dot_out, "output file");

    std::vector<std::string> validate_inputs;
    auto* validate_cmd =
        app.add_subcommand("validate", "Parse and validate net files");
    validate_cmd->add_option("inputs", validate_inputs, "net files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (fuse_cmd->parsed()) return cmd_fuse(fuse_args);
        if (comp_cmd->parsed()) return cmd_compromise(comp_args);
        if (infer_cmd->parsed()) return cmd_infer(infer_args);
        if (gen_cmd->parsed()) return cmd_gen_random(gen_args);
        if (bench_cmd->parsed()) return cmd_bench(bench_args);
        if (dot_cmd->parsed()) return cmd_export_dot(dot_input, dot_out);
        if (validate_cmd->parsed()) return cmd_validate(validate_inputs);
    } catch (const InvariantError& e) {
        std::cerr << "internal invariant breach: " << e.what() << "\n";
        if (!e.trace_dump.empty()) std::cerr << e.trace_dump;
        return kExitInternal;
    } catch (const InvalidReversalError& e) {
        std::cerr << "internal invariant breach: " << e.what() << "\n";
        return kExitInternal;
    } catch (const StructuralError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "unexpected failure: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
