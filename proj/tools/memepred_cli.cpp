#include "memepred/errors.hpp"
#include "memepred/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace memepred;

namespace {

struct Paths {
    std::string edges;
    std::string communities;
    std::string events;
    std::string out;
    std::string model;
    std::string meme;
    std::string subset = "full";
    std::vector<std::string> models;
};

struct SimOptions {
    PlantedPartitionSpec net;
    CascadeSpec cascades;
    std::uint64_t seed = 42;
    std::string edges_out = "edges.tsv";
    std::string communities_out = "communities.tsv";
    std::string events_out = "events.tsv";
};

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.close();
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void add_run_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--n", cfg.n, "early-window size")->check(CLI::Range(std::size_t{2}, std::size_t(1) << 30));
    cmd->add_option("--basis", cfg.basis, "popularity basis")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, PopularityBasis>{{"tweets", PopularityBasis::tweets},
                                                   {"adopters", PopularityBasis::adopters}}));
    cmd->add_option("--x-max", cfg.x_max, "new-meme threshold on prior events");
    cmd->add_option("--tau-days", cfg.tau_days, "baseline horizon in days")->check(CLI::PositiveNumber);
    cmd->add_option("--class-cap", cfg.class_cap, "largest popularity class");
    cmd->add_option("--bin-edges", cfg.bin_edges, "custom ascending class upper edges")->delimiter(',');
    cmd->add_option("--bin-first-class", cfg.bin_first_class, "class of the first custom bin");
    cmd->add_option("--seed", cfg.seed, "root seed");
    cmd->add_option("--unreachable", cfg.unreachable, "unreachable adopter pairs: constant|exclude")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, UnreachablePolicy>{{"constant", UnreachablePolicy::constant},
                                                     {"exclude", UnreachablePolicy::exclude}}));
    cmd->add_option("--min-community-size", cfg.min_community_size);
    cmd->add_option("--folds", cfg.folds);
    cmd->add_option("--trees", cfg.forest.n_trees);
    cmd->add_option("--features-per-tree", cfg.forest.features_per_tree);
    cmd->add_flag("--per-split-sampling", cfg.forest.per_split_sampling);
    cmd->add_option("--max-depth", cfg.forest.max_depth, "0 = unlimited");
    cmd->add_option("--min-leaf", cfg.forest.min_leaf);
    cmd->add_option("--lp-max-sweeps", cfg.lp_max_sweeps);
    cmd->add_option("--lp-tie-break", cfg.lp_tie_break, "label propagation ties: random|lowest")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, TieBreak>{{"random", TieBreak::random}, {"lowest", TieBreak::lowest}}));
    cmd->add_option("--history-begin", cfg.history_begin);
    cmd->add_option("--history-end", cfg.history_end);
    cmd->add_option("--inclusion-begin", cfg.inclusion_begin);
    cmd->add_option("--inclusion-end", cfg.inclusion_end);
    cmd->add_option("--followers", cfg.followers_path, "user<TAB>follower_count file");
}

void add_inputs(CLI::App* cmd, Paths& paths, bool events) {
    cmd->add_option("--edges", paths.edges, "edge list")->required();
    cmd->add_option("--communities", paths.communities, "community assignment (default: label propagation)");
    if (events) cmd->add_option("--events", paths.events, "event log")->required();
}

struct Inputs {
    Network net;
    CommunityAssignment ca;
    std::vector<Meme> memes;
};

Inputs load_inputs(const Paths& paths, const RunConfig& cfg, bool events) {
    Inputs in;
    in.net = load_network_file(paths.edges);
    if (paths.communities.empty()) {
        in.ca = detect_label_propagation(in.net, derive_seed(cfg.seed, "communities"), cfg.lp_max_sweeps,
                                         cfg.min_community_size, cfg.lp_tie_break);
    } else {
        in.ca = load_assignments_file(paths.communities, in.net, cfg.min_community_size);
    }
    if (events) in.memes = parse_events_file(paths.events);
    return in;
}

Corpus load_corpus(const Paths& paths, const RunConfig& cfg) {
    auto in = load_inputs(paths, cfg, true);
    auto corpus = build_corpus(in.net, in.ca, in.memes, cfg);
    std::cerr << corpus.memes.size() << " memes kept, " << corpus.filtered_out << " not new, " << corpus.too_short
              << " shorter than n=" << cfg.n << '\n';
    return corpus;
}

int run_simulate(const SimOptions& opt) {
    auto net_spec = opt.net;
    net_spec.seed = derive_seed(opt.seed, "network");
    auto cascade_spec = opt.cascades;
    cascade_spec.seed = derive_seed(opt.seed, "cascades");
    net_spec.validate();
    cascade_spec.validate();

    const auto synth = generate_network(net_spec);
    const auto memes = generate_cascades(synth.network, synth.truth, cascade_spec);

    auto edges = open_output(opt.edges_out);
    write_edge_list(synth.network, edges);
    finish(edges, opt.edges_out);
    auto comms = open_output(opt.communities_out);
    write_assignments(synth.truth, synth.network, comms);
    finish(comms, opt.communities_out);
    auto events = open_output(opt.events_out);
    write_events(memes, events);
    finish(events, opt.events_out);
    std::cerr << synth.network.node_count() << " nodes, " << synth.network.edge_count() << " edges, "
              << memes.size() << " memes\n";
    return 0;
}

int run_detect(const Paths& paths, const RunConfig& cfg) {
    const auto net = load_network_file(paths.edges);
    const auto ca = detect_label_propagation(net, derive_seed(cfg.seed, "communities"), cfg.lp_max_sweeps,
                                             cfg.min_community_size, cfg.lp_tie_break);
    auto out = open_output(paths.out);
    write_assignments(ca, net, out);
    finish(out, paths.out);
    std::cerr << ca.community_count() << " communities, coverage " << ca.coverage() << '\n';
    return 0;
}

int run_features(const Paths& paths, const RunConfig& cfg) {
    const auto corpus = load_corpus(paths, cfg);
    auto out = open_output(paths.out);
    write_feature_csv(corpus, out);
    finish(out, paths.out);
    return 0;
}

std::string file_safe(std::string name) {
    for (auto& c : name) {
        if (c == '-' || c == ' ') c = '_';
    }
    return name;
}

int run_evaluate(const Paths& paths, const RunConfig& cfg) {
    const auto corpus = load_corpus(paths, cfg);
    const auto models = paths.models.empty() ? all_model_names() : paths.models;
    const auto folds = corpus_folds(corpus, cfg);
    std::fprintf(stderr, "fold hash %016llx\n", static_cast<unsigned long long>(fold_hash(folds)));

    const auto results = evaluate_models(corpus, cfg, models);
    std::filesystem::create_directories(paths.out);
    const std::filesystem::path dir(paths.out);
    for (const auto& r : results) {
        if (r.cv.hash != fold_hash(folds)) throw std::logic_error("model " + r.name + " used different folds");
        const auto report_path = (dir / ("report_" + file_safe(r.name) + ".csv")).string();
        auto report = open_output(report_path);
        write_report_csv(r.cv.report, report);
        finish(report, report_path);
        const auto confusion_path = (dir / ("confusion_" + file_safe(r.name) + ".csv")).string();
        auto confusion = open_output(confusion_path);
        write_confusion_csv(r.cv.report, confusion);
        finish(confusion, confusion_path);
        for (const auto& note : r.cv.report.notes) std::cerr << r.name << ": " << note << '\n';
    }
    const auto comparison_path = (dir / "comparison.csv").string();
    auto comparison = open_output(comparison_path);
    write_comparison_csv(results, comparison);
    finish(comparison, comparison_path);
    print_comparison_table(results, std::cout);
    return 0;
}

int run_train(const Paths& paths, const RunConfig& cfg) {
    const auto corpus = load_corpus(paths, cfg);
    const auto model = train_corpus_model(corpus, cfg, subset_by_name(paths.subset));
    model.save(paths.model);
    return 0;
}

int run_predict(const Paths& paths, RunConfig cfg) {
    const auto model = RandomForest::load(paths.model);
    const auto meta = [&](const std::string& key) {
        auto it = model.metadata.find(key);
        if (it == model.metadata.end()) throw std::runtime_error("model lacks '" + key + "' metadata");
        return it->second;
    };
    cfg.n = std::stoul(meta("n"));
    cfg.unreachable = meta("unreachable") == "exclude" ? UnreachablePolicy::exclude : UnreachablePolicy::constant;
    const auto subset = subset_by_name(meta("subset"));

    auto in = load_inputs(paths, cfg, true);
    const auto net = with_event_users(in.net, in.memes);
    const auto ca = in.ca.padded(net.node_count());
    bool found = paths.meme.empty();
    std::cout << "meme_id,class\n";
    FeatureWorkspace ws;
    for (const auto& m : in.memes) {
        if (!paths.meme.empty() && m.id != paths.meme) continue;
        found = true;
        if (m.tweet_count() < cfg.n) {
            if (!paths.meme.empty()) {
                throw InsufficientEvents("meme '" + m.id + "' has " + std::to_string(m.tweet_count()) +
                                         " events, model needs " + std::to_string(cfg.n));
            }
            continue;
        }
        const auto fv = extract_all(early_window(m, cfg.n, net), net, ca, FeatureConfig{cfg.unreachable}, ws);
        const auto all = fv.to_array();
        std::vector<double> x;
        for (auto c : subset.columns) x.push_back(all[c]);
        std::cout << m.id << ',' << model.predict(x) << '\n';
    }
    if (!found) throw std::runtime_error("meme '" + paths.meme + "' not in event log");
    return 0;
}

// key=value lines (blank and '#' lines ignored) turned into "--key=value"
// arguments placed before the real flags, so the command line wins.
std::vector<std::string> config_arguments(const std::string& path, const CLI::App* cmd) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected key=value in '" + path + "'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        for (auto& c : key) {
            if (c == '_') c = '-';
        }
        // Shared config files may carry keys meant for other subcommands.
        if (cmd->get_option_no_throw("--" + key) == nullptr) continue;
        out.push_back("--" + key + "=" + value);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meme popularity prediction from early adoption cascades"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;
    app.add_option("--config", config_path, "key=value file supplying flags; flags override it");

    RunConfig cfg;
    Paths paths;
    SimOptions sim;

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic network, communities and event log");
    simulate->add_option("--communities", sim.net.communities);
    simulate->add_option("--community-size", sim.net.community_size);
    simulate->add_option("--p-in", sim.net.p_in);
    simulate->add_option("--p-out", sim.net.p_out);
    simulate->add_option("--memes", sim.cascades.meme_count);
    simulate->add_option("--seed-adopters", sim.cascades.seed_adopters);
    simulate->add_option("--trap-bias-min", sim.cascades.trap_bias_min);
    simulate->add_option("--trap-bias-max", sim.cascades.trap_bias_max);
    simulate->add_option("--trap-bias-jitter", sim.cascades.trap_bias_jitter);
    simulate->add_option("--adopt-prob-min", sim.cascades.adopt_prob_min);
    simulate->add_option("--adopt-prob-max", sim.cascades.adopt_prob_max);
    simulate->add_option("--reinforcement", sim.cascades.reinforcement);
    simulate->add_option("--retweet-prob", sim.cascades.retweet_prob);
    simulate->add_option("--mention-prob", sim.cascades.mention_prob);
    simulate->add_option("--repeat-prob", sim.cascades.repeat_prob);
    simulate->add_option("--exposure-budget", sim.cascades.exposure_budget);
    simulate->add_option("--gap", sim.cascades.mean_inter_event_gap, "mean seconds between events");
    simulate->add_option("--max-events", sim.cascades.max_events);
    simulate->add_option("--start-time", sim.cascades.start_time);
    simulate->add_option("--start-spread", sim.cascades.start_spread);
    simulate->add_option("--seed", sim.seed, "root seed");
    simulate->add_option("--edges-out", sim.edges_out);
    simulate->add_option("--communities-out", sim.communities_out);
    simulate->add_option("--events-out", sim.events_out);

    auto* detect = app.add_subcommand("detect", "label propagation communities for an edge list");
    detect->add_option("--edges", paths.edges)->required();
    detect->add_option("--out", paths.out)->required();
    detect->add_option("--seed", cfg.seed);
    detect->add_option("--lp-max-sweeps", cfg.lp_max_sweeps);
    detect->add_option("--lp-tie-break", cfg.lp_tie_break, "label propagation ties: random|lowest")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, TieBreak>{{"random", TieBreak::random}, {"lowest", TieBreak::lowest}}));
    detect->add_option("--min-community-size", cfg.min_community_size);

    auto* features = app.add_subcommand("features", "write the f1..f13 feature table");
    add_inputs(features, paths, true);
    add_run_options(features, cfg);
    features->add_option("--out", paths.out)->required();

    auto* evaluate = app.add_subcommand("evaluate", "cross-validate the forest, its ablations and the baselines");
    add_inputs(evaluate, paths, true);
    add_run_options(evaluate, cfg);
    evaluate->add_option("--out-dir", paths.out)->required();
    evaluate->add_option("--models", paths.models, "subset of Pn, Pn-basic, ..., B5")->delimiter(',');

    auto* train = app.add_subcommand("train", "fit a forest on the whole corpus and save it");
    add_inputs(train, paths, true);
    add_run_options(train, cfg);
    train->add_option("--subset", paths.subset, "full|basic|distance|community|timing");
    train->add_option("--model-out", paths.model)->required();

    auto* predict = app.add_subcommand("predict", "classify memes with a saved forest");
    add_inputs(predict, paths, true);
    predict->add_option("--model", paths.model)->required();
    predict->add_option("--meme", paths.meme, "only this meme");
    predict->add_option("--min-community-size", cfg.min_community_size);
    predict->add_option("--seed", cfg.seed);

    try {
        // Locate the subcommand and config file first, then reparse with
        // file-supplied flags in front of the command-line ones.
        std::vector<std::string> args(argv + 1, argv + argc);
        std::string config;
        CLI::App* cmd = nullptr;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
            else if (!cmd && args[i].rfind("-", 0) != 0) cmd = app.get_subcommand_no_throw(args[i]);
        }
        if (!config.empty() && cmd) {
            auto extra = config_arguments(config, cmd);
            auto pos = std::find(args.begin(), args.end(), cmd->get_name());
            args.insert(pos + 1, extra.begin(), extra.end());
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*simulate) return run_simulate(sim);
        if (*detect) return run_detect(paths, cfg);
        if (*features) return run_features(paths, cfg);
        if (*evaluate) return run_evaluate(paths, cfg);
        if (*train) return run_train(paths, cfg);
        if (*predict) return run_predict(paths, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
