#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "srp/config.hpp"
#include "srp/error.hpp"
#include "srp/eval.hpp"
#include "srp/orchestrator.hpp"
#include "srp/reference_base.hpp"
#include "srp/sparql.hpp"

namespace srp::cli {

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write " + path);
    out << content;
    if (!out) throw ArgumentError("failed writing " + path);
}

std::vector<TopicEntity> parse_topics(const std::string& list) {
    std::vector<TopicEntity> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(' ');
        auto e = item.find_last_not_of(' ');
        if (b == std::string::npos) continue;
        out.push_back({EntityId(item.substr(b, e - b + 1)), {}});
    }
    if (out.empty()) throw ArgumentError("--topic needs at least one entity id");
    return out;
}

std::string join_values(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += "; ";
        out += values[i];
    }
    return out;
}

struct BuildRefsArgs {
    std::string cases, out, config;
    std::size_t size = 100, clusters = 10;
    std::uint64_t seed = 0;
};

int build_refs(const BuildRefsArgs& a, std::ostream& out) {
    const auto cases = load_reference_cases_file(a.cases);
    std::unique_ptr<EmbeddingProvider> provider;
    if (a.config.empty()) {
        provider = std::make_unique<HashingEmbedder>();
    } else {
        provider = provider_from(ConfigFile::load(a.config));
    }
    const auto base = build_reference_base(cases, {a.size, a.clusters, a.seed}, *provider);
    save_reference_base(base, a.out);

    std::vector<std::size_t> per_cluster(a.clusters, 0);
    for (auto c : base.clusters) ++per_cluster[c];
    out << "reference base: " << base.size() << " of " << cases.size() << " cases, "
        << a.clusters << " clusters\n";
    for (std::size_t c = 0; c < per_cluster.size(); ++c) {
        out << "  cluster " << c << ": " << per_cluster[c] << "\n";
    }
    return kOk;
}

int index_relations(const std::string& config_path, const std::string& out_path,
                    std::ostream& out) {
    const auto config = ConfigFile::load(config_path);
    const auto kg = knowledge_graph_from(config);
    std::vector<RelationId> vocabulary;
    if (auto* store = dynamic_cast<const TripleStore*>(kg.get())) {
        vocabulary = store->relation_vocabulary();
    } else if (auto* client = dynamic_cast<const SparqlClient*>(kg.get())) {
        vocabulary = client->relation_vocabulary();
    }
    std::string text;
    for (const auto& r : vocabulary) text += r.str() + "\n";
    write_file(out_path, text);
    out << "wrote " << vocabulary.size() << " relations to " << out_path << "\n";
    return kOk;
}

struct AnswerArgs {
    std::string question, topic, config, trace, id = "q";
};

int answer_cmd(const AnswerArgs& a, std::ostream& out) {
    auto runtime = build_runtime(ConfigFile::load(a.config));
    Question q{a.id, a.question, parse_topics(a.topic), {}, {}};
    const auto trace = answer_question(q, runtime.srp, runtime.deps());
    if (!a.trace.empty()) write_file(a.trace, trace_to_json(trace) + "\n");

    out << "answer: " << join_values(trace.answer.values) << "\n";
    out << "grounded: " << (trace.answer.grounded ? "true" : "false") << "\n";
    out << "terminal: " << terminal_name(trace.terminal_state) << "\n";
    if (!trace.error.empty()) out << "error: " << trace.error << "\n";
    return trace.terminal_state == TerminalState::planning_failed ? kPipelineFailure : kOk;
}

struct EvalArgs {
    std::string dataset, config, out, traces, ablate;
    std::size_t workers = 4;
    std::optional<std::uint64_t> seed;
    bool ablate_set = false;
};

int eval_cmd(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    auto config = ConfigFile::load(a.config);
    if (a.ablate_set) config.set("srp.ablate", a.ablate);
    if (a.seed) config.set("srp.seed", std::to_string(*a.seed));
    auto runtime = build_runtime(config);
    const auto dataset = load_dataset(a.dataset);
    const auto deps = runtime.deps();

    std::vector<RunTrace> traces(dataset.questions.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < dataset.questions.size(); i = next++) {
            const auto& q = dataset.questions[i];
            try {
                traces[i] = answer_question(q, runtime.srp, deps);
            } catch (const std::exception& e) {
                RunTrace failed;
                failed.question = q;
                failed.terminal_state = TerminalState::failed;
                failed.error = e.what();
                failed.answer.values = {""};
                traces[i] = std::move(failed);
                std::lock_guard lock(err_mutex);
                err << "question " << q.id << " failed: " << e.what() << "\n";
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto n = std::max<std::size_t>(1, std::min(a.workers, dataset.questions.size()));
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    }

    const auto report = evaluate(dataset, traces);
    write_file(a.out, report_to_json(report, dataset.name, format_ablations(runtime.srp.ablations)));

    if (!a.traces.empty()) {
        std::vector<const RunTrace*> ordered;
        for (const auto& t : traces) ordered.push_back(&t);
        std::sort(ordered.begin(), ordered.end(), [](const RunTrace* x, const RunTrace* y) {
            return x->question.id < y->question.id;
        });
        std::string text;
        for (const auto* t : ordered) text += trace_to_json(*t) + "\n";
        write_file(a.traces, text);
    }

    out << "questions: " << report.overall.n << "\n";
    out << "hits@1: " << report.overall.hits_at_1 << "\n";
    out << "searching success rate: " << report.overall.searching_success_rate << "\n";
    out << "reliable answering rate: " << report.overall.reliable_answering_rate
        << (report.overall.reliable_undefined ? " (no correct answers)" : "") << "\n";
    if (report.failures) out << "failures: " << report.failures << "\n";
    return kOk;
}

void print_trace(const RunTrace& t, std::ostream& out) {
    out << "question " << t.question.id << ": " << t.question.text << "\n";
    out << "  references (" << t.reference_mode << "): " << t.references.size() << "\n";
    for (const auto& rc : t.relation_checks) {
        out << "  relation check " << rc.entity.str() << ":";
        for (const auto& s : rc.relations) out << " " << s.relation.str() << "=" << s.score;
        if (!rc.error.empty()) out << " [" << rc.error << "]";
        out << "\n";
    }
    for (const auto& v : t.path_versions) {
        out << "  path v" << v.id;
        if (v.parent) out << " (from v" << *v.parent << ")";
        out << ": " << to_arrow(v.path) << (v.off_plan ? " [off-plan]" : "") << "\n";
    }
    for (const auto& it : t.iterations) {
        out << "  iteration " << it.index << ":\n";
        for (const auto& a : it.attempts) {
            out << "    v" << a.version << " " << status_name(a.instantiation.status) << ", "
                << a.instantiation.sequences.size() << " sequences";
            for (const auto& m : a.instantiation.error_messages) out << "; " << m;
            out << "\n";
        }
        if (it.judge_called) {
            out << "    judgement: " << verdict_name(it.judgement.verdict)
                << (it.contradiction ? " (contradiction)" : "")
                << (it.judge_error.empty() ? "" : " (error: " + it.judge_error + ")") << "\n";
        }
        for (const auto& e : it.edits) {
            out << "    edit v" << e.from_version << " -> "
                << (e.to_version ? "v" + std::to_string(*e.to_version) : "retired: " + e.error)
                << "\n";
        }
    }
    out << "  answer: " << join_values(t.answer.values)
        << (t.answer.grounded ? " (grounded)" : " (ungrounded)") << "\n";
    out << "  terminal: " << terminal_name(t.terminal_state) << "\n";
    if (t.searching_success) {
        out << "  searching success: " << (*t.searching_success ? "true" : "false") << "\n";
    }
}

int show_trace(const std::string& path, std::ostream& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open trace file: " + path);
    std::string line;
    std::size_t shown = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        print_trace(trace_from_json(line), out);
        ++shown;
    }
    if (shown == 0) throw ParseError("trace file is empty", path);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Self-reflective planning for knowledge graph question answering", "srp"};
    app.require_subcommand(1);

    BuildRefsArgs refs;
    auto* build = app.add_subcommand("build-refs", "Cluster solved cases into a reference base");
    build->add_option("--cases", refs.cases, "Reference cases (JSON Lines)")->required();
    build->add_option("--out", refs.out, "Output reference base file")->required();
    build->add_option("--size", refs.size, "Reference base size")->capture_default_str();
    build->add_option("--clusters", refs.clusters, "Number of clusters")->capture_default_str();
    build->add_option("--seed", refs.seed, "Random seed")->capture_default_str();
    build->add_option("--config", refs.config, "Config file selecting the embedding provider");

    std::string index_config, index_out;
    auto* index = app.add_subcommand("index-relations", "Write the graph's relation vocabulary");
    index->add_option("--config", index_config, "Config file")->required();
    index->add_option("--out", index_out, "Output vocabulary file")->required();

    AnswerArgs ans;
    auto* answer = app.add_subcommand("answer", "Answer one question");
    answer->add_option("--question", ans.question, "Question text")->required();
    answer->add_option("--topic", ans.topic, "Topic entity ids, comma separated")->required();
    answer->add_option("--config", ans.config, "Config file")->required();
    answer->add_option("--trace", ans.trace, "Write the run trace (JSON) here");
    answer->add_option("--id", ans.id, "Question id")->capture_default_str();

    EvalArgs ev;
    std::uint64_t seed = 0;
    auto* eval = app.add_subcommand("eval", "Run a dataset and write metrics");
    eval->add_option("--dataset", ev.dataset, "Dataset (JSON Lines)")->required();
    eval->add_option("--config", ev.config, "Config file")->required();
    eval->add_option("--out", ev.out, "Metrics report (JSON)")->required();
    eval->add_option("--traces", ev.traces, "Per-question traces (JSON Lines)");
    auto* ablate_opt = eval->add_option(
        "--ablate", ev.ablate,
        "Comma separated: no-relation-check,no-reflection,no-reference,random-reference");
    eval->add_option("--workers", ev.workers, "Concurrent questions")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    auto* seed_opt = eval->add_option("--seed", seed, "Seed for every random choice");

    std::string trace_path;
    auto* show = app.add_subcommand("show-trace", "Print traces in readable form");
    show->add_option("--trace", trace_path, "Trace file (JSON Lines)")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "srp: " << e.what() << "\n";
        if (!e.get_name().empty() && e.get_name() != "RequiredError") err << app.help();
        return kUsage;
    }

    try {
        if (*build) return build_refs(refs, out);
        if (*index) return index_relations(index_config, index_out, out);
        if (*answer) return answer_cmd(ans, out);
        if (*eval) {
            ev.ablate_set = ablate_opt->count() > 0;
            if (seed_opt->count() > 0) ev.seed = seed;
            return eval_cmd(ev, out, err);
        }
        if (*show) return show_trace(trace_path, out);
    } catch (const ParseError& e) {
        err << "srp: " << e.what() << "\n";
        return kDataError;
    } catch (const ArgumentError& e) {
        err << "srp: " << e.what() << "\n";
        return kDataError;
    } catch (const ConfigError& e) {
        err << "srp: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        err << "srp: " << e.what() << "\n";
        return kPipelineFailure;
    }
    return kUsage;
}

}  // namespace srp::cli
