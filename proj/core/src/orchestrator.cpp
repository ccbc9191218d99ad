#include "srp/orchestrator.hpp"

#include <algorithm>
#include <set>

#include "srp/error.hpp"
#include "srp/eval.hpp"
#include "text_util.hpp"

namespace srp {

namespace {

constexpr std::pair<std::string_view, bool Ablations::*> kAblationFlags[] = {
    {"no-relation-check", &Ablations::no_relation_check},
    {"no-reflection", &Ablations::no_reflection},
    {"no-reference", &Ablations::no_reference},
    {"random-reference", &Ablations::random_reference},
};

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

Ablations parse_ablations(std::string_view flags) {
    Ablations out;
    for (auto part : detail::split(flags, ",")) {
        auto flag = detail::trim(part);
        if (flag.empty()) continue;
        auto it = std::find_if(std::begin(kAblationFlags), std::end(kAblationFlags),
                               [&](const auto& entry) { return entry.first == flag; });
        if (it == std::end(kAblationFlags)) {
            throw ArgumentError("unknown ablation flag: " + std::string(flag));
        }
        out.*(it->second) = true;
    }
    if (out.no_reference && out.random_reference) {
        throw ArgumentError("no-reference and random-reference are mutually exclusive");
    }
    return out;
}

std::string format_ablations(const Ablations& ablations) {
    std::vector<std::string> on;
    for (const auto& [name, member] : kAblationFlags) {
        if (ablations.*member) on.emplace_back(name);
    }
    return detail::join(on, ",");
}

void validate(const SrpConfig& config) {
    if (config.k_references == 0 || config.relation_check_k == 0 || config.top_n_similar == 0 ||
        config.fanout_cap == 0 || config.candidate_cap == 0) {
        throw ArgumentError("SRP counts must all be at least 1");
    }
    if (config.lexical_weight < 0.0 || config.lexical_weight > 1.0) {
        throw ArgumentError("lexical_weight must lie in [0, 1]");
    }
    if (config.ablations.no_reference && config.ablations.random_reference) {
        throw ArgumentError("no-reference and random-reference are mutually exclusive");
    }
}

std::string_view terminal_name(TerminalState state) {
    switch (state) {
        case TerminalState::answered: return "answered";
        case TerminalState::budget_exhausted: return "budget_exhausted";
        case TerminalState::planning_failed: return "planning_failed";
        case TerminalState::failed: return "failed";
    }
    return "failed";
}

TerminalState parse_terminal(std::string_view name) {
    for (auto s : {TerminalState::answered, TerminalState::budget_exhausted,
                   TerminalState::planning_failed, TerminalState::failed}) {
        if (terminal_name(s) == name) return s;
    }
    throw ParseError("unknown terminal state: " + std::string(name));
}

std::vector<Triple> RunTrace::retrieved_triples() const {
    std::vector<Triple> out;
    std::set<Triple> seen;
    for (const auto& iteration : iterations) {
        for (const auto& attempt : iteration.attempts) {
            for (const auto& seq : attempt.instantiation.sequences) {
                for (const auto& t : seq.triples) {
                    if (seen.insert(t).second) out.push_back(t);
                }
            }
        }
    }
    return out;
}

namespace {

std::vector<Reference> choose_references(const Question& question, const SrpConfig& config,
                                         const SrpDeps& deps, std::string& mode) {
    if (deps.base == nullptr || config.ablations.no_reference) {
        mode = "none";
        return {};
    }
    if (config.ablations.random_reference) {
        mode = "random";
        return sample_references(*deps.base, config.k_references,
                                 config.seed ^ fnv1a(question.id + '\n' + question.text));
    }
    mode = "searched";
    return query_references(*deps.base, question.text, config.k_references, deps.provider);
}

PathPlan plan_paths(const Question& question, const SrpConfig& config, const SrpDeps& deps,
                    std::span<const Reference> references, const Prompter& prompter,
                    const std::string& call_id, RunTrace& trace) {
    if (question.topic_entities.empty()) throw PlanningError("question has no topic entity");
    InitialRelations initial;
    for (const auto& entity : question.topic_entities) {
        RelationCheckRecord record{entity.id, 0, false, {}, {}};
        const auto candidates = deps.kg.one_hop_relations(entity.id);
        record.candidate_count = candidates.size();
        if (candidates.empty()) {
            record.error = "entity has no outgoing relations";
        } else {
            auto ranked =
                rank_candidates(candidates, question.text, deps.provider, config.candidate_cap);
            if (config.ablations.no_relation_check) {
                for (auto& r : ranked) record.relations.push_back({std::move(r), 0.0});
            } else {
                record.checked_by_llm = true;
                try {
                    record.relations = relation_check(question, entity, ranked, references,
                                                      prompter, call_id, config.relation_check_k);
                    if (record.relations.empty()) {
                        record.error = "no candidate relation survived the check";
                    }
                } catch (const PlanningError& e) {
                    record.error = e.what();
                }
            }
        }
        if (!record.relations.empty()) initial[entity.id] = record.relations;
        trace.relation_checks.push_back(std::move(record));
    }
    if (initial.empty()) throw PlanningError("no topic entity has usable initial relations");
    return generate_paths(question, initial, prompter, call_id);
}

}  // namespace

RunTrace answer_question(const Question& input, const SrpConfig& config, const SrpDeps& deps) {
    validate(config);
    const KnowledgeGraph& kg = deps.kg;

    Question question = input;
    for (auto& entity : question.topic_entities) {
        if (entity.label.empty()) {
            if (auto label = kg.label(entity.id)) entity.label = *label;
        }
    }

    RunTrace trace;
    trace.question = question;
    const std::string call_id = question.id.empty() ? question.text : question.id;
    const Prompter prompter(deps.gateway, deps.demos, &trace.prompts);
    const EntityDisplay display = [&kg](const EntityId& id) { return kg.display(id); };

    auto finish = [&](std::vector<TripletSequence> pruned, TerminalState state) {
        trace.answer = answer(question, pruned, prompter, display, call_id);
        trace.answer_sequences = std::move(pruned);
        trace.terminal_state = state;
        for (const auto& t : trace.retrieved_triples()) {
            for (const auto& e : {t.head, t.tail}) {
                if (auto label = kg.label(e)) trace.entity_labels[e] = *label;
            }
        }
        if (!question.gold_answers.empty()) {
            trace.searching_success = searching_success(trace, question.gold_answers);
        }
        return trace;
    };

    trace.references = choose_references(question, config, deps, trace.reference_mode);

    PathPlan plan;
    try {
        plan = plan_paths(question, config, deps, trace.references, prompter, call_id, trace);
    } catch (const PlanningError& e) {
        trace.error = e.what();
        return finish({}, TerminalState::planning_failed);
    } catch (const GatewayError& e) {
        trace.error = e.what();
        return finish({}, TerminalState::planning_failed);
    }

    std::vector<std::size_t> active;
    for (const auto& entity : question.topic_entities) {
        auto it = plan.find(entity.id);
        if (it == plan.end()) continue;
        for (const auto& planned : it->second) {
            active.push_back(trace.path_versions.size());
            trace.path_versions.push_back(
                {trace.path_versions.size(), std::nullopt, planned.path, planned.off_plan});
        }
    }

    const RetrievalOptions options{config.top_n_similar, config.fanout_cap, config.lexical_weight};
    const std::size_t budget =
        config.ablations.no_reflection ? std::min<std::size_t>(1, config.max_reflections)
                                       : config.max_reflections;
    std::vector<TripletSequence> retained;

    for (std::size_t round = 0; round < budget && !active.empty(); ++round) {
        IterationRecord record;
        record.index = round;

        // Pool sequences across paths; owners[i] lists the attempts that produced pooled[i].
        std::vector<TripletSequence> pooled;
        std::vector<std::vector<std::size_t>> owners;
        for (auto version : active) {
            record.attempts.push_back(
                {version, instantiate_path(trace.path_versions[version].path, kg, deps.index,
                                           options)});
            const std::size_t attempt = record.attempts.size() - 1;
            for (const auto& seq : record.attempts.back().instantiation.sequences) {
                auto at = std::find(pooled.begin(), pooled.end(), seq);
                if (at == pooled.end()) {
                    pooled.push_back(seq);
                    owners.push_back({attempt});
                } else {
                    owners[static_cast<std::size_t>(at - pooled.begin())].push_back(attempt);
                }
            }
        }

        Judgement judgement;
        if (!pooled.empty()) {
            record.judge_called = true;
            ++trace.judge_calls;
            try {
                judgement = judge(question, pooled, trace.references, prompter, display, call_id);
            } catch (const Error& e) {
                record.judge_error = e.what();
                judgement = Judgement{Verdict::no_answer, pooled, {}, false};
            }
        }
        if (judgement.verdict == Verdict::have_answer &&
            std::all_of(judgement.pruned.begin(), judgement.pruned.end(),
                        [](const TripletSequence& s) { return s.empty(); })) {
            record.contradiction = true;
            judgement.verdict = Verdict::no_answer;
        }
        retained.clear();
        for (const auto& seq : judgement.pruned) {
            if (!seq.empty()) retained.push_back(seq);
        }
        record.judgement = judgement;

        if (judgement.verdict == Verdict::have_answer) {
            trace.iterations.push_back(std::move(record));
            return finish(std::move(retained), TerminalState::answered);
        }

        // No edit after the last judgement the budget allows: it could never be judged.
        if (round + 1 < budget) {
            std::vector<std::size_t> next;
            for (std::size_t a = 0; a < record.attempts.size(); ++a) {
                const auto& attempt = record.attempts[a];
                EditFeedback feedback{judgement.judge_message, true, {}};
                for (std::size_t i = 0; i < pooled.size() && i < judgement.pruned.size(); ++i) {
                    if (std::find(owners[i].begin(), owners[i].end(), a) != owners[i].end()) {
                        feedback.pruned.push_back(judgement.pruned[i]);
                    }
                }
                const auto& from = trace.path_versions[attempt.version];
                try {
                    auto edited = edit_path(question, from.path, attempt.instantiation, feedback,
                                            trace.references, prompter, kg, call_id);
                    const std::size_t id = trace.path_versions.size();
                    trace.path_versions.push_back({id, attempt.version, std::move(edited), false});
                    record.edits.push_back({attempt.version, id, {}});
                    next.push_back(id);
                    ++trace.edits;
                } catch (const Error& e) {
                    record.edits.push_back({attempt.version, std::nullopt, e.what()});
                }
            }
            active = std::move(next);
        }
        trace.iterations.push_back(std::move(record));
    }
    return finish(std::move(retained), TerminalState::budget_exhausted);
}

}  // namespace srp
