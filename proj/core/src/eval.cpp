#include "srp/eval.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "text_util.hpp"

namespace srp {

std::string normalize_answer(std::string_view text) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCCasefoldInstance(status);
    if (U_FAILURE(status)) throw Error("ICU normalizer unavailable");
    auto source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
    icu::UnicodeString folded = nfkc->normalize(source, status);
    if (U_FAILURE(status)) throw Error("ICU normalization failed");

    std::vector<std::string> words;
    icu::UnicodeString word;
    auto flush = [&] {
        if (word.isEmpty()) return;
        std::string utf8;
        word.toUTF8String(utf8);
        if (utf8 != "a" && utf8 != "an" && utf8 != "the") words.push_back(std::move(utf8));
        word.remove();
    };
    for (std::int32_t i = 0; i < folded.length();) {
        const UChar32 c = folded.char32At(i);
        i += U16_LENGTH(c);
        if (u_isUWhiteSpace(c)) {
            flush();
        } else if (!u_ispunct(c)) {
            word.append(c);
        }
    }
    flush();
    return detail::join(words, " ");
}

namespace {

std::set<std::string> normalized_gold(std::span<const std::string> gold) {
    std::set<std::string> out;
    for (const auto& g : gold) {
        auto n = normalize_answer(g);
        if (!n.empty()) out.insert(std::move(n));
    }
    return out;
}

// Normalized id and label of every entity in the triples.
std::set<std::string> entity_names(const RunTrace& trace, std::span<const Triple> triples) {
    std::set<std::string> out;
    for (const auto& t : triples) {
        for (const auto* e : {&t.head, &t.tail}) {
            out.insert(normalize_answer(e->str()));
            if (auto it = trace.entity_labels.find(*e); it != trace.entity_labels.end()) {
                out.insert(normalize_answer(it->second));
            }
        }
    }
    return out;
}

}  // namespace

bool hits_at_1(const Answer& predicted, std::span<const std::string> gold) {
    if (predicted.values.empty()) return false;
    const auto first = normalize_answer(predicted.values.front());
    return !first.empty() && normalized_gold(gold).contains(first);
}

bool searching_success(const RunTrace& trace, std::span<const std::string> gold) {
    const auto wanted = normalized_gold(gold);
    const auto triples = trace.retrieved_triples();
    const auto names = entity_names(trace, triples);
    return std::any_of(wanted.begin(), wanted.end(),
                       [&](const std::string& g) { return names.contains(g); });
}

bool reliable_answering(const RunTrace& trace, std::span<const std::string> gold) {
    if (!hits_at_1(trace.answer, gold) || !trace.answer.grounded) return false;
    std::vector<Triple> used;
    for (const auto& seq : trace.answer_sequences) {
        used.insert(used.end(), seq.triples.begin(), seq.triples.end());
    }
    return entity_names(trace, used).contains(normalize_answer(trace.answer.values.front()));
}

Dataset parse_dataset(std::string_view jsonl, std::string name) {
    Dataset dataset{std::move(name), {}};
    std::size_t line_no = 0;
    for (auto line : detail::split_lines(jsonl)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        Question q;
        try {
            q = parse_json(line, line_no).get<Question>();
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad dataset record: ") + e.what(), std::string(line),
                             line_no);
        }
        if (q.text.empty()) throw ParseError("question text is empty", std::string(line), line_no);
        if (q.topic_entities.empty()) {
            throw ParseError("question has no topic entity", std::string(line), line_no);
        }
        if (q.gold_answers.empty()) {
            throw ParseError("question has no gold answer", std::string(line), line_no);
        }
        if (q.id.empty()) q.id = std::to_string(line_no);
        dataset.questions.push_back(std::move(q));
    }
    return dataset;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open dataset: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_dataset(buffer.str(), std::filesystem::path(path).stem().string());
}

namespace {

struct Tally {
    std::size_t n = 0, correct = 0, grounded_correct = 0, search_hit = 0;

    void add(bool correct_, bool reliable, bool search) {
        ++n;
        correct += correct_;
        grounded_correct += reliable;
        search_hit += search;
    }

    MetricBlock block() const {
        MetricBlock b{n, correct, grounded_correct, search_hit, 0.0, 0.0, 0.0, correct == 0};
        if (n > 0) {
            b.hits_at_1 = static_cast<double>(correct) / static_cast<double>(n);
            b.searching_success_rate = static_cast<double>(search_hit) / static_cast<double>(n);
        }
        if (correct > 0) {
            b.reliable_answering_rate =
                static_cast<double>(grounded_correct) / static_cast<double>(correct);
        }
        return b;
    }
};

json block_json(const MetricBlock& b) {
    return {{"n", b.n},
            {"correct", b.correct},
            {"grounded_correct", b.grounded_correct},
            {"search_hit", b.search_hit},
            {"hits_at_1", b.hits_at_1},
            {"searching_success_rate", b.searching_success_rate},
            {"reliable_answering_rate", b.reliable_answering_rate},
            {"reliable_undefined", b.reliable_undefined}};
}

}  // namespace

MetricsReport evaluate(const Dataset& dataset, std::span<const RunTrace> traces) {
    if (traces.size() != dataset.questions.size()) {
        throw ArgumentError("expected one trace per question, got " +
                            std::to_string(traces.size()) + " for " +
                            std::to_string(dataset.questions.size()));
    }
    std::map<std::string, const RunTrace*> by_id;
    for (const auto& t : traces) {
        if (!by_id.emplace(t.question.id, &t).second) {
            throw ArgumentError("duplicate trace for question " + t.question.id);
        }
    }
    MetricsReport report;
    Tally overall;
    std::map<std::string, Tally> levels;
    for (const auto& q : dataset.questions) {
        auto it = by_id.find(q.id);
        if (it == by_id.end()) throw ArgumentError("no trace for question " + q.id);
        const RunTrace& trace = *it->second;
        const bool correct = hits_at_1(trace.answer, q.gold_answers);
        const bool reliable = reliable_answering(trace, q.gold_answers);
        const bool search = searching_success(trace, q.gold_answers);
        overall.add(correct, reliable, search);
        if (!q.level.empty()) levels[q.level].add(correct, reliable, search);
        if (trace.terminal_state == TerminalState::failed) ++report.failures;
    }
    report.overall = overall.block();
    for (const auto& [level, tally] : levels) report.by_level[level] = tally.block();
    return report;
}

std::string report_to_json(const MetricsReport& report, const std::string& dataset_name,
                           const std::string& ablations) {
    json levels = json::object();
    for (const auto& [level, block] : report.by_level) levels[level] = block_json(block);
    json doc = {{"schema", kReportSchema},
                {"dataset", dataset_name},
                {"ablations", ablations},
                {"failures", report.failures},
                {"overall", block_json(report.overall)},
                {"by_level", levels}};
    return doc.dump(2) + "\n";
}

}  // namespace srp
