#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srp/orchestrator.hpp"
#include "srp/types.hpp"

namespace srp {

// NFKC case-folded, punctuation dropped, articles (a/an/the) removed,
// whitespace collapsed.
std::string normalize_answer(std::string_view text);

bool hits_at_1(const Answer& predicted, std::span<const std::string> gold);

// A gold answer names (by label or id) an entity of some retrieved triple.
bool searching_success(const RunTrace& trace, std::span<const std::string> gold);

// Correct, grounded, and the answer names an entity of the retained sequences used.
bool reliable_answering(const RunTrace& trace, std::span<const std::string> gold);

struct Dataset {
    std::string name;
    std::vector<Question> questions;
};

// JSON Lines: {id, question, topic_entities:[{id,label}], answers:[...], split, level?}
Dataset parse_dataset(std::string_view jsonl, std::string name = {});
Dataset load_dataset(const std::string& path);

struct MetricBlock {
    std::size_t n = 0;
    std::size_t correct = 0;
    std::size_t grounded_correct = 0;
    std::size_t search_hit = 0;
    double hits_at_1 = 0.0;
    double searching_success_rate = 0.0;
    double reliable_answering_rate = 0.0;
    bool reliable_undefined = false;  // no correct answers to condition on

    friend bool operator==(const MetricBlock&, const MetricBlock&) = default;
};

inline constexpr std::string_view kReportSchema = "srp.report/1";

struct MetricsReport {
    MetricBlock overall;
    std::map<std::string, MetricBlock> by_level;  // GrailQA levels when present
    std::size_t failures = 0;                     // questions whose run crashed

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// One trace per question, matched by question id.
MetricsReport evaluate(const Dataset& dataset, std::span<const RunTrace> traces);

std::string report_to_json(const MetricsReport& report, const std::string& dataset_name,
                           const std::string& ablations);

}  // namespace srp
