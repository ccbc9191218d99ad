#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srp/types.hpp"

namespace srp {

// ('relation', score) pairs in order of appearance, scores clamped to [0,1].
std::vector<ScoredRelation> parse_scored_relations(std::string_view text);

// The brace block after "Path:", keyed by the entity names the model used.
std::map<std::string, std::vector<ReasoningPath>> parse_generated_paths(std::string_view text);

enum class Verdict { have_answer, no_answer };

std::string_view verdict_name(Verdict verdict);

struct Judgement {
    Verdict verdict = Verdict::no_answer;
    std::vector<TripletSequence> pruned;  // one per judged sequence
    std::string judge_message;
    bool repaired = false;  // some retained sequence had to be cut back

    friend bool operator==(const Judgement&, const Judgement&) = default;
};

// Reads the verdict marker (last one wins) and the numbered "Retained
// sequences:" list. Each retained sequence is cut back to its longest common
// prefix with the original, so it is always a prefix of the original (empty
// allowed). Without a "Retained sequences:" section nothing is pruned.
Judgement parse_judgement(std::string_view text, std::span<const TripletSequence> original,
                          const EntityDisplay& display = identity_display);

// True when pruned is a contiguous run of original that starts at its first triple.
bool is_valid_pruning(const TripletSequence& pruned, const TripletSequence& original);

// The arrow path on (or after) the last "Final Path:" line.
ReasoningPath parse_edited_path(std::string_view text);

// Brace-enclosed spans; else whatever follows the last "the answer is";
// else the whole reply. Never empty.
std::vector<std::string> parse_answer(std::string_view text);

}  // namespace srp
