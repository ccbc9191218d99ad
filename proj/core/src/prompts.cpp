#include "srp/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "srp/error.hpp"
#include "text_util.hpp"

namespace srp {

namespace {

constexpr PromptFamily kFamilies[] = {PromptFamily::relation_check, PromptFamily::path_generation,
                                      PromptFamily::sequence_judge, PromptFamily::path_edit,
                                      PromptFamily::answering};

const char* const kRelationCheckDemo =
    R"(Question: Name the president of the country whose main spoken language was Brahui in 1980?
Topic Entity: Brahui Language
Candidate Relations: language.human_language.main_country; language.human_language.language_family; language.human_language.iso_639_3_code; base.rosetta.languoid.parent; language.human_language.writing_system; base.rosetta.languoid.languoid_class; language.human_language.countries_spoken_in; kg.object_profile.prominent_type; base.rosetta.languoid.document; base.ontologies.ontology_instance.equivalent_instances; base.rosetta.languoid.local_name; language.human_language.region
Answer:
1. ('language.human_language.main_country', 0.4): This relation is highly relevant as it directly relates to the country whose president is being asked for, and the main country where Brahui language is spoken in 1980.
2. ('language.human_language.countries_spoken_in', 0.3): This relation is also relevant as it provides information on the countries where Brahui language is spoken, which could help narrow down the search for the president.
3. ('base.rosetta.languoid.parent', 0.2): This relation is less relevant but still provides some context on the language family to which Brahui belongs, which could be useful in understanding the linguistic and cultural background of the country in question.)";

const char* const kPathGenerationDemo = R"(Question: who played princess leia in star wars movies?
Topic Entity: princess leia
Valuable Relations: {"princess leia": ['film.film_character.portrayed_in_films', 'tv.tv_character.appeared_in_tv_program', 'film.film_character.movie', 'movie.movie_character.movie']}
Thought: Firstly, the path should cover the movies portrying princess leia. Secondly, the path should cover the actors in that movie.
Path: {
    "princess leia":[
        "princess leia -> film.film_character.portrayed_in_films -> film.performance.actor",
        "princess leia -> movie.movie_character.movie -> film.actor.actor"
    ]
})";

const char* const kSequenceJudgeDemo = R"(Question: where is aviano air force base located?
Triplet sequences:
1. [("Aviano Air Base", "location.location.containedby", "Italy")]
2. [("Aviano Air Base", "aviation.airport.serves", "Aviano")]
Thinking Process: First, based on the triplet ("Aviano Air Base", "location.location.containedby", "Italy"), I can answer the question. So, I think these triplet sequences have enough information to answer the question. <HAVE_ANSWER>
Retained sequences:
1. [("Aviano Air Base", "location.location.containedby", "Italy")]
2. [])";

const char* const kPathEditDemo =
    R"(Question: What major religion in the UK has a place of worship named St. Mary's Cathedral, Batticaloa?
Initial Path: United Kingdom -> location.location.religions -> place.religion.major_religions
>>>> Error Message
1. <cvt></cvt> in the end.
2. relation "place.religion.major_religions" not instantiated.
>>>> Instantiation Context
Instantiate Paths: United Kingdom -> location.location.contains -> Heaton railway station
United Kingdom -> location.statistical_region.religions -> <cvt></cvt>
United Kingdom -> location.location.contains -> Bakersfield, Nottingham
United Kingdom -> location.location.contains -> Knockloughrim
United Kingdom -> location.location.contains -> Oakenshaw
Candidate Relations: {'United Kingdom -> location.statistical_region.religions': ['location.religion_percentage.date', 'location.religion_percentage.percentage', 'location.religion_percentage.religion'], 'United Kingdom -> location.location.contains': ['location.location.containedby', 'location.location.geolocation', 'type.object.type']}
>>>> Corrected Path
Goal: The Initial Path starts from United Kingdom, which should cover the major religion in United Kingdom.
Thought: In Instantiate Paths, I find that United Kingdom has some religions, described by a cvt node. In candidates, I find "location.religion_percentage.religion" most relevant to major religions.
Final Path: United Kingdom -> location.statistical_region.religions -> location.religion_percentage.religion)";

const char* const kAnsweringDemo =
    R"(Q: Find the person who said "Taste cannot be controlled by law", where did this person die?
Knowledge Triplets: (Taste cannot be controlled by law., media_common.quotation.author, Thomas Jefferson)
A: First, based on (Taste cannot be controlled by law., media_common.quotation.author, Thomas Jefferson), the person who said "Taste cannot be controlled by law" is Thomas Jefferson. Second, no Triplet provided can answer where Thomas Jefferson's dead, however, based on my owned knowledge, Thomas Jefferson died in Charlottesville. So, the answer is { Charlottesville }.)";

std::string quote_py(const std::string& s) { return "'" + s + "'"; }

std::string py_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += quote_py(items[i]);
    }
    return out + "]";
}

void require(bool ok, const char* what) {
    if (!ok) throw ArgumentError(std::string("prompt payload is missing ") + what);
}

std::string render_task(const RelationCheckPayload& p) {
    require(!p.question.empty(), "the question");
    require(!p.topic_entity.empty(), "the topic entity");
    require(!p.candidates.empty(), "candidate relations");
    return "Question: " + p.question + "\nTopic Entity: " + p.topic_entity +
           "\nCandidate Relations: " + detail::join(p.candidates, "; ") + "\nAnswer:";
}

std::string render_task(const PathGenerationPayload& p) {
    require(!p.question.empty(), "the question");
    require(!p.topic_entities.empty(), "topic entities");
    require(!p.valuable_relations.empty(), "valuable relations");
    std::string relations = "{";
    for (std::size_t i = 0; i < p.valuable_relations.size(); ++i) {
        if (i) relations += ", ";
        relations += nlohmann::json(p.valuable_relations[i].first).dump() + ": " +
                     py_list(p.valuable_relations[i].second);
    }
    relations += "}";
    return "Question: " + p.question + "\nTopic Entity: " + detail::join(p.topic_entities, ", ") +
           "\nValuable Relations: " + relations + "\nThought:";
}

std::string render_task(const SequenceJudgePayload& p) {
    require(!p.question.empty(), "the question");
    require(!p.sequences.empty(), "triplet sequences");
    std::string out = "Question: " + p.question + "\nTriplet sequences:\n";
    for (std::size_t i = 0; i < p.sequences.size(); ++i) {
        out += std::to_string(i + 1) + ". " +
               render_sequence(p.sequences[i], p.display, TripleStyle::quoted) + "\n";
    }
    return out + "Thinking Process:";
}

std::string render_task(const PathEditPayload& p) {
    require(!p.question.empty(), "the question");
    require(!p.initial_path.empty(), "the initial path");
    require(!p.error_messages.empty(), "error messages");
    std::string out = "Question: " + p.question + "\nInitial Path: " + p.initial_path +
                      "\n>>>> Error Message\n";
    for (std::size_t i = 0; i < p.error_messages.size(); ++i) {
        out += std::to_string(i + 1) + ". " + p.error_messages[i] + ".\n";
    }
    out += ">>>> Instantiation Context\n" + p.instantiation_context + "\n";
    if (!p.judge_message.empty()) out += ">>>> Judge Message\n" + p.judge_message + "\n";
    return out + ">>>> Corrected Path";
}

std::string render_task(const AnsweringPayload& p) {
    require(!p.question.empty(), "the question");
    std::string triples;
    for (std::size_t i = 0; i < p.triples.size(); ++i) {
        if (i) triples += "\n";
        triples += render_triple(p.triples[i], p.display);
    }
    if (triples.empty()) triples = "(none)";
    return "Q: " + p.question + "\nKnowledge Triplets: " + triples + "\nA:";
}

std::size_t payload_index(PromptFamily family) {
    switch (family) {
        case PromptFamily::relation_check: return 0;
        case PromptFamily::path_generation: return 1;
        case PromptFamily::sequence_judge: return 2;
        case PromptFamily::path_edit: return 3;
        case PromptFamily::answering: return 4;
    }
    return 0;
}

}  // namespace

DemonstrationSet DemonstrationSet::builtin() {
    DemonstrationSet set;
    set.demos_[PromptFamily::relation_check] = {kRelationCheckDemo};
    set.demos_[PromptFamily::path_generation] = {kPathGenerationDemo};
    set.demos_[PromptFamily::sequence_judge] = {kSequenceJudgeDemo};
    set.demos_[PromptFamily::path_edit] = {kPathEditDemo};
    set.demos_[PromptFamily::answering] = {kAnsweringDemo};
    return set;
}

DemonstrationSet DemonstrationSet::load(const std::string& dir) {
    auto set = builtin();
    for (auto family : kFamilies) {
        const auto path = std::filesystem::path(dir) / (std::string(family_name(family)) + ".txt");
        std::ifstream in(path);
        if (!in) continue;
        std::vector<std::string> demos;
        std::string current;
        std::string line;
        auto flush = [&] {
            auto trimmed = detail::trim(current);
            if (!trimmed.empty()) demos.emplace_back(trimmed);
            current.clear();
        };
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line == "---") {
                flush();
            } else {
                current += line + "\n";
            }
        }
        flush();
        if (!demos.empty()) set.demos_[family] = std::move(demos);
    }
    return set;
}

const std::vector<std::string>& DemonstrationSet::of(PromptFamily family) const {
    static const std::vector<std::string> kNone;
    auto it = demos_.find(family);
    return it == demos_.end() ? kNone : it->second;
}

void DemonstrationSet::set(PromptFamily family, std::vector<std::string> demos) {
    demos_[family] = std::move(demos);
}

bool has_reference_slot(PromptFamily family) noexcept {
    return family == PromptFamily::relation_check || family == PromptFamily::sequence_judge ||
           family == PromptFamily::path_edit;
}

std::string instruction_text(PromptFamily family, std::size_t reference_count,
                             std::size_t relation_check_k) {
    const std::string n = std::to_string(reference_count);
    const std::string k = std::to_string(relation_check_k);
    switch (family) {
        case PromptFamily::relation_check: {
            std::string out = "Please retrieve " + k +
                              " relations (separated by semicolon) that contribute to the question "
                              "and rate their contribution on a scale from 0 to 1 (the sum of the "
                              "scores of " + k + " relations is 1). Note: ";
            if (reference_count > 0) {
                out += "(1) please refer to the " + n +
                       " examples of relation paths to give your score, if some example are "
                       "similar to the question and the first relation of its relation path "
                       "appears in candidate relation, give this relation a good rate; (2) ";
            } else {
                out += "(1) ";
            }
            return out + "please output relation and score in the format of ('relation', score).";
        }
        case PromptFamily::path_generation:
            return "You are tasked with generating relation paths to help searching for answers in "
                   "Freebase based on given question. I will provide you with:\n"
                   "1. A question.\n"
                   "2. One or more topic entity that is central to the question.\n"
                   "3. A set of valuable relations associated with the topic entity.\n\n"
                   "Your goal is to generate relation paths that start with the topic entity and "
                   "follow a sequence of relations to help answer the question.";
        case PromptFamily::sequence_judge:
            return "Here are some triplet sequences [(h_0, r_0, t_0), ..., (h_n, r_n, t_n)] that may "
                   "contain information helpful for solving the problem. Please analyze the "
                   "following triplet sequences and retain the subsequences within each triplet "
                   "sequence that are useful for answering the question, while removing the "
                   "subsequences that are not helpful. Please first output your Thinking Process, "
                   "then output the retained parts of each triplet sequence. If you believe the "
                   "answer to the question appears at the end of the triplet sequence (i.e., the "
                   "answer is the tail entity t_n of the last triplet), directly return this "
                   "sequence. If you think that the entire triplet sequence, except for the head "
                   "entity h_0 of the first triplet, is unrelated to the question, return an empty "
                   "list [].\n"
                   "Note: (1) The retained part of the triplet sequence should be a continuous "
                   "subsequence, and the removed part should also be a continuous subsequence; you "
                   "cannot return non-continuous triples from the original sequence. (2) If it is "
                   "possible to retain, the retained part should include at least the first triplet "
                   "of the sequence. (3) The format of the output triplet sequence should be the "
                   "same as the input triplet sequence. (4) If you believe the answer to the "
                   "question appears in the triplet sequences, please give \"<HAVE_ANSWER>\" in the "
                   "end of your Thinking Process. If you do not believe the answer to the question "
                   "appears in the triplet sequences, please give \"<NO_ANSWER>\" in the end of your "
                   "Thinking Process.";
        case PromptFamily::path_edit: {
            std::string out =
                "Task: Given an Inital Path and some feedback information of a Question, please "
                "correct the Inital Path.\n"
                "Note:\n"
                "(1)When you receive Error Message, please edit the path based on Instantiate "
                "Paths. For example, if the Error Message is \"relation XXX not instantiated\", you "
                "should modify this relation with candidate relation; if the Error Message is "
                "\"<cvt></cvt> in the end\", you should add a candidate relation to a Instantiate "
                "Path which you think is relevant to question; if the Error Message is \"Current "
                "Information is not enough\", please analysis Instantiate Paths and Candidate "
                "Relations, then generate a new path which is more relevant to question; ";
            if (reference_count > 0) {
                out += "(2) please refer to the " + n +
                       " examples of relation paths to correct the Inital Path; (3) ";
            } else {
                out += "(2) ";
            }
            return out + "Avoid generating Final Path that are the same as the Initial Path.";
        }
        case PromptFamily::answering:
            return "Given a question and the associated retrieved knowledge graph triplets (entity, "
                   "relation, entity), you are asked to answer the question with these triplets. "
                   "When you answer the question, please first give your answer with your own "
                   "knowledge, then give your answer with knowledge from retrieved knowledge graph "
                   "triplets. If the given knowledge triples is not enough or missing, you can use "
                   "your own knowledge. Use {} to enclose the answer! Please think step by step.";
    }
    return {};
}

std::string render_reference_block(PromptFamily family, std::span<const Reference> references) {
    if (references.empty() || !has_reference_slot(family)) return {};
    const std::string n = std::to_string(references.size());
    std::string out;
    switch (family) {
        case PromptFamily::relation_check:
            out = "Here are " + n +
                  " examples of questions and associated relation paths which connect to correct "
                  "answer of question:\n";
            break;
        case PromptFamily::sequence_judge:
            out = "Here are " + n +
                  " examples of some questions, associated relation and answer of question.\n";
            break;
        default:
            out = "Here are " + n + " examples of questions and associated relation paths:\n";
            break;
    }
    for (const auto& ref : references) {
        out += "Question: " + ref.question + "\n";
        for (const auto& path : ref.reasoning_paths) out += "Relation Path: " + to_arrow(path) + "\n";
        if (family == PromptFamily::sequence_judge) {
            out += "Answer: " + detail::join(ref.answers, "; ") + "\n";
        }
    }
    out.pop_back();
    return out;
}

std::vector<ChatMessage> render_prompt(PromptFamily family, std::span<const Reference> references,
                                       const PromptPayload& payload,
                                       const DemonstrationSet& demos, const ShotCounts& shots) {
    if (payload.index() != payload_index(family)) {
        throw ArgumentError("payload does not match prompt family " +
                            std::string(family_name(family)));
    }
    const std::size_t shown_refs = has_reference_slot(family) ? references.size() : 0;
    std::size_t top_k = 3;
    if (const auto* rc = std::get_if<RelationCheckPayload>(&payload)) top_k = rc->top_k;

    std::vector<std::string> sections;
    if (auto block = render_reference_block(family, references); !block.empty()) {
        sections.push_back(std::move(block));
    }
    const auto& available = demos.of(family);
    const auto n_demos = std::min(shots.of(family), available.size());
    for (std::size_t i = 0; i < n_demos; ++i) sections.push_back(available[i]);
    sections.push_back(std::visit([](const auto& p) { return render_task(p); }, payload));

    return {{Role::system, instruction_text(family, shown_refs, top_k)},
            {Role::user, detail::join(sections, "\n\n")}};
}

std::vector<ChatMessage> render_prompt(PromptFamily family, std::span<const Reference> references,
                                       const PromptPayload& payload) {
    return render_prompt(family, references, payload, DemonstrationSet::builtin(), ShotCounts{});
}

std::vector<ChatMessage> Prompter::render(PromptFamily family,
                                          std::span<const Reference> references,
                                          const PromptPayload& payload) const {
    auto messages = render_prompt(family, references, payload, demos_, gateway_.config().shots);
    if (log_) log_->push_back({family, has_reference_slot(family) ? references.size() : 0});
    return messages;
}

}  // namespace srp
