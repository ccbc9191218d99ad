#include "srp/parsers.hpp"

#include <algorithm>
#include <regex>

#include "srp/error.hpp"
#include "text_util.hpp"

namespace srp {

namespace {

std::string strip_quotes(std::string_view s) {
    s = detail::trim(s);
    while (!s.empty() && (s.front() == '"' || s.front() == '\'' || s.front() == '`')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == '"' || s.back() == '\'' || s.back() == '`')) {
        s.remove_suffix(1);
    }
    return std::string(detail::trim(s));
}

// Index of the brace matching the one at open, or npos.
std::size_t matching_brace(std::string_view text, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < text.size(); ++i) {
        if (text[i] == '{') ++depth;
        if (text[i] == '}' && --depth == 0) return i;
    }
    return std::string_view::npos;
}

struct ClaimedTriple {
    std::string head, relation, tail;
};

std::vector<ClaimedTriple> claimed_triples(const std::string& entry) {
    static const std::regex quoted(R"re(\(\s*"([^"]*)"\s*,\s*"([^"]*)"\s*,\s*"([^"]*)"\s*\))re");
    static const std::regex plain(R"(\(([^(),]*),([^(),]*),([^()]*)\))");
    std::vector<ClaimedTriple> out;
    for (std::sregex_iterator it(entry.begin(), entry.end(), quoted), end; it != end; ++it) {
        out.push_back({(*it)[1].str(), (*it)[2].str(), (*it)[3].str()});
    }
    if (!out.empty()) return out;
    for (std::sregex_iterator it(entry.begin(), entry.end(), plain), end; it != end; ++it) {
        out.push_back({strip_quotes((*it)[1].str()), strip_quotes((*it)[2].str()),
                       strip_quotes((*it)[3].str())});
    }
    return out;
}

bool entity_matches(const std::string& claimed, const EntityId& id, const EntityDisplay& display) {
    auto c = detail::trim(claimed);
    return c == id.str() || c == detail::trim(display(id));
}

bool triple_matches(const ClaimedTriple& claimed, const Triple& actual,
                    const EntityDisplay& display) {
    return detail::trim(claimed.relation) == actual.relation.str() &&
           entity_matches(claimed.head, actual.head, display) &&
           entity_matches(claimed.tail, actual.tail, display);
}

}  // namespace

std::vector<ScoredRelation> parse_scored_relations(std::string_view text) {
    static const std::regex pair(
        R"re(\(\s*['"`]([^'"`]+)['"`]\s*,\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\))re");
    const std::string s(text);
    std::vector<ScoredRelation> out;
    for (std::sregex_iterator it(s.begin(), s.end(), pair), end; it != end; ++it) {
        const double score = std::clamp(std::stod((*it)[2].str()), 0.0, 1.0);
        out.push_back({RelationId(std::string(detail::trim((*it)[1].str()))), score});
    }
    if (out.empty()) throw ParseError("no ('relation', score) pairs found", s);
    return out;
}

std::map<std::string, std::vector<ReasoningPath>> parse_generated_paths(std::string_view text) {
    // The last "Path:" that opens a brace block.
    std::size_t open = std::string_view::npos;
    for (std::size_t pos = text.find("Path:"); pos != std::string_view::npos;
         pos = text.find("Path:", pos + 1)) {
        auto brace = text.find_first_not_of(" \t\r\n", pos + 5);
        if (brace != std::string_view::npos && text[brace] == '{') open = brace;
    }
    if (open == std::string_view::npos) throw ParseError("no Path block", std::string(text));
    auto close = matching_brace(text, open);
    if (close == std::string_view::npos) {
        throw ParseError("unterminated Path block", std::string(text));
    }
    const std::string block(text.substr(open + 1, close - open - 1));

    static const std::regex entry(R"re(["']([^"']+)["']\s*:\s*\[([^\]]*)\])re");
    static const std::regex item(R"re("([^"]*)"|'([^']*)')re");
    std::map<std::string, std::vector<ReasoningPath>> out;
    for (std::sregex_iterator it(block.begin(), block.end(), entry), end; it != end; ++it) {
        const std::string key(detail::trim((*it)[1].str()));
        const std::string items = (*it)[2].str();
        auto& paths = out[key];
        for (std::sregex_iterator jt(items.begin(), items.end(), item); jt != end; ++jt) {
            const std::string raw = (*jt)[1].matched ? (*jt)[1].str() : (*jt)[2].str();
            paths.push_back(parse_arrow(raw));
        }
    }
    if (out.empty()) throw ParseError("Path block holds no paths", std::string(text));
    return out;
}

std::string_view verdict_name(Verdict verdict) {
    return verdict == Verdict::have_answer ? "HAVE_ANSWER" : "NO_ANSWER";
}

bool is_valid_pruning(const TripletSequence& pruned, const TripletSequence& original) {
    if (pruned.size() > original.size()) return false;
    return std::equal(pruned.triples.begin(), pruned.triples.end(), original.triples.begin());
}

Judgement parse_judgement(std::string_view text, std::span<const TripletSequence> original,
                          const EntityDisplay& display) {
    const auto have = text.rfind("<HAVE_ANSWER>");
    const auto no = text.rfind("<NO_ANSWER>");
    if (have == std::string_view::npos && no == std::string_view::npos) {
        throw ParseError("no <HAVE_ANSWER> or <NO_ANSWER> marker", std::string(text));
    }
    Judgement result;
    if (have != std::string_view::npos && (no == std::string_view::npos || have > no)) {
        result.verdict = Verdict::have_answer;
    }

    const auto retained_at = text.rfind("Retained sequences:");
    auto thinking_at = text.find("Thinking Process:");
    std::size_t message_begin = 0;
    if (thinking_at != std::string_view::npos &&
        (retained_at == std::string_view::npos || thinking_at < retained_at)) {
        message_begin = thinking_at + std::string_view("Thinking Process:").size();
    }
    const auto message_end = retained_at == std::string_view::npos ? text.size() : retained_at;
    result.judge_message =
        std::string(detail::trim(text.substr(message_begin, message_end - message_begin)));

    if (retained_at == std::string_view::npos) {
        result.pruned.assign(original.begin(), original.end());
        return result;
    }

    // Numbered entries; a line without a number continues the previous entry.
    std::map<std::size_t, std::string> entries;
    static const std::regex numbered(R"(^\s*(\d+)\s*[.):]\s*(.*)$)");
    std::size_t current = 0;
    const auto section = text.substr(retained_at + std::string_view("Retained sequences:").size());
    for (auto line_view : detail::split_lines(section)) {
        const std::string line(line_view);
        std::smatch m;
        if (std::regex_match(line, m, numbered)) {
            current = std::stoul(m[1].str());
            entries[current] += m[2].str();
        } else if (current != 0) {
            entries[current] += " " + line;
        }
    }

    result.pruned.resize(original.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        auto it = entries.find(i + 1);
        if (it == entries.end()) continue;
        const auto claimed = claimed_triples(it->second);
        std::size_t keep = 0;
        while (keep < claimed.size() && keep < original[i].size() &&
               triple_matches(claimed[keep], original[i].triples[keep], display)) {
            ++keep;
        }
        if (keep < claimed.size()) result.repaired = true;
        result.pruned[i].triples.assign(original[i].triples.begin(),
                                        original[i].triples.begin() + static_cast<long>(keep));
    }
    return result;
}

ReasoningPath parse_edited_path(std::string_view text) {
    const auto at = text.rfind("Final Path:");
    if (at == std::string_view::npos) throw ParseError("no Final Path line", std::string(text));
    const auto lines = detail::split_lines(text.substr(at + std::string_view("Final Path:").size()));
    for (auto line : lines) {
        auto trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        std::string path(trimmed);
        while (!path.empty() && path.back() == '.') path.pop_back();  // sentence period
        path = strip_quotes(path);
        while (!path.empty() && path.back() == '.') path.pop_back();
        return parse_arrow(path);
    }
    throw ParseError("Final Path line is empty", std::string(text));
}

std::vector<std::string> parse_answer(std::string_view text) {
    std::vector<std::string> out;
    for (std::size_t open = text.find('{'); open != std::string_view::npos;
         open = text.find('{', open + 1)) {
        const auto close = text.find('}', open + 1);
        if (close == std::string_view::npos) break;
        auto inner = text.substr(open + 1, close - open - 1);
        if (inner.find('{') != std::string_view::npos) continue;
        auto trimmed = detail::trim(inner);
        if (!trimmed.empty()) out.emplace_back(trimmed);
        open = close;
    }
    if (!out.empty()) return out;

    constexpr std::string_view kLead = "the answer is";
    if (auto at = detail::rfind_icase(text, kLead); at != std::string_view::npos) {
        std::string rest(detail::trim(text.substr(at + kLead.size())));
        if (!rest.empty() && rest.front() == ':') rest = std::string(detail::trim(rest.substr(1)));
        while (!rest.empty() && (rest.back() == '.' || rest.back() == '!')) rest.pop_back();
        if (!rest.empty() && rest.front() == '{') rest.erase(0, 1);  // unclosed brace
        rest = strip_quotes(rest);
        if (!rest.empty()) return {rest};
    }
    return {std::string(detail::trim(text))};
}

}  // namespace srp
