#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace revival::fuzzy {

/// Lowercase (ASCII), trim, and collapse whitespace runs to one space.
/// Punctuation is kept.
inline std::string normalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

/// Length of the longest common subsequence.
inline std::size_t lcs_length(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (char ca : a) {
        std::size_t diag = 0;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = ca == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
            diag = up;
        }
    }
    return row[b.size()];
}

/// Minimum number of insertions plus deletions turning `a` into `b`.
inline std::size_t indel_distance(std::string_view a, std::string_view b) {
    return a.size() + b.size() - 2 * lcs_length(a, b);
}

/// round(100 * (1 - distance / total)) with halves rounded up, in exact integer arithmetic.
inline int similarity_percent(std::size_t distance, std::size_t total) {
    if (total == 0) return 100;
    return static_cast<int>((200 * (total - distance) + total) / (2 * total));
}

/// Best indel similarity of the shorter string against windows of the longer.
///
/// Candidate windows: every substring of the longer string with the shorter
/// string's length, the partial windows at both edges (prefixes and suffixes
/// shorter than that), and the whole longer string when it is less than twice
/// the shorter's length.
inline int partial_ratio(std::string_view a, std::string_view b) {
    const std::string na = normalize(a);
    const std::string nb = normalize(b);
    if (na.empty() || nb.empty()) throw Error("fuzzy match of empty string");

    const bool a_shorter = na.size() < nb.size() || (na.size() == nb.size() && na <= nb);
    const std::string_view s = a_shorter ? na : nb;
    const std::string_view l = a_shorter ? nb : na;
    if (l.find(s) != std::string_view::npos) return 100;

    int best = 0;
    auto consider = [&](std::string_view window) {
        best = std::max(best, similarity_percent(indel_distance(s, window), s.size() + window.size()));
    };
    for (std::size_t k = 1; k < s.size(); ++k) {
        consider(l.substr(0, k));
        consider(l.substr(l.size() - k));
    }
    for (std::size_t start = 0; start + s.size() <= l.size(); ++start) consider(l.substr(start, s.size()));
    if (l.size() < 2 * s.size()) consider(l);
    return best;
}

}  // namespace revival::fuzzy
