#include <algorithm>
#include <cctype>
#include <map>
#include <string>

#include "edtr/ingest.hpp"

namespace edtr {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// [+-]? digits ( . digits )?
bool is_plain_number(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    const std::size_t int_start = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    if (i == int_start) return false;
    if (i == s.size()) return true;
    if (s[i] != '.') return false;
    ++i;
    const std::size_t frac_start = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    return i == s.size() && i > frac_start;
}

}  // namespace

std::string normalize_answer(std::string_view raw) {
    std::size_t begin = 0;
    std::size_t end = raw.size();
    while (begin < end && is_space(raw[begin])) ++begin;
    while (end > begin && is_space(raw[end - 1])) --end;
    std::string out(raw.substr(begin, end - begin));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    std::string digits;
    digits.reserve(out.size());
    std::copy_if(out.begin(), out.end(), std::back_inserter(digits), [](char c) { return c != ','; });
    if (!is_plain_number(digits)) return out;

    if (const auto dot = digits.find('.'); dot != std::string::npos) {
        while (digits.back() == '0') digits.pop_back();
        if (digits.back() == '.') digits.pop_back();
    }
    return digits;
}

std::vector<std::string> ranked_answers(std::span<const TrajectoryRecord> trajectories) {
    std::vector<std::string> order;
    std::map<std::string, std::size_t> counts;
    for (const auto& t : trajectories) {
        if (counts[t.answer]++ == 0) order.push_back(t.answer);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](const std::string& a, const std::string& b) { return counts[a] > counts[b]; });
    return order;
}

std::string majority_answer(std::span<const TrajectoryRecord> trajectories) {
    auto ranked = ranked_answers(trajectories);
    return ranked.empty() ? std::string{} : std::move(ranked.front());
}

void finalize_sample(ReasoningSample& sample) {
    sample.predicted_answer = majority_answer(sample.trajectories);
    if (sample.gold_answer) {
        sample.correct = sample.predicted_answer == *sample.gold_answer;
    } else {
        sample.correct.reset();
    }
}

}  // namespace edtr
