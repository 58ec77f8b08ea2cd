/*
 * SPDX-FileCopyrightText: Copyright (c) 2026, The Courtside Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "courtside/evaluation.hpp"

#include "utf8.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace courtside::eval {

using events::PointReason;
using match::PlayerId;

namespace {

std::string_view fold_latin(char32_t cp) noexcept
{
    if (cp >= 0xE0 && cp <= 0xFF)
    {
        static constexpr std::string_view table[] = {
            "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
            "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "y"};
        return table[cp - 0xE0];
    }
    if (cp == 0xDF)
    {
        return "ss";
    }
    struct Range
    {
        char32_t first, last;
        std::string_view base;
    };
    static constexpr Range ranges[] = {
        {0x100, 0x105, "a"}, {0x106, 0x10D, "c"}, {0x10E, 0x111, "d"}, {0x112, 0x11B, "e"}, {0x11C, 0x123, "g"},
        {0x124, 0x127, "h"}, {0x128, 0x131, "i"}, {0x132, 0x133, "ij"}, {0x134, 0x135, "j"}, {0x136, 0x138, "k"},
        {0x139, 0x142, "l"}, {0x143, 0x14B, "n"}, {0x14C, 0x151, "o"}, {0x152, 0x153, "oe"}, {0x154, 0x159, "r"},
        {0x15A, 0x161, "s"}, {0x162, 0x167, "t"}, {0x168, 0x173, "u"}, {0x174, 0x175, "w"}, {0x176, 0x178, "y"},
        {0x179, 0x17E, "z"}, {0x17F, 0x17F, "s"},
    };
    for (const auto& r : ranges)
    {
        if (cp >= r.first && cp <= r.last)
        {
            return r.base;
        }
    }
    return {};
}

bool word_char(char c) noexcept
{
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
}

/// Start offsets of `phrase` in `text` bounded by non-word characters.
std::vector<std::size_t> find_words(std::string_view text, std::string_view phrase)
{
    std::vector<std::size_t> out;
    if (phrase.empty())
    {
        return out;
    }
    for (auto at = text.find(phrase); at != std::string_view::npos; at = text.find(phrase, at + 1))
    {
        const bool left = at == 0 || !word_char(text[at - 1]);
        const auto end = at + phrase.size();
        const bool right = end == text.size() || !word_char(text[end]);
        if (left && right)
        {
            out.push_back(at);
        }
    }
    return out;
}

struct Span
{
    std::size_t begin{0};
    std::size_t end{0};
};

struct Mention
{
    Span span;
    PlayerId player{PlayerId::One};
};

struct Sentence
{
    Span span;
};

std::vector<Span> sentences(std::string_view text)
{
    std::vector<Span> out;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < text.size(); ++i)
    {
        const char c = text[i];
        if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]))))
        {
            out.push_back({begin, i + 1});
            begin = i + 1;
        }
    }
    if (begin < text.size())
    {
        out.push_back({begin, text.size()});
    }
    return out;
}

std::vector<std::string> split_ws(std::string_view text)
{
    std::vector<std::string> out;
    std::string word;
    for (char c : text)
    {
        if (std::isspace(static_cast<unsigned char>(c)))
        {
            if (!word.empty())
            {
                out.push_back(std::move(word));
                word.clear();
            }
        }
        else
        {
            word += c;
        }
    }
    if (!word.empty())
    {
        out.push_back(std::move(word));
    }
    return out;
}

std::string strip_punct(std::string_view word)
{
    std::size_t b = 0;
    std::size_t e = word.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(word[b])))
    {
        ++b;
    }
    while (e > b && std::ispunct(static_cast<unsigned char>(word[e - 1])) && word[e - 1] != '\'')
    {
        --e;
    }
    auto out = std::string(word.substr(b, e - b));
    if (out.size() > 2 && out.compare(out.size() - 2, 2, "'s") == 0)
    {
        out.resize(out.size() - 2);
    }
    return out;
}

class Roster
{
  public:
    explicit Roster(const events::MatchInfo& info)
    {
        std::array<std::vector<std::string>, 2> tokens;
        for (std::size_t i = 0; i < 2; ++i)
        {
            const auto full = fold(info.players[i].name);
            tokens[i] = split_ws(full);
            m_full[i] = full;
            m_surname[i] = tokens[i].empty() ? std::string{} : tokens[i].back();
            for (const auto& t : tokens[i])
            {
                m_words.insert(t);
            }
        }
        m_surnames_usable = m_surname[0] != m_surname[1];
    }

    /// Non-overlapping mentions, longest match first.
    std::vector<Mention> mentions(std::string_view folded) const
    {
        std::vector<Mention> all;
        for (std::size_t i = 0; i < 2; ++i)
        {
            for (auto at : find_words(folded, m_full[i]))
            {
                all.push_back({{at, at + m_full[i].size()}, static_cast<PlayerId>(i)});
            }
            if (m_surnames_usable && m_surname[i] != m_full[i])
            {
                for (auto at : find_words(folded, m_surname[i]))
                {
                    all.push_back({{at, at + m_surname[i].size()}, static_cast<PlayerId>(i)});
                }
            }
        }
        std::sort(all.begin(), all.end(), [](const Mention& a, const Mention& b) {
            if (a.span.begin != b.span.begin)
            {
                return a.span.begin < b.span.begin;
            }
            return a.span.end > b.span.end;
        });
        std::vector<Mention> out;
        for (const auto& m : all)
        {
            if (out.empty() || m.span.begin >= out.back().span.end)
            {
                out.push_back(m);
            }
        }
        return out;
    }

    bool knows(std::string_view folded_word) const
    {
        return m_words.count(std::string(folded_word)) > 0;
    }

  private:
    std::array<std::string, 2> m_full;
    std::array<std::string, 2> m_surname;
    std::set<std::string> m_words;
    bool m_surnames_usable{true};
};

enum class Role
{
    Winner,
    Loser,
    Holder,
    Breaker,
};

struct ActorPhrase
{
    std::string_view text;
    Role role;
};

// Longer phrases first so "service winner" shadows "winner" and "unforced error" shadows "forced error".
constexpr ActorPhrase kActorPhrases[] = {
    {"takes the tiebreak", Role::Winner}, {"wins the point", Role::Winner}, {"takes the point", Role::Winner},
    {"wins the game", Role::Winner},      {"takes the game", Role::Winner}, {"wins the set", Role::Winner},
    {"takes the set", Role::Winner},      {"wins the match", Role::Winner}, {"service winner", Role::Winner},
    {"unforced error", Role::Loser},      {"double fault", Role::Loser},    {"forced error", Role::Loser},
    {"into the net", Role::Loser},        {"holds serve", Role::Holder},    {"breaks serve", Role::Breaker},
    {"winner", Role::Winner},             {"ace", Role::Winner},            {"nets", Role::Loser},
    {"holds", Role::Holder},              {"breaks", Role::Breaker},
};

struct ShotTerm
{
    std::string_view text;
    bool (*present)(const events::RallyRecord&);
};

bool any_shot(const events::RallyRecord& r, auto pred)
{
    return std::any_of(r.shots.begin(), r.shots.end(), pred);
}

std::string squash(std::string_view s)
{
    std::string out;
    for (char c : s)
    {
        if (c != '-' && c != '_' && c != ' ')
        {
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    return out;
}

bool has_technique(const events::RallyRecord& r, std::string_view technique)
{
    return any_shot(r, [&](const events::ShotEvent& s) { return squash(s.technique) == squash(technique); });
}

bool has_direction(const events::RallyRecord& r, events::Direction d)
{
    return any_shot(r, [&](const events::ShotEvent& s) { return s.direction == d; });
}

bool has_outcome(const events::RallyRecord& r, events::ShotOutcome o)
{
    return any_shot(r, [&](const events::ShotEvent& s) { return s.outcome == o; });
}

using events::Direction;
using events::ShotOutcome;
using events::Stroke;

const ShotTerm kShotTerms[] = {
    {"unforced error", [](const events::RallyRecord& r) { return r.outcome.reason == PointReason::UnforcedError || has_outcome(r, ShotOutcome::UnforcedError); }},
    {"forced error", [](const events::RallyRecord& r) { return r.outcome.reason == PointReason::ForcedError || has_outcome(r, ShotOutcome::ForcedError); }},
    {"service winner", [](const events::RallyRecord& r) { return r.outcome.reason == PointReason::ServiceWinner; }},
    {"double fault", [](const events::RallyRecord& r) { return r.outcome.reason == PointReason::DoubleFault; }},
    {"second serve", [](const events::RallyRecord& r) { return any_shot(r, [](const events::ShotEvent& s) { return s.serve_attempt == events::ServeAttempt::Second; }); }},
    {"down the line", [](const events::RallyRecord& r) { return has_direction(r, Direction::DownTheLine); }},
    {"down-the-line", [](const events::RallyRecord& r) { return has_direction(r, Direction::DownTheLine); }},
    {"down the middle", [](const events::RallyRecord& r) { return has_direction(r, Direction::DownTheMiddle); }},
    {"cross-court", [](const events::RallyRecord& r) { return has_direction(r, Direction::CrossCourt); }},
    {"crosscourt", [](const events::RallyRecord& r) { return has_direction(r, Direction::CrossCourt); }},
    {"inside-out", [](const events::RallyRecord& r) { return has_direction(r, Direction::InsideOut); }},
    {"inside out", [](const events::RallyRecord& r) { return has_direction(r, Direction::InsideOut); }},
    {"inside-in", [](const events::RallyRecord& r) { return has_direction(r, Direction::InsideIn); }},
    {"drop shot", [](const events::RallyRecord& r) { return has_technique(r, "dropshot"); }},
    {"forehand", [](const events::RallyRecord& r) { return any_shot(r, [](const events::ShotEvent& s) { return s.stroke == Stroke::Forehand; }); }},
    {"backhand", [](const events::RallyRecord& r) { return any_shot(r, [](const events::ShotEvent& s) { return s.stroke == Stroke::Backhand; }); }},
    {"winner", [](const events::RallyRecord& r) { return has_outcome(r, ShotOutcome::Winner); }},
    {"ace", [](const events::RallyRecord& r) { return r.outcome.reason == PointReason::Ace; }},
    {"volley", [](const events::RallyRecord& r) { return has_technique(r, "volley"); }},
    {"smash", [](const events::RallyRecord& r) { return has_technique(r, "smash"); }},
    {"lob", [](const events::RallyRecord& r) { return has_technique(r, "lob"); }},
    {"slice", [](const events::RallyRecord& r) { return has_technique(r, "slice"); }},
};

constexpr std::string_view kActionVerbs[] = {"serves", "fires", "hits", "wins", "loses", "nets", "misses", "commits",
                                             "breaks", "holds", "smashes", "volleys", "drives", "converts", "saves",
                                             "ends", "takes", "makes"};

constexpr std::string_view kNotNames[] = {"he", "she", "they", "it", "this", "that", "the", "who", "which", "there",
                                          "everyone", "nobody", "someone", "one", "and", "but", "then", "now",
                                          "what", "here", "his", "her", "their", "a", "an"};

template <typename Range>
bool contains(const Range& range, std::string_view word)
{
    return std::find(std::begin(range), std::end(range), word) != std::end(range);
}

bool capitalised(std::string_view word)
{
    if (word.empty())
    {
        return false;
    }
    const auto c = static_cast<unsigned char>(word.front());
    return std::isupper(c) || c >= 0xC3;
}

void check_unknown_names(std::string_view commentary, const Roster& roster, SanityReport& report)
{
    const auto words = split_ws(commentary);
    for (std::size_t i = 1; i < words.size(); ++i)
    {
        if (!contains(kActionVerbs, strip_punct(words[i])))
        {
            continue;
        }
        // The run of capitalised words directly before the verb names its actor.
        std::vector<std::string> run;
        for (std::size_t k = i; k-- > 0 && run.size() < 3;)
        {
            const auto w = strip_punct(words[k]);
            const bool ends_clause = !words[k].empty() && std::ispunct(static_cast<unsigned char>(words[k].back())) &&
                                     words[k].back() != '\'';
            if (!capitalised(w) || (ends_clause && k + 1 != i))
            {
                break;
            }
            run.insert(run.begin(), w);
            if (ends_clause)
            {
                break;
            }
        }
        if (run.empty())
        {
            continue;
        }
        bool known = false;
        bool pronoun = run.size() == 1 && contains(kNotNames, fold(run.front()));
        for (const auto& w : run)
        {
            known = known || roster.knows(fold(w));
        }
        if (!known && !pronoun)
        {
            std::string name;
            for (const auto& w : run)
            {
                name += (name.empty() ? "" : " ") + w;
            }
            report.violations.push_back({ViolationKind::PlayerName, "\"" + name + "\" is not a player in this match"});
        }
    }
}

void check_attribution(std::string_view folded, const events::RallyRecord& rally, const Roster& roster,
                       SanityReport& report)
{
    const auto& info = rally.match_info;
    const auto& score = rally.initial_score;
    const auto winner = rally.outcome.point_winner;
    const bool closes = match::point_closes_game(score, winner);
    const auto mentions = roster.mentions(folded);

    for (const auto& sentence : sentences(folded))
    {
        std::vector<Span> taken;
        struct Hit
        {
            std::size_t at;
            Role role;
            std::string_view text;
        };
        std::vector<Hit> hits;
        const auto body = folded.substr(sentence.begin, sentence.end - sentence.begin);
        for (const auto& phrase : kActorPhrases)
        {
            for (auto rel : find_words(body, phrase.text))
            {
                const std::size_t at = sentence.begin + rel;
                const std::size_t end = at + phrase.text.size();
                const bool overlaps = std::any_of(taken.begin(), taken.end(),
                                                  [&](const Span& s) { return at < s.end && s.begin < end; });
                if (!overlaps)
                {
                    taken.push_back({at, end});
                    hits.push_back({at, phrase.role, phrase.text});
                }
            }
        }
        for (const auto& hit : hits)
        {
            const Mention* actor = nullptr;
            for (const auto& m : mentions)
            {
                if (m.span.begin >= sentence.begin && m.span.end <= hit.at)
                {
                    actor = &m;
                }
            }
            if (actor == nullptr)
            {
                continue;
            }
            const auto who = info.player(actor->player).name;
            const auto expected = hit.role == Role::Loser ? rally.outcome.point_loser : winner;
            if (actor->player != expected)
            {
                report.violations.push_back({ViolationKind::PlayerName, "\"" + std::string(hit.text) +
                                                                            "\" attributed to " + who + ", expected " +
                                                                            info.player(expected).name});
                continue;
            }
            if (hit.role == Role::Holder || hit.role == Role::Breaker)
            {
                const bool server_won = winner == score.server;
                if (!closes || server_won != (hit.role == Role::Holder))
                {
                    report.violations.push_back(
                        {ViolationKind::ScoreMention, "\"" + std::string(hit.text) + "\" does not match this point"});
                }
            }
        }
    }
}

std::string label_of(int ladder)
{
    return std::string(match::point_label(ladder));
}

using Pair = std::pair<std::string, std::string>;

Pair unordered(std::string a, std::string b)
{
    return a <= b ? Pair{a, b} : Pair{b, a};
}

void check_scores(std::string_view folded, const events::RallyRecord& rally, const Roster& roster,
                  SanityReport& report)
{
    const auto& before = rally.initial_score;
    const auto after = match::advance_point(before, rally.outcome.point_winner);
    std::set<Pair> allowed;
    bool any_deuce = false;
    std::set<std::size_t> advantage_holders;
    for (const auto* s : {&before, &after})
    {
        if (s->in_tiebreak)
        {
            allowed.insert(unordered(std::to_string(s->points[0]), std::to_string(s->points[1])));
        }
        else
        {
            allowed.insert(unordered(label_of(s->points[0]), label_of(s->points[1])));
            any_deuce = any_deuce || (s->points[0] == 3 && s->points[1] == 3);
            for (std::size_t i = 0; i < 2; ++i)
            {
                if (s->points[i] == 4)
                {
                    advantage_holders.insert(i);
                }
            }
        }
        allowed.insert(unordered(std::to_string(s->games[0]), std::to_string(s->games[1])));
        allowed.insert(unordered(std::to_string(s->sets_won[0]), std::to_string(s->sets_won[1])));
        for (const auto& g : s->set_games)
        {
            allowed.insert(unordered(std::to_string(g[0]), std::to_string(g[1])));
        }
    }
    const bool history_known = before.history_known();

    static const std::regex pair_re(R"((^|[^a-z0-9])(love|ad|\d{1,2})\s*(?:-|\xE2\x80\x93|\xE2\x80\x94)\s*(love|ad|all|\d{1,2})(?![a-z0-9]))");
    const std::string text(folded);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), pair_re); it != std::sregex_iterator(); ++it)
    {
        auto norm = [](std::string v) {
            if (v == "love")
            {
                return std::string("0");
            }
            if (v == "ad")
            {
                return std::string("AD");
            }
            return v;
        };
        const auto a = norm((*it)[2].str());
        auto b = (*it)[3].str();
        const auto bn = b == "all" ? a : norm(b);
        const auto key = unordered(a, bn);
        if (allowed.count(key))
        {
            continue;
        }
        const bool numeric = a != "AD" && bn != "AD";
        if (numeric && !history_known)
        {
            const int hi = std::max(std::stoi(a), std::stoi(bn));
            if (hi >= 6 && hi <= 7)
            {
                continue;  // could be an earlier set we cannot see
            }
        }
        report.violations.push_back({ViolationKind::ScoreMention, "score \"" + (*it)[0].str().substr((*it)[1].length()) +
                                                                      "\" matches neither the score before nor after the point"});
    }

    if (!find_words(folded, "deuce").empty() && !any_deuce)
    {
        report.violations.push_back({ViolationKind::ScoreMention, "\"deuce\" but the score is not level at 40"});
    }
    const auto mentions = roster.mentions(folded);
    for (auto at : find_words(folded, "advantage"))
    {
        const auto end = at + std::string_view("advantage").size();
        const Mention* named = nullptr;
        for (const auto& m : mentions)
        {
            if (m.span.begin == end + 1)
            {
                named = &m;
            }
        }
        const auto rest = folded.substr(end);
        const bool score_use = named != nullptr || rest.rfind(" server", 0) == 0 || rest.rfind(" receiver", 0) == 0;
        if (!score_use)
        {
            continue;
        }
        if (advantage_holders.empty())
        {
            report.violations.push_back({ViolationKind::ScoreMention, "\"advantage\" but nobody holds advantage"});
        }
        else if (named != nullptr && advantage_holders.count(match::index(named->player)) == 0)
        {
            report.violations.push_back({ViolationKind::ScoreMention,
                                         "advantage named for " + rally.match_info.player(named->player).name});
        }
    }
}

void check_shot_terms(std::string_view folded, const events::RallyRecord& rally, SanityReport& report)
{
    std::vector<Span> taken;
    for (const auto& term : kShotTerms)
    {
        for (auto at : find_words(folded, term.text))
        {
            const auto end = at + term.text.size();
            if (std::any_of(taken.begin(), taken.end(), [&](const Span& s) { return at < s.end && s.begin < end; }))
            {
                continue;
            }
            taken.push_back({at, end});
            if (!term.present(rally))
            {
                report.violations.push_back(
                    {ViolationKind::ShotTerm, "\"" + std::string(term.text) + "\" does not occur in this rally"});
            }
        }
    }
}

}  // namespace

std::string_view to_string(ViolationKind kind) noexcept
{
    switch (kind)
    {
    case ViolationKind::PlayerName:
        return "player_name";
    case ViolationKind::ScoreMention:
        return "score_mention";
    case ViolationKind::ShotTerm:
        return "shot_term";
    }
    return "?";
}

std::string fold(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();)
    {
        const char32_t cp = utf8::to_lower(utf8::next_code_point(text, i));
        const auto base = fold_latin(cp);
        if (!base.empty())
        {
            out += base;
        }
        else
        {
            utf8::append_utf8(out, cp);
        }
    }
    return out;
}

SanityReport sanity_check(std::string_view commentary, const events::RallyRecord& rally)
{
    SanityReport report;
    const Roster roster(rally.match_info);
    const auto folded = fold(commentary);
    check_unknown_names(commentary, roster, report);
    check_attribution(folded, rally, roster, report);
    check_scores(folded, rally, roster, report);
    check_shot_terms(folded, rally, report);
    report.passed = report.violations.empty();
    return report;
}

}  // namespace courtside::eval
