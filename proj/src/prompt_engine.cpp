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

#include "courtside/prompt_engine.hpp"

#include <cstdio>
#include <sstream>

namespace courtside::prompt {

using nlohmann::ordered_json;
using events::RallyRecord;
using match::PlayerId;

const std::string_view kCommentatorSystemPrompt =
    "I want you to act as a professional tennis commentator and coach. I will give you descriptions of tennis "
    "matches in progress, which include both detailed shot-by-shot data and real broadcast transcripts. You will "
    "commentate on the match, providing your analysis on what has happened thus far and predicting how the match "
    "will go.\n\n"
    "You should be knowledgeable of tennis terminology, tactics, players involved in each match. Your commentary "
    "must be factually accurate based on the shot data. Explicitly use the broadcast transcripts to extract "
    "long-term match context, tactical shifts, and any rolling match statistics mentioned by the original "
    "commentators (e.g., serve percentages, error counts). Weave these macro trends into your commentary naturally "
    "when they add strategic depth to the current point.\n\n"
    "Be professionally insightful, engaging the audience, and maintain narrative coherence by connecting the current "
    "rally to the momentum of the recent points and the overall match story. Ensure the length is appropriate and "
    "use natural pauses (ellipses...) and transitions. Focus on intelligent analysis rather than just narrating "
    "play-by-play.";

namespace {

constexpr std::string_view kMetadataLead = "Metadata: ";
constexpr std::string_view kMemoryLead = "\n\nMatch memory:\n";
constexpr std::string_view kScoreKey = "score_state (initial)";
constexpr std::string_view kTranscriptKey = "audio_transcription (background context)";

[[noreturn]] void malformed(const std::string& what)
{
    throw PromptError(PromptErrc::MalformedMetadata, what);
}

std::vector<std::string> split_words(std::string_view text)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string word;
    while (in >> word)
    {
        out.push_back(word);
    }
    return out;
}

std::string_view outcome_phrase(events::ShotOutcome outcome) noexcept
{
    using events::ShotOutcome;
    switch (outcome)
    {
    case ShotOutcome::In:
        return "in play";
    case ShotOutcome::Winner:
        return "winner";
    case ShotOutcome::ForcedError:
        return "forced error";
    case ShotOutcome::UnforcedError:
        return "unforced error";
    case ShotOutcome::Fault:
        return "fault";
    case ShotOutcome::Let:
        return "let";
    case ShotOutcome::Net:
        return "into the net";
    }
    return "in play";
}

std::optional<events::ShotOutcome> outcome_from_phrase(std::string_view phrase) noexcept
{
    using events::ShotOutcome;
    for (auto o : {ShotOutcome::In, ShotOutcome::Winner, ShotOutcome::ForcedError, ShotOutcome::UnforcedError,
                   ShotOutcome::Fault, ShotOutcome::Let, ShotOutcome::Net})
    {
        if (phrase == outcome_phrase(o))
        {
            return o;
        }
    }
    return std::nullopt;
}

ordered_json point_json(const geometry::PixelPoint& p)
{
    return ordered_json::array({p.x, p.y});
}

geometry::PixelPoint point_from(const ordered_json& j, const std::string& what)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    {
        malformed(what + ": expected [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

const ordered_json& member(const ordered_json& object, std::string_view key)
{
    if (!object.is_object())
    {
        malformed("expected an object holding \"" + std::string(key) + "\"");
    }
    auto it = object.find(std::string(key));
    if (it == object.end())
    {
        malformed("missing \"" + std::string(key) + "\"");
    }
    return *it;
}

std::string member_string(const ordered_json& object, std::string_view key)
{
    const auto& v = member(object, key);
    if (!v.is_string())
    {
        malformed("\"" + std::string(key) + "\" must be a string");
    }
    return v.get<std::string>();
}

PlayerId player_by_name(const events::MatchInfo& info, const std::string& name)
{
    for (const auto& p : info.players)
    {
        if (p.name == name)
        {
            return p.id;
        }
    }
    malformed("unknown player \"" + name + "\"");
}

ordered_json per_player(const events::MatchInfo& info, const match::ScorePair& values)
{
    ordered_json out = ordered_json::object();
    out[info.players[0].name] = values[0];
    out[info.players[1].name] = values[1];
    return out;
}

ordered_json points_json(const events::MatchInfo& info, const match::MatchScore& score)
{
    ordered_json out = ordered_json::object();
    for (std::size_t i = 0; i < 2; ++i)
    {
        if (score.in_tiebreak)
        {
            out[info.players[i].name] = score.points[i];
        }
        else
        {
            out[info.players[i].name] = std::string(match::point_label(score.points[i]));
        }
    }
    return out;
}

match::ScorePair read_pair(const ordered_json& object, const events::MatchInfo& info, std::string_view key)
{
    const auto& v = member(object, key);
    match::ScorePair out{};
    for (std::size_t i = 0; i < 2; ++i)
    {
        const auto& x = member(v, info.players[i].name);
        if (!x.is_number_integer())
        {
            malformed(std::string(key) + ": expected integers");
        }
        out[i] = x.get<int>();
    }
    return out;
}

std::string format_pct(const std::optional<double>& ratio)
{
    if (!ratio)
    {
        return "n/a";
    }
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.1f%%", *ratio * 100.0);
    return buffer;
}

std::string one_line(std::string_view text)
{
    std::string out(text);
    for (auto& c : out)
    {
        if (c == '\n' || c == '\r' || c == '\t')
        {
            c = ' ';
        }
    }
    return out;
}

}  // namespace

std::string full_prompt_text(const PromptBundle& bundle)
{
    std::string out = bundle.system_text;
    if (bundle.prior_interaction)
    {
        out += "\n\n";
        out += bundle.prior_interaction->user_text;
        out += "\n\n";
        out += bundle.prior_interaction->assistant_text;
    }
    out += "\n\n";
    out += bundle.user_text;
    return out;
}

TokenEstimate estimate_tokens(std::string_view text) noexcept
{
    std::int64_t code_points = 0;
    for (unsigned char c : text)
    {
        if ((c & 0xC0) != 0x80)
        {
            ++code_points;
        }
    }
    return {(code_points + 3) / 4};
}

std::string shot_description(const events::ShotEvent& shot, match::Handedness handedness)
{
    std::string out;
    if (handedness == match::Handedness::Left)
    {
        out += "left-handed ";
    }
    if (shot.stroke == events::Stroke::Serve)
    {
        out += shot.serve_attempt == events::ServeAttempt::Second ? "second serve" : "first serve";
    }
    else
    {
        out += events::to_string(shot.stroke);
    }
    if (!shot.technique.empty())
    {
        out += ' ';
        out += shot.technique;
    }
    if (shot.direction)
    {
        out += ' ';
        out += events::to_string(*shot.direction);
    }
    out += ", ";
    out += outcome_phrase(shot.outcome);
    if (shot.return_touched)
    {
        out += ", return touched";
    }
    return out;
}

ParsedShotDescription parse_shot_description(std::string_view text)
{
    ParsedShotDescription out;
    const auto comma = text.find(", ");
    if (comma == std::string_view::npos)
    {
        malformed("shot description lacks an outcome: " + std::string(text));
    }
    auto tail = text.substr(comma + 2);
    constexpr std::string_view kTouched = ", return touched";
    if (tail.size() >= kTouched.size() && tail.substr(tail.size() - kTouched.size()) == kTouched)
    {
        out.return_touched = true;
        tail.remove_suffix(kTouched.size());
    }
    const auto outcome = outcome_from_phrase(tail);
    if (!outcome)
    {
        malformed("unknown shot outcome \"" + std::string(tail) + "\"");
    }
    out.outcome = *outcome;

    auto words = split_words(text.substr(0, comma));
    std::size_t at = 0;
    if (at < words.size() && words[at] == "left-handed")
    {
        out.left_handed = true;
        ++at;
    }
    if (at + 1 < words.size() && (words[at] == "first" || words[at] == "second") && words[at + 1] == "serve")
    {
        out.stroke = events::Stroke::Serve;
        out.serve_attempt = words[at] == "first" ? events::ServeAttempt::First : events::ServeAttempt::Second;
        at += 2;
    }
    else if (at < words.size() && (words[at] == "forehand" || words[at] == "backhand"))
    {
        out.stroke = *events::stroke_from_string(words[at]);
        ++at;
    }
    else
    {
        malformed("shot description lacks a stroke: " + std::string(text));
    }
    const std::size_t rest = words.size() - at;
    if (rest > 2)
    {
        malformed("too many qualifiers in shot description: " + std::string(text));
    }
    if (rest >= 1)
    {
        if (auto d = events::direction_from_string(words.back()))
        {
            out.direction = d;
            words.pop_back();
        }
    }
    if (words.size() - at == 1)
    {
        out.technique = words[at];
    }
    else if (words.size() - at > 1)
    {
        malformed("unrecognised qualifiers in shot description: " + std::string(text));
    }
    return out;
}

ordered_json metadata_json(const RallyRecord& rally)
{
    const auto& info = rally.match_info;
    const auto& score = rally.initial_score;
    auto name_of = [&](PlayerId id) { return info.player(id).name; };

    ordered_json out;
    out["clip_id"] = rally.clip_id;
    out["match_info"] = events::match_info_to_json(info);

    ordered_json state;
    state["server"] = name_of(score.server);
    state["returner"] = name_of(score.returner());
    state["sets"] = per_player(info, score.sets_won);
    state["games_in_current_set"] = per_player(info, score.games);
    state["points_in_current_game"] = points_json(info, score);
    if (!score.set_games.empty())
    {
        ordered_json sets = ordered_json::array();
        for (const auto& s : score.set_games)
        {
            sets.push_back(ordered_json::array({s[0], s[1]}));
        }
        state["completed_sets"] = std::move(sets);
    }
    out[std::string(kScoreKey)] = std::move(state);

    ordered_json shots = ordered_json::array();
    for (const auto& shot : rally.shots)
    {
        ordered_json s;
        s["shot_index"] = shot.index;
        s["hitter"] = name_of(shot.hitter);
        s["shot_description"] = shot_description(shot, info.player(shot.hitter).handedness);
        s["t"] = shot.timestamp;
        if (shot.hitter_position)
        {
            s["hitter_position"] = point_json(*shot.hitter_position);
        }
        if (shot.ball_position)
        {
            s["ball_position"] = point_json(*shot.ball_position);
        }
        shots.push_back(std::move(s));
    }
    out["rally"] = std::move(shots);

    if (!rally.bounces.empty())
    {
        ordered_json bounces = ordered_json::array();
        for (const auto& b : rally.bounces)
        {
            bounces.push_back(events::bounce_to_json(b));
        }
        out["bounces"] = std::move(bounces);
    }

    out["outcome"] = {{"point_winner", name_of(rally.outcome.point_winner)},
                      {"point_loser", name_of(rally.outcome.point_loser)},
                      {"reason", std::string(events::to_string(rally.outcome.reason))}};
    out[std::string(kTranscriptKey)] = rally.transcript;
    return out;
}

std::string serialize_metadata(const RallyRecord& rally)
{
    return metadata_json(rally).dump();
}

RallyRecord metadata_from_json(const ordered_json& block, const match::ScoringConfig& config)
{
    if (!block.is_object())
    {
        malformed("metadata block must be a JSON object");
    }
    RallyRecord rally;
    try
    {
        rally.clip_id = member_string(block, "clip_id");
        rally.match_info = events::match_info_from_json(member(block, "match_info"));
        const auto& info = rally.match_info;
        if (info.players[0].name == info.players[1].name)
        {
            malformed("players must have distinct names");
        }

        const auto& state = member(block, kScoreKey);
        auto& score = rally.initial_score;
        score.config = config;
        score.server = player_by_name(info, member_string(state, "server"));
        if (player_by_name(info, member_string(state, "returner")) != score.returner())
        {
            malformed("returner must be the other player");
        }
        score.sets_won = read_pair(state, info, "sets");
        score.games = read_pair(state, info, "games_in_current_set");
        const auto& points = member(state, "points_in_current_game");
        const auto& p1 = member(points, info.players[0].name);
        const auto& p2 = member(points, info.players[1].name);
        if (p1.is_number_integer() && p2.is_number_integer())
        {
            score.in_tiebreak = true;
            score.points = {p1.get<int>(), p2.get<int>()};
        }
        else if (p1.is_string() && p2.is_string())
        {
            const auto a = match::ladder_from_label(p1.get<std::string>());
            const auto b = match::ladder_from_label(p2.get<std::string>());
            if (!a || !b)
            {
                malformed("unknown point label");
            }
            score.points = {*a, *b};
        }
        else
        {
            malformed("points must be two labels or two tiebreak integers");
        }
        if (auto it = state.find("completed_sets"); it != state.end())
        {
            if (!it->is_array())
            {
                malformed("completed_sets must be a list");
            }
            for (const auto& s : *it)
            {
                if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer())
                {
                    malformed("completed_sets entries must be [games, games]");
                }
                score.set_games.push_back({s[0].get<int>(), s[1].get<int>()});
            }
        }

        const auto& shots = member(block, "rally");
        if (!shots.is_array())
        {
            malformed("rally must be a list");
        }
        for (const auto& s : shots)
        {
            events::ShotEvent shot;
            const auto& index = member(s, "shot_index");
            if (!index.is_number_integer())
            {
                malformed("shot_index must be an integer");
            }
            shot.index = index.get<int>();
            shot.hitter = player_by_name(info, member_string(s, "hitter"));
            const auto parsed = parse_shot_description(member_string(s, "shot_description"));
            const bool left = info.player(shot.hitter).handedness == match::Handedness::Left;
            if (parsed.left_handed != left)
            {
                malformed("shot description handedness disagrees with match_info");
            }
            shot.stroke = parsed.stroke;
            shot.serve_attempt = parsed.serve_attempt;
            shot.technique = parsed.technique;
            shot.direction = parsed.direction;
            shot.outcome = parsed.outcome;
            shot.return_touched = parsed.return_touched;
            const auto& t = member(s, "t");
            if (!t.is_number())
            {
                malformed("t must be a number");
            }
            shot.timestamp = t.get<double>();
            if (auto it = s.find("hitter_position"); it != s.end())
            {
                shot.hitter_position = point_from(*it, "hitter_position");
            }
            if (auto it = s.find("ball_position"); it != s.end())
            {
                shot.ball_position = point_from(*it, "ball_position");
            }
            rally.shots.push_back(std::move(shot));
        }

        if (auto it = block.find("bounces"); it != block.end())
        {
            if (!it->is_array())
            {
                malformed("bounces must be a list");
            }
            for (const auto& b : *it)
            {
                rally.bounces.push_back(events::bounce_from_json(b));
            }
        }

        const auto& outcome = member(block, "outcome");
        rally.outcome.point_winner = player_by_name(info, member_string(outcome, "point_winner"));
        rally.outcome.point_loser = player_by_name(info, member_string(outcome, "point_loser"));
        const auto reason = events::point_reason_from_string(member_string(outcome, "reason"));
        if (!reason)
        {
            malformed("unknown outcome reason");
        }
        rally.outcome.reason = *reason;
        rally.transcript = member_string(block, kTranscriptKey);
    }
    catch (const PromptError&)
    {
        throw;
    }
    catch (const Error& e)
    {
        malformed(e.what());
    }
    return rally;
}

RallyRecord parse_metadata(std::string_view text, const match::ScoringConfig& config)
{
    const auto j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded())
    {
        malformed("metadata block is not valid JSON");
    }
    return metadata_from_json(j, config);
}

std::string serialize_memory(const memory::ContextView& view, const events::MatchInfo& info)
{
    std::string out = "Recent rallies (oldest first):\n";
    if (view.recent.empty())
    {
        out += "(none)\n";
    }
    for (const auto& r : view.recent)
    {
        const auto& o = r.metadata.outcome;
        out += "- #" + std::to_string(r.index) + " | " + match::score_summary(r.metadata.initial_score) + " | " +
               info.player(o.point_winner).name + " won the point (" + std::string(events::to_string(o.reason)) +
               ") | ";
        out += r.commentary ? one_line(*r.commentary) : std::string(kMissingCommentaryMarker);
        out += '\n';
    }

    out += "Match statistics after " + std::to_string(view.rallies_consolidated) + " consolidated rallies:\n";
    out += "| statistic | " + info.players[0].name + " | " + info.players[1].name + " |\n";
    for (const auto& field : kStatFields)
    {
        out += "| " + std::string(field.name) + " | " + std::to_string(view.lines[0].*field.member) + " | " +
               std::to_string(view.lines[1].*field.member) + " |\n";
    }
    const auto row = [&](const char* name, auto pick) {
        out += std::string("| ") + name + " | " + format_pct(pick(view.ratios[0])) + " | " +
               format_pct(pick(view.ratios[1])) + " |\n";
    };
    row("first_serve_pct", [](const memory::DerivedRatios& r) { return r.first_serve_pct; });
    row("serve_points_won_pct", [](const memory::DerivedRatios& r) { return r.serve_points_won_pct; });
    row("return_points_won_pct", [](const memory::DerivedRatios& r) { return r.return_points_won_pct; });
    return out;
}

PromptBundle build_commentary_prompt(const RallyRecord& rally, const memory::ContextView& view,
                                     const std::optional<Interaction>& prior, const PersonaConfig& persona)
{
    PromptBundle bundle;
    bundle.system_text = std::string(kCommentatorSystemPrompt);
    bundle.user_text = "Here is the metadata for 1 chronological rallies. Provide a commentary for each rally between " +
                       std::to_string(persona.min_words) + " and " + std::to_string(persona.max_words) +
                       " words, adjusting the length based on rally duration and importance. Return the output "
                       "strictly as a valid JSON list of strings.\n\n";
    bundle.user_text += kMetadataLead;
    bundle.user_text += serialize_metadata(rally);
    bundle.user_text += kMemoryLead;
    bundle.user_text += serialize_memory(view, rally.match_info);
    bundle.prior_interaction = prior;
    return bundle;
}

std::optional<std::string_view> metadata_section(std::string_view user_text) noexcept
{
    const auto lead = user_text.find(std::string("\n") + std::string(kMetadataLead));
    if (lead == std::string_view::npos)
    {
        return std::nullopt;
    }
    const auto start = lead + 1 + kMetadataLead.size();
    const auto end = user_text.find('\n', start);
    return user_text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
}

std::optional<std::string_view> memory_section(std::string_view user_text) noexcept
{
    const auto lead = user_text.find(kMemoryLead);
    if (lead == std::string_view::npos)
    {
        return std::nullopt;
    }
    return user_text.substr(lead + kMemoryLead.size());
}

}  // namespace courtside::prompt
