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

#include "courtside/event_stream.hpp"
#include "courtside/scoreboard.hpp"

namespace courtside::events {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& problem)
{
    throw EventError(EventErrc::SchemaViolation, field + ": " + problem);
}

const ordered_json& require(const ordered_json& object, const char* key, const std::string& path)
{
    auto it = object.find(key);
    if (it == object.end())
    {
        schema_error(path + key, "missing field");
    }
    return *it;
}

std::string require_string(const ordered_json& object, const char* key, const std::string& path)
{
    const auto& value = require(object, key, path);
    if (!value.is_string())
    {
        schema_error(path + key, "expected a string");
    }
    return value.get<std::string>();
}

std::string optional_string(const ordered_json& object, const char* key, const std::string& path)
{
    auto it = object.find(key);
    if (it == object.end() || it->is_null())
    {
        return {};
    }
    if (!it->is_string())
    {
        schema_error(path + key, "expected a string");
    }
    return it->get<std::string>();
}

double require_number(const ordered_json& object, const char* key, const std::string& path)
{
    const auto& value = require(object, key, path);
    if (!value.is_number())
    {
        schema_error(path + key, "expected a number");
    }
    return value.get<double>();
}

template <typename E, typename Parse>
E require_enum(const ordered_json& object, const char* key, const std::string& path, Parse parse)
{
    const auto text = require_string(object, key, path);
    auto value = parse(text);
    if (!value)
    {
        schema_error(path + key, "unknown value '" + text + "'");
    }
    return *value;
}

ordered_json point_json(const geometry::PixelPoint& p)
{
    return ordered_json::array({p.x, p.y});
}

std::optional<geometry::PixelPoint> optional_point(const ordered_json& object, const char* key, const std::string& path)
{
    auto it = object.find(key);
    if (it == object.end() || it->is_null())
    {
        return std::nullopt;
    }
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
    {
        schema_error(path + key, "expected [x, y]");
    }
    return geometry::PixelPoint{(*it)[0].get<double>(), (*it)[1].get<double>()};
}

PlayerId resolve_player(const ordered_json& value, const MatchInfo& info, const std::string& field)
{
    if (!value.is_string())
    {
        schema_error(field, "expected a player id or name");
    }
    const auto text = value.get<std::string>();
    if (auto id = match::player_id_from_string(text))
    {
        return *id;
    }
    for (const auto& p : info.players)
    {
        if (!p.name.empty() && p.name == text)
        {
            return p.id;
        }
    }
    schema_error(field, "unknown player '" + text + "'");
}

}  // namespace

ordered_json match_info_to_json(const MatchInfo& info)
{
    ordered_json out;
    out["tournament"] = info.tournament;
    out["round"] = info.round;
    out["surface"] = info.surface;
    for (const auto& p : info.players)
    {
        out[std::string(match::to_string(p.id))] = {{"name", p.name},
                                                    {"handedness", std::string(match::to_string(p.handedness))}};
    }
    return out;
}

MatchInfo match_info_from_json(const ordered_json& object)
{
    const std::string path = "match_info.";
    if (!object.is_object())
    {
        schema_error("match_info", "expected an object");
    }
    MatchInfo info;
    info.tournament = optional_string(object, "tournament", path);
    info.round = optional_string(object, "round", path);
    info.surface = optional_string(object, "surface", path);
    for (PlayerId id : {PlayerId::One, PlayerId::Two})
    {
        const std::string key(match::to_string(id));
        const auto& player = require(object, key.c_str(), path);
        if (!player.is_object())
        {
            schema_error(path + key, "expected an object");
        }
        auto& ref = info.players[match::index(id)];
        ref.id = id;
        ref.name = require_string(player, "name", path + key + ".");
        const auto hand = optional_string(player, "handedness", path + key + ".");
        if (hand.empty())
        {
            ref.handedness = match::Handedness::Right;
        }
        else if (auto h = match::handedness_from_string(hand))
        {
            ref.handedness = *h;
        }
        else
        {
            schema_error(path + key + ".handedness", "unknown value '" + hand + "'");
        }
    }
    return info;
}

ordered_json shot_to_json(const ShotEvent& shot)
{
    ordered_json out;
    out["index"] = shot.index;
    out["hitter"] = std::string(match::to_string(shot.hitter));
    out["stroke"] = std::string(to_string(shot.stroke));
    if (!shot.technique.empty())
    {
        out["technique"] = shot.technique;
    }
    if (shot.direction)
    {
        out["direction"] = std::string(to_string(*shot.direction));
    }
    out["outcome"] = std::string(to_string(shot.outcome));
    out["t"] = shot.timestamp;
    if (shot.serve_attempt)
    {
        out["serve_attempt"] = std::string(to_string(*shot.serve_attempt));
    }
    if (shot.return_touched)
    {
        out["return_touched"] = true;
    }
    if (shot.hitter_position)
    {
        out["hitter_position"] = point_json(*shot.hitter_position);
    }
    if (shot.ball_position)
    {
        out["ball_position"] = point_json(*shot.ball_position);
    }
    return out;
}

ShotEvent shot_from_json(const ordered_json& object, int position)
{
    const std::string path = "shot_sequence[" + std::to_string(position) + "].";
    if (!object.is_object())
    {
        schema_error("shot_sequence[" + std::to_string(position) + "]", "expected an object");
    }
    ShotEvent shot;
    shot.index = object.contains("index") ? static_cast<int>(require_number(object, "index", path)) : position;
    shot.hitter = resolve_player(require(object, "hitter", path), MatchInfo{}, path + "hitter");
    shot.stroke = require_enum<Stroke>(object, "stroke", path, stroke_from_string);
    shot.technique = optional_string(object, "technique", path);
    if (object.contains("direction") && !object.at("direction").is_null())
    {
        shot.direction = require_enum<Direction>(object, "direction", path, direction_from_string);
    }
    shot.outcome = require_enum<ShotOutcome>(object, "outcome", path, shot_outcome_from_string);
    shot.timestamp = require_number(object, "t", path);
    if (object.contains("serve_attempt") && !object.at("serve_attempt").is_null())
    {
        shot.serve_attempt = require_enum<ServeAttempt>(object, "serve_attempt", path, serve_attempt_from_string);
    }
    if (auto it = object.find("return_touched"); it != object.end())
    {
        if (!it->is_boolean())
        {
            schema_error(path + "return_touched", "expected a boolean");
        }
        shot.return_touched = it->get<bool>();
    }
    shot.hitter_position = optional_point(object, "hitter_position", path);
    shot.ball_position = optional_point(object, "ball_position", path);
    return shot;
}

ordered_json bounce_to_json(const BounceEvent& bounce)
{
    ordered_json out;
    out["t"] = bounce.timestamp;
    out["court_half"] = std::string(to_string(bounce.court_half));
    if (bounce.position)
    {
        out["position"] = point_json(*bounce.position);
    }
    return out;
}

BounceEvent bounce_from_json(const ordered_json& object)
{
    const std::string path = "bounces[].";
    if (!object.is_object())
    {
        schema_error("bounces[]", "expected an object");
    }
    BounceEvent bounce;
    bounce.timestamp = require_number(object, "t", path);
    bounce.court_half = require_enum<CourtHalf>(object, "court_half", path, court_half_from_string);
    bounce.position = optional_point(object, "position", path);
    return bounce;
}

ordered_json scoreboard_to_json(const match::MatchScore& score, const MatchInfo& info)
{
    ordered_json out;
    for (const auto& p : info.players)
    {
        const auto i = match::index(p.id);
        ordered_json points;
        if (score.in_tiebreak)
        {
            points = score.points[i];
        }
        else if (score.points[i] == static_cast<int>(match::GamePoint::Advantage))
        {
            points = "AD";
        }
        else
        {
            points = std::stoi(std::string(match::point_label(score.points[i])));
        }
        out[p.name] = ordered_json::array({score.sets_won[i], score.games[i], points});
    }
    out["server"] = info.player(score.server).name;
    return out;
}

match::MatchScore scoreboard_from_json(const ordered_json& object, const MatchInfo& info, const match::ScoringConfig& config)
{
    match::RawScoreboard raw;
    try
    {
        raw = match::raw_scoreboard_from_json(object, match::Layout::Wimbledon);
    }
    catch (const match::ScoreboardError& e)
    {
        schema_error("scoreboard", e.what());
    }
    // Rows are matched to the roster by name, not by key order.
    std::array<int, 2> row_of{-1, -1};
    for (int r = 0; r < 2; ++r)
    {
        for (const auto& p : info.players)
        {
            if (raw.rows[r].name == p.name)
            {
                row_of[match::index(p.id)] = r;
            }
        }
    }
    if (row_of[0] < 0 || row_of[1] < 0 || row_of[0] == row_of[1])
    {
        schema_error("scoreboard", "player rows do not match match_info names");
    }
    match::RawScoreboard ordered = raw;
    ordered.rows = {raw.rows[row_of[0]], raw.rows[row_of[1]]};
    try
    {
        return match::parse_scoreboard(ordered, config);
    }
    catch (const match::ScoreboardError& e)
    {
        schema_error("scoreboard", e.what());
    }
}

ordered_json rally_to_json(const RallyRecord& rally)
{
    ordered_json out;
    out["clip_id"] = rally.clip_id;
    out["match_info"] = match_info_to_json(rally.match_info);
    out["scoreboard"] = scoreboard_to_json(rally.initial_score, rally.match_info);
    out["audio_transcript"] = rally.transcript;
    ordered_json shots = ordered_json::array();
    for (const auto& shot : rally.shots)
    {
        shots.push_back(shot_to_json(shot));
    }
    out["shot_sequence"] = std::move(shots);
    if (!rally.bounces.empty())
    {
        ordered_json bounces = ordered_json::array();
        for (const auto& b : rally.bounces)
        {
            bounces.push_back(bounce_to_json(b));
        }
        out["bounces"] = std::move(bounces);
    }
    out["commentary"] = rally.commentary ? ordered_json(*rally.commentary) : ordered_json(nullptr);
    out["outcome"] = {{"point_winner", std::string(match::to_string(rally.outcome.point_winner))},
                      {"point_loser", std::string(match::to_string(rally.outcome.point_loser))},
                      {"reason", std::string(to_string(rally.outcome.reason))}};
    return out;
}

RallyRecord rally_from_json(const ordered_json& object, const match::ScoringConfig& config)
{
    if (!object.is_object())
    {
        schema_error("record", "expected a JSON object");
    }
    RallyRecord rally;
    rally.clip_id = require_string(object, "clip_id", "");
    rally.match_info = match_info_from_json(require(object, "match_info", ""));
    rally.initial_score = scoreboard_from_json(require(object, "scoreboard", ""), rally.match_info, config);
    rally.transcript = optional_string(object, "audio_transcript", "");

    const auto& shots = require(object, "shot_sequence", "");
    if (!shots.is_array())
    {
        schema_error("shot_sequence", "expected a list");
    }
    int position = 0;
    for (const auto& shot : shots)
    {
        rally.shots.push_back(shot_from_json(shot, position++));
    }
    if (auto it = object.find("bounces"); it != object.end() && !it->is_null())
    {
        if (!it->is_array())
        {
            schema_error("bounces", "expected a list");
        }
        for (const auto& b : *it)
        {
            rally.bounces.push_back(bounce_from_json(b));
        }
    }
    if (auto it = object.find("commentary"); it != object.end() && !it->is_null())
    {
        if (!it->is_string())
        {
            schema_error("commentary", "expected a string");
        }
        rally.commentary = it->get<std::string>();
    }

    if (auto it = object.find("outcome"); it != object.end() && !it->is_null())
    {
        if (!it->is_object())
        {
            schema_error("outcome", "expected an object");
        }
        rally.outcome.point_winner = resolve_player(require(*it, "point_winner", "outcome."), rally.match_info,
                                                    "outcome.point_winner");
        rally.outcome.point_loser = resolve_player(require(*it, "point_loser", "outcome."), rally.match_info,
                                                   "outcome.point_loser");
        rally.outcome.reason = require_enum<PointReason>(*it, "reason", "outcome.", point_reason_from_string);
    }
    else
    {
        try
        {
            rally.outcome = derive_outcome(rally.shots);
        }
        catch (const EventError& e)
        {
            schema_error("outcome", std::string("absent and not derivable: ") + e.what());
        }
    }
    return rally;
}

}  // namespace courtside::events
