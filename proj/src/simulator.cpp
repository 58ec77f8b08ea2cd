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

#include "courtside/pipeline.hpp"

#include <cstdio>
#include <random>

namespace courtside::pipeline {

using events::Direction;
using events::ServeAttempt;
using events::ShotEvent;
using events::ShotOutcome;
using events::Stroke;
using match::PlayerId;

namespace {

constexpr const char* kNames[] = {"Ana Ivanova",   "Bea Lopez",     "Clara Müller", "Dana Kovač",
                                  "Elena Søndergaard", "Fiona Walsh", "Greta Nilsson", "Hana Novák",
                                  "Iris Moreau",   "Julia Rossi",   "Kira Tanaka",  "Lena Schmidt",
                                  "Maya Okafor",   "Nora Lindqvist", "Olga Petrova", "Paula Díaz"};

constexpr const char* kTournaments[] = {"Australian Open", "Roland Garros", "Wimbledon", "US Open"};
constexpr const char* kSurfaces[] = {"hard", "clay", "grass", "hard"};
constexpr const char* kRounds[] = {"R128", "R64", "R32", "R16", "QF", "SF", "F"};

constexpr const char* kCrowd[] = {"", "Quiet please.", "Come on!", "applause", "Let's go!", "crowd murmurs"};

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Simulator
{
  public:
    Simulator(std::uint64_t seed, const match::ScoringConfig& config) : m_rng(seed), m_config(config)
    {
        config.validate();
        const auto a = pick(std::size(kNames));
        auto b = pick(std::size(kNames) - 1);
        if (b >= a)
        {
            ++b;
        }
        const auto venue = pick(std::size(kTournaments));
        m_info.tournament = kTournaments[venue];
        m_info.surface = kSurfaces[venue];
        m_info.round = kRounds[pick(std::size(kRounds))];
        m_info.players[0] = {PlayerId::One, kNames[a], u() < 0.15 ? match::Handedness::Left : match::Handedness::Right};
        m_info.players[1] = {PlayerId::Two, kNames[b], u() < 0.15 ? match::Handedness::Left : match::Handedness::Right};
        m_match_id = "sim" + std::to_string(seed);
        m_clock = 30.0 + 60.0 * u();
    }

    /// Appends points until the match started from a fresh score is decided.
    void play_match(std::vector<events::RallyRecord>& out, std::size_t limit = SIZE_MAX)
    {
        auto score = match::MatchScore::fresh(m_config, u() < 0.5 ? PlayerId::One : PlayerId::Two);
        while (!match::is_terminal(score) && out.size() < limit)
        {
            out.push_back(point(score));
            score = match::advance_point(score, out.back().outcome.point_winner);
        }
    }

  private:
    double u()
    {
        return static_cast<double>(m_rng() >> 11) * 0x1.0p-53;
    }

    std::size_t pick(std::size_t n)
    {
        return static_cast<std::size_t>(u() * static_cast<double>(n));
    }

    template <std::size_t N>
    const char* weighted(const char* const (&items)[N], const double (&weights)[N])
    {
        double x = u();
        for (std::size_t i = 0; i + 1 < N; ++i)
        {
            if (x < weights[i])
            {
                return items[i];
            }
            x -= weights[i];
        }
        return items[N - 1];
    }

    ShotEvent serve(PlayerId server, ServeAttempt attempt, ShotOutcome outcome, double t)
    {
        static constexpr const char* first[] = {"flat", "slice", "kick"};
        static constexpr double first_w[] = {0.6, 0.25, 0.15};
        static constexpr const char* second[] = {"kick", "slice"};
        static constexpr double second_w[] = {0.7, 0.3};
        static constexpr Direction targets[] = {Direction::T, Direction::Wide, Direction::Body};
        ShotEvent s;
        s.hitter = server;
        s.stroke = Stroke::Serve;
        s.serve_attempt = attempt;
        s.outcome = outcome;
        s.timestamp = t;
        s.technique = attempt == ServeAttempt::First ? weighted(first, first_w) : weighted(second, second_w);
        s.direction = targets[pick(3)];
        return s;
    }

    ShotEvent ground(PlayerId hitter, ShotOutcome outcome, double t)
    {
        static constexpr const char* techniques[] = {"topspin", "slice", "volley", "lob", "dropshot"};
        static constexpr double technique_w[] = {0.7, 0.2, 0.05, 0.03, 0.02};
        ShotEvent s;
        s.hitter = hitter;
        s.stroke = u() < 0.58 ? Stroke::Forehand : Stroke::Backhand;
        s.outcome = outcome;
        s.timestamp = t;
        s.technique = weighted(techniques, technique_w);
        const double d = u();
        if (d < 0.5)
            s.direction = Direction::CrossCourt;
        else if (d < 0.7)
            s.direction = Direction::DownTheLine;
        else if (d < 0.9)
            s.direction = Direction::DownTheMiddle;
        else if (s.stroke == Stroke::Forehand)
            s.direction = d < 0.97 ? Direction::InsideOut : Direction::InsideIn;
        else
            s.direction = std::nullopt;
        return s;
    }

    events::RallyRecord point(const match::MatchScore& score)
    {
        const PlayerId server = score.server;
        std::vector<ShotEvent> shots;
        double t = 0.8 + 0.6 * u();
        bool open = false;
        for (ServeAttempt attempt : {ServeAttempt::First, ServeAttempt::Second})
        {
            const bool first = attempt == ServeAttempt::First;
            while (u() < 0.04)
            {
                shots.push_back(serve(server, attempt, ShotOutcome::Let, t));
                t += 4.0 + 4.0 * u();
            }
            const double p = u();
            if (p < (first ? 0.07 : 0.03))
            {
                auto s = serve(server, attempt, ShotOutcome::Winner, t);
                s.return_touched = u() < 0.35;
                shots.push_back(s);
                break;
            }
            if (p < (first ? 0.37 : 0.12))
            {
                shots.push_back(serve(server, attempt, u() < 0.5 ? ShotOutcome::Fault : ShotOutcome::Net, t));
                t += 3.0 + 3.0 * u();
                continue;
            }
            shots.push_back(serve(server, attempt, ShotOutcome::In, t));
            open = true;
            break;
        }
        PlayerId hitter = match::other(server);
        // Each shot ends the point with probability 0.25, capped at 40 shots.
        while (open)
        {
            t += 0.9 + 0.7 * u();
            ShotOutcome outcome = ShotOutcome::In;
            if (u() < 0.25 || shots.size() >= 40)
            {
                const double e = u();
                outcome = e < 0.35   ? ShotOutcome::Winner
                          : e < 0.75 ? ShotOutcome::UnforcedError
                          : e < 0.95 ? ShotOutcome::ForcedError
                                     : ShotOutcome::Net;
            }
            shots.push_back(ground(hitter, outcome, t));
            open = outcome == ShotOutcome::In;
            hitter = match::other(hitter);
        }
        for (std::size_t i = 0; i < shots.size(); ++i)
        {
            shots[i].index = static_cast<int>(i);
        }

        events::RallyRecord r;
        const double duration = t + 1.5;
        char id[96];
        std::snprintf(id, sizeof id, "%s_%.2f_%.2f", m_match_id.c_str(), m_clock, m_clock + duration);
        r.clip_id = id;
        r.match_info = m_info;
        r.initial_score = score;
        r.shots = std::move(shots);
        r.outcome = events::derive_outcome(r.shots);
        r.transcript = kCrowd[pick(std::size(kCrowd))];
        r.commentary = reference(r);
        m_clock += duration + 20.0 + 15.0 * u();
        return r;
    }

    std::string reference(const events::RallyRecord& r) const
    {
        const auto surname = [&](PlayerId id) {
            const auto& name = m_info.player(id).name;
            return name.substr(name.rfind(' ') + 1);
        };
        const auto w = surname(r.outcome.point_winner);
        const auto l = surname(r.outcome.point_loser);
        switch (r.outcome.reason)
        {
        case events::PointReason::Ace:
            return "An ace from " + w + ".";
        case events::PointReason::DoubleFault:
            return "A double fault from " + l + ", the point goes to " + w + ".";
        case events::PointReason::ServiceWinner:
            return w + " with a serve that " + l + " cannot return.";
        case events::PointReason::Winner:
            return w + " finishes the rally with a clean winner.";
        case events::PointReason::ForcedError:
            return w + " applies the pressure and " + l + " cannot keep it in.";
        case events::PointReason::UnforcedError:
            return "An error from " + l + ", and " + w + " takes the point.";
        }
        return w + " wins the point.";
    }

    std::mt19937_64 m_rng;
    match::ScoringConfig m_config;
    events::MatchInfo m_info;
    std::string m_match_id;
    double m_clock{0.0};
};

}  // namespace

std::vector<events::RallyRecord> simulate_match(std::uint64_t seed, const match::ScoringConfig& config)
{
    Simulator sim(seed, config);
    std::vector<events::RallyRecord> out;
    sim.play_match(out);
    return out;
}

std::vector<events::RallyRecord> simulate_session(std::uint64_t seed, std::size_t rallies,
                                                  const match::ScoringConfig& config)
{
    Simulator sim(seed, config);
    std::vector<events::RallyRecord> out;
    out.reserve(rallies);
    while (out.size() < rallies)
    {
        sim.play_match(out, rallies);
    }
    return out;
}

std::vector<std::vector<events::RallyRecord>> simulate_matches(std::uint64_t seed, std::size_t count,
                                                               const match::ScoringConfig& config,
                                                               Execution execution)
{
    config.validate();
    std::vector<std::vector<events::RallyRecord>> out(count);
    const auto n = static_cast<long>(count);
    if (execution == Execution::Parallel)
    {
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < n; ++i)
        {
            out[static_cast<std::size_t>(i)] = simulate_match(mix(seed, static_cast<std::uint64_t>(i)), config);
        }
    }
    else
    {
        for (long i = 0; i < n; ++i)
        {
            out[static_cast<std::size_t>(i)] = simulate_match(mix(seed, static_cast<std::uint64_t>(i)), config);
        }
    }
    return out;
}

}  // namespace courtside::pipeline
