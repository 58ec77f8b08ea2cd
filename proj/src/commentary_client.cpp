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

#include <httplib.h>

#include <cstdlib>
#include <regex>
#include <thread>

namespace courtside::prompt {

using nlohmann::ordered_json;
using match::PlayerId;

namespace {

std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void malformed_response(const std::string& what)
{
    throw PromptError(PromptErrc::MalformedResponse, what);
}

std::string points_phrase(const match::MatchScore& score, const events::MatchInfo& info)
{
    const int s = score.points[match::index(score.server)];
    const int r = score.points[match::index(score.returner())];
    if (score.in_tiebreak)
    {
        return std::to_string(s) + "-" + std::to_string(r) + " in the tiebreak";
    }
    if (s == 3 && r == 3)
    {
        return "deuce";
    }
    if (s == 4 || r == 4)
    {
        return "advantage " + info.player(s == 4 ? score.server : score.returner()).name;
    }
    return std::string(match::point_label(s)) + "-" + std::string(match::point_label(r));
}

std::string_view stroke_word(events::Stroke stroke) noexcept
{
    return events::to_string(stroke);
}

/// Reads one row of the statistics table: "| name | a | b |".
std::optional<std::array<long long, 2>> table_row(std::string_view memory_text, std::string_view name)
{
    const std::string lead = "| " + std::string(name) + " | ";
    const auto at = memory_text.find(lead);
    if (at == std::string_view::npos)
    {
        return std::nullopt;
    }
    const auto end = memory_text.find('\n', at);
    const std::string row(memory_text.substr(at + lead.size(), end - at - lead.size()));
    std::array<long long, 2> out{};
    if (std::sscanf(row.c_str(), "%lld | %lld", &out[0], &out[1]) != 2)
    {
        return std::nullopt;
    }
    return out;
}

}  // namespace

std::string mock_commentary(const events::RallyRecord& rally, std::string_view memory_text)
{
    const auto& info = rally.match_info;
    const auto& score = rally.initial_score;
    const auto& outcome = rally.outcome;
    const std::string server = info.player(score.server).name;
    const std::string winner = info.player(outcome.point_winner).name;
    const std::string loser = info.player(outcome.point_loser).name;
    const auto shots = std::to_string(rally.shots.size());
    const std::string stroke(rally.shots.empty() ? "serve" : stroke_word(rally.shots.back().stroke));

    std::string out = server + " serves at " + points_phrase(score, info) + ". ";
    switch (outcome.reason)
    {
    case events::PointReason::Ace:
        out += server + " fires an ace. ";
        break;
    case events::PointReason::ServiceWinner:
        out += server + " wins the point with a service winner. ";
        break;
    case events::PointReason::DoubleFault:
        out += server + " commits a double fault. ";
        break;
    case events::PointReason::Winner:
        out += winner + " ends the " + shots + "-shot rally with a " + stroke + " winner. ";
        break;
    case events::PointReason::UnforcedError:
        out += loser + " makes an unforced error on the " + stroke + " after " + shots + " shots. ";
        break;
    case events::PointReason::ForcedError:
        out += loser + " is pushed into a forced error by " + winner + ". ";
        break;
    }

    const auto after = match::advance_point(score, outcome.point_winner);
    if (match::point_closes_game(score, outcome.point_winner))
    {
        if (match::is_terminal(after))
        {
            out += winner + " wins the match.";
        }
        else if (after.sets_won != score.sets_won)
        {
            out += winner + (score.in_tiebreak ? " takes the tiebreak and the set." : " takes the set.");
        }
        else
        {
            const auto w = match::index(outcome.point_winner);
            out += winner + (outcome.point_winner == score.server ? " holds serve for " : " breaks serve for ") +
                   std::to_string(after.games[w]) + "-" + std::to_string(after.games[1 - w]) + ".";
        }
    }
    else
    {
        out += "The score moves to " + points_phrase(after, info) + ".";
    }

    const auto won = table_row(memory_text, "serve_points_won");
    const auto played = table_row(memory_text, "serve_points");
    if (won && played)
    {
        const auto i = match::index(score.server);
        if ((*played)[i] > 0)
        {
            out += " " + server + " has won " + std::to_string((*won)[i]) + " of " + std::to_string((*played)[i]) +
                   " points on serve so far.";
        }
    }
    return out;
}

ClientReply MockClient::complete(const GenerationRequest& request)
{
    const auto& user = request.prompt.user_text;
    const auto block = metadata_section(user);
    if (!block)
    {
        throw PromptError(PromptErrc::RequestRejected, "mock client: request carries no metadata block");
    }
    const auto rally = parse_metadata(*block, m_config);
    const auto text = mock_commentary(rally, memory_section(user).value_or(std::string_view{}));
    ClientReply reply;
    reply.text = ordered_json::array({text}).dump();
    reply.usage.prompt_tokens = estimate_tokens(full_prompt_text(request.prompt)).count;
    reply.usage.completion_tokens = estimate_tokens(reply.text).count;
    return reply;
}

ordered_json wire_request(const GenerationRequest& request)
{
    ordered_json body;
    body["system"] = request.prompt.system_text;
    ordered_json messages = ordered_json::array();
    if (const auto& prior = request.prompt.prior_interaction)
    {
        messages.push_back({{"role", "user"}, {"content", prior->user_text}});
        messages.push_back({{"role", "assistant"}, {"content", prior->assistant_text}});
    }
    messages.push_back({{"role", "user"}, {"content", request.prompt.user_text}});
    body["messages"] = std::move(messages);
    if (request.hints.max_tokens)
    {
        body["max_tokens"] = *request.hints.max_tokens;
    }
    if (request.hints.temperature)
    {
        body["temperature"] = *request.hints.temperature;
    }
    return body;
}

std::string extract_commentary(std::string_view text)
{
    auto body = trim(text);
    if (body.substr(0, 3) == "```")
    {
        const auto newline = body.find('\n');
        const auto close = body.rfind("```");
        if (newline == std::string_view::npos || close <= newline)
        {
            malformed_response("unterminated code fence");
        }
        body = trim(body.substr(newline + 1, close - newline - 1));
    }
    const auto j = ordered_json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_array())
    {
        malformed_response("model output is not a JSON list");
    }
    if (j.size() != 1 || !j[0].is_string())
    {
        malformed_response("model output must hold exactly one commentary string");
    }
    auto commentary = j[0].get<std::string>();
    if (trim(commentary).empty())
    {
        malformed_response("model returned an empty commentary");
    }
    return commentary;
}

HttpClient::HttpClient(std::string url, std::string api_key, std::chrono::milliseconds timeout)
    : m_api_key(std::move(api_key)), m_timeout(timeout)
{
    static const std::regex pattern(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, pattern))
    {
        throw PromptError(PromptErrc::MissingCredential, "endpoint must be an http(s) URL: " + url);
    }
    m_origin = m[1].str();
    m_path = m[2].matched ? m[2].str() : "/";
}

std::unique_ptr<HttpClient> HttpClient::from_environment()
{
    const char* url = std::getenv("COMMENTARY_API_URL");
    const char* key = std::getenv("COMMENTARY_API_KEY");
    if (url == nullptr || *url == '\0')
    {
        throw PromptError(PromptErrc::MissingCredential, "COMMENTARY_API_URL is not set");
    }
    if (key == nullptr || *key == '\0')
    {
        throw PromptError(PromptErrc::MissingCredential, "COMMENTARY_API_KEY is not set");
    }
    return std::make_unique<HttpClient>(url, key);
}

ClientReply HttpClient::complete(const GenerationRequest& request)
{
    httplib::Client client(m_origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(m_timeout).count();
    client.set_connection_timeout(seconds);
    client.set_read_timeout(seconds);
    client.set_write_timeout(seconds);
    const httplib::Headers headers{{"Authorization", "Bearer " + m_api_key}};
    const auto result = client.Post(m_path, headers, wire_request(request).dump(), "application/json");
    if (!result)
    {
        throw PromptError(PromptErrc::TransportFailure, "request failed: " + httplib::to_string(result.error()));
    }
    if (result->status == 429 || result->status >= 500)
    {
        throw PromptError(PromptErrc::TransportFailure, "server answered HTTP " + std::to_string(result->status));
    }
    if (result->status != 200)
    {
        throw PromptError(PromptErrc::RequestRejected, "server answered HTTP " + std::to_string(result->status));
    }
    const auto j = ordered_json::parse(result->body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string())
    {
        malformed_response("response body lacks a \"text\" string");
    }
    ClientReply reply;
    reply.text = j["text"].get<std::string>();
    if (auto it = j.find("usage"); it != j.end() && it->is_object())
    {
        reply.usage.prompt_tokens = it->value("prompt_tokens", std::int64_t{0});
        reply.usage.completion_tokens = it->value("completion_tokens", std::int64_t{0});
    }
    return reply;
}

void redact(ordered_json& value, const std::vector<std::string>& secrets)
{
    if (value.is_string())
    {
        auto text = value.get<std::string>();
        for (const auto& secret : secrets)
        {
            if (secret.empty())
            {
                continue;
            }
            for (auto at = text.find(secret); at != std::string::npos; at = text.find(secret, at))
            {
                text.replace(at, secret.size(), "[REDACTED]");
                at += 10;
            }
        }
        value = text;
    }
    else if (value.is_structured())
    {
        for (auto& child : value)
        {
            redact(child, secrets);
        }
    }
}

void RequestLog::write(ordered_json entry, const std::vector<std::string>& secrets)
{
    redact(entry, secrets);
    const auto line = entry.dump();
    std::lock_guard lock(m_mutex);
    m_out << line << '\n';
    m_out.flush();
}

GenerationResponse generate(CommentaryClient& client, const GenerationRequest& request,
                            const GenerateOptions& options)
{
    const auto estimate = estimate_tokens(full_prompt_text(request.prompt)).count;
    if (estimate > options.token_cap)
    {
        throw PromptError(PromptErrc::BudgetExceeded, "prompt estimate " + std::to_string(estimate) +
                                                          " tokens exceeds the cap of " +
                                                          std::to_string(options.token_cap));
    }
    const auto secrets = client.secrets();
    auto log = [&](ordered_json entry) {
        if (options.log != nullptr)
        {
            options.log->write(std::move(entry), secrets);
        }
    };

    const auto started = std::chrono::steady_clock::now();
    auto backoff = options.initial_backoff;
    for (int attempt = 1;; ++attempt)
    {
        log({{"event", "request"},
             {"client", std::string(client.name())},
             {"attempt", attempt},
             {"body", wire_request(request)}});
        ClientReply reply;
        try
        {
            reply = client.complete(request);
        }
        catch (const PromptError& e)
        {
            log({{"event", "error"}, {"attempt", attempt}, {"message", e.what()}});
            if (e.code() != PromptErrc::TransportFailure || attempt > options.max_retries)
            {
                throw;
            }
            if (options.sleep)
            {
                options.sleep(backoff);
            }
            else
            {
                std::this_thread::sleep_for(backoff);
            }
            backoff *= 2;
            continue;
        }

        GenerationResponse response;
        response.latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        response.attempts = attempt;
        response.usage = reply.usage;
        log({{"event", "response"},
             {"attempt", attempt},
             {"text", reply.text},
             {"usage", {{"prompt_tokens", reply.usage.prompt_tokens}, {"completion_tokens", reply.usage.completion_tokens}}},
             {"latency_ms", response.latency_ms}});
        if (trim(reply.text).empty())
        {
            malformed_response("model returned empty text");
        }
        response.commentary = extract_commentary(reply.text);
        response.text = std::move(reply.text);
        return response;
    }
}

}  // namespace courtside::prompt
