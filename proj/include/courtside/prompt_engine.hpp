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

#pragma once

#include "courtside/error.hpp"
#include "courtside/event_stream.hpp"
#include "courtside/memory.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace courtside::prompt {

enum class PromptErrc
{
    TransportFailure,
    RequestRejected,
    MalformedResponse,
    BudgetExceeded,
    MissingCredential,
    MalformedMetadata,
};

using PromptError = CodedError<PromptErrc>;

extern const std::string_view kCommentatorSystemPrompt;

struct PersonaConfig
{
    int min_words{5};
    int max_words{60};
};

/// One completed exchange kept as chat history.
struct Interaction
{
    std::string user_text;
    std::string assistant_text;

    bool operator==(const Interaction&) const = default;
};

struct PromptBundle
{
    std::string system_text;
    std::string user_text;
    std::optional<Interaction> prior_interaction;

    bool operator==(const PromptBundle&) const = default;
};

/// Everything the model reads, in order: system, prior user, prior reply, user.
std::string full_prompt_text(const PromptBundle& bundle);

struct TokenEstimate
{
    std::int64_t count{0};
    std::string_view method{"chars/4 heuristic"};
};

/// ceil(code points / 4). A model-agnostic proxy, not a tokenizer.
TokenEstimate estimate_tokens(std::string_view text) noexcept;

// Shot descriptions read "[left-handed ]<stroke>[ technique][ direction], <outcome>[, return touched]"
// where <stroke> is "first serve", "second serve", "forehand" or "backhand".
std::string shot_description(const events::ShotEvent& shot, match::Handedness handedness);

struct ParsedShotDescription
{
    events::Stroke stroke{events::Stroke::Serve};
    std::optional<events::ServeAttempt> serve_attempt;
    std::string technique;
    std::optional<events::Direction> direction;
    events::ShotOutcome outcome{events::ShotOutcome::In};
    bool return_touched{false};
    bool left_handed{false};
};

/// Throws PromptError(MalformedMetadata).
ParsedShotDescription parse_shot_description(std::string_view text);

nlohmann::ordered_json metadata_json(const events::RallyRecord& rally);

/// Compact single-line rendering of metadata_json.
std::string serialize_metadata(const events::RallyRecord& rally);

/// Inverse of serialize_metadata; the commentary is never part of the block.
/// Throws PromptError(MalformedMetadata).
events::RallyRecord parse_metadata(std::string_view text, const match::ScoringConfig& config = {});
events::RallyRecord metadata_from_json(const nlohmann::ordered_json& block, const match::ScoringConfig& config = {});

inline constexpr std::string_view kMissingCommentaryMarker = "[commentary unavailable]";

/// Recent-rally digest then the per-player statistics table.
std::string serialize_memory(const memory::ContextView& view, const events::MatchInfo& info);

/// Builds the user text for one rally. The prior interaction is whatever the
/// caller retained; only the most recent exchange is ever attached.
PromptBundle build_commentary_prompt(const events::RallyRecord& rally, const memory::ContextView& view,
                                     const std::optional<Interaction>& prior, const PersonaConfig& persona = {});

/// Pulls the metadata block back out of a commentary user prompt.
std::optional<std::string_view> metadata_section(std::string_view user_text) noexcept;
std::optional<std::string_view> memory_section(std::string_view user_text) noexcept;

struct DecodingHints
{
    std::optional<int> max_tokens;
    std::optional<double> temperature;
};

struct GenerationRequest
{
    PromptBundle prompt;
    DecodingHints hints;
};

struct Usage
{
    std::int64_t prompt_tokens{0};
    std::int64_t completion_tokens{0};
};

/// Raw model output as returned over the client boundary.
struct ClientReply
{
    std::string text;
    Usage usage;
};

struct GenerationResponse
{
    std::string text;
    /// The single commentary string extracted from `text`.
    std::string commentary;
    Usage usage;
    double latency_ms{0.0};
    int attempts{0};
};

/// Chat-completion wire body: {system, messages[], max_tokens?, temperature?}.
nlohmann::ordered_json wire_request(const GenerationRequest& request);

/// Accepts a JSON list holding exactly one non-empty string, optionally inside a
/// fenced code block. Throws PromptError(MalformedResponse).
std::string extract_commentary(std::string_view text);

class CommentaryClient
{
  public:
    virtual ~CommentaryClient() = default;
    virtual std::string_view name() const noexcept = 0;
    /// Throws PromptError: TransportFailure for retryable transport problems,
    /// RequestRejected or MalformedResponse otherwise.
    virtual ClientReply complete(const GenerationRequest& request) = 0;
    /// Strings that must never reach a request log.
    virtual std::vector<std::string> secrets() const
    {
        return {};
    }
};

/// Deterministic template commentary built from the metadata and statistics in
/// the request. Same request, same bytes.
class MockClient final : public CommentaryClient
{
  public:
    explicit MockClient(match::ScoringConfig config = {}) : m_config(config)
    {
    }
    std::string_view name() const noexcept override
    {
        return "mock";
    }
    ClientReply complete(const GenerationRequest& request) override;

  private:
    match::ScoringConfig m_config;
};

/// The plain commentary the mock wraps into its JSON list.
std::string mock_commentary(const events::RallyRecord& rally, std::string_view memory_text);

/// POSTs the wire body to an HTTP(S) endpoint and expects {text, usage}.
class HttpClient final : public CommentaryClient
{
  public:
    HttpClient(std::string url, std::string api_key, std::chrono::milliseconds timeout = std::chrono::seconds(60));

    /// Reads COMMENTARY_API_URL and COMMENTARY_API_KEY; throws PromptError(MissingCredential).
    static std::unique_ptr<HttpClient> from_environment();

    std::string_view name() const noexcept override
    {
        return "http";
    }
    ClientReply complete(const GenerationRequest& request) override;
    std::vector<std::string> secrets() const override
    {
        return {m_api_key};
    }

  private:
    std::string m_origin;
    std::string m_path;
    std::string m_api_key;
    std::chrono::milliseconds m_timeout;
};

/// JSONL request/response log; safe to share between threads.
class RequestLog
{
  public:
    explicit RequestLog(std::ostream& out) : m_out(out)
    {
    }
    void write(nlohmann::ordered_json entry, const std::vector<std::string>& secrets);

  private:
    std::ostream& m_out;
    std::mutex m_mutex;
};

/// Replaces every occurrence of each secret in every string of `value`.
void redact(nlohmann::ordered_json& value, const std::vector<std::string>& secrets);

struct GenerateOptions
{
    std::int64_t token_cap{16000};
    int max_retries{3};
    std::chrono::milliseconds initial_backoff{500};
    std::function<void(std::chrono::milliseconds)> sleep;
    RequestLog* log{nullptr};
};

/// Budget check, then the client call with bounded retries on transport failures.
GenerationResponse generate(CommentaryClient& client, const GenerationRequest& request,
                            const GenerateOptions& options = {});

}  // namespace courtside::prompt
