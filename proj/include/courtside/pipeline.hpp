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

#include "courtside/evaluation.hpp"
#include "courtside/memory.hpp"
#include "courtside/prompt_engine.hpp"
#include "courtside/segmentation.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace courtside::pipeline {

enum class PipelineErrc
{
    FileNotFound,
    SchemaViolation,
    InvalidConfig,
    MixedMatches,
};

using PipelineError = CodedError<PipelineErrc>;

enum class ClientKind
{
    Mock,
    Http,
};

struct PipelineConfig
{
    match::ScoringConfig scoring;
    std::size_t k{memory::kDefaultCapacity};
    std::int64_t token_cap{16000};
    ClientKind client{ClientKind::Mock};
    prompt::PersonaConfig persona;
    segmentation::SegmentationParams segmentation;
    std::string input;
    std::string output;
    std::string log_level{"info"};
    std::string request_log;

    /// Throws PipelineError(InvalidConfig).
    void validate() const;
};

/// Reads a JSON config file; keys absent from the file keep their defaults.
/// Credentials are refused here and only ever come from the environment.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const nlohmann::json& object, PipelineConfig base = {});
nlohmann::ordered_json config_to_json(const PipelineConfig& config);

std::unique_ptr<prompt::CommentaryClient> make_client(const PipelineConfig& config);

struct LineError
{
    std::size_t line{0};
    std::string message;
};

/// Streams validated records from a JSONL file, one line in memory at a time.
class DatasetReader
{
  public:
    /// Throws PipelineError(FileNotFound).
    explicit DatasetReader(const std::filesystem::path& path, match::ScoringConfig config = {});

    /// Next valid record in file order; malformed lines are skipped and collected.
    std::optional<events::RallyRecord> next();

    const std::vector<LineError>& errors() const noexcept
    {
        return m_errors;
    }
    std::size_t lines_read() const noexcept
    {
        return m_line;
    }

  private:
    std::ifstream m_in;
    match::ScoringConfig m_config;
    std::size_t m_line{0};
    std::vector<LineError> m_errors;
};

struct Dataset
{
    std::vector<events::RallyRecord> records;
    std::vector<LineError> errors;
};

Dataset load_dataset(const std::filesystem::path& path, const match::ScoringConfig& config = {});

/// Schema, rally and scoreboard checks for one parsed JSON line.
std::vector<std::string> record_violations(const events::RallyRecord& rally);

void write_dataset(std::ostream& out, std::span<const events::RallyRecord> records);

struct RallyReport
{
    std::int64_t index{0};
    std::string clip_id;
    std::int64_t prompt_tokens{0};
    bool ok{false};
    std::optional<std::string> commentary;
    std::string error;
    int attempts{0};
    /// Absent when generation failed.
    std::optional<eval::SanityReport> sanity;
    /// Everything except the client call. Excluded from deterministic output.
    double engine_ms{0.0};
    double client_ms{0.0};
};

struct RunReport
{
    events::MatchInfo match_info;
    std::vector<RallyReport> rallies;
    memory::LongTermMemory final_memory;
    std::optional<eval::CorpusSummary> evaluation;

    std::size_t failures() const noexcept;
};

struct ReplayOptions
{
    prompt::GenerateOptions generate;
};

/// The online loop for one match: snapshot, prompt, generate, check, remember.
class MatchReplayer
{
  public:
    MatchReplayer(prompt::CommentaryClient& client, const PipelineConfig& config, ReplayOptions options = {});

    /// Throws PipelineError(MixedMatches) when the record's match differs from the first.
    const RallyReport& step(const events::RallyRecord& rally);

    /// Flushes the window into long-term memory and hands over the report.
    RunReport finish();

    const memory::MatchMemory& memory() const noexcept
    {
        return m_memory;
    }

  private:
    prompt::CommentaryClient& m_client;
    PipelineConfig m_config;
    ReplayOptions m_options;
    memory::MatchMemory m_memory;
    std::optional<prompt::Interaction> m_prior;
    RunReport m_report;
    std::vector<eval::CaptionPair> m_pairs;
    std::int64_t m_index{0};
};

RunReport replay_match(std::span<const events::RallyRecord> records, prompt::CommentaryClient& client,
                       const PipelineConfig& config, ReplayOptions options = {});

/// Timing fields are left out unless asked for, so equal runs serialize identically.
nlohmann::ordered_json run_report_to_json(const RunReport& report, bool with_timing = false);

/// One complete seeded match: legal rallies scored by advance_point until a winner.
std::vector<events::RallyRecord> simulate_match(std::uint64_t seed, const match::ScoringConfig& config = {});

/// At least `rallies` points between the same two players, starting a fresh
/// match whenever one is decided, truncated to exactly `rallies`.
std::vector<events::RallyRecord> simulate_session(std::uint64_t seed, std::size_t rallies,
                                                  const match::ScoringConfig& config = {});

enum class Execution
{
    Serial,
    Parallel,
};

std::vector<std::vector<events::RallyRecord>> simulate_matches(std::uint64_t seed, std::size_t count,
                                                               const match::ScoringConfig& config = {},
                                                               Execution execution = Execution::Parallel);

using ClientFactory = std::function<std::unique_ptr<prompt::CommentaryClient>()>;

/// One match per worker, each with its own client.
std::vector<RunReport> replay_matches(std::span<const std::vector<events::RallyRecord>> matches,
                                      const ClientFactory& make, const PipelineConfig& config,
                                      Execution execution = Execution::Parallel);

/// Evaluation over {clip_id, prediction, reference} JSONL; "reference" may be a
/// list and an optional "metadata" (string or object) feeds the judge prompt.
struct EvaluationItem
{
    std::string clip_id;
    std::string metadata;
    std::string prediction;
    std::vector<std::string> references;
};

std::vector<EvaluationItem> read_evaluation_items(std::istream& in, std::vector<LineError>& errors);

}  // namespace courtside::pipeline
