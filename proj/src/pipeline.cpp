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

#include <chrono>
#include <exception>
#include <set>

namespace courtside::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

[[noreturn]] void config_error(const std::string& message)
{
    throw PipelineError(PipelineErrc::InvalidConfig, message);
}

std::string_view error_name(prompt::PromptErrc code)
{
    switch (code)
    {
    case prompt::PromptErrc::TransportFailure:
        return "transport_failure";
    case prompt::PromptErrc::RequestRejected:
        return "request_rejected";
    case prompt::PromptErrc::MalformedResponse:
        return "malformed_response";
    case prompt::PromptErrc::BudgetExceeded:
        return "budget_exceeded";
    case prompt::PromptErrc::MissingCredential:
        return "missing_credential";
    case prompt::PromptErrc::MalformedMetadata:
        return "malformed_metadata";
    }
    return "unknown";
}

template <typename T>
void read_field(const json& object, const char* key, T& into, const std::string& path)
{
    const auto it = object.find(key);
    if (it == object.end())
    {
        return;
    }
    try
    {
        into = it->get<T>();
    }
    catch (const json::exception&)
    {
        config_error(path + key + " has the wrong type");
    }
}

void reject_unknown(const json& object, std::initializer_list<std::string_view> known, const std::string& path)
{
    for (const auto& [key, value] : object.items())
    {
        if (std::find(known.begin(), known.end(), key) == known.end())
        {
            config_error("unknown config key " + path + key);
        }
    }
}

bool looks_like_credential(std::string_view key)
{
    for (std::string_view bad : {"api_key", "apikey", "key", "secret", "password", "credential", "authorization"})
    {
        if (key.find(bad) != std::string_view::npos)
        {
            return true;
        }
    }
    return false;
}

}  // namespace

void PipelineConfig::validate() const
{
    try
    {
        scoring.validate();
    }
    catch (const match::MatchError& e)
    {
        config_error(std::string("scoring: ") + e.what());
    }
    try
    {
        segmentation.validate();
    }
    catch (const segmentation::SegmentationError& e)
    {
        config_error(std::string("segmentation: ") + e.what());
    }
    if (k < 1)
    {
        config_error("k must be at least 1");
    }
    if (token_cap <= 0)
    {
        config_error("token_cap must be positive");
    }
    if (persona.min_words < 1 || persona.max_words < persona.min_words)
    {
        config_error("persona word bounds must satisfy 1 <= min_words <= max_words");
    }
}

PipelineConfig config_from_json(const json& object, PipelineConfig base)
{
    if (!object.is_object())
    {
        config_error("config must be a JSON object");
    }
    for (const auto& [key, value] : object.items())
    {
        if (looks_like_credential(key))
        {
            config_error("config key '" + key + "' looks like a credential; set COMMENTARY_API_KEY instead");
        }
    }
    reject_unknown(object,
                   {"scoring", "k", "token_cap", "client", "persona", "segmentation", "input", "output", "log_level",
                    "request_log"},
                   "");
    if (const auto it = object.find("scoring"); it != object.end())
    {
        reject_unknown(*it, {"best_of", "tiebreak_trigger_games", "tiebreak_target", "final_set_tiebreak_target",
                             "ad_scoring"},
                       "scoring.");
        read_field(*it, "best_of", base.scoring.best_of, "scoring.");
        read_field(*it, "tiebreak_trigger_games", base.scoring.tiebreak_trigger_games, "scoring.");
        read_field(*it, "tiebreak_target", base.scoring.tiebreak_target, "scoring.");
        read_field(*it, "final_set_tiebreak_target", base.scoring.final_set_tiebreak_target, "scoring.");
        read_field(*it, "ad_scoring", base.scoring.ad_scoring, "scoring.");
    }
    if (const auto it = object.find("persona"); it != object.end())
    {
        reject_unknown(*it, {"min_words", "max_words"}, "persona.");
        read_field(*it, "min_words", base.persona.min_words, "persona.");
        read_field(*it, "max_words", base.persona.max_words, "persona.");
    }
    if (const auto it = object.find("segmentation"); it != object.end())
    {
        reject_unknown(*it, {"confidence_threshold", "max_gap", "min_hits", "padding"}, "segmentation.");
        read_field(*it, "confidence_threshold", base.segmentation.confidence_threshold, "segmentation.");
        read_field(*it, "max_gap", base.segmentation.max_gap, "segmentation.");
        read_field(*it, "min_hits", base.segmentation.min_hits, "segmentation.");
        read_field(*it, "padding", base.segmentation.padding, "segmentation.");
    }
    std::int64_t k = static_cast<std::int64_t>(base.k);
    read_field(object, "k", k, "");
    if (k < 1)
    {
        config_error("k must be at least 1");
    }
    base.k = static_cast<std::size_t>(k);
    read_field(object, "token_cap", base.token_cap, "");
    std::string client = base.client == ClientKind::Mock ? "mock" : "http";
    read_field(object, "client", client, "");
    if (client == "mock")
    {
        base.client = ClientKind::Mock;
    }
    else if (client == "http")
    {
        base.client = ClientKind::Http;
    }
    else
    {
        config_error("client must be mock or http");
    }
    read_field(object, "input", base.input, "");
    read_field(object, "output", base.output, "");
    read_field(object, "log_level", base.log_level, "");
    read_field(object, "request_log", base.request_log, "");
    base.validate();
    return base;
}

PipelineConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw PipelineError(PipelineErrc::FileNotFound, "cannot open config " + path.string());
    }
    const auto j = json::parse(in, nullptr, false);
    if (j.is_discarded())
    {
        config_error(path.string() + " is not valid JSON");
    }
    return config_from_json(j);
}

ordered_json config_to_json(const PipelineConfig& c)
{
    ordered_json j;
    j["scoring"] = {{"best_of", c.scoring.best_of},
                    {"tiebreak_trigger_games", c.scoring.tiebreak_trigger_games},
                    {"tiebreak_target", c.scoring.tiebreak_target},
                    {"final_set_tiebreak_target", c.scoring.final_set_tiebreak_target},
                    {"ad_scoring", c.scoring.ad_scoring}};
    j["k"] = c.k;
    j["token_cap"] = c.token_cap;
    j["client"] = c.client == ClientKind::Mock ? "mock" : "http";
    j["persona"] = {{"min_words", c.persona.min_words}, {"max_words", c.persona.max_words}};
    j["segmentation"] = {{"confidence_threshold", c.segmentation.confidence_threshold},
                         {"max_gap", c.segmentation.max_gap},
                         {"min_hits", c.segmentation.min_hits},
                         {"padding", c.segmentation.padding}};
    j["input"] = c.input;
    j["output"] = c.output;
    j["log_level"] = c.log_level;
    j["request_log"] = c.request_log;
    return j;
}

std::unique_ptr<prompt::CommentaryClient> make_client(const PipelineConfig& config)
{
    if (config.client == ClientKind::Http)
    {
        return prompt::HttpClient::from_environment();
    }
    return std::make_unique<prompt::MockClient>(config.scoring);
}

std::vector<std::string> record_violations(const events::RallyRecord& rally)
{
    return events::validate_rally(rally).violations;
}

DatasetReader::DatasetReader(const std::filesystem::path& path, match::ScoringConfig config)
    : m_in(path), m_config(config)
{
    if (!m_in)
    {
        throw PipelineError(PipelineErrc::FileNotFound, "cannot open " + path.string());
    }
}

std::optional<events::RallyRecord> DatasetReader::next()
{
    std::string line;
    while (std::getline(m_in, line))
    {
        ++m_line;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
        {
            continue;
        }
        const auto j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded())
        {
            m_errors.push_back({m_line, "not valid JSON"});
            continue;
        }
        events::RallyRecord rally;
        try
        {
            rally = events::rally_from_json(j, m_config);
        }
        catch (const Error& e)
        {
            m_errors.push_back({m_line, e.what()});
            continue;
        }
        const auto violations = record_violations(rally);
        if (!violations.empty())
        {
            std::string message;
            for (const auto& v : violations)
            {
                message += (message.empty() ? "" : "; ") + v;
            }
            m_errors.push_back({m_line, message});
            continue;
        }
        return rally;
    }
    return std::nullopt;
}

Dataset load_dataset(const std::filesystem::path& path, const match::ScoringConfig& config)
{
    DatasetReader reader(path, config);
    Dataset out;
    while (auto r = reader.next())
    {
        out.records.push_back(std::move(*r));
    }
    out.errors = reader.errors();
    return out;
}

void write_dataset(std::ostream& out, std::span<const events::RallyRecord> records)
{
    for (const auto& r : records)
    {
        out << events::rally_to_json(r).dump() << '\n';
    }
}

std::size_t RunReport::failures() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(rallies.begin(), rallies.end(), [](const RallyReport& r) { return !r.ok; }));
}

MatchReplayer::MatchReplayer(prompt::CommentaryClient& client, const PipelineConfig& config, ReplayOptions options)
    : m_client(client), m_config(config), m_options(std::move(options)), m_memory(config.k)
{
    m_config.validate();
    m_options.generate.token_cap = m_config.token_cap;
}

const RallyReport& MatchReplayer::step(const events::RallyRecord& rally)
{
    const auto start = Clock::now();
    if (m_index == 0)
    {
        m_report.match_info = rally.match_info;
    }
    else if (!(rally.match_info == m_report.match_info))
    {
        throw PipelineError(PipelineErrc::MixedMatches, rally.clip_id + " belongs to a different match");
    }
    ++m_index;

    RallyReport out;
    out.index = m_index;
    out.clip_id = rally.clip_id;

    const auto view = memory::memory_snapshot(m_memory);
    prompt::GenerationRequest request;
    request.prompt = prompt::build_commentary_prompt(rally, view, m_prior, m_config.persona);
    out.prompt_tokens = prompt::estimate_tokens(prompt::full_prompt_text(request.prompt)).count;

    const auto client_start = Clock::now();
    try
    {
        const auto response = prompt::generate(m_client, request, m_options.generate);
        out.ok = true;
        out.commentary = response.commentary;
        out.attempts = response.attempts;
        m_prior = prompt::Interaction{request.prompt.user_text, response.text};
    }
    catch (const prompt::PromptError& e)
    {
        out.error = std::string(error_name(e.code())) + ": " + e.what();
    }
    out.client_ms = ms_since(client_start);

    if (out.ok)
    {
        out.sanity = eval::sanity_check(*out.commentary, rally);
        if (rally.commentary && !rally.commentary->empty())
        {
            m_pairs.push_back({*out.commentary, {*rally.commentary}});
        }
    }
    m_memory.record(memory::make_entry(m_index, rally, out.commentary));

    out.engine_ms = ms_since(start) - out.client_ms;
    m_report.rallies.push_back(std::move(out));
    return m_report.rallies.back();
}

RunReport MatchReplayer::finish()
{
    m_memory.flush();
    m_report.final_memory = m_memory.long_term();
    if (!m_pairs.empty())
    {
        const auto metrics = eval::evaluate_corpus(m_pairs, eval::Execution::Serial);
        std::vector<eval::SanityReport> sanity;
        for (const auto& r : m_report.rallies)
        {
            if (r.sanity)
            {
                sanity.push_back(*r.sanity);
            }
        }
        auto summary = eval::aggregate({}, metrics.pairs, sanity);
        if (!metrics.has_cider)
        {
            summary.cider = 0.0;
        }
        m_report.evaluation = summary;
    }
    return std::move(m_report);
}

RunReport replay_match(std::span<const events::RallyRecord> records, prompt::CommentaryClient& client,
                       const PipelineConfig& config, ReplayOptions options)
{
    MatchReplayer replayer(client, config, std::move(options));
    for (const auto& r : records)
    {
        replayer.step(r);
    }
    return replayer.finish();
}

ordered_json run_report_to_json(const RunReport& report, bool with_timing)
{
    ordered_json rallies = ordered_json::array();
    std::int64_t max_tokens = 0;
    std::size_t checked = 0;
    std::size_t passed = 0;
    for (const auto& r : report.rallies)
    {
        ordered_json j;
        j["index"] = r.index;
        j["clip_id"] = r.clip_id;
        j["prompt_tokens"] = r.prompt_tokens;
        j["status"] = r.ok ? "ok" : "failed";
        j["attempts"] = r.attempts;
        j["commentary"] = r.commentary ? ordered_json(*r.commentary) : ordered_json(nullptr);
        if (!r.ok)
        {
            j["error"] = r.error;
        }
        if (r.sanity)
        {
            ordered_json violations = ordered_json::array();
            for (const auto& v : r.sanity->violations)
            {
                violations.push_back({{"kind", eval::to_string(v.kind)}, {"detail", v.detail}});
            }
            j["sanity"] = {{"passed", r.sanity->passed}, {"violations", std::move(violations)}};
            ++checked;
            passed += r.sanity->passed ? 1 : 0;
        }
        else
        {
            j["sanity"] = nullptr;
        }
        if (with_timing)
        {
            j["timing"] = {{"engine_ms", r.engine_ms}, {"client_ms", r.client_ms}};
        }
        max_tokens = std::max(max_tokens, r.prompt_tokens);
        rallies.push_back(std::move(j));
    }

    ordered_json out;
    out["match_info"] = events::match_info_to_json(report.match_info);
    out["summary"] = {{"rallies", report.rallies.size()},
                      {"failures", report.failures()},
                      {"max_prompt_tokens", max_tokens},
                      {"sanity_checked", checked},
                      {"sanity_passed", passed}};
    out["rallies"] = std::move(rallies);
    out["final_memory"] = memory::stats_report(report.final_memory, report.match_info);
    if (report.evaluation)
    {
        out["evaluation"] = eval::summary_to_json(*report.evaluation);
    }
    return out;
}

std::vector<RunReport> replay_matches(std::span<const std::vector<events::RallyRecord>> matches,
                                      const ClientFactory& make, const PipelineConfig& config, Execution execution)
{
    std::vector<RunReport> out(matches.size());
    std::vector<std::exception_ptr> failures(matches.size());
    const auto count = static_cast<long>(matches.size());
    auto one = [&](long i) {
        const auto at = static_cast<std::size_t>(i);
        try
        {
            auto client = make();
            out[at] = replay_match(matches[at], *client, config);
        }
        catch (...)
        {
            failures[at] = std::current_exception();
        }
    };
    if (execution == Execution::Parallel)
    {
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < count; ++i)
        {
            one(i);
        }
    }
    else
    {
        for (long i = 0; i < count; ++i)
        {
            one(i);
        }
    }
    for (const auto& f : failures)
    {
        if (f)
        {
            std::rethrow_exception(f);
        }
    }
    return out;
}

std::vector<EvaluationItem> read_evaluation_items(std::istream& in, std::vector<LineError>& errors)
{
    std::vector<EvaluationItem> out;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number)
    {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
        {
            continue;
        }
        const auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
        {
            errors.push_back({number, "not a JSON object"});
            continue;
        }
        EvaluationItem item;
        const auto id = j.find("clip_id");
        const auto pred = j.find("prediction");
        const auto ref = j.find("reference");
        if (id == j.end() || !id->is_string())
        {
            errors.push_back({number, "clip_id: missing or not a string"});
            continue;
        }
        if (pred == j.end() || !pred->is_string())
        {
            errors.push_back({number, "prediction: missing or not a string"});
            continue;
        }
        item.clip_id = id->get<std::string>();
        item.prediction = pred->get<std::string>();
        if (ref != j.end() && ref->is_string())
        {
            item.references.push_back(ref->get<std::string>());
        }
        else if (ref != j.end() && ref->is_array() &&
                 std::all_of(ref->begin(), ref->end(), [](const json& v) { return v.is_string(); }) && !ref->empty())
        {
            item.references = ref->get<std::vector<std::string>>();
        }
        else
        {
            errors.push_back({number, "reference: missing, or not a string or list of strings"});
            continue;
        }
        if (const auto meta = j.find("metadata"); meta != j.end())
        {
            item.metadata = meta->is_string() ? meta->get<std::string>() : meta->dump();
        }
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace courtside::pipeline
