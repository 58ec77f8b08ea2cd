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

// courtside: validate, replay, stats, evaluate, segment and simulate.

#include "courtside/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace courtside;
using nlohmann::ordered_json;

namespace {

enum Exit : int
{
    Ok = 0,
    ValidationFailure = 1,
    ConfigError = 2,
    ClientFailure = 3,
};

struct Flags
{
    std::string config;
    std::string input;
    std::string output;
    std::string client;
    std::optional<std::int64_t> k;
    std::optional<std::int64_t> token_cap;
    std::uint64_t seed{0};
    std::string log_requests;
    bool timing{false};
    bool quiet{false};
    // simulate
    std::size_t matches{1};
    std::size_t rallies{0};
    int best_of{0};
    // segment
    std::string flags_path;
    std::optional<double> theta;
    std::optional<double> gap;
    std::optional<int> min_hits;
    std::optional<double> padding;
    // evaluate
    std::string judge{"none"};
};

/// Output sink: the --output file when given, stdout otherwise.
class Sink
{
  public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty())
        {
            m_file.open(path);
            if (!m_file)
            {
                throw pipeline::PipelineError(pipeline::PipelineErrc::FileNotFound, "cannot write " + path);
            }
        }
    }
    std::ostream& out()
    {
        return m_file.is_open() ? static_cast<std::ostream&>(m_file) : std::cout;
    }

  private:
    std::ofstream m_file;
};

pipeline::PipelineConfig resolve(const Flags& f)
{
    auto c = f.config.empty() ? pipeline::PipelineConfig{} : pipeline::load_config(f.config);
    if (!f.input.empty())
        c.input = f.input;
    if (!f.output.empty())
        c.output = f.output;
    if (!f.client.empty())
        c.client = f.client == "http" ? pipeline::ClientKind::Http : pipeline::ClientKind::Mock;
    if (f.k)
    {
        if (*f.k < 1)
            throw pipeline::PipelineError(pipeline::PipelineErrc::InvalidConfig, "--k must be at least 1");
        c.k = static_cast<std::size_t>(*f.k);
    }
    if (f.token_cap)
        c.token_cap = *f.token_cap;
    if (!f.log_requests.empty())
        c.request_log = f.log_requests;
    if (f.best_of != 0)
        c.scoring.best_of = f.best_of;
    if (f.theta)
        c.segmentation.confidence_threshold = *f.theta;
    if (f.gap)
        c.segmentation.max_gap = *f.gap;
    if (f.min_hits)
        c.segmentation.min_hits = *f.min_hits;
    if (f.padding)
        c.segmentation.padding = *f.padding;
    if (f.quiet)
        c.log_level = "quiet";
    c.validate();
    return c;
}

void note(const pipeline::PipelineConfig& c, const std::string& message)
{
    if (c.log_level != "quiet")
    {
        std::cerr << "courtside: " << message << '\n';
    }
}

void require_input(const pipeline::PipelineConfig& c)
{
    if (c.input.empty())
    {
        throw pipeline::PipelineError(pipeline::PipelineErrc::InvalidConfig, "--input is required");
    }
}

ordered_json line_errors(const std::vector<pipeline::LineError>& errors)
{
    ordered_json out = ordered_json::array();
    for (const auto& e : errors)
    {
        out.push_back({{"line", e.line}, {"message", e.message}});
    }
    return out;
}

int cmd_validate(const pipeline::PipelineConfig& c)
{
    require_input(c);
    pipeline::DatasetReader reader(c.input, c.scoring);
    std::size_t valid = 0;
    while (reader.next())
    {
        ++valid;
    }
    ordered_json report;
    report["input"] = c.input;
    report["valid"] = valid;
    report["invalid"] = reader.errors().size();
    report["errors"] = line_errors(reader.errors());
    Sink sink(c.output);
    sink.out() << report.dump(2) << '\n';
    return reader.errors().empty() ? Ok : ValidationFailure;
}

int cmd_replay(const pipeline::PipelineConfig& c, bool timing)
{
    require_input(c);
    auto client = pipeline::make_client(c);
    std::ofstream log_file;
    std::optional<prompt::RequestLog> log;
    pipeline::ReplayOptions options;
    if (!c.request_log.empty())
    {
        log_file.open(c.request_log, std::ios::app);
        if (!log_file)
        {
            throw pipeline::PipelineError(pipeline::PipelineErrc::FileNotFound, "cannot write " + c.request_log);
        }
        log.emplace(log_file);
        options.generate.log = &*log;
    }

    pipeline::DatasetReader reader(c.input, c.scoring);
    pipeline::MatchReplayer replayer(*client, c, options);
    while (auto rally = reader.next())
    {
        const auto& r = replayer.step(*rally);
        if (!r.ok)
        {
            note(c, "rally " + std::to_string(r.index) + " (" + r.clip_id + ") failed: " + r.error);
        }
    }
    const auto report = replayer.finish();
    auto j = pipeline::run_report_to_json(report, timing);
    j["input_errors"] = line_errors(reader.errors());
    Sink sink(c.output);
    sink.out() << j.dump(2) << '\n';
    if (report.failures() > 0)
    {
        return ClientFailure;
    }
    return reader.errors().empty() ? Ok : ValidationFailure;
}

int cmd_stats(const pipeline::PipelineConfig& c)
{
    require_input(c);
    pipeline::DatasetReader reader(c.input, c.scoring);
    memory::MatchMemory m(c.k);
    std::optional<events::MatchInfo> info;
    std::int64_t index = 0;
    while (auto rally = reader.next())
    {
        if (!info)
        {
            info = rally->match_info;
        }
        else if (!(rally->match_info == *info))
        {
            throw pipeline::PipelineError(pipeline::PipelineErrc::MixedMatches,
                                          rally->clip_id + " belongs to a different match");
        }
        m.record(memory::make_entry(++index, std::move(*rally), std::nullopt));
    }
    m.flush();
    auto j = memory::stats_report(m.long_term(), info.value_or(events::MatchInfo{}));
    j["input_errors"] = line_errors(reader.errors());
    Sink sink(c.output);
    sink.out() << j.dump(2) << '\n';
    return reader.errors().empty() ? Ok : ValidationFailure;
}

int cmd_evaluate(const pipeline::PipelineConfig& c, const std::string& judge)
{
    require_input(c);
    std::ifstream in(c.input);
    if (!in)
    {
        throw pipeline::PipelineError(pipeline::PipelineErrc::FileNotFound, "cannot open " + c.input);
    }
    std::vector<pipeline::LineError> errors;
    const auto items = pipeline::read_evaluation_items(in, errors);
    std::vector<eval::CaptionPair> pairs;
    for (const auto& item : items)
    {
        pairs.push_back({item.prediction, item.references});
    }
    const auto metrics = eval::evaluate_corpus(pairs);

    std::vector<eval::JudgeScorecard> cards;
    std::unique_ptr<prompt::CommentaryClient> judge_client;
    if (judge == "mock")
    {
        judge_client = std::make_unique<eval::MockJudgeClient>();
    }
    else if (judge == "http")
    {
        judge_client = prompt::HttpClient::from_environment();
    }
    std::size_t judge_failures = 0;

    Sink sink(c.output);
    for (std::size_t i = 0; i < items.size(); ++i)
    {
        ordered_json row;
        row["clip_id"] = items[i].clip_id;
        row["bleu4"] = metrics.pairs[i].bleu4;
        row["rouge_l"] = metrics.pairs[i].rouge_l;
        row["cider"] = metrics.has_cider ? ordered_json(metrics.pairs[i].cider) : ordered_json(nullptr);
        if (judge_client)
        {
            prompt::GenerationRequest request;
            request.prompt = eval::build_judge_prompt(items[i].metadata.empty() ? "{}" : items[i].metadata,
                                                      items[i].references.front(), items[i].prediction);
            try
            {
                const auto reply = judge_client->complete(request);
                const auto card = eval::parse_scorecard(reply.text);
                cards.push_back(card);
                row["scorecard"] = eval::scorecard_to_json(card);
            }
            catch (const Error& e)
            {
                ++judge_failures;
                row["scorecard"] = nullptr;
                row["judge_error"] = e.what();
            }
        }
        sink.out() << row.dump() << '\n';
    }
    auto summary = eval::summary_to_json(eval::aggregate(cards, metrics.pairs));
    summary["metrics"]["has_cider"] = metrics.has_cider;
    summary["input_errors"] = line_errors(errors);
    summary["judge_failures"] = judge_failures;
    std::cerr << summary.dump(2) << '\n';
    if (judge_failures > 0)
    {
        return ClientFailure;
    }
    return errors.empty() ? Ok : ValidationFailure;
}

int cmd_segment(const pipeline::PipelineConfig& c, const std::string& flags_path)
{
    require_input(c);
    std::ifstream in(c.input);
    if (!in)
    {
        throw pipeline::PipelineError(pipeline::PipelineErrc::FileNotFound, "cannot open " + c.input);
    }
    const auto stream = segmentation::read_impacts(in);
    for (const auto& e : stream.errors)
    {
        note(c, "line " + std::to_string(e.line) + ": " + e.message);
    }
    auto intervals = segmentation::cluster_impacts(stream.events, c.segmentation);
    if (!flags_path.empty())
    {
        std::ifstream flags_in(flags_path);
        if (!flags_in)
        {
            throw pipeline::PipelineError(pipeline::PipelineErrc::FileNotFound, "cannot open " + flags_path);
        }
        const auto flags = segmentation::read_view_flags(flags_in);
        intervals = segmentation::filter_intervals(intervals, flags);
    }
    Sink sink(c.output);
    segmentation::write_intervals(sink.out(), intervals);
    return stream.errors.empty() ? Ok : ValidationFailure;
}

int cmd_simulate(const pipeline::PipelineConfig& c, const Flags& f)
{
    Sink sink(c.output);
    if (f.rallies > 0)
    {
        pipeline::write_dataset(sink.out(), pipeline::simulate_session(f.seed, f.rallies, c.scoring));
        return Ok;
    }
    if (f.matches == 1)
    {
        pipeline::write_dataset(sink.out(), pipeline::simulate_match(f.seed, c.scoring));
        return Ok;
    }
    for (const auto& m : pipeline::simulate_matches(f.seed, f.matches, c.scoring))
    {
        pipeline::write_dataset(sink.out(), m);
    }
    return Ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tennis commentary pipeline: validation, replay, statistics, evaluation, segmentation, simulation."};
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    app.add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--input", f.input, "Input file (JSONL)");
    app.add_option("--output", f.output, "Output file (default stdout)");
    app.add_option("--client", f.client, "Commentary client")->check(CLI::IsMember({"mock", "http"}));
    app.add_option("--k", f.k, "Short-term memory window");
    app.add_option("--token-cap", f.token_cap, "Prompt token budget");
    app.add_option("--seed", f.seed, "Simulation seed");
    app.add_option("--log-requests", f.log_requests, "Append redacted request/response JSONL here");
    app.add_flag("--quiet", f.quiet, "No diagnostics on stderr");

    auto* validate = app.add_subcommand("validate", "Schema-check a JSONL dataset");
    auto* replay = app.add_subcommand("replay", "Run the online commentary loop over one match");
    replay->add_flag("--timing", f.timing, "Include per-rally timings (not deterministic)");
    auto* stats = app.add_subcommand("stats", "Consolidated statistics for one match");
    auto* evaluate = app.add_subcommand("evaluate", "Text metrics and judge scorecards over predictions");
    evaluate->add_option("--judge", f.judge, "Judge client")->check(CLI::IsMember({"none", "mock", "http"}));
    auto* segment = app.add_subcommand("segment", "Cluster impact detections into rally intervals");
    segment->add_option("--flags", f.flags_path, "Per-interval view flags (JSONL)");
    segment->add_option("--theta", f.theta, "Confidence threshold");
    segment->add_option("--gap", f.gap, "Maximum gap between hits (s)");
    segment->add_option("--min-hits", f.min_hits, "Minimum hits per rally");
    segment->add_option("--padding", f.padding, "Boundary padding (s)");
    auto* simulate = app.add_subcommand("simulate", "Emit seeded synthetic matches as JSONL");
    simulate->add_option("--matches", f.matches, "Number of matches")->check(CLI::PositiveNumber);
    simulate->add_option("--rallies", f.rallies, "Exact rally count across consecutive matches");
    simulate->add_option("--best-of", f.best_of, "Sets per match (3 or 5)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? Ok : ConfigError;
    }

    try
    {
        const auto c = resolve(f);
        if (validate->parsed())
            return cmd_validate(c);
        if (replay->parsed())
            return cmd_replay(c, f.timing);
        if (stats->parsed())
            return cmd_stats(c);
        if (evaluate->parsed())
            return cmd_evaluate(c, f.judge);
        if (segment->parsed())
            return cmd_segment(c, f.flags_path);
        if (simulate->parsed())
            return cmd_simulate(c, f);
    }
    catch (const prompt::PromptError& e)
    {
        std::cerr << "courtside: " << e.what() << '\n';
        return e.code() == prompt::PromptErrc::MissingCredential ? ConfigError : ClientFailure;
    }
    catch (const pipeline::PipelineError& e)
    {
        std::cerr << "courtside: " << e.what() << '\n';
        return e.code() == pipeline::PipelineErrc::MixedMatches ? ValidationFailure : ConfigError;
    }
    catch (const segmentation::SegmentationError& e)
    {
        std::cerr << "courtside: " << e.what() << '\n';
        return e.code() == segmentation::SegmentationErrc::InvalidParams ? ConfigError : ValidationFailure;
    }
    catch (const Error& e)
    {
        std::cerr << "courtside: " << e.what() << '\n';
        return ValidationFailure;
    }
    return Ok;
}
