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

#include <algorithm>
#include <cmath>
#include <numeric>

namespace courtside::eval {

using nlohmann::ordered_json;

const std::string_view kJudgeSystemPrompt =
    R"(You are a senior Tennis Analyst and expert commentator evaluator. Your task is to evaluate a **Generated Commentary** against strict **Match Metadata** and a **Reference Commentary** (Ground Truth).)";

const std::string_view kJudgeUserTemplate = R"(### INPUT DATA:
1. **METADATA (Ground Truth):** {metadata}
2. **REFERENCE COMMENTARY (Style/Tone Baseline):** "{reference}"
3. **PREDICTION (Target to Evaluate):** "{prediction}"

### SCORING RUBRIC (0-20 points per category, Total 100):
1. **ACCURACY (0-20 pts):** Alignment with METADATA (players, shot types, score, court positions).
   - 20: Perfect factual match.
   - 0: Hallucinations (wrong player, wrong shot) or contradictions with Metadata.
2. **COHERENCE (0-20 pts):** Logical flow and pronoun usage.
   - 20: Natural narrative; events connect logically.
   - 0: Confusing structure; contradictions within the text.
3. **EXCITEMENT (0-20 pts):** Tone matches the event intensity.
   - 20: Highly engaging; emotive vocabulary fitting the moment.
   - 0: Robotic, flat, or mismatched tone (e.g., boring description of a winner).
4. **PROFESSIONALISM (0-20 pts):** Domain terminology and depth of analysis.
   - 20: Insightful observation (e.g., noting "inside-out forehand" or "tactical adjustment").
   - 0: Superficial or generic description only.
5. **PACING (0-20 pts):** Length relative to event complexity.
   - 20: Concise for quick points; descriptive for long rallies.
   - 0: Severe mismatch (e.g., long paragraph for a simple double fault).

### OUTPUT INSTRUCTION:
Provide your evaluation **strictly** as a Python dictionary string (JSON compatible). 
Do NOT output any markdown or conversational text. 
The dictionary must have the following keys:
{
    "scores": {
        "accuracy": <int>,
        "coherence": <int>,
        "excitement": <int>,
        "professionalism": <int>,
        "pacing": <int>
    },
    "total_score": <int>
})";

namespace {

constexpr std::string_view kSlots[] = {"{metadata}", "{reference}", "{prediction}"};

constexpr std::string_view kCriteria[] = {"accuracy", "coherence", "excitement", "professionalism", "pacing"};

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
    {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string_view strip_fence(std::string_view s)
{
    s = trim(s);
    if (s.rfind("```", 0) != 0)
    {
        return s;
    }
    const auto nl = s.find('\n');
    const auto close = s.rfind("```");
    if (nl == std::string_view::npos || close <= nl)
    {
        return s;
    }
    return trim(s.substr(nl + 1, close - nl - 1));
}

ordered_json parse_dict(std::string_view text)
{
    auto j = ordered_json::parse(text, nullptr, false);
    if (!j.is_discarded())
    {
        return j;
    }
    // Python dict literals quote with apostrophes.
    std::string swapped(text);
    std::replace(swapped.begin(), swapped.end(), '\'', '"');
    return ordered_json::parse(swapped, nullptr, false);
}

int criterion(const ordered_json& scores, std::string_view key)
{
    const auto it = scores.find(std::string(key));
    if (it == scores.end())
    {
        throw EvalError(EvalErrc::MissingKey, "judge output lacks scores." + std::string(key));
    }
    if (!it->is_number_integer())
    {
        throw EvalError(EvalErrc::UnparsableOutput, "scores." + std::string(key) + " is not an integer");
    }
    const auto v = it->get<long long>();
    if (v < 0 || v > kCriterionMax)
    {
        throw EvalError(EvalErrc::CriterionOutOfRange,
                        "scores." + std::string(key) + " = " + std::to_string(v) + " is outside 0-20");
    }
    return static_cast<int>(v);
}

std::string between(std::string_view text, std::string_view open, std::string_view close)
{
    const auto b = text.find(open);
    if (b == std::string_view::npos)
    {
        return {};
    }
    const auto start = b + open.size();
    const auto e = text.find(close, start);
    return std::string(text.substr(start, e == std::string_view::npos ? std::string_view::npos : e - start));
}

int count_words(std::string_view s)
{
    return static_cast<int>(tokenize(s).size());
}

int count_phrases(const std::string& folded, std::span<const std::string_view> phrases)
{
    int n = 0;
    for (auto p : phrases)
    {
        for (auto at = folded.find(p); at != std::string::npos; at = folded.find(p, at + 1))
        {
            ++n;
        }
    }
    return n;
}

constexpr std::string_view kEmotive[] = {"stunning", "brilliant", "incredible", "superb", "what a", "huge",
                                         "magnificent", "terrific", "remarkable", "sensational"};

constexpr std::string_view kTerminology[] = {"forehand", "backhand", "volley", "slice", "lob", "drop shot",
                                             "smash", "cross-court", "down the line", "inside-out", "ace",
                                             "double fault", "unforced error", "forced error", "second serve",
                                             "break point", "tiebreak", "deuce"};

int clamp_score(int v)
{
    return std::clamp(v, 0, kCriterionMax);
}

double mean_of(std::span<const JudgeScorecard> cards, int JudgeScorecard::*field)
{
    double sum = 0.0;
    for (const auto& c : cards)
    {
        sum += c.*field;
    }
    return cards.empty() ? 0.0 : sum / static_cast<double>(cards.size());
}

}  // namespace

prompt::PromptBundle build_judge_prompt(std::string_view metadata, std::string_view reference,
                                        std::string_view prediction)
{
    const std::string_view values[] = {metadata, reference, prediction};
    std::string out;
    std::string_view rest = kJudgeUserTemplate;
    // One left-to-right pass, so placeholder text inside a value is never expanded.
    while (!rest.empty())
    {
        std::size_t best = std::string_view::npos;
        std::size_t which = 0;
        for (std::size_t i = 0; i < 3; ++i)
        {
            const auto at = rest.find(kSlots[i]);
            if (at < best)
            {
                best = at;
                which = i;
            }
        }
        if (best == std::string_view::npos)
        {
            out += rest;
            break;
        }
        out += rest.substr(0, best);
        out += values[which];
        rest.remove_prefix(best + kSlots[which].size());
    }
    prompt::PromptBundle bundle;
    bundle.system_text = std::string(kJudgeSystemPrompt);
    bundle.user_text = std::move(out);
    return bundle;
}

JudgeScorecard parse_scorecard(std::string_view judge_output)
{
    const auto body = strip_fence(judge_output);
    if (body.empty())
    {
        throw EvalError(EvalErrc::UnparsableOutput, "judge output is empty");
    }
    const auto j = parse_dict(body);
    if (j.is_discarded() || !j.is_object())
    {
        throw EvalError(EvalErrc::UnparsableOutput, "judge output is not a dictionary");
    }
    const auto scores = j.find("scores");
    if (scores == j.end())
    {
        throw EvalError(EvalErrc::MissingKey, "judge output lacks scores");
    }
    if (!scores->is_object())
    {
        throw EvalError(EvalErrc::UnparsableOutput, "scores is not a dictionary");
    }
    JudgeScorecard card;
    card.accuracy = criterion(*scores, "accuracy");
    card.coherence = criterion(*scores, "coherence");
    card.excitement = criterion(*scores, "excitement");
    card.professionalism = criterion(*scores, "professionalism");
    card.pacing = criterion(*scores, "pacing");
    card.total = card.accuracy + card.coherence + card.excitement + card.professionalism + card.pacing;

    const auto total = j.find("total_score");
    if (total == j.end())
    {
        throw EvalError(EvalErrc::MissingKey, "judge output lacks total_score");
    }
    if (!total->is_number_integer())
    {
        throw EvalError(EvalErrc::UnparsableOutput, "total_score is not an integer");
    }
    card.corrected = total->get<long long>() != card.total;
    return card;
}

std::string render(const JudgeScorecard& card)
{
    ordered_json scores;
    scores["accuracy"] = card.accuracy;
    scores["coherence"] = card.coherence;
    scores["excitement"] = card.excitement;
    scores["professionalism"] = card.professionalism;
    scores["pacing"] = card.pacing;
    ordered_json j;
    j["scores"] = std::move(scores);
    j["total_score"] = card.total;
    return j.dump();
}

prompt::ClientReply MockJudgeClient::complete(const prompt::GenerationRequest& request)
{
    const auto& user = request.prompt.user_text;
    const auto reference = between(user, "**REFERENCE COMMENTARY (Style/Tone Baseline):** \"",
                                   "\"\n3. **PREDICTION");
    const auto prediction = between(user, "**PREDICTION (Target to Evaluate):** \"", "\"\n\n### SCORING RUBRIC");
    const auto folded = fold(prediction);
    const auto trimmed = trim(prediction);

    JudgeScorecard card;
    card.accuracy = clamp_score(static_cast<int>(std::lround(kCriterionMax * rouge_l(prediction, reference))));
    if (!trimmed.empty())
    {
        const char last = trimmed.back();
        card.coherence = (last == '.' || last == '!' || last == '?') ? kCriterionMax : kCriterionMax / 2;
    }
    const int exclaims = static_cast<int>(std::count(prediction.begin(), prediction.end(), '!'));
    card.excitement = trimmed.empty() ? 0 : clamp_score(8 + 4 * std::min(exclaims, 2) + 2 * count_phrases(folded, kEmotive));
    card.professionalism = clamp_score(4 * count_phrases(folded, kTerminology));
    card.pacing = trimmed.empty() ? 0 : clamp_score(kCriterionMax - std::abs(count_words(prediction) - count_words(reference)));
    card.total = card.accuracy + card.coherence + card.excitement + card.professionalism + card.pacing;

    prompt::ClientReply reply;
    reply.text = render(card);
    reply.usage.prompt_tokens = prompt::estimate_tokens(prompt::full_prompt_text(request.prompt)).count;
    reply.usage.completion_tokens = prompt::estimate_tokens(reply.text).count;
    return reply;
}

CorpusSummary aggregate(std::span<const JudgeScorecard> scorecards, std::span<const PairMetrics> metrics,
                        std::span<const SanityReport> sanity)
{
    CorpusSummary s;
    s.scorecards = scorecards.size();
    s.accuracy = mean_of(scorecards, &JudgeScorecard::accuracy);
    s.coherence = mean_of(scorecards, &JudgeScorecard::coherence);
    s.excitement = mean_of(scorecards, &JudgeScorecard::excitement);
    s.professionalism = mean_of(scorecards, &JudgeScorecard::professionalism);
    s.pacing = mean_of(scorecards, &JudgeScorecard::pacing);
    s.total = mean_of(scorecards, &JudgeScorecard::total);

    s.metric_pairs = metrics.size();
    for (const auto& m : metrics)
    {
        s.bleu4 += m.bleu4;
        s.rouge_l += m.rouge_l;
        s.cider += m.cider;
    }
    if (!metrics.empty())
    {
        const auto n = static_cast<double>(metrics.size());
        s.bleu4 /= n;
        s.rouge_l /= n;
        s.cider /= n;
    }

    s.sanity_checked = sanity.size();
    if (!sanity.empty())
    {
        const auto passed = std::count_if(sanity.begin(), sanity.end(), [](const SanityReport& r) { return r.passed; });
        s.sanity_pass_rate = static_cast<double>(passed) / static_cast<double>(sanity.size());
    }
    return s;
}

ordered_json scorecard_to_json(const JudgeScorecard& card)
{
    ordered_json j = ordered_json::parse(render(card));
    j["corrected"] = card.corrected;
    return j;
}

ordered_json summary_to_json(const CorpusSummary& s)
{
    ordered_json judge;
    judge["scorecards"] = s.scorecards;
    judge["accuracy"] = s.accuracy;
    judge["coherence"] = s.coherence;
    judge["excitement"] = s.excitement;
    judge["professionalism"] = s.professionalism;
    judge["pacing"] = s.pacing;
    judge["total"] = s.total;

    ordered_json metrics;
    metrics["pairs"] = s.metric_pairs;
    metrics["bleu4"] = s.bleu4;
    metrics["rouge_l"] = s.rouge_l;
    metrics["cider"] = s.cider;

    ordered_json j;
    j["judge"] = std::move(judge);
    j["metrics"] = std::move(metrics);
    ordered_json sanity;
    sanity["checked"] = s.sanity_checked;
    sanity["pass_rate"] = s.sanity_pass_rate ? ordered_json(*s.sanity_pass_rate) : ordered_json(nullptr);
    j["sanity"] = std::move(sanity);
    return j;
}

}  // namespace courtside::eval
