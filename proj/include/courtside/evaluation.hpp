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
#include "courtside/prompt_engine.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace courtside::eval {

enum class EvalErrc
{
    UnparsableOutput,
    CriterionOutOfRange,
    MissingKey,
    CorpusTooSmall,
    EmptyInput,
};

using EvalError = CodedError<EvalErrc>;

// ---------------------------------------------------------------------------
// Text metrics

/// Shared by every metric: lowercase, split on Unicode whitespace, strip
/// leading and trailing punctuation from each token, drop tokens left empty.
std::vector<std::string> tokenize(std::string_view text);

/// Sentence BLEU-4 with clipped n-gram precisions, uniform weights and the
/// closest-reference brevity penalty. A higher-order precision with no matches
/// becomes (0 + 1) / (max(1, candidate n-grams) + 1); no unigram match gives 0.
double bleu4(std::string_view candidate, std::span<const std::string> references);

inline constexpr double kRougeBeta = 1.2;

/// LCS F-measure over tokens, recall weighted by beta^2. 0 when either side is empty.
double rouge_l(std::string_view candidate, std::string_view reference, double beta = kRougeBeta);

struct CaptionPair
{
    std::string candidate;
    std::vector<std::string> references;
};

/// Per-pair CIDEr: TF-IDF n-gram cosine against each reference, averaged over
/// references and over n = 1..4, times 10. IDF is log(N / max(1, df)) with df
/// counted over the pairs' reference sets. Throws EvalError(CorpusTooSmall)
/// below two pairs.
std::vector<double> cider_scores(std::span<const CaptionPair> pairs);

/// Corpus CIDEr: the mean of cider_scores.
double cider(std::span<const CaptionPair> pairs);

struct PairMetrics
{
    double bleu4{0.0};
    double rouge_l{0.0};
    double cider{0.0};

    bool operator==(const PairMetrics&) const = default;
};

struct MetricReport
{
    std::vector<PairMetrics> pairs;
    double bleu4{0.0};
    double rouge_l{0.0};
    double cider{0.0};
    /// False below two pairs, where CIDEr has no corpus statistics and reads 0.
    bool has_cider{false};
    std::size_t evaluated{0};
};

enum class Execution
{
    Serial,
    Parallel,
};

/// Per-pair metrics (OpenMP across pairs when Parallel) and their means, folded
/// in pair order so both paths report identical numbers. ROUGE-L takes the best
/// reference.
MetricReport evaluate_corpus(std::span<const CaptionPair> pairs, Execution execution = Execution::Parallel);

// ---------------------------------------------------------------------------
// Sanity check

enum class ViolationKind
{
    PlayerName,
    ScoreMention,
    ShotTerm,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct SanityViolation
{
    ViolationKind kind{ViolationKind::PlayerName};
    std::string detail;
};

struct SanityReport
{
    bool passed{true};
    std::vector<SanityViolation> violations;
};

/// Lowercase ASCII with Latin-1 and Latin Extended-A letters folded to their base letter.
std::string fold(std::string_view text);

/// Player mentions, actor attribution of point-ending phrases, score mentions
/// against the initial and post-point scores, and shot vocabulary against the
/// shot sequence. Unrecognised text is ignored rather than flagged.
SanityReport sanity_check(std::string_view commentary, const events::RallyRecord& rally);

// ---------------------------------------------------------------------------
// Judge protocol

extern const std::string_view kJudgeSystemPrompt;
extern const std::string_view kJudgeUserTemplate;

/// Fills {metadata}, {reference} and {prediction} in one pass; slot text is never rescanned.
prompt::PromptBundle build_judge_prompt(std::string_view metadata, std::string_view reference,
                                        std::string_view prediction);

struct JudgeScorecard
{
    int accuracy{0};
    int coherence{0};
    int excitement{0};
    int professionalism{0};
    int pacing{0};
    int total{0};
    /// Set when the reported total disagreed with the criteria and was recomputed.
    bool corrected{false};

    bool operator==(const JudgeScorecard&) const = default;
};

inline constexpr int kCriterionMax = 20;

/// Plain JSON {"scores": {...}, "total_score": n}, optionally inside a code fence.
JudgeScorecard parse_scorecard(std::string_view judge_output);

/// The output format the judge is asked for.
std::string render(const JudgeScorecard& card);

/// Deterministic stand-in judge scoring overlap and length against the reference.
class MockJudgeClient final : public prompt::CommentaryClient
{
  public:
    std::string_view name() const noexcept override
    {
        return "mock-judge";
    }
    prompt::ClientReply complete(const prompt::GenerationRequest& request) override;
};

struct CorpusSummary
{
    std::size_t scorecards{0};
    double accuracy{0.0};
    double coherence{0.0};
    double excitement{0.0};
    double professionalism{0.0};
    double pacing{0.0};
    double total{0.0};
    std::size_t metric_pairs{0};
    double bleu4{0.0};
    double rouge_l{0.0};
    double cider{0.0};
    std::size_t sanity_checked{0};
    std::optional<double> sanity_pass_rate;
};

/// Means per field. Throws EvalError(EmptyInput) when there is nothing to aggregate.
CorpusSummary aggregate(std::span<const JudgeScorecard> scorecards, std::span<const PairMetrics> metrics,
                        std::span<const SanityReport> sanity = {});

nlohmann::ordered_json summary_to_json(const CorpusSummary& summary);
nlohmann::ordered_json scorecard_to_json(const JudgeScorecard& card);

}  // namespace courtside::eval
