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

#include "utf8.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace courtside::eval {

using utf8::append_utf8;
using utf8::next_code_point;
using utf8::to_lower;

namespace {

bool is_space(char32_t cp) noexcept
{
    return (cp >= 0x09 && cp <= 0x0D) || (cp >= 0x1C && cp <= 0x20) || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
           (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
           cp == 0x3000;
}

bool is_punct(char32_t cp) noexcept
{
    if (cp < 0x80)
    {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
               (cp >= 0x7B && cp <= 0x7E);
    }
    switch (cp)
    {
    case 0x00A1:
    case 0x00AB:
    case 0x00BB:
    case 0x00BF:
    case 0x2013:
    case 0x2014:
    case 0x2018:
    case 0x2019:
    case 0x201C:
    case 0x201D:
    case 0x2026:
        return true;
    default:
        return false;
    }
}

using Counts = std::map<std::string, int>;

Counts ngram_counts(const std::vector<std::string>& tokens, std::size_t n)
{
    Counts out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    {
        std::string key = tokens[i];
        for (std::size_t k = 1; k < n; ++k)
        {
            key += ' ';
            key += tokens[i + k];
        }
        ++out[key];
    }
    return out;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (const auto& x : a)
    {
        std::size_t diagonal = 0;
        for (std::size_t j = 1; j <= b.size(); ++j)
        {
            const std::size_t above = row[j];
            row[j] = x == b[j - 1] ? diagonal + 1 : std::max(row[j], row[j - 1]);
            diagonal = above;
        }
    }
    return row[b.size()];
}

constexpr std::size_t kMaxN = 4;

/// Corpus document frequencies for CIDEr.
struct CiderModel
{
    std::array<std::map<std::string, int>, kMaxN> df;
    double log_n{0.0};

    explicit CiderModel(std::span<const CaptionPair> pairs)
    {
        log_n = std::log(static_cast<double>(pairs.size()));
        for (const auto& pair : pairs)
        {
            for (std::size_t n = 1; n <= kMaxN; ++n)
            {
                std::map<std::string, bool> seen;
                for (const auto& ref : pair.references)
                {
                    for (const auto& [gram, count] : ngram_counts(tokenize(ref), n))
                    {
                        seen[gram] = true;
                    }
                }
                for (const auto& [gram, flag] : seen)
                {
                    ++df[n - 1][gram];
                }
            }
        }
    }

    std::map<std::string, double> vector_of(const std::vector<std::string>& tokens, std::size_t n) const
    {
        const auto counts = ngram_counts(tokens, n);
        double total = 0.0;
        for (const auto& [gram, count] : counts)
        {
            total += count;
        }
        std::map<std::string, double> out;
        for (const auto& [gram, count] : counts)
        {
            const auto it = df[n - 1].find(gram);
            const double d = it == df[n - 1].end() ? 1.0 : std::max(1, it->second);
            out[gram] = (count / total) * (log_n - std::log(d));
        }
        return out;
    }

    double score(const CaptionPair& pair) const
    {
        const auto candidate = tokenize(pair.candidate);
        std::vector<std::vector<std::string>> refs;
        for (const auto& r : pair.references)
        {
            refs.push_back(tokenize(r));
        }
        if (refs.empty())
        {
            return 0.0;
        }
        double sum_n = 0.0;
        for (std::size_t n = 1; n <= kMaxN; ++n)
        {
            const auto vc = vector_of(candidate, n);
            double norm_c = 0.0;
            for (const auto& [gram, w] : vc)
            {
                norm_c += w * w;
            }
            norm_c = std::sqrt(norm_c);
            double over_refs = 0.0;
            for (const auto& ref : refs)
            {
                const auto vr = vector_of(ref, n);
                double norm_r = 0.0;
                for (const auto& [gram, w] : vr)
                {
                    norm_r += w * w;
                }
                norm_r = std::sqrt(norm_r);
                if (norm_c == 0.0 || norm_r == 0.0)
                {
                    continue;
                }
                double dot = 0.0;
                for (const auto& [gram, w] : vc)
                {
                    if (auto it = vr.find(gram); it != vr.end())
                    {
                        dot += w * it->second;
                    }
                }
                over_refs += dot / (norm_c * norm_r);
            }
            sum_n += over_refs / static_cast<double>(refs.size());
        }
        return 10.0 * sum_n / static_cast<double>(kMaxN);
    }
};

}  // namespace

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> out;
    std::vector<char32_t> word;
    auto flush = [&] {
        std::size_t b = 0;
        std::size_t e = word.size();
        while (b < e && is_punct(word[b]))
        {
            ++b;
        }
        while (e > b && is_punct(word[e - 1]))
        {
            --e;
        }
        if (b < e)
        {
            std::string token;
            for (std::size_t k = b; k < e; ++k)
            {
                append_utf8(token, word[k]);
            }
            out.push_back(std::move(token));
        }
        word.clear();
    };
    for (std::size_t i = 0; i < text.size();)
    {
        const char32_t cp = next_code_point(text, i);
        if (is_space(cp))
        {
            flush();
        }
        else
        {
            word.push_back(to_lower(cp));
        }
    }
    flush();
    return out;
}

double bleu4(std::string_view candidate, std::span<const std::string> references)
{
    const auto cand = tokenize(candidate);
    if (cand.empty() || references.empty())
    {
        return 0.0;
    }
    std::vector<std::vector<std::string>> refs;
    for (const auto& r : references)
    {
        refs.push_back(tokenize(r));
    }

    double log_sum = 0.0;
    for (std::size_t n = 1; n <= kMaxN; ++n)
    {
        const auto counts = ngram_counts(cand, n);
        Counts max_ref;
        for (const auto& ref : refs)
        {
            for (const auto& [gram, count] : ngram_counts(ref, n))
            {
                auto& slot = max_ref[gram];
                slot = std::max(slot, count);
            }
        }
        long clipped = 0;
        long total = 0;
        for (const auto& [gram, count] : counts)
        {
            total += count;
            if (auto it = max_ref.find(gram); it != max_ref.end())
            {
                clipped += std::min(count, it->second);
            }
        }
        const long denominator = std::max(1L, total);
        if (clipped == 0 && n == 1)
        {
            return 0.0;
        }
        const double p = clipped == 0 ? 1.0 / static_cast<double>(denominator + 1)
                                       : static_cast<double>(clipped) / static_cast<double>(denominator);
        log_sum += std::log(p) / static_cast<double>(kMaxN);
    }

    const auto c = static_cast<double>(cand.size());
    std::size_t closest = refs.front().size();
    for (const auto& ref : refs)
    {
        const auto d = std::abs(static_cast<long>(ref.size()) - static_cast<long>(cand.size()));
        const auto best = std::abs(static_cast<long>(closest) - static_cast<long>(cand.size()));
        if (d < best || (d == best && ref.size() < closest))
        {
            closest = ref.size();
        }
    }
    const double r = static_cast<double>(closest);
    const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return bp * std::exp(log_sum);
}

double rouge_l(std::string_view candidate, std::string_view reference, double beta)
{
    const auto c = tokenize(candidate);
    const auto r = tokenize(reference);
    if (c.empty() || r.empty())
    {
        return 0.0;
    }
    const auto lcs = static_cast<double>(lcs_length(c, r));
    if (lcs == 0.0)
    {
        return 0.0;
    }
    const double precision = lcs / static_cast<double>(c.size());
    const double recall = lcs / static_cast<double>(r.size());
    const double b2 = beta * beta;
    return (1.0 + b2) * precision * recall / (recall + b2 * precision);
}

std::vector<double> cider_scores(std::span<const CaptionPair> pairs)
{
    if (pairs.size() < 2)
    {
        throw EvalError(EvalErrc::CorpusTooSmall, "CIDEr needs at least 2 pairs for corpus statistics");
    }
    const CiderModel model(pairs);
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs)
    {
        out.push_back(model.score(pair));
    }
    return out;
}

double cider(std::span<const CaptionPair> pairs)
{
    const auto scores = cider_scores(pairs);
    double sum = 0.0;
    for (double s : scores)
    {
        sum += s;
    }
    return sum / static_cast<double>(scores.size());
}

MetricReport evaluate_corpus(std::span<const CaptionPair> pairs, Execution execution)
{
    MetricReport report;
    report.evaluated = pairs.size();
    report.pairs.resize(pairs.size());
    if (pairs.empty())
    {
        return report;
    }
    const bool with_cider = pairs.size() >= 2;
    report.has_cider = with_cider;
    std::optional<CiderModel> model;
    if (with_cider)
    {
        model.emplace(pairs);
    }

    const auto count = static_cast<long>(pairs.size());
    auto one = [&](long i) {
        const auto& pair = pairs[static_cast<std::size_t>(i)];
        auto& out = report.pairs[static_cast<std::size_t>(i)];
        out.bleu4 = bleu4(pair.candidate, pair.references);
        double best_rouge = 0.0;
        for (const auto& ref : pair.references)
        {
            best_rouge = std::max(best_rouge, rouge_l(pair.candidate, ref));
        }
        out.rouge_l = best_rouge;
        out.cider = with_cider ? model->score(pair) : 0.0;
    };
    if (execution == Execution::Parallel)
    {
#pragma omp parallel for schedule(dynamic, 4)
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

    for (const auto& p : report.pairs)
    {
        report.bleu4 += p.bleu4;
        report.rouge_l += p.rouge_l;
        report.cider += p.cider;
    }
    const auto n = static_cast<double>(pairs.size());
    report.bleu4 /= n;
    report.rouge_l /= n;
    report.cider /= n;
    return report;
}

}  // namespace courtside::eval
