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

// Serial reference vs OpenMP timings for the data-parallel kernels.

#include "courtside/evaluation.hpp"
#include "courtside/pipeline.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace courtside;

namespace {

double best_of_runs(int runs, const std::function<void()>& body)
{
    double best = 1e300;
    for (int i = 0; i < runs; ++i)
    {
        const auto start = std::chrono::steady_clock::now();
        body();
        best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel, bool same)
{
    std::printf("%-28s %12.1f %12.1f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
                same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv)
{
    const std::size_t matches = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 16;
    const int runs = argc > 2 ? std::atoi(argv[2]) : 3;
    std::printf("threads available: %d, matches: %zu, best of %d runs\n\n", omp_get_max_threads(), matches, runs);
    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial ms", "openmp ms", "speedup");

    std::vector<std::vector<events::RallyRecord>> serial_sim;
    std::vector<std::vector<events::RallyRecord>> parallel_sim;
    const double sim_s = best_of_runs(runs, [&] {
        serial_sim = pipeline::simulate_matches(7, matches, {}, pipeline::Execution::Serial);
    });
    const double sim_p = best_of_runs(runs, [&] {
        parallel_sim = pipeline::simulate_matches(7, matches, {}, pipeline::Execution::Parallel);
    });
    row("simulate_matches", sim_s, sim_p, serial_sim == parallel_sim);

    auto factory = [] { return std::make_unique<prompt::MockClient>(); };
    std::vector<pipeline::RunReport> serial_runs;
    std::vector<pipeline::RunReport> parallel_runs;
    const double rep_s = best_of_runs(runs, [&] {
        serial_runs = pipeline::replay_matches(serial_sim, factory, {}, pipeline::Execution::Serial);
    });
    const double rep_p = best_of_runs(runs, [&] {
        parallel_runs = pipeline::replay_matches(serial_sim, factory, {}, pipeline::Execution::Parallel);
    });
    bool same = serial_runs.size() == parallel_runs.size();
    for (std::size_t i = 0; same && i < serial_runs.size(); ++i)
    {
        same = pipeline::run_report_to_json(serial_runs[i]).dump() ==
               pipeline::run_report_to_json(parallel_runs[i]).dump();
    }
    row("replay_matches (mock)", rep_s, rep_p, same);

    std::vector<eval::CaptionPair> pairs;
    for (const auto& run : serial_runs)
    {
        for (std::size_t i = 0; i < run.rallies.size(); ++i)
        {
            if (run.rallies[i].commentary)
            {
                pairs.push_back({*run.rallies[i].commentary, {}});
            }
        }
    }
    std::size_t at = 0;
    for (const auto& m : serial_sim)
    {
        for (const auto& r : m)
        {
            if (at < pairs.size())
            {
                pairs[at++].references.push_back(r.commentary.value_or(""));
            }
        }
    }
    eval::MetricReport serial_metrics;
    eval::MetricReport parallel_metrics;
    const double met_s = best_of_runs(runs, [&] { serial_metrics = eval::evaluate_corpus(pairs, eval::Execution::Serial); });
    const double met_p = best_of_runs(runs, [&] { parallel_metrics = eval::evaluate_corpus(pairs, eval::Execution::Parallel); });
    row("evaluate_corpus", met_s, met_p,
        serial_metrics.pairs == parallel_metrics.pairs && serial_metrics.cider == parallel_metrics.cider);
    std::printf("\n%zu rallies replayed, %zu caption pairs scored\n", pairs.size(), pairs.size());
    return 0;
}
