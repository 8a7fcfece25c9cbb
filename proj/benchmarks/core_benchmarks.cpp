#include <benchmark/benchmark.h>

#include <algorithm>
#include <filesystem>

#include "explainloop/exec_sandbox.hpp"
#include "explainloop/prompt_forge.hpp"
#include "explainloop/sql_lexer.hpp"
#include "explainloop/task_model.hpp"

using namespace explainloop;

namespace {

const std::filesystem::path kData = EXPLAINLOOP_BENCH_DATA_DIR;

const std::vector<TaskBundle>& sql_tasks() {
  static const auto tasks = load_corpus(kData / "corpora/spider_fixture", TaskOrigin::SpiderStyle);
  return tasks;
}

const DemoStore& demos() {
  static const auto store = load_demo_store(kData / "demos/default.demos");
  return store;
}

void bm_sql_edit_count(benchmark::State& state) {
  const std::string pred = "SELECT state FROM votes AS T1 GROUP BY state ORDER BY count(*) DESC LIMIT 1";
  const std::string gold =
      "SELECT area_code FROM votes AS T1 JOIN area_code_state AS T2 ON T1.state = T2.state "
      "GROUP BY area_code ORDER BY count(*) DESC LIMIT 1";
  for (auto _ : state) benchmark::DoNotOptimize(sql_edit_count(pred, gold));
}
BENCHMARK(bm_sql_edit_count);

void bm_lex_corpus(benchmark::State& state) {
  std::size_t tokens = 0;
  for (auto _ : state) {
    for (const auto& t : sql_tasks()) tokens += sql::lex(t.gold_code).size();
  }
  benchmark::DoNotOptimize(tokens);
}
BENCHMARK(bm_lex_corpus);

void bm_judge_sql_gold(benchmark::State& state) {
  Sandbox sandbox;
  const auto& tasks = sql_tasks();
  std::size_t i = 0;
  for (auto _ : state) {
    const TaskBundle& t = tasks[i++ % tasks.size()];
    auto out = sandbox.run_sql(t.gold_code, t.context.database, 2000);
    benchmark::DoNotOptimize(sandbox.judge(t, out));
  }
}
BENCHMARK(bm_judge_sql_gold);

void bm_unordered_compare(benchmark::State& state) {
  std::vector<SqlRow> a;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    a.push_back({SqlValue{i}, SqlValue{std::string("row") + std::to_string(i)}});
  }
  auto b = a;
  std::reverse(b.begin(), b.end());
  for (auto _ : state) benchmark::DoNotOptimize(sql_results_match(a, b, false));
}
BENCHMARK(bm_unordered_compare)->Range(8, 8192);

void bm_restatement_prompt(benchmark::State& state) {
  const TaskBundle& t = sql_tasks().front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_restatement_prompt(t.gold_code, t.question, demos()));
  }
}
BENCHMARK(bm_restatement_prompt);

}  // namespace

BENCHMARK_MAIN();
