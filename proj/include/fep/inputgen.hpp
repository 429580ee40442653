#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fep/errors.hpp"
#include "fep/interp.hpp"

namespace fep {

struct ValueRanges {
    int64_t int_min = -100;
    int64_t int_max = 100;
};

struct GeneratorConfig {
    std::vector<int> line_list;
    int goals_multiply = 0;  // 0 = derived from target_executions
    int target_executions = 1000;
    double budget_seconds = 0.0;  // wall-clock safety cap, 0 disables it
    int64_t max_attempts = 200000;
    uint64_t seed = 0;
    ValueRanges ranges;
    int max_array_len = 8;
    ExecLimits limits;
};

struct InputPool {
    std::vector<std::pair<std::string, InputVector>> inputs;
    std::map<int, int> coverage_count;  // line -> times covered by accepted inputs
    int64_t accepted = 0;
    int64_t rejected = 0;
    int64_t attempts = 0;
};

inline int derive_goals_multiply(int target_executions, size_t line_count) {
    if (line_count == 0) throw DomainError("derive_goals_multiply: empty line list");
    long long g = std::llround(static_cast<double>(target_executions) /
                               static_cast<double>(line_count));
    return static_cast<int>(g < 1 ? 1 : g);
}

namespace detail {

// Raw draws from the engine keep pools identical across standard libraries.
class InputSampler {
public:
    InputSampler(uint64_t seed, const ValueRanges& ranges, int max_array_len)
        : rng_(seed), ranges_(ranges), max_array_len_(max_array_len) {}

    int64_t sample_int() {
        uint64_t span = static_cast<uint64_t>(ranges_.int_max - ranges_.int_min) + 1;
        return ranges_.int_min + static_cast<int64_t>(rng_() % span);
    }

    Value sample(TypeTag t) {
        switch (t) {
        case TypeTag::Bool: return Value{(rng_() & 1) != 0};
        case TypeTag::IntArray: {
            IntArray a;
            size_t n = rng_() % static_cast<uint64_t>(max_array_len_ + 1);
            for (size_t i = 0; i < n; ++i) a.push_back(sample_int());
            return Value{std::move(a)};
        }
        default: return Value{sample_int()};
        }
    }

private:
    std::mt19937_64 rng_;
    ValueRanges ranges_;
    int max_array_len_;
};

inline std::string input_key(const InputVector& in) {
    std::string key;
    for (const auto& v : in.args) key += canonical_serialize(v) + ";";
    return key;
}

}  // namespace detail

// Feedback-directed random search: keep an input iff it raises some target
// line's coverage toward the goal. Deterministic for a given seed and config
// as long as the wall-clock cap never fires.
inline InputPool generate_pool(const SourceUnit& unit, const std::string& fn_name,
                               const GeneratorConfig& cfg) {
    const FunctionDef* fn = unit.find_function(fn_name);
    if (!fn) throw DomainError("generate_pool: no function named '" + fn_name + "'");
    if (cfg.line_list.empty()) throw DomainError("generate_pool: empty line list");

    int goal = cfg.goals_multiply > 0
                   ? cfg.goals_multiply
                   : derive_goals_multiply(cfg.target_executions, cfg.line_list.size());

    InputPool pool;
    for (int line : cfg.line_list) pool.coverage_count[line] = 0;
    std::set<std::string> seen;
    detail::InputSampler sampler(cfg.seed, cfg.ranges, cfg.max_array_len);
    auto started = std::chrono::steady_clock::now();

    auto all_met = [&] {
        for (const auto& [line, count] : pool.coverage_count)
            if (count < goal) return false;
        return true;
    };

    while (!all_met() && pool.attempts < cfg.max_attempts) {
        if (cfg.budget_seconds > 0.0) {
            std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
            if (elapsed.count() > cfg.budget_seconds) break;
        }
        ++pool.attempts;
        InputVector input;
        for (const auto& p : fn->params) input.args.push_back(sampler.sample(p.type));

        std::string key = detail::input_key(input);
        if (seen.count(key)) {
            ++pool.rejected;
            continue;
        }
        ExecutionOutcome outcome = execute_unit(unit, fn_name, input, {}, cfg.limits);
        bool useful = false;
        for (auto& [line, count] : pool.coverage_count)
            if (count < goal && outcome.coverage.count(line)) useful = true;
        if (!useful) {
            ++pool.rejected;
            continue;
        }
        seen.insert(key);
        for (auto& [line, count] : pool.coverage_count)
            if (outcome.coverage.count(line)) ++count;
        char id[16];
        std::snprintf(id, sizeof id, "i%05d", static_cast<int>(pool.inputs.size()));
        pool.inputs.emplace_back(id, std::move(input));
        ++pool.accepted;
    }

    if (pool.inputs.empty())
        throw EmptyPool("no input covered any target line within the budget");
    return pool;
}

}  // namespace fep
