#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fep/classify.hpp"
#include "fep/inputgen.hpp"
#include "fep/instrument.hpp"
#include "fep/json_io.hpp"
#include "fep/mutate.hpp"
#include "fep/parser.hpp"
#include "fep/report.hpp"
#include "fep/tree_edit.hpp"

namespace fep {

struct FaultCase {
    std::string case_id;
    std::string buggy_path;  // empty for mutation targets
    std::string fixed_path;
    std::string target_fn;
    std::vector<int> line_list;  // empty = derived from the edit script
    Mode mode = Mode::Unit;
    std::string group;  // showcase | realfix | mutation | system
    std::string notes;
    std::optional<FixPattern> expected_pattern;  // hand label
};

struct CorpusManifest {
    std::vector<FaultCase> cases;
    GeneratorConfig defaults;
};

inline CorpusManifest manifest_from_json(const Json& j) {
    CorpusManifest m;
    if (j.contains("defaults")) {
        const Json& d = j.at("defaults");
        if (d.contains("targetExecutions"))
            m.defaults.target_executions = d.at("targetExecutions").get<int>();
        if (d.contains("seed")) m.defaults.seed = d.at("seed").get<uint64_t>();
        if (d.contains("intMin")) m.defaults.ranges.int_min = d.at("intMin").get<int64_t>();
        if (d.contains("intMax")) m.defaults.ranges.int_max = d.at("intMax").get<int64_t>();
        if (d.contains("maxArrayLen")) m.defaults.max_array_len = d.at("maxArrayLen").get<int>();
        if (d.contains("maxAttempts")) m.defaults.max_attempts = d.at("maxAttempts").get<int64_t>();
        if (d.contains("budgetSeconds"))
            m.defaults.budget_seconds = d.at("budgetSeconds").get<double>();
        if (d.contains("maxSteps")) m.defaults.limits.max_steps = d.at("maxSteps").get<int64_t>();
    }
    for (const auto& cj : j.at("cases")) {
        FaultCase c;
        c.case_id = cj.at("caseId").get<std::string>();
        if (cj.contains("buggy")) c.buggy_path = cj.at("buggy").get<std::string>();
        c.fixed_path = cj.at("fixed").get<std::string>();
        c.target_fn = cj.at("targetFn").get<std::string>();
        if (cj.contains("lineList"))
            for (const auto& l : cj.at("lineList")) c.line_list.push_back(l.get<int>());
        if (cj.contains("mode"))
            c.mode = cj.at("mode").get<std::string>() == "sys" ? Mode::Sys : Mode::Unit;
        if (cj.contains("group")) c.group = cj.at("group").get<std::string>();
        if (cj.contains("notes")) c.notes = cj.at("notes").get<std::string>();
        if (cj.contains("expectedPattern"))
            c.expected_pattern = fix_pattern_from_name(cj.at("expectedPattern").get<std::string>());
        m.cases.push_back(std::move(c));
    }
    return m;
}

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t seed, const std::string& tag) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return splitmix64(seed ^ h);
}

}  // namespace detail

// Faulty lines on the buggy side of a statement script: lines of changed and
// deleted statements; an insertion contributes the nearest preceding buggy
// statement of its block (the position a covering input must reach).
inline std::vector<int> derive_fault_lines(const StatementScript& script,
                                           const SourceUnit& buggy_unit) {
    std::set<int> lines;
    for (const auto& block : script.blocks) {
        int last_line = -1;
        int first_line = -1;
        for (int op_idx : block.ops) {
            const StmtOp& op = script.ops[static_cast<size_t>(op_idx)];
            if (op.source_node >= 0) {
                const AstNode* n = find_node(buggy_unit, op.source_node);
                if (n) {
                    if (first_line < 0) first_line = n->span.line;
                    last_line = n->span.line;
                }
            }
        }
        int cursor = -1;
        for (int op_idx : block.ops) {
            const StmtOp& op = script.ops[static_cast<size_t>(op_idx)];
            if (op.source_node >= 0) {
                const AstNode* n = find_node(buggy_unit, op.source_node);
                if (n) cursor = n->span.line;
            }
            if (op.kind == EditKind::Change || op.kind == EditKind::Delete) {
                if (cursor >= 0) lines.insert(cursor);
            } else if (op.kind == EditKind::Insert) {
                if (cursor >= 0)
                    lines.insert(cursor);
                else if (first_line >= 0)
                    lines.insert(first_line);
            }
        }
        (void)last_line;
    }
    return {lines.begin(), lines.end()};
}

struct CaseResult {
    std::string fault_id;
    FaultReport report;
    std::vector<VerdictRecord> verdicts;
    std::vector<PairedRecord> paired;
    FixPattern pattern = FixPattern::Other;
    bool no_pool = false;  // EmptyPool: reported as a zero-execution row
    std::string discard_reason;  // mutants only: notStronglyKilled | noPool | noCoveringInput
};

namespace detail {

inline FaultReport zero_report(const std::string& fault_id, FixPattern pattern, double level) {
    FaultReport r;
    r.fault_id = fault_id;
    r.fix_pattern = pattern;
    finish_report(r, level);
    return r;
}

struct PreparedPair {
    SourceUnit buggy_unit;
    SourceUnit fixed_unit;
    StatementScript script;
    AlignedInstrumentation alignment;
    FixPattern pattern = FixPattern::Other;
    std::vector<int> lines;
};

inline PreparedPair prepare_pair(SourceUnit buggy_unit, SourceUnit fixed_unit,
                                 const std::string& target_fn,
                                 const std::vector<int>& explicit_lines, Mode mode) {
    PreparedPair p;
    p.buggy_unit = std::move(buggy_unit);
    p.fixed_unit = std::move(fixed_unit);
    const FunctionDef* bfn = p.buggy_unit.find_function(target_fn);
    const FunctionDef* ffn = p.fixed_unit.find_function(target_fn);
    if (!bfn || !ffn)
        throw DomainError("target function '" + target_fn + "' missing from a version");
    if (mode == Mode::Unit && (statement_count(*bfn) <= 1 || statement_count(*ffn) <= 1))
        throw DomainError("unit-level analysis requires more than one statement in '" +
                          target_fn + "'");
    if (mode == Mode::Sys && (!p.buggy_unit.entry || !p.fixed_unit.entry))
        throw DomainError("system-level analysis requires an entry function");
    p.script = statement_script(*bfn, *ffn);
    p.pattern = classify_fix_pattern(p.script);
    p.alignment = instrument_pair(*bfn, *ffn, p.script);
    p.lines = explicit_lines.empty() ? derive_fault_lines(p.script, p.buggy_unit)
                                     : explicit_lines;
    if (p.lines.empty())
        throw DomainError("no fault lines: give an explicit lineList for identical versions");
    return p;
}

inline void classify_into(CaseResult& result, const PreparedPair& p, const std::string& fault_id,
                          const std::string& target_fn, Mode mode, const InputPool& pool,
                          const ExecLimits& limits, bool keep_paired) {
    TracePlan b_plan = p.alignment.buggy_plan();
    TracePlan f_plan = p.alignment.fixed_plan();
    for (const auto& [input_id, input] : pool.inputs) {
        if (mode == Mode::Unit) {
            PairedExecution pe;
            pe.mode = Mode::Unit;
            pe.buggy = execute_unit(p.buggy_unit, target_fn, input, b_plan, limits);
            pe.fixed = execute_unit(p.fixed_unit, target_fn, input, f_plan, limits);
            pe.alignment = p.alignment;
            VerdictSet v = classify(pe);
            result.verdicts.push_back(
                make_verdict_record(fault_id, input_id, Mode::Unit, v, p.pattern));
            if (keep_paired) result.paired.push_back({fault_id, input_id, p.pattern, std::move(pe)});
        } else {
            SystemRun rb = execute_system(p.buggy_unit, input, target_fn, b_plan, limits);
            SystemRun rf = execute_system(p.fixed_unit, input, target_fn, f_plan, limits);
            size_t common = std::min(rb.invocations.size(), rf.invocations.size());
            bool divergent = rb.invocations.size() != rf.invocations.size();
            for (size_t k = 0; k < common; ++k) {
                PairedExecution pe;
                pe.mode = Mode::Sys;
                pe.buggy = rb.invocations[k];
                pe.fixed = rf.invocations[k];
                pe.alignment = p.alignment;
                pe.sys_out = {rb.system.out, rf.system.out};
                pe.control_divergent = divergent;
                std::string exec_id = input_id + ":" + std::to_string(k);
                VerdictSet v = classify(pe);
                result.verdicts.push_back(
                    make_verdict_record(fault_id, exec_id, Mode::Sys, v, p.pattern));
                if (keep_paired)
                    result.paired.push_back({fault_id, exec_id, p.pattern, std::move(pe)});
            }
        }
    }
}

inline void finalize_result(CaseResult& result, double level) {
    if (result.verdicts.empty()) {
        result.no_pool = true;
        result.report = zero_report(result.fault_id, result.pattern, level);
        return;
    }
    AggregateReport agg = aggregate(result.verdicts, level);
    result.report = agg.faults.at(0);
}

}  // namespace detail

inline CaseResult analyze_case(const FaultCase& fc, const GeneratorConfig& defaults,
                               const std::string& root_dir, bool keep_paired = false,
                               double level = 0.95) {
    namespace fs = std::filesystem;
    CaseResult result;
    result.fault_id = fc.case_id;
    SourceUnit buggy = parse(slurp((fs::path(root_dir) / fc.buggy_path).string()));
    SourceUnit fixed = parse(slurp((fs::path(root_dir) / fc.fixed_path).string()));
    detail::PreparedPair p = detail::prepare_pair(std::move(buggy), std::move(fixed),
                                                  fc.target_fn, fc.line_list, fc.mode);
    result.pattern = p.pattern;

    GeneratorConfig cfg = defaults;
    cfg.line_list = p.lines;
    cfg.seed = detail::mix_seed(defaults.seed, fc.case_id);
    std::string pool_fn = fc.mode == Mode::Sys ? *p.buggy_unit.entry : fc.target_fn;
    InputPool pool;
    try {
        pool = generate_pool(p.buggy_unit, pool_fn, cfg);
    } catch (const EmptyPool&) {
        detail::finalize_result(result, level);  // "no TS" row
        return result;
    }
    detail::classify_into(result, p, fc.case_id, fc.target_fn, fc.mode, pool, cfg.limits,
                          keep_paired);
    detail::finalize_result(result, level);
    return result;
}

struct MutantRun {
    std::vector<CaseResult> kept;
    std::vector<CaseResult> discarded;
    int64_t generated = 0;
};

inline MutantRun analyze_mutants(const SourceUnit& fixed_unit, const std::string& fn_name,
                                 const GeneratorConfig& defaults,
                                 const std::string& id_prefix = "mut", bool keep_paired = false,
                                 double level = 0.95) {
    MutantRun run;
    std::vector<Mutant> mutants = generate_mutants(fixed_unit, fn_name);
    run.generated = static_cast<int64_t>(mutants.size());
    int serial = 0;
    for (const Mutant& m : mutants) {
        std::string fault_id =
            id_prefix + ":" + std::to_string(serial++) + ":" + m.operator_id;
        CaseResult result;
        result.fault_id = fault_id;
        detail::PreparedPair p;
        try {
            p = detail::prepare_pair(m.mutated, m.parent, fn_name, {}, Mode::Unit);
        } catch (const DomainError&) {
            result.discard_reason = "noFaultLines";
            run.discarded.push_back(std::move(result));
            continue;
        }
        result.pattern = p.pattern;

        GeneratorConfig cfg = defaults;
        cfg.line_list = p.lines;
        cfg.seed = detail::mix_seed(defaults.seed, fault_id);
        InputPool pool;
        try {
            pool = generate_pool(p.buggy_unit, fn_name, cfg);
        } catch (const EmptyPool&) {
            result.discard_reason = "noPool";
            run.discarded.push_back(std::move(result));
            continue;
        }
        KillabilityResult kill;
        try {
            kill = strong_kill_filter(m, fn_name, pool, p.lines, cfg.limits);
        } catch (const NoCoveringInput&) {
            result.discard_reason = "noCoveringInput";
            run.discarded.push_back(std::move(result));
            continue;
        }
        if (!kill.killed) {
            result.discard_reason = "notStronglyKilled";
            run.discarded.push_back(std::move(result));
            continue;
        }
        detail::classify_into(result, p, fault_id, fn_name, Mode::Unit, pool, cfg.limits,
                              keep_paired);
        detail::finalize_result(result, level);
        run.kept.push_back(std::move(result));
    }
    return run;
}

struct CorpusRun {
    std::vector<CaseResult> unit_cases;
    std::vector<CaseResult> sys_cases;
    std::vector<CaseResult> mutant_cases;
    std::vector<CaseResult> mutant_discards;
    AggregateReport unit_report;
    AggregateReport sys_report;
    AggregateReport mutant_report;
};

// Aggregation that keeps zero-execution ("no TS") rows visible.
inline AggregateReport aggregate_with_empty_rows(const std::vector<VerdictRecord>& records,
                                                 const std::vector<CaseResult>& cases, Mode mode,
                                                 double level = 0.95) {
    AggregateReport agg = aggregate(records, level);
    agg.mode = mode;
    for (const auto& c : cases) {
        if (!c.no_pool) continue;
        agg.faults.push_back(c.report);
        if (!agg.has_totals) {
            agg.totals.fault_id = "total";
            detail::finish_report(agg.totals, level);
            agg.has_totals = true;
        }
    }
    return agg;
}

inline CorpusRun corpus_run(const CorpusManifest& manifest, const std::string& root_dir,
                            uint64_t seed, int jobs = 1, bool keep_paired = false) {
    GeneratorConfig defaults = manifest.defaults;
    defaults.seed = seed;

    struct Slot {
        const FaultCase* fc;
        CaseResult result;
        MutantRun mutants;
        bool is_mutation = false;
        std::string error;
    };
    std::vector<Slot> slots;
    for (const auto& fc : manifest.cases)
        slots.push_back({&fc, {}, {}, fc.group == "mutation", {}});

    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= slots.size()) return;
            Slot& s = slots[i];
            try {
                if (s.is_mutation) {
                    SourceUnit fixed = parse(
                        slurp((std::filesystem::path(root_dir) / s.fc->fixed_path).string()));
                    GeneratorConfig cfg = defaults;
                    cfg.seed = detail::mix_seed(seed, s.fc->case_id);
                    s.mutants = analyze_mutants(fixed, s.fc->target_fn, cfg, s.fc->case_id,
                                                keep_paired);
                } else {
                    s.result = analyze_case(*s.fc, defaults, root_dir, keep_paired);
                }
            } catch (const std::exception& e) {
                s.error = e.what();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& s : slots)
        if (!s.error.empty())
            throw std::runtime_error("case " + s.fc->case_id + ": " + s.error);

    CorpusRun run;
    std::vector<VerdictRecord> unit_v, sys_v, mut_v;
    for (auto& s : slots) {
        if (s.is_mutation) {
            for (auto& r : s.mutants.kept) {
                mut_v.insert(mut_v.end(), r.verdicts.begin(), r.verdicts.end());
                run.mutant_cases.push_back(std::move(r));
            }
            for (auto& r : s.mutants.discarded) run.mutant_discards.push_back(std::move(r));
        } else if (s.fc->mode == Mode::Sys) {
            sys_v.insert(sys_v.end(), s.result.verdicts.begin(), s.result.verdicts.end());
            run.sys_cases.push_back(std::move(s.result));
        } else {
            unit_v.insert(unit_v.end(), s.result.verdicts.begin(), s.result.verdicts.end());
            run.unit_cases.push_back(std::move(s.result));
        }
    }
    run.unit_report = aggregate_with_empty_rows(unit_v, run.unit_cases, Mode::Unit);
    run.sys_report = aggregate_with_empty_rows(sys_v, run.sys_cases, Mode::Sys);
    run.mutant_report = aggregate_with_empty_rows(mut_v, run.mutant_cases, Mode::Unit);
    return run;
}

}  // namespace fep
