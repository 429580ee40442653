#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fep/json_io.hpp"
#include "fep/parser.hpp"
#include "fep/pipeline.hpp"
#include "fep/pretty.hpp"

namespace fs = std::filesystem;
using fep::Json;

namespace {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fep::SourceUnit load_program(const std::string& path) { return fep::parse(fep::slurp(path)); }

// Single function of the unit, or the one selected with --fn.
const fep::FunctionDef& pick_function(const fep::SourceUnit& unit, const std::string& fn,
                                      const std::string& what) {
    if (!fn.empty()) {
        const fep::FunctionDef* f = unit.find_function(fn);
        if (!f) throw CliError("no function named '" + fn + "' in " + what);
        return *f;
    }
    if (unit.functions.size() == 1) return unit.functions[0];
    throw CliError(what + " has several functions; pick one with --fn");
}

void write_or_print(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::cout << content;
    else
        fep::spit(path, content);
}

std::vector<int> parse_lines(const std::string& csv) {
    std::vector<int> lines;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) lines.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return lines;
}

std::vector<Json> read_jsonl(const std::string& path) {
    std::vector<Json> records;
    std::string text = fep::slurp(path);
    std::string line;
    for (size_t pos = 0; pos <= text.size(); ++pos) {
        if (pos == text.size() || text[pos] == '\n') {
            if (!line.empty()) records.push_back(Json::parse(line));
            line.clear();
        } else {
            line += text[pos];
        }
    }
    return records;
}

void emit_reports(const fep::AggregateReport& agg, uint64_t seed, const std::string& json_path,
                  const std::string& csv_path) {
    if (!json_path.empty()) write_or_print(json_path, fep::report_to_json(agg, seed).dump(2) + "\n");
    if (!csv_path.empty()) write_or_print(csv_path, fep::to_csv(agg));
    if (json_path.empty() && csv_path.empty())
        std::cout << fep::report_to_json(agg, seed).dump(2) << "\n";
}

int run_cli(int argc, char** argv) {
    CLI::App app{"failed error propagation analysis for MiniLang buggy/fixed pairs"};
    app.require_subcommand(1);

    // parse
    auto* cmd_parse = app.add_subcommand("parse", "parse and validate a program");
    std::string parse_program;
    bool parse_json = false, parse_pretty = false;
    cmd_parse->add_option("--program", parse_program, "program file")->required();
    cmd_parse->add_flag("--json", parse_json, "print the AST as JSON");
    cmd_parse->add_flag("--pretty", parse_pretty, "print the canonical layout");
    cmd_parse->callback([&] {
        fep::SourceUnit unit = load_program(parse_program);
        if (parse_pretty) std::cout << fep::pretty(unit);
        if (parse_json || !parse_pretty) std::cout << fep::unit_to_json(unit).dump(2) << "\n";
    });

    // diff
    auto* cmd_diff = app.add_subcommand("diff", "statement-level edit script between versions");
    std::string diff_buggy, diff_fixed, diff_fn, diff_out;
    bool diff_nodes = false;
    cmd_diff->add_option("--buggy", diff_buggy, "buggy program")->required();
    cmd_diff->add_option("--fixed", diff_fixed, "fixed program")->required();
    cmd_diff->add_option("--fn", diff_fn, "function to diff");
    cmd_diff->add_option("--out", diff_out, "output file (default stdout)");
    cmd_diff->add_flag("--node-level", diff_nodes, "emit the node-level script instead");
    cmd_diff->add_flag("--json", "accepted for symmetry; output is always JSON");
    cmd_diff->callback([&] {
        fep::SourceUnit b = load_program(diff_buggy);
        fep::SourceUnit f = load_program(diff_fixed);
        const fep::FunctionDef& bf = pick_function(b, diff_fn, diff_buggy);
        const fep::FunctionDef& ff = pick_function(f, diff_fn.empty() ? bf.name : diff_fn,
                                                   diff_fixed);
        Json j;
        if (diff_nodes) {
            j = fep::node_script_to_json(fep::tree_edit_distance(*bf.body, *ff.body));
        } else {
            fep::StatementScript s = fep::statement_script(bf, ff);
            j = fep::statement_script_to_json(s);
            j["fixPattern"] = fep::fix_pattern_name(fep::classify_fix_pattern(s));
        }
        write_or_print(diff_out, j.dump(2) + "\n");
    });

    // align
    auto* cmd_align = app.add_subcommand("align", "program points and their correspondence");
    std::string al_buggy, al_fixed, al_fn, al_out;
    cmd_align->add_option("--buggy", al_buggy)->required();
    cmd_align->add_option("--fixed", al_fixed)->required();
    cmd_align->add_option("--fn", al_fn, "function to align");
    cmd_align->add_option("--out", al_out, "output file (default stdout)");
    cmd_align->add_flag("--json", "accepted for symmetry; output is always JSON");
    cmd_align->callback([&] {
        fep::SourceUnit b = load_program(al_buggy);
        fep::SourceUnit f = load_program(al_fixed);
        const fep::FunctionDef& bf = pick_function(b, al_fn, al_buggy);
        const fep::FunctionDef& ff = pick_function(f, al_fn.empty() ? bf.name : al_fn, al_fixed);
        fep::StatementScript s = fep::statement_script(bf, ff);
        fep::AlignedInstrumentation a = fep::instrument_pair(bf, ff, s);
        write_or_print(al_out, fep::alignment_to_json(a).dump(2) + "\n");
    });

    // gen-inputs
    auto* cmd_gen = app.add_subcommand("gen-inputs", "coverage-targeted random input pool");
    std::string gen_program, gen_fn, gen_lines, gen_out;
    uint64_t gen_seed = 0;
    int gen_target = 1000, gen_goals = 0, gen_maxlen = 8;
    int64_t gen_min = -100, gen_max = 100, gen_attempts = 200000;
    double gen_budget = 0.0;
    cmd_gen->add_option("--program", gen_program, "program whose inputs to search")->required();
    cmd_gen->add_option("--fn", gen_fn, "function the inputs call")->required();
    cmd_gen->add_option("--lines", gen_lines, "comma-separated lines to cover")->required();
    cmd_gen->add_option("--target", gen_target, "total executions to aim for");
    cmd_gen->add_option("--goals-multiply", gen_goals, "coverage count per line (overrides --target)");
    cmd_gen->add_option("--seed", gen_seed, "rng seed");
    cmd_gen->add_option("--int-min", gen_min, "minimum sampled int");
    cmd_gen->add_option("--int-max", gen_max, "maximum sampled int");
    cmd_gen->add_option("--max-array-len", gen_maxlen, "maximum sampled array length");
    cmd_gen->add_option("--max-attempts", gen_attempts, "attempt cap");
    cmd_gen->add_option("--budget-seconds", gen_budget, "wall clock cap (0 = off)");
    cmd_gen->add_option("--out", gen_out, "pool file (default stdout)");
    cmd_gen->callback([&] {
        fep::SourceUnit unit = load_program(gen_program);
        fep::GeneratorConfig cfg;
        cfg.line_list = parse_lines(gen_lines);
        cfg.target_executions = gen_target;
        cfg.goals_multiply = gen_goals;
        cfg.seed = gen_seed;
        cfg.ranges.int_min = gen_min;
        cfg.ranges.int_max = gen_max;
        cfg.max_array_len = gen_maxlen;
        cfg.max_attempts = gen_attempts;
        cfg.budget_seconds = gen_budget;
        fep::InputPool pool = fep::generate_pool(unit, gen_fn, cfg);
        write_or_print(gen_out, fep::pool_to_json(pool).dump(2) + "\n");
    });

    // run
    auto* cmd_run = app.add_subcommand("run", "execute one input and emit the outcome");
    std::string run_program, run_fn, run_input, run_input_file, run_points, run_target;
    int64_t run_steps = 1000000;
    bool run_sys = false;
    cmd_run->add_option("--program", run_program)->required();
    cmd_run->add_option("--fn", run_fn, "function (unit) or entry override (sys)");
    cmd_run->add_option("--input", run_input, "input JSON, e.g. {\"args\":[5]}");
    cmd_run->add_option("--input-file", run_input_file, "input JSON file");
    cmd_run->add_option("--points", run_points, "program point list for snapshots");
    cmd_run->add_flag("--sys", run_sys, "whole-system run");
    cmd_run->add_option("--target-fn", run_target, "function traced per invocation (sys)");
    cmd_run->add_option("--max-steps", run_steps, "step budget");
    cmd_run->callback([&] {
        fep::SourceUnit unit = load_program(run_program);
        if (run_input.empty() == run_input_file.empty())
            throw CliError("give exactly one of --input / --input-file");
        Json ij = run_input.empty() ? Json::parse(fep::slurp(run_input_file))
                                    : Json::parse(run_input);
        fep::InputVector input = fep::input_from_json(ij);
        fep::TracePlan plan;
        if (!run_points.empty()) {
            auto pts = fep::points_from_json(Json::parse(fep::slurp(run_points)));
            for (const auto& p : pts) {
                if (p.anchor_node < 0)
                    plan.entry_pp = p.pp_index;
                else
                    plan.after_stmt[p.anchor_node] = p.pp_index;
            }
        }
        fep::ExecLimits limits;
        limits.max_steps = run_steps;
        Json out;
        if (run_sys) {
            if (run_target.empty()) throw CliError("--sys needs --target-fn");
            fep::SystemRun sr = fep::execute_system(unit, input, run_target, plan, limits);
            out["system"] = fep::outcome_to_json(sr.system);
            Json inv = Json::array();
            for (const auto& o : sr.invocations) inv.push_back(fep::outcome_to_json(o));
            out["invocations"] = inv;
        } else {
            const fep::FunctionDef& f = pick_function(unit, run_fn, run_program);
            out = fep::outcome_to_json(fep::execute_unit(unit, f.name, input, plan, limits));
        }
        std::cout << out.dump(2) << "\n";
    });

    // classify
    auto* cmd_classify = app.add_subcommand("classify", "verdicts for stored paired executions");
    std::string cl_paired, cl_out;
    cmd_classify->add_option("--paired", cl_paired, "paired executions (JSON lines)")->required();
    cmd_classify->add_option("--out", cl_out, "verdict records file (default stdout)");
    cmd_classify->callback([&] {
        std::string out;
        for (const Json& j : read_jsonl(cl_paired)) {
            fep::PairedRecord rec = fep::paired_from_json(j);
            fep::VerdictSet v = fep::classify(rec.pe);
            fep::VerdictRecord vr = fep::make_verdict_record(rec.fault_id, rec.input_id,
                                                             rec.pe.mode, v, rec.fix_pattern);
            out += fep::verdict_to_json(vr).dump() + "\n";
        }
        write_or_print(cl_out, out);
    });

    // mutate
    auto* cmd_mutate = app.add_subcommand("mutate", "write mutants of a function");
    std::string mu_program, mu_fn, mu_out;
    cmd_mutate->add_option("--program", mu_program)->required();
    cmd_mutate->add_option("--fn", mu_fn)->required();
    cmd_mutate->add_option("--out", mu_out, "output directory")->required();
    cmd_mutate->callback([&] {
        fep::SourceUnit unit = load_program(mu_program);
        auto mutants = fep::generate_mutants(unit, mu_fn);
        fs::create_directories(mu_out);
        Json manifest = Json::array();
        int serial = 0;
        for (const auto& m : mutants) {
            char name[32];
            std::snprintf(name, sizeof name, "m%03d.mlang", serial++);
            fep::spit((fs::path(mu_out) / name).string(), fep::pretty(m.mutated));
            Json mj;
            mj["file"] = name;
            mj["operatorId"] = m.operator_id;
            mj["locusNode"] = m.locus_node;
            mj["line"] = m.locus_span.line;
            mj["column"] = m.locus_span.column;
            manifest.push_back(mj);
        }
        fep::spit((fs::path(mu_out) / "manifest.json").string(), manifest.dump(2) + "\n");
        std::cout << mutants.size() << " mutants written to " << mu_out << "\n";
    });

    // analyze
    auto* cmd_an = app.add_subcommand("analyze", "full pipeline for cases or mutants");
    std::string an_manifest, an_program, an_fn, an_mode, an_json, an_csv, an_verdicts, an_paired;
    std::vector<std::string> an_cases;
    uint64_t an_seed = 42;
    int an_jobs = 1;
    bool an_mutants = false;
    cmd_an->add_option("--manifest", an_manifest, "corpus manifest");
    cmd_an->add_option("--case", an_cases, "case filter (repeatable)");
    cmd_an->add_option("--mode", an_mode, "unit|sys case filter");
    cmd_an->add_flag("--mutants", an_mutants, "analyze mutants of --program/--fn instead");
    cmd_an->add_option("--program", an_program, "fixed program (with --mutants)");
    cmd_an->add_option("--fn", an_fn, "target function (with --mutants)");
    cmd_an->add_option("--seed", an_seed, "seed");
    cmd_an->add_option("--jobs", an_jobs, "parallel case workers");
    cmd_an->add_option("--json", an_json, "JSON report path");
    cmd_an->add_option("--csv", an_csv, "CSV report path");
    cmd_an->add_option("--verdicts", an_verdicts, "verdict records JSONL path");
    cmd_an->add_option("--paired", an_paired, "paired execution JSONL path");
    cmd_an->callback([&] {
        bool keep_paired = !an_paired.empty();
        std::vector<fep::VerdictRecord> verdicts;
        std::string paired_out;
        auto collect = [&](const fep::CaseResult& r) {
            verdicts.insert(verdicts.end(), r.verdicts.begin(), r.verdicts.end());
            for (const auto& p : r.paired) paired_out += fep::paired_to_json(p).dump() + "\n";
        };
        fep::AggregateReport agg;
        if (an_mutants) {
            if (an_program.empty() || an_fn.empty())
                throw CliError("--mutants needs --program and --fn");
            fep::SourceUnit fixed = load_program(an_program);
            fep::GeneratorConfig cfg;
            cfg.seed = an_seed;
            cfg.target_executions = 150;
            fep::MutantRun run = fep::analyze_mutants(fixed, an_fn, cfg, "mut", keep_paired);
            std::vector<fep::CaseResult> kept = std::move(run.kept);
            for (const auto& r : kept) collect(r);
            agg = fep::aggregate_with_empty_rows(verdicts, kept, fep::Mode::Unit);
            for (const auto& d : run.discarded)
                std::cerr << "discarded " << d.fault_id << ": " << d.discard_reason << "\n";
        } else {
            if (an_manifest.empty()) throw CliError("give --manifest (or --mutants)");
            fep::CorpusManifest manifest =
                fep::manifest_from_json(Json::parse(fep::slurp(an_manifest)));
            std::string root = fs::path(an_manifest).parent_path().string();
            fep::GeneratorConfig defaults = manifest.defaults;
            defaults.seed = an_seed;
            std::vector<fep::CaseResult> results;
            fep::Mode mode = an_mode == "sys" ? fep::Mode::Sys : fep::Mode::Unit;
            for (const auto& fc : manifest.cases) {
                if (!an_cases.empty() &&
                    std::find(an_cases.begin(), an_cases.end(), fc.case_id) == an_cases.end())
                    continue;
                if (!an_mode.empty() && fc.mode != mode) continue;
                if (fc.group == "mutation") continue;
                results.push_back(fep::analyze_case(fc, defaults, root, keep_paired));
                collect(results.back());
            }
            agg = fep::aggregate_with_empty_rows(verdicts, results,
                                                 an_mode == "sys" ? fep::Mode::Sys
                                                                  : fep::Mode::Unit);
        }
        emit_reports(agg, an_seed, an_json, an_csv);
        if (!an_verdicts.empty()) {
            std::string out;
            for (const auto& v : verdicts) out += fep::verdict_to_json(v).dump() + "\n";
            fep::spit(an_verdicts, out);
        }
        if (!an_paired.empty()) fep::spit(an_paired, paired_out);
    });

    // report
    auto* cmd_report = app.add_subcommand("report", "aggregate stored verdict records");
    std::string rp_verdicts, rp_mode = "unit", rp_json, rp_csv;
    uint64_t rp_seed = 0;
    cmd_report->add_option("--verdicts", rp_verdicts, "verdict records (JSON lines)")->required();
    cmd_report->add_option("--mode", rp_mode, "unit|sys (sanity check)");
    cmd_report->add_option("--json", rp_json, "JSON report path");
    cmd_report->add_option("--csv", rp_csv, "CSV report path");
    cmd_report->add_option("--seed", rp_seed, "seed recorded in the report meta");
    cmd_report->callback([&] {
        std::vector<fep::VerdictRecord> records;
        for (const Json& j : read_jsonl(rp_verdicts)) records.push_back(fep::verdict_from_json(j));
        fep::Mode want = rp_mode == "sys" ? fep::Mode::Sys : fep::Mode::Unit;
        for (const auto& r : records)
            if (r.mode != want)
                throw fep::MixedMode("verdict record mode differs from --mode");
        fep::AggregateReport agg = fep::aggregate(records);
        agg.mode = want;
        emit_reports(agg, rp_seed, rp_json, rp_csv);
    });

    // corpus
    auto* cmd_corpus = app.add_subcommand("corpus", "bundled corpus commands");
    auto* cmd_corpus_run = cmd_corpus->add_subcommand("run", "run the whole corpus");
    std::string co_manifest = "corpus/manifest.json", co_out;
    uint64_t co_seed = 42;
    int co_jobs = 1;
    cmd_corpus_run->add_option("--manifest", co_manifest, "corpus manifest");
    cmd_corpus_run->add_option("--seed", co_seed, "seed");
    cmd_corpus_run->add_option("--jobs", co_jobs, "parallel case workers");
    cmd_corpus_run->add_option("--out", co_out, "output directory")->required();
    cmd_corpus_run->callback([&] {
        fep::CorpusManifest manifest =
            fep::manifest_from_json(Json::parse(fep::slurp(co_manifest)));
        std::string root = fs::path(co_manifest).parent_path().string();
        fep::CorpusRun run = fep::corpus_run(manifest, root, co_seed, co_jobs);
        fs::create_directories(co_out);
        auto emit = [&](const char* stem, const fep::AggregateReport& agg) {
            fep::spit((fs::path(co_out) / (std::string(stem) + ".json")).string(),
                      fep::report_to_json(agg, co_seed).dump(2) + "\n");
            fep::spit((fs::path(co_out) / (std::string(stem) + ".csv")).string(),
                      fep::to_csv(agg));
        };
        emit("report_unit", run.unit_report);
        emit("report_sys", run.sys_report);
        emit("report_mutants", run.mutant_report);
        std::string verdicts;
        for (const auto* group : {&run.unit_cases, &run.sys_cases, &run.mutant_cases})
            for (const auto& r : *group)
                for (const auto& v : r.verdicts) verdicts += fep::verdict_to_json(v).dump() + "\n";
        fep::spit((fs::path(co_out) / "verdicts.jsonl").string(), verdicts);
        std::string discards;
        for (const auto& d : run.mutant_discards)
            discards += d.fault_id + "," + d.discard_reason + "\n";
        fep::spit((fs::path(co_out) / "mutant_discards.csv").string(), discards);
        std::cout << "unit cases: " << run.unit_cases.size()
                  << ", sys cases: " << run.sys_cases.size()
                  << ", mutants kept: " << run.mutant_cases.size()
                  << ", mutants discarded: " << run.mutant_discards.size() << "\n";
        std::cout << "reports written to " << co_out << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const fep::SyntaxError& e) {
        std::cerr << e.what() << "\n";
    } catch (const fep::TypeError& e) {
        std::cerr << e.what() << "\n";
    } catch (const fep::DomainError& e) {
        std::cerr << e.what() << "\n";
    } catch (const fep::MisalignedScript& e) {
        std::cerr << e.what() << "\n";
    } catch (const fep::AlignmentMismatch& e) {
        std::cerr << e.what() << "\n";
    } catch (const fep::EmptyPool& e) {
        std::cerr << e.what() << "\n";
    } catch (const fep::MixedMode& e) {
        std::cerr << e.what() << "\n";
    } catch (const CliError& e) {
        std::cerr << e.what() << "\n";
    } catch (const fep::IoError& e) {
        std::cerr << e.what() << "\n";
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "bad JSON: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
