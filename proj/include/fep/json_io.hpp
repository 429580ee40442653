#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fep/ast.hpp"
#include "fep/classify.hpp"
#include "fep/inputgen.hpp"
#include "fep/instrument.hpp"
#include "fep/interp.hpp"
#include "fep/mutate.hpp"
#include "fep/report.hpp"
#include "fep/tree_edit.hpp"

namespace fep {

using Json = nlohmann::ordered_json;

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

// ---- values ----------------------------------------------------------------

inline Json value_to_json(const Value& v) {
    if (std::holds_alternative<int64_t>(v)) return std::get<int64_t>(v);
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
    Json a = Json::array();
    for (int64_t x : std::get<IntArray>(v)) a.push_back(x);
    return a;
}

inline Value value_from_json(const Json& j) {
    if (j.is_boolean()) return Value{j.get<bool>()};
    if (j.is_number_integer()) return Value{j.get<int64_t>()};
    if (j.is_array()) {
        IntArray a;
        for (const auto& x : j) a.push_back(x.get<int64_t>());
        return Value{std::move(a)};
    }
    throw std::runtime_error("value must be an integer, a boolean or an array of integers");
}

inline Json input_to_json(const InputVector& in) {
    Json j;
    j["args"] = Json::array();
    for (const auto& v : in.args) j["args"].push_back(value_to_json(v));
    if (!in.globals_init.empty()) {
        Json g = Json::object();
        for (const auto& [k, v] : in.globals_init) g[k] = value_to_json(v);
        j["globals"] = g;
    }
    return j;
}

inline InputVector input_from_json(const Json& j) {
    InputVector in;
    for (const auto& a : j.at("args")) in.args.push_back(value_from_json(a));
    if (j.contains("globals"))
        for (const auto& [k, v] : j.at("globals").items()) in.globals_init[k] = value_from_json(v);
    return in;
}

// ---- AST dump --------------------------------------------------------------

inline Json ast_to_json(const AstNode& n) {
    Json j;
    j["kind"] = node_kind_name(n.kind);
    if (!n.token.empty()) j["token"] = n.token;
    j["id"] = n.node_id;
    j["span"] = {n.span.line, n.span.column};
    if (!n.children.empty()) {
        Json c = Json::array();
        for (const auto& child : n.children) c.push_back(ast_to_json(*child));
        j["children"] = c;
    }
    return j;
}

inline Json unit_to_json(const SourceUnit& u) {
    Json j;
    Json globals = Json::array();
    for (const auto& g : u.globals) {
        Json gj;
        gj["name"] = g.name;
        gj["type"] = type_name(g.type);
        if (g.init) gj["init"] = ast_to_json(*g.init);
        globals.push_back(gj);
    }
    j["globals"] = globals;
    Json fns = Json::array();
    for (const auto& f : u.functions) {
        Json fj;
        fj["name"] = f.name;
        Json params = Json::array();
        for (const auto& p : f.params) params.push_back({p.name, type_name(p.type)});
        fj["params"] = params;
        fj["returns"] = type_name(f.return_type);
        fj["body"] = ast_to_json(*f.body);
        fns.push_back(fj);
    }
    j["functions"] = fns;
    if (u.entry) j["entry"] = *u.entry;
    return j;
}

// ---- edit scripts ----------------------------------------------------------

inline Json node_script_to_json(const EditScript& s) {
    Json j;
    j["cost"] = s.cost;
    Json ops = Json::array();
    for (const auto& op : s.ops) {
        Json oj;
        oj["op"] = edit_kind_name(op.kind);
        if (op.source_node >= 0) oj["source"] = op.source_node;
        if (op.target_node >= 0) oj["target"] = op.target_node;
        ops.push_back(oj);
    }
    j["ops"] = ops;
    return j;
}

inline Json statement_script_to_json(const StatementScript& s) {
    Json j;
    j["cost"] = s.cost;
    Json ops = Json::array();
    for (const auto& op : s.ops) {
        Json oj;
        oj["op"] = edit_kind_name(op.kind);
        if (op.source_node >= 0) {
            oj["source"] = op.source_node;
            oj["sourceText"] = op.source_text;
        }
        if (op.target_node >= 0) {
            oj["target"] = op.target_node;
            oj["targetText"] = op.target_text;
        }
        ops.push_back(oj);
    }
    j["ops"] = ops;
    return j;
}

// ---- instrumentation -------------------------------------------------------

inline Json points_to_json(const std::vector<ProgramPoint>& pts) {
    Json a = Json::array();
    for (const auto& p : pts) {
        Json pj;
        pj["pp"] = p.pp_index;
        if (p.anchor_node >= 0)
            pj["anchor"] = p.anchor_node;
        else
            pj["anchor"] = nullptr;
        a.push_back(pj);
    }
    return a;
}

inline std::vector<ProgramPoint> points_from_json(const Json& j) {
    std::vector<ProgramPoint> pts;
    for (const auto& pj : j) {
        ProgramPoint p;
        p.pp_index = pj.at("pp").get<int>();
        p.anchor_node = pj.at("anchor").is_null() ? -1 : pj.at("anchor").get<int>();
        pts.push_back(p);
    }
    return pts;
}

inline Json alignment_to_json(const AlignedInstrumentation& a) {
    Json j;
    j["buggyPoints"] = points_to_json(a.buggy_points);
    j["fixedPoints"] = points_to_json(a.fixed_points);
    Json corr = Json::array();
    for (auto [b, f] : a.correspondence) corr.push_back({b, f});
    j["correspondence"] = corr;
    return j;
}

inline AlignedInstrumentation alignment_from_json(const Json& j) {
    AlignedInstrumentation a;
    a.buggy_points = points_from_json(j.at("buggyPoints"));
    a.fixed_points = points_from_json(j.at("fixedPoints"));
    for (const auto& c : j.at("correspondence"))
        a.correspondence.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
    return a;
}

// ---- outcomes & paired executions ------------------------------------------

inline Json outcome_to_json(const ExecutionOutcome& o) {
    Json j;
    j["status"] = o.status == RunStatus::Normal ? "normal" : "error";
    if (o.status == RunStatus::Error) j["errorKind"] = o.error_kind;
    j["ext"] = o.ext;
    Json out = Json::array();
    for (const auto& rec : o.out) out.push_back(rec);
    j["out"] = out;
    Json cov = Json::array();
    for (int line : o.coverage) cov.push_back(line);
    j["coverage"] = cov;
    Json trace = Json::array();
    for (const auto& s : o.trace) {
        Json sj;
        sj["pp"] = s.pp_index;
        Json b = Json::object();
        for (const auto& [k, v] : s.bindings) b[k] = v;
        sj["bindings"] = b;
        trace.push_back(sj);
    }
    j["trace"] = trace;
    return j;
}

inline ExecutionOutcome outcome_from_json(const Json& j) {
    ExecutionOutcome o;
    o.status = j.at("status").get<std::string>() == "normal" ? RunStatus::Normal
                                                             : RunStatus::Error;
    if (j.contains("errorKind")) o.error_kind = j.at("errorKind").get<std::string>();
    o.ext = j.at("ext").get<std::string>();
    for (const auto& r : j.at("out")) o.out.push_back(r.get<std::string>());
    for (const auto& line : j.at("coverage")) o.coverage.insert(line.get<int>());
    for (const auto& sj : j.at("trace")) {
        StateSnapshot s;
        s.pp_index = sj.at("pp").get<int>();
        for (const auto& [k, v] : sj.at("bindings").items())
            s.bindings[k] = v.get<std::string>();
        o.trace.push_back(std::move(s));
    }
    return o;
}

// One stored record per classified execution, resumable as JSON lines.
struct PairedRecord {
    std::string fault_id;
    std::string input_id;
    FixPattern fix_pattern = FixPattern::Other;
    PairedExecution pe;
};

inline Json paired_to_json(const PairedRecord& r) {
    Json j;
    j["faultId"] = r.fault_id;
    j["inputId"] = r.input_id;
    j["mode"] = mode_name(r.pe.mode);
    j["fixPattern"] = fix_pattern_name(r.fix_pattern);
    j["buggy"] = outcome_to_json(r.pe.buggy);
    j["fixed"] = outcome_to_json(r.pe.fixed);
    j["alignment"] = alignment_to_json(r.pe.alignment);
    if (r.pe.sys_out) {
        Json s = Json::array();
        Json a = Json::array(), b = Json::array();
        for (const auto& x : r.pe.sys_out->first) a.push_back(x);
        for (const auto& x : r.pe.sys_out->second) b.push_back(x);
        j["sysOut"] = {a, b};
    }
    if (r.pe.control_divergent) j["controlDivergent"] = true;
    return j;
}

inline FixPattern fix_pattern_from_name(const std::string& s) {
    if (s == "ChangeReturn") return FixPattern::ChangeReturn;
    if (s == "AddIfReturn") return FixPattern::AddIfReturn;
    return FixPattern::Other;
}

inline PairedRecord paired_from_json(const Json& j) {
    PairedRecord r;
    r.fault_id = j.at("faultId").get<std::string>();
    r.input_id = j.at("inputId").get<std::string>();
    if (j.contains("fixPattern"))
        r.fix_pattern = fix_pattern_from_name(j.at("fixPattern").get<std::string>());
    r.pe.mode = j.at("mode").get<std::string>() == "sys" ? Mode::Sys : Mode::Unit;
    r.pe.buggy = outcome_from_json(j.at("buggy"));
    r.pe.fixed = outcome_from_json(j.at("fixed"));
    r.pe.alignment = alignment_from_json(j.at("alignment"));
    if (j.contains("sysOut")) {
        std::vector<std::string> a, b;
        for (const auto& x : j.at("sysOut").at(0)) a.push_back(x.get<std::string>());
        for (const auto& x : j.at("sysOut").at(1)) b.push_back(x.get<std::string>());
        r.pe.sys_out = {std::move(a), std::move(b)};
    }
    if (j.contains("controlDivergent")) r.pe.control_divergent = j.at("controlDivergent").get<bool>();
    return r;
}

// ---- verdict records ---------------------------------------------------------

inline Json verdict_to_json(const VerdictRecord& r) {
    Json j;
    j["faultId"] = r.fault_id;
    j["inputId"] = r.input_id;
    j["mode"] = mode_name(r.mode);
    Json v = Json::array();
    for (const auto& f : r.verdicts) v.push_back(f);
    j["verdicts"] = v;
    j["detectable"] = r.detectable;
    j["infected"] = r.infected;
    j["fixPattern"] = fix_pattern_name(r.fix_pattern);
    return j;
}

inline VerdictRecord verdict_from_json(const Json& j) {
    VerdictRecord r;
    r.fault_id = j.at("faultId").get<std::string>();
    r.input_id = j.at("inputId").get<std::string>();
    r.mode = j.at("mode").get<std::string>() == "sys" ? Mode::Sys : Mode::Unit;
    for (const auto& v : j.at("verdicts")) r.verdicts.push_back(v.get<std::string>());
    r.detectable = j.at("detectable").get<bool>();
    r.infected = j.at("infected").get<bool>();
    if (j.contains("fixPattern"))
        r.fix_pattern = fix_pattern_from_name(j.at("fixPattern").get<std::string>());
    return r;
}

// ---- pools -------------------------------------------------------------------

inline Json pool_to_json(const InputPool& p) {
    Json j;
    Json inputs = Json::array();
    for (const auto& [id, input] : p.inputs) {
        Json ij;
        ij["id"] = id;
        ij["input"] = input_to_json(input);
        inputs.push_back(ij);
    }
    j["inputs"] = inputs;
    Json cov = Json::object();
    for (const auto& [line, count] : p.coverage_count) cov[std::to_string(line)] = count;
    j["coverage"] = cov;
    j["log"] = {{"accepted", p.accepted}, {"rejected", p.rejected}, {"attempts", p.attempts}};
    return j;
}

inline InputPool pool_from_json(const Json& j) {
    InputPool p;
    for (const auto& ij : j.at("inputs"))
        p.inputs.emplace_back(ij.at("id").get<std::string>(), input_from_json(ij.at("input")));
    for (const auto& [line, count] : j.at("coverage").items())
        p.coverage_count[std::stoi(line)] = count.get<int>();
    p.accepted = j.at("log").at("accepted").get<int64_t>();
    p.rejected = j.at("log").at("rejected").get<int64_t>();
    p.attempts = j.at("log").at("attempts").get<int64_t>();
    return p;
}

// ---- aggregate reports -------------------------------------------------------

inline Json ci_to_json(const ConfidenceInterval& ci) {
    return Json{{"low", ci.low}, {"high", ci.high}, {"level", ci.level}};
}

inline Json fault_report_to_json(const FaultReport& r, Mode mode) {
    Json j;
    j["faultId"] = r.fault_id;
    j["executions"] = r.executions;
    j["externallyDetectable"] = r.externally_detectable;
    if (mode == Mode::Sys) j["sysFEP"] = r.sys_fep.count;
    j["intFEP"] = r.int_fep.count;
    j["extFEP"] = r.ext_fep.count;
    Json p = Json::object(), ci = Json::object();
    if (mode == Mode::Sys) {
        p["sysFEP"] = r.sys_fep.proportion;
        ci["sysFEP"] = ci_to_json(r.sys_fep.ci);
    }
    p["intFEP"] = r.int_fep.proportion;
    p["extFEP"] = r.ext_fep.proportion;
    ci["intFEP"] = ci_to_json(r.int_fep.ci);
    ci["extFEP"] = ci_to_json(r.ext_fep.ci);
    j["pFEP"] = p;
    j["ci"] = ci;
    j["fixPattern"] = fix_pattern_name(r.fix_pattern);
    return j;
}

inline Json report_to_json(const AggregateReport& agg, uint64_t seed) {
    Json j;
    j["meta"] = {{"mode", mode_name(agg.mode)}, {"seed", seed}, {"toolVersion", "fep 0.1.0"}};
    Json faults = Json::array();
    for (const auto& r : agg.faults) faults.push_back(fault_report_to_json(r, agg.mode));
    j["faults"] = faults;
    if (agg.has_totals) j["totals"] = fault_report_to_json(agg.totals, agg.mode);
    return j;
}

}  // namespace fep
