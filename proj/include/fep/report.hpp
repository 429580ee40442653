#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "fep/classify.hpp"
#include "fep/errors.hpp"
#include "fep/stats.hpp"
#include "fep/tree_edit.hpp"

namespace fep {

enum class FixPattern { ChangeReturn, AddIfReturn, Other };

inline const char* fix_pattern_name(FixPattern p) {
    switch (p) {
    case FixPattern::ChangeReturn: return "ChangeReturn";
    case FixPattern::AddIfReturn: return "AddIfReturn";
    case FixPattern::Other: return "Other";
    }
    return "?";
}

// Fix shapes that cannot mask: rewriting a return, or guarding with an
// if that exits. ChangeReturn wins when both apply.
inline FixPattern classify_fix_pattern(const StatementScript& script) {
    bool add_if_exit = false;
    for (const auto& op : script.ops) {
        if (op.kind == EditKind::Change && op.source_kind == NodeKind::Return &&
            op.target_kind == NodeKind::Return)
            return FixPattern::ChangeReturn;
        if (op.kind == EditKind::Insert && op.target_kind == NodeKind::If && op.adds_exit)
            add_if_exit = true;
    }
    return add_if_exit ? FixPattern::AddIfReturn : FixPattern::Other;
}

struct VerdictRecord {
    std::string fault_id;
    std::string input_id;
    Mode mode = Mode::Unit;
    std::vector<std::string> verdicts;  // flag names, or empty for noFEP
    bool detectable = false;
    bool infected = false;
    FixPattern fix_pattern = FixPattern::Other;
};

inline VerdictRecord make_verdict_record(std::string fault_id, std::string input_id, Mode mode,
                                         const VerdictSet& v, FixPattern pattern) {
    VerdictRecord r;
    r.fault_id = std::move(fault_id);
    r.input_id = std::move(input_id);
    r.mode = mode;
    for (FepFlag f : {FepFlag::IntFep, FepFlag::ExtFep, FepFlag::SysFep})
        if (v.has(f)) r.verdicts.push_back(flag_name(f));
    r.detectable = v.detectable;
    r.infected = v.infected;
    r.fix_pattern = pattern;
    return r;
}

struct FlagStats {
    int64_t count = 0;
    double proportion = 0.0;
    ConfidenceInterval ci;
};

struct FaultReport {
    std::string fault_id;
    int64_t executions = 0;
    int64_t externally_detectable = 0;
    FlagStats int_fep, ext_fep, sys_fep;
    FixPattern fix_pattern = FixPattern::Other;
};

struct AggregateReport {
    Mode mode = Mode::Unit;
    double level = 0.95;
    std::vector<FaultReport> faults;
    FaultReport totals;  // fault_id "total"; meaningful only when faults nonempty
    bool has_totals = false;
};

namespace detail {

inline void finish_report(FaultReport& r, double level) {
    for (FlagStats* s : {&r.int_fep, &r.ext_fep, &r.sys_fep}) {
        if (r.executions > 0) {
            s->proportion = static_cast<double>(s->count) / static_cast<double>(r.executions);
            s->ci = clopper_pearson(s->count, r.executions, level);
        } else {
            s->proportion = 0.0;
            s->ci = ConfidenceInterval{0.0, 1.0, level, 0, 0};
        }
    }
}

}  // namespace detail

inline AggregateReport aggregate(const std::vector<VerdictRecord>& records, double level = 0.95) {
    AggregateReport agg;
    agg.level = level;
    if (records.empty()) return agg;
    agg.mode = records[0].mode;

    std::vector<std::string> order;
    std::map<std::string, FaultReport> by_fault;
    for (const auto& rec : records) {
        if (rec.mode != agg.mode)
            throw MixedMode("unit and sys verdict records cannot be aggregated together");
        auto it = by_fault.find(rec.fault_id);
        if (it == by_fault.end()) {
            order.push_back(rec.fault_id);
            it = by_fault.emplace(rec.fault_id, FaultReport{}).first;
            it->second.fault_id = rec.fault_id;
            it->second.fix_pattern = rec.fix_pattern;
        }
        FaultReport& r = it->second;
        ++r.executions;
        if (rec.detectable) ++r.externally_detectable;
        for (const auto& v : rec.verdicts) {
            if (v == "intFEP") ++r.int_fep.count;
            if (v == "extFEP") ++r.ext_fep.count;
            if (v == "sysFEP") ++r.sys_fep.count;
        }
    }

    agg.totals.fault_id = "total";
    for (const auto& id : order) {
        FaultReport& r = by_fault[id];
        agg.totals.executions += r.executions;
        agg.totals.externally_detectable += r.externally_detectable;
        agg.totals.int_fep.count += r.int_fep.count;
        agg.totals.ext_fep.count += r.ext_fep.count;
        agg.totals.sys_fep.count += r.sys_fep.count;
        detail::finish_report(r, level);
        agg.faults.push_back(std::move(r));
    }
    detail::finish_report(agg.totals, level);
    agg.has_totals = true;
    return agg;
}

// Four decimals, the granularity used in the tabular mirrors.
inline std::string round4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline std::string to_csv(const AggregateReport& agg) {
    bool sys = agg.mode == Mode::Sys;
    std::string out = "fault_id,executions,externally_detectable,";
    if (sys) out += "sys_fep,";
    out += "int_fep,ext_fep,";
    if (sys) out += "p_sys_fep,";
    out += "p_int_fep,p_ext_fep,fix_pattern\n";
    auto row = [&](const FaultReport& r) {
        out += r.fault_id + "," + std::to_string(r.executions) + "," +
               std::to_string(r.externally_detectable) + ",";
        if (sys) out += std::to_string(r.sys_fep.count) + ",";
        out += std::to_string(r.int_fep.count) + "," + std::to_string(r.ext_fep.count) + ",";
        if (sys) out += round4(r.sys_fep.proportion) + ",";
        out += round4(r.int_fep.proportion) + "," + round4(r.ext_fep.proportion) + "," +
               fix_pattern_name(r.fix_pattern) + "\n";
    };
    for (const auto& r : agg.faults) row(r);
    if (agg.has_totals) row(agg.totals);
    return out;
}

}  // namespace fep
