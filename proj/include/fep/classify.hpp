#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fep/errors.hpp"
#include "fep/instrument.hpp"
#include "fep/interp.hpp"

namespace fep {

enum class Mode { Unit, Sys };

inline const char* mode_name(Mode m) { return m == Mode::Unit ? "unit" : "sys"; }

enum class FepFlag { IntFep, ExtFep, SysFep };

inline const char* flag_name(FepFlag f) {
    switch (f) {
    case FepFlag::IntFep: return "intFEP";
    case FepFlag::ExtFep: return "extFEP";
    case FepFlag::SysFep: return "sysFEP";
    }
    return "?";
}

struct VerdictSet {
    std::set<FepFlag> flags;  // empty set means noFEP
    bool detectable = false;  // the fault showed at the chosen oracle (ext or out)
    bool infected = false;    // some compared artifact differed

    bool no_fep() const { return flags.empty(); }
    bool has(FepFlag f) const { return flags.count(f) > 0; }
};

// Smallest closed superset under intFEP => extFEP (=> sysFEP at system level).
inline VerdictSet close_flag(FepFlag flag, Mode mode) {
    if (mode == Mode::Unit && flag == FepFlag::SysFep)
        throw DomainError("sysFEP cannot be reported by unit-level analysis");
    VerdictSet v;
    v.flags.insert(flag);
    if (flag == FepFlag::IntFep) v.flags.insert(FepFlag::ExtFep);
    if (mode == Mode::Sys && (flag == FepFlag::IntFep || flag == FepFlag::ExtFep))
        v.flags.insert(FepFlag::SysFep);
    return v;
}

struct PairedExecution {
    ExecutionOutcome buggy;
    ExecutionOutcome fixed;
    AlignedInstrumentation alignment;
    Mode mode = Mode::Unit;
    // whole-system output of the runs that produced this pair (sys mode)
    std::optional<std::pair<std::vector<std::string>, std::vector<std::string>>> sys_out;
    // invocation counts of the two runs diverged; observable behaviour difference
    bool control_divergent = false;
};

namespace detail {

inline void check_trace(const ExecutionOutcome& o, const std::vector<ProgramPoint>& points,
                        const char* side) {
    std::set<int> valid;
    for (const auto& p : points) valid.insert(p.pp_index);
    if (o.trace.empty())
        throw AlignmentMismatch(std::string(side) + " trace has no snapshots");
    for (const auto& s : o.trace)
        if (!valid.count(s.pp_index))
            throw AlignmentMismatch(std::string(side) +
                                    " trace contains a point outside the instrumentation");
}

}  // namespace detail

inline VerdictSet classify(const PairedExecution& pe) {
    detail::check_trace(pe.buggy, pe.alignment.buggy_points, "buggy");
    detail::check_trace(pe.fixed, pe.alignment.fixed_points, "fixed");

    VerdictSet verdict;
    auto detected = [&] {
        verdict.detectable = true;
        verdict.infected = true;
        return verdict;
    };

    if (pe.mode == Mode::Unit) {
        if (pe.buggy.ext != pe.fixed.ext) return detected();
    } else {
        if (!pe.sys_out) throw AlignmentMismatch("system output pair missing in sys mode");
        if (pe.control_divergent || pe.sys_out->first != pe.sys_out->second) return detected();
        if (pe.buggy.ext != pe.fixed.ext) {
            VerdictSet v = close_flag(FepFlag::SysFep, Mode::Sys);
            v.infected = true;
            return v;
        }
    }

    // state right before leaving the unit
    if (pe.buggy.trace.back().bindings != pe.fixed.trace.back().bindings) {
        VerdictSet v = close_flag(FepFlag::ExtFep, pe.mode);
        v.infected = true;
        return v;
    }

    // executed point sequences, reduced to aligned points, buggy ids mapped
    std::map<int, int> b2f;
    std::set<int> f_range;
    for (auto [b, f] : pe.alignment.correspondence) {
        b2f[b] = f;
        f_range.insert(f);
    }
    std::vector<const StateSnapshot*> b_path, f_path;
    std::vector<int> b_ids, f_ids;
    for (const auto& s : pe.buggy.trace) {
        auto it = b2f.find(s.pp_index);
        if (it != b2f.end()) {
            b_path.push_back(&s);
            b_ids.push_back(it->second);
        }
    }
    for (const auto& s : pe.fixed.trace) {
        if (f_range.count(s.pp_index)) {
            f_path.push_back(&s);
            f_ids.push_back(s.pp_index);
        }
    }
    if (b_ids != f_ids) {
        VerdictSet v = close_flag(FepFlag::IntFep, pe.mode);
        v.infected = true;
        return v;
    }

    // interior aligned pairs; entry and the final state are already covered
    for (size_t i = 1; i + 1 < b_path.size(); ++i) {
        if (b_path[i]->bindings != f_path[i]->bindings) {
            VerdictSet v = close_flag(FepFlag::IntFep, pe.mode);
            v.infected = true;
            return v;
        }
    }
    return verdict;  // noFEP, not even infected
}

}  // namespace fep
