#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fep/ast.hpp"
#include "fep/errors.hpp"
#include "fep/validator.hpp"
#include "fep/value.hpp"

namespace fep {

struct InputVector {
    std::vector<Value> args;
    std::map<std::string, Value> globals_init;  // overrides for declared initializers
};

struct StateSnapshot {
    int pp_index = 0;
    std::map<std::string, std::string> bindings;  // name -> canonical value
};

inline bool operator==(const StateSnapshot& a, const StateSnapshot& b) {
    return a.pp_index == b.pp_index && a.bindings == b.bindings;
}

enum class RunStatus { Normal, Error };

struct ExecutionOutcome {
    std::vector<StateSnapshot> trace;
    std::string ext;                // canonical (return value + globals, or error token)
    std::vector<std::string> out;   // canonical output records
    std::set<int> coverage;         // executed source lines
    RunStatus status = RunStatus::Normal;
    std::string error_kind;         // throw | div_by_zero | index_out_of_bounds | step_budget | call_depth
};

struct ExecLimits {
    int64_t max_steps = 1000000;
    int max_call_depth = 256;
};

// Where snapshots are taken: pp after given statement node ids, plus an
// entry point with no anchor.
struct TracePlan {
    int entry_pp = -1;
    std::map<int, int> after_stmt;  // node id -> pp index

    bool empty() const { return entry_pp < 0 && after_stmt.empty(); }
};

namespace detail {

struct RuntimeFault {
    std::string kind;
};

class Interpreter {
public:
    Interpreter(const SourceUnit& unit, const ExecLimits& limits, const TracePlan& plan,
                std::string traced_fn, bool trace_every_call)
        : unit_(unit), limits_(limits), plan_(plan), traced_fn_(std::move(traced_fn)),
          trace_every_call_(trace_every_call) {}

    void init_globals(const std::map<std::string, Value>& overrides) {
        for (const auto& g : unit_.globals) {
            Value v = g.init ? const_eval(*g.init) : default_value(g.type);
            globals_[g.name] = std::move(v);
        }
        for (const auto& [name, v] : overrides) {
            auto it = globals_.find(name);
            if (it == globals_.end())
                throw TypeError(0, 0, "unknown global override '" + name + "'");
            if (type_of_value(v) != type_of_value(it->second))
                throw TypeError(0, 0, "type mismatch for global override '" + name + "'");
            it->second = v;
        }
    }

    // Runs fn and finalizes this interpreter's outcome set.
    void run(const std::string& fn_name, const std::vector<Value>& args) {
        const FunctionDef* fn = unit_.find_function(fn_name);
        if (!fn) throw TypeError(0, 0, "no function named '" + fn_name + "'");
        try {
            std::optional<Value> ret = call_function(*fn, args, true);
            std::map<std::string, std::string> fields;
            fields["globals"] = globals_json();
            fields["return"] = ret ? canonical_serialize(*ret) : "null";
            result_.ext = canonical_object(fields);
            result_.status = RunStatus::Normal;
        } catch (const RuntimeFault& f) {
            for (auto* rec : active_invocations_) finish_error(*rec, f.kind);
            result_.status = RunStatus::Error;
            result_.error_kind = f.kind;
            result_.ext = error_ext(f.kind);
        }
        result_.out = out_;
        result_.coverage = coverage_;
        result_.trace = std::move(root_trace_);
    }

    ExecutionOutcome take_result() { return std::move(result_); }
    std::vector<ExecutionOutcome> take_invocations() { return std::move(invocations_); }

private:
    struct Frame {
        std::vector<std::map<std::string, Value>> scopes;
        std::vector<StateSnapshot>* trace = nullptr;
    };
    struct InvocationRec {
        std::vector<StateSnapshot> trace;
        std::set<int> coverage;
        size_t slot;  // index into invocations_
    };

    const SourceUnit& unit_;
    const ExecLimits& limits_;
    const TracePlan& plan_;
    std::string traced_fn_;
    bool trace_every_call_;

    std::map<std::string, Value> globals_;
    std::vector<Frame> frames_;
    std::vector<std::string> out_;
    std::set<int> coverage_;
    int64_t steps_ = 0;
    std::vector<StateSnapshot> root_trace_;
    std::vector<ExecutionOutcome> invocations_;
    std::vector<std::unique_ptr<InvocationRec>> owned_recs_;
    std::vector<InvocationRec*> active_invocations_;
    ExecutionOutcome result_;

    void step() {
        if (++steps_ > limits_.max_steps) throw RuntimeFault{"step_budget"};
    }

    std::string globals_json() const {
        std::map<std::string, std::string> g;
        for (const auto& [k, v] : globals_) g[k] = canonical_serialize(v);
        return canonical_object(g);
    }

    std::string error_ext(const std::string& kind) const {
        std::map<std::string, std::string> fields;
        fields["error"] = "\"" + kind + "\"";
        fields["globals"] = globals_json();
        return canonical_object(fields);
    }

    void finish_error(InvocationRec& rec, const std::string& kind) {
        ExecutionOutcome& o = invocations_[rec.slot];
        o.trace = std::move(rec.trace);
        o.coverage = std::move(rec.coverage);
        o.status = RunStatus::Error;
        o.error_kind = kind;
        o.ext = error_ext(kind);
    }

    Value const_eval(const AstNode& e) {
        switch (e.kind) {
        case NodeKind::Literal:
            if (e.token == "array") {
                IntArray a;
                for (const auto& c : e.children) a.push_back(std::get<int64_t>(const_eval(*c)));
                return Value{std::move(a)};
            }
            if (e.token == "true") return Value{true};
            if (e.token == "false") return Value{false};
            return Value{static_cast<int64_t>(std::stoll(e.token))};
        case NodeKind::UnOp: {
            int64_t v = std::get<int64_t>(const_eval(*e.children[0]));
            return Value{static_cast<int64_t>(0 - static_cast<uint64_t>(v))};
        }
        default:
            throw TypeError(e.span.line, e.span.column, "not a constant expression");
        }
    }

    std::optional<Value> call_function(const FunctionDef& fn, const std::vector<Value>& args,
                                       bool is_root) {
        if (args.size() != fn.params.size())
            throw TypeError(0, 0, "arity mismatch calling '" + fn.name + "'");
        for (size_t i = 0; i < args.size(); ++i)
            if (type_of_value(args[i]) != fn.params[i].type)
                throw TypeError(0, 0, "argument type mismatch calling '" + fn.name + "'");
        if (frames_.size() >= static_cast<size_t>(limits_.max_call_depth))
            throw RuntimeFault{"call_depth"};

        Frame frame;
        frame.scopes.emplace_back();
        for (size_t i = 0; i < args.size(); ++i) frame.scopes.back()[fn.params[i].name] = args[i];

        InvocationRec* rec = nullptr;
        bool traced = false;
        if (fn.name == traced_fn_) {
            if (trace_every_call_) {
                owned_recs_.push_back(std::make_unique<InvocationRec>());
                rec = owned_recs_.back().get();
                rec->slot = invocations_.size();
                invocations_.emplace_back();
                active_invocations_.push_back(rec);
                frame.trace = &rec->trace;
                traced = true;
            } else if (is_root) {
                frame.trace = &root_trace_;
                traced = true;
            }
        }

        frames_.push_back(std::move(frame));
        if (traced && plan_.entry_pp >= 0) snapshot(plan_.entry_pp);

        std::optional<Value> ret;
        const AstNode& body = *fn.body;
        Signal sig = exec_block(body);
        if (sig.kind == Signal::Return) ret = std::move(sig.value);

        if (rec) {
            std::map<std::string, std::string> fields;
            fields["globals"] = globals_json();
            fields["return"] = (ret && fn.return_type != TypeTag::Void)
                                   ? canonical_serialize(*ret)
                                   : "null";
            ExecutionOutcome& o = invocations_[rec->slot];
            o.ext = canonical_object(fields);
            o.status = RunStatus::Normal;
            o.trace = std::move(rec->trace);
            o.coverage = std::move(rec->coverage);
            active_invocations_.pop_back();
        }
        frames_.pop_back();
        return ret;
    }

    struct Signal {
        enum Kind { None, Return } kind = None;
        std::optional<Value> value;
    };

    void mark_line(const AstNode& s) {
        coverage_.insert(s.span.line);
        for (auto* rec : active_invocations_) rec->coverage.insert(s.span.line);
    }

    void snapshot(int pp) {
        Frame& f = frames_.back();
        if (!f.trace) return;
        StateSnapshot snap;
        snap.pp_index = pp;
        for (const auto& [k, v] : globals_) snap.bindings[k] = canonical_serialize(v);
        for (const auto& scope : f.scopes)
            for (const auto& [k, v] : scope) snap.bindings[k] = canonical_serialize(v);
        f.trace->push_back(std::move(snap));
    }

    void after_statement(const AstNode& s) {
        if (!frames_.back().trace) return;
        auto it = plan_.after_stmt.find(s.node_id);
        if (it != plan_.after_stmt.end()) snapshot(it->second);
    }

    Signal exec_block(const AstNode& block) {
        frames_.back().scopes.emplace_back();
        Signal sig;
        for (const auto& child : block.children) {
            sig = exec_stmt(*child);
            if (sig.kind != Signal::None) break;
            after_statement(*child);
        }
        frames_.back().scopes.pop_back();
        return sig;
    }

    Value* find_var(const std::string& name) {
        Frame& f = frames_.back();
        for (auto it = f.scopes.rbegin(); it != f.scopes.rend(); ++it) {
            auto hit = it->find(name);
            if (hit != it->end()) return &hit->second;
        }
        auto g = globals_.find(name);
        return g != globals_.end() ? &g->second : nullptr;
    }

    Signal exec_stmt(const AstNode& s) {
        step();
        mark_line(s);
        switch (s.kind) {
        case NodeKind::VarDecl: {
            auto [name, t] = split_decl_token(s.token);
            Value v = s.children.empty() ? default_value(t) : eval(*s.children[0]);
            frames_.back().scopes.back()[name] = std::move(v);
            return {};
        }
        case NodeKind::Assign: {
            const AstNode& lhs = *s.children[0];
            Value rhs = eval(*s.children[1]);
            if (lhs.kind == NodeKind::VarRef) {
                *find_var(lhs.token) = std::move(rhs);
            } else {
                Value* base = find_var(lhs.children[0]->token);
                IntArray& arr = std::get<IntArray>(*base);
                int64_t i = std::get<int64_t>(eval(*lhs.children[1]));
                if (i < 0 || static_cast<size_t>(i) >= arr.size())
                    throw RuntimeFault{"index_out_of_bounds"};
                arr[static_cast<size_t>(i)] = std::get<int64_t>(rhs);
            }
            return {};
        }
        case NodeKind::If: {
            bool cond = std::get<bool>(eval(*s.children[0]));
            if (cond) return exec_block(*s.children[1]);
            if (s.children.size() == 3) return exec_block(*s.children[2]);
            return {};
        }
        case NodeKind::While: {
            for (;;) {
                step();
                if (!std::get<bool>(eval(*s.children[0]))) return {};
                Signal sig = exec_block(*s.children[1]);
                if (sig.kind != Signal::None) return sig;
            }
        }
        case NodeKind::For: {
            frames_.back().scopes.emplace_back();
            Signal out;
            exec_stmt(*s.children[0]);
            for (;;) {
                step();
                if (!std::get<bool>(eval(*s.children[1]))) break;
                Signal sig = exec_block(*s.children[3]);
                if (sig.kind != Signal::None) {
                    out = std::move(sig);
                    break;
                }
                exec_stmt(*s.children[2]);
            }
            frames_.back().scopes.pop_back();
            return out;
        }
        case NodeKind::Return: {
            Signal sig;
            sig.kind = Signal::Return;
            if (!s.children.empty()) sig.value = eval(*s.children[0]);
            return sig;
        }
        case NodeKind::Throw:
            throw RuntimeFault{"throw"};
        case NodeKind::Output:
            out_.push_back(canonical_serialize(eval(*s.children[0])));
            return {};
        case NodeKind::ExprStmt:
            eval(*s.children[0]);
            return {};
        default:
            throw TypeError(s.span.line, s.span.column, "bad statement node");
        }
    }

    static int64_t wrap_neg(int64_t a) { return static_cast<int64_t>(0 - static_cast<uint64_t>(a)); }

    Value eval(const AstNode& e) {
        step();
        switch (e.kind) {
        case NodeKind::Literal:
            if (e.token == "array") {
                IntArray a;
                a.reserve(e.children.size());
                for (const auto& c : e.children) a.push_back(std::get<int64_t>(eval(*c)));
                return Value{std::move(a)};
            }
            if (e.token == "true") return Value{true};
            if (e.token == "false") return Value{false};
            return Value{static_cast<int64_t>(std::stoll(e.token))};
        case NodeKind::VarRef:
            return *find_var(e.token);
        case NodeKind::Index: {
            IntArray a = std::get<IntArray>(eval(*e.children[0]));
            int64_t i = std::get<int64_t>(eval(*e.children[1]));
            if (i < 0 || static_cast<size_t>(i) >= a.size())
                throw RuntimeFault{"index_out_of_bounds"};
            return Value{a[static_cast<size_t>(i)]};
        }
        case NodeKind::Call: {
            const FunctionDef* callee = unit_.find_function(e.token);
            std::vector<Value> args;
            args.reserve(e.children.size());
            for (const auto& c : e.children) args.push_back(eval(*c));
            std::optional<Value> r = call_function(*callee, args, false);
            return r ? *r : Value{int64_t{0}};
        }
        case NodeKind::UnOp: {
            if (e.token == "len") {
                IntArray a = std::get<IntArray>(eval(*e.children[0]));
                return Value{static_cast<int64_t>(a.size())};
            }
            if (e.token == "!") return Value{!std::get<bool>(eval(*e.children[0]))};
            return Value{wrap_neg(std::get<int64_t>(eval(*e.children[0])))};
        }
        case NodeKind::BinOp: {
            const std::string& op = e.token;
            if (op == "&&") {
                if (!std::get<bool>(eval(*e.children[0]))) return Value{false};
                return Value{std::get<bool>(eval(*e.children[1]))};
            }
            if (op == "||") {
                if (std::get<bool>(eval(*e.children[0]))) return Value{true};
                return Value{std::get<bool>(eval(*e.children[1]))};
            }
            Value lv = eval(*e.children[0]);
            Value rv = eval(*e.children[1]);
            if (op == "==") return Value{lv == rv};
            if (op == "!=") return Value{!(lv == rv)};
            int64_t l = std::get<int64_t>(lv);
            int64_t r = std::get<int64_t>(rv);
            uint64_t ul = static_cast<uint64_t>(l);
            uint64_t ur = static_cast<uint64_t>(r);
            if (op == "+") return Value{static_cast<int64_t>(ul + ur)};
            if (op == "-") return Value{static_cast<int64_t>(ul - ur)};
            if (op == "*") return Value{static_cast<int64_t>(ul * ur)};
            if (op == "<") return Value{l < r};
            if (op == "<=") return Value{l <= r};
            if (op == ">") return Value{l > r};
            if (op == ">=") return Value{l >= r};
            if (r == 0) throw RuntimeFault{"div_by_zero"};
            if (l == INT64_MIN && r == -1)
                return Value{op == "/" ? INT64_MIN : int64_t{0}};
            return Value{op == "/" ? l / r : l % r};
        }
        default:
            throw TypeError(e.span.line, e.span.column, "bad expression node");
        }
    }
};

}  // namespace detail

inline ExecutionOutcome execute_unit(const SourceUnit& unit, const std::string& fn_name,
                                     const InputVector& input, const TracePlan& plan = {},
                                     const ExecLimits& limits = {}) {
    detail::Interpreter interp(unit, limits, plan, fn_name, /*trace_every_call=*/false);
    interp.init_globals(input.globals_init);
    interp.run(fn_name, input.args);
    return interp.take_result();
}

struct SystemRun {
    ExecutionOutcome system;
    std::vector<ExecutionOutcome> invocations;  // one per dynamic call of the target, call order
};

inline SystemRun execute_system(const SourceUnit& unit, const InputVector& input,
                                const std::string& target_fn, const TracePlan& plan = {},
                                const ExecLimits& limits = {}) {
    if (!unit.entry) throw TypeError(0, 0, "unit has no entry function");
    detail::Interpreter interp(unit, limits, plan, target_fn, /*trace_every_call=*/true);
    interp.init_globals(input.globals_init);
    interp.run(*unit.entry, input.args);
    SystemRun run;
    run.system = interp.take_result();
    run.invocations = interp.take_invocations();
    return run;
}

}  // namespace fep
