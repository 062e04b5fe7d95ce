#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdlab/common.hpp"

// Line-oriented mini-language over a single integer-list register. Programs
// are what generated completions must contain for verifiable rewards; the
// interpreter has no I/O primitives, so nothing a program does can touch the
// host. Values saturate at +/-10^15 to keep arithmetic defined.
namespace mdlab::dsl {

enum class OpCode { Sort, Rev, Add, Sub, Mul, Head, Tail, Sum, Max, Min, Len, Jmp };

struct Instr {
    OpCode op;
    long long arg = 0;
    bool has_arg = false;
};

struct Program {
    std::vector<Instr> instrs;
};

namespace detail {

inline constexpr long long kValueCap = 1'000'000'000'000'000LL;

inline long long saturate(long long v) {
    if (v > kValueCap) return kValueCap;
    if (v < -kValueCap) return -kValueCap;
    return v;
}

struct OpInfo {
    std::string_view name;
    OpCode code;
    bool takes_arg;
};

inline constexpr OpInfo kOps[] = {
    {"sort", OpCode::Sort, false}, {"rev", OpCode::Rev, false},  {"add", OpCode::Add, true},
    {"sub", OpCode::Sub, true},    {"mul", OpCode::Mul, true},   {"head", OpCode::Head, true},
    {"tail", OpCode::Tail, true},  {"sum", OpCode::Sum, false},  {"max", OpCode::Max, false},
    {"min", OpCode::Min, false},   {"len", OpCode::Len, false},  {"jmp", OpCode::Jmp, true},
};

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::optional<long long> parse_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    bool neg = false;
    size_t i = 0;
    if (s[0] == '-') {
        neg = true;
        i = 1;
        if (s.size() == 1) return std::nullopt;
    }
    if (s.size() - i > 15) return std::nullopt;
    long long v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
}

}  // namespace detail

inline std::optional<Program> parse(std::string_view text) {
    Program prog;
    for (std::string_view raw_line : detail::split(text, '\n')) {
        const auto line = detail::trim(raw_line);
        if (line.empty()) continue;
        const auto words = detail::split(line, ' ');
        std::vector<std::string_view> tokens;
        for (auto w : words)
            if (!w.empty()) tokens.push_back(w);
        if (tokens.empty()) continue;

        const detail::OpInfo* info = nullptr;
        for (const auto& op : detail::kOps)
            if (op.name == tokens[0]) info = &op;
        if (info == nullptr) return std::nullopt;

        Instr instr{info->code, 0, info->takes_arg};
        if (info->takes_arg) {
            if (tokens.size() != 2) return std::nullopt;
            const auto arg = detail::parse_int(tokens[1]);
            if (!arg) return std::nullopt;
            instr.arg = *arg;
        } else if (tokens.size() != 1) {
            return std::nullopt;
        }
        prog.instrs.push_back(instr);
    }
    return prog;
}

inline std::string render(const Program& prog) {
    std::string out;
    for (const auto& instr : prog.instrs) {
        for (const auto& op : detail::kOps) {
            if (op.code == instr.op) {
                out += op.name;
                break;
            }
        }
        if (instr.has_arg) out += " " + std::to_string(instr.arg);
        out += "\n";
    }
    return out;
}

inline std::optional<std::vector<long long>> parse_int_list(std::string_view csv) {
    std::vector<long long> values;
    if (detail::trim(csv).empty()) return values;
    for (auto part : detail::split(csv, ',')) {
        const auto v = detail::parse_int(detail::trim(part));
        if (!v) return std::nullopt;
        values.push_back(*v);
    }
    return values;
}

inline std::string format_int_list(const std::vector<long long>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

struct RunResult {
    bool ok = false;       // false: bad input, runtime failure, or budget exhausted
    std::string output;    // canonical comma-separated list when ok
    int steps_used = 0;
};

// Executes under a step budget; each instruction costs one step. A program
// that never halts simply exhausts the budget and reports failure.
inline RunResult run(const Program& prog, std::string_view input_csv, int step_budget = 10'000) {
    RunResult result;
    auto parsed = parse_int_list(input_csv);
    if (!parsed) return result;
    std::vector<long long> v = std::move(*parsed);

    size_t pc = 0;
    while (pc < prog.instrs.size()) {
        if (result.steps_used >= step_budget) return result;
        ++result.steps_used;
        const Instr& in = prog.instrs[pc];
        switch (in.op) {
            case OpCode::Sort: std::sort(v.begin(), v.end()); break;
            case OpCode::Rev: std::reverse(v.begin(), v.end()); break;
            case OpCode::Add:
                for (auto& x : v) x = detail::saturate(x + in.arg);
                break;
            case OpCode::Sub:
                for (auto& x : v) x = detail::saturate(x - in.arg);
                break;
            case OpCode::Mul:
                for (auto& x : v) x = detail::saturate(x * in.arg);
                break;
            case OpCode::Head: {
                const auto n = std::clamp<long long>(in.arg, 0, static_cast<long long>(v.size()));
                v.resize(static_cast<size_t>(n));
                break;
            }
            case OpCode::Tail: {
                const auto n = std::clamp<long long>(in.arg, 0, static_cast<long long>(v.size()));
                v.erase(v.begin(), v.end() - static_cast<ptrdiff_t>(n));
                break;
            }
            case OpCode::Sum: {
                long long s = 0;
                for (auto x : v) s = detail::saturate(s + x);
                v.assign(1, s);
                break;
            }
            case OpCode::Max: {
                if (v.empty()) return result;
                v.assign(1, *std::max_element(v.begin(), v.end()));
                break;
            }
            case OpCode::Min: {
                if (v.empty()) return result;
                v.assign(1, *std::min_element(v.begin(), v.end()));
                break;
            }
            case OpCode::Len: v.assign(1, static_cast<long long>(v.size())); break;
            case OpCode::Jmp:
                if (in.arg < 0 || in.arg > static_cast<long long>(prog.instrs.size())) return result;
                pc = static_cast<size_t>(in.arg);
                continue;
        }
        ++pc;
    }
    result.ok = true;
    result.output = format_int_list(v);
    return result;
}

}  // namespace mdlab::dsl
