#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdlab/common.hpp"
#include "mdlab/dsl.hpp"
#include "mdlab/vocab.hpp"

namespace mdlab {

enum class TaskKind { SortList, EvalArith, ReverseString, DslProgram };

inline std::string task_kind_name(TaskKind kind) {
    switch (kind) {
        case TaskKind::SortList: return "sort-list";
        case TaskKind::EvalArith: return "eval-arith";
        case TaskKind::ReverseString: return "reverse-string";
        case TaskKind::DslProgram: return "dsl-program";
    }
    throw ContractError("task_kind_name: bad enum value");
}

inline TaskKind task_kind_from_name(const std::string& name) {
    if (name == "sort-list") return TaskKind::SortList;
    if (name == "eval-arith") return TaskKind::EvalArith;
    if (name == "reverse-string") return TaskKind::ReverseString;
    if (name == "dsl-program") return TaskKind::DslProgram;
    throw ConfigError("unknown task kind: " + name);
}

struct TestCase {
    std::string input;
    std::string expected;
};

struct TaskSpec {
    TaskKind kind = TaskKind::SortList;
    int difficulty = 1;       // size knob: list/string lengths, op-chain length
    int test_case_count = 4;  // per instance, RL tasks only
};

// One packed training/decoding row: condition prefix + completion + pad
// suffix, always exactly pack_len tokens. Pad tokens are ordinary completion
// content; the model learns to emit them to control length.
struct Sequence {
    std::vector<int> token_ids;
    int condition_len = 0;
    TaskKind task_kind = TaskKind::SortList;
    std::vector<TestCase> test_cases;

    int length() const { return static_cast<int>(token_ids.size()); }
    int completion_len() const { return length() - condition_len; }
};

namespace corpus_detail {

struct Instance {
    std::string condition;
    std::string completion;
    std::vector<TestCase> test_cases;
};

inline std::string join_digits(const std::vector<long long>& values) {
    return dsl::format_int_list(values);
}

inline Instance make_sort(Rng& rng, int difficulty) {
    const int len = rng.range(3, std::min(3 + difficulty, 8));
    std::vector<long long> values(static_cast<size_t>(len));
    for (auto& v : values) v = rng.range(0, 9);
    auto sorted = values;
    std::sort(sorted.begin(), sorted.end());
    return {"s " + join_digits(values) + "=", join_digits(sorted) + ".", {}};
}

inline Instance make_reverse(Rng& rng, int difficulty) {
    const int len = rng.range(3, std::min(3 + difficulty, 8));
    std::string s(static_cast<size_t>(len), 'a');
    for (auto& c : s) c = static_cast<char>('a' + rng.range(0, 25));
    return {"r " + s + "=", std::string(s.rbegin(), s.rend()) + ".", {}};
}

inline Instance make_arith(Rng& rng, int difficulty) {
    const int terms = 2 + std::min(std::max(difficulty - 1, 0), 2);
    std::string expr = std::to_string(rng.range(0, 9));
    std::vector<long long> nums{expr[0] - '0'};
    std::vector<char> ops;
    const char op_chars[] = {'+', '-', '*'};
    for (int i = 1; i < terms; ++i) {
        const char op = op_chars[rng.range(0, 2)];
        const int n = rng.range(0, 9);
        expr += op;
        expr += std::to_string(n);
        ops.push_back(op);
        nums.push_back(n);
    }
    // Evaluate with * binding tighter than +/-.
    std::vector<long long> terms_out{nums[0]};
    for (size_t i = 0; i < ops.size(); ++i) {
        if (ops[i] == '*') {
            terms_out.back() *= nums[i + 1];
        } else {
            terms_out.push_back(ops[i] == '-' ? -nums[i + 1] : nums[i + 1]);
        }
    }
    long long value = 0;
    for (auto t : terms_out) value += t;
    return {"e " + expr + "=", std::to_string(value) + ".", {}};
}

// Op pool for generated programs; jmp is interpretable but never generated.
inline dsl::Instr random_dsl_op(Rng& rng) {
    switch (rng.range(0, 9)) {
        case 0: return {dsl::OpCode::Sort, 0, false};
        case 1: return {dsl::OpCode::Rev, 0, false};
        case 2: return {dsl::OpCode::Add, rng.range(0, 9), true};
        case 3: return {dsl::OpCode::Sub, rng.range(0, 9), true};
        case 4: return {dsl::OpCode::Mul, rng.range(0, 9), true};
        case 5: return {dsl::OpCode::Head, rng.range(1, 4), true};
        case 6: return {dsl::OpCode::Tail, rng.range(1, 4), true};
        case 7: return {dsl::OpCode::Sum, 0, false};
        case 8: return {dsl::OpCode::Max, 0, false};
        default: return {dsl::OpCode::Len, 0, false};
    }
}

inline Instance make_dsl(Rng& rng, int difficulty, int test_case_count) {
    const int n_ops = rng.range(1, std::min(1 + difficulty, 3));
    dsl::Program prog;
    for (int i = 0; i < n_ops; ++i) prog.instrs.push_back(random_dsl_op(rng));

    const std::string body = dsl::render(prog);
    std::string words = body;
    for (auto& c : words)
        if (c == '\n') c = ' ';
    while (!words.empty() && words.back() == ' ') words.pop_back();

    Instance inst;
    inst.condition = "p " + words + "=";
    inst.completion = "{\n" + body + "}";

    const int n_cases = std::max(1, test_case_count);
    for (int i = 0; i < n_cases; ++i) {
        const int len = rng.range(2, 6);
        std::vector<long long> values(static_cast<size_t>(len));
        for (auto& v : values) v = rng.range(0, 9);
        const std::string input = join_digits(values);
        const auto result = dsl::run(prog, input);
        if (!result.ok) throw ContractError("generated program failed on its own test input");
        inst.test_cases.push_back({input, result.output});
    }
    return inst;
}

inline Instance make_instance(TaskKind kind, Rng& rng, const TaskSpec& spec) {
    switch (kind) {
        case TaskKind::SortList: return make_sort(rng, spec.difficulty);
        case TaskKind::EvalArith: return make_arith(rng, spec.difficulty);
        case TaskKind::ReverseString: return make_reverse(rng, spec.difficulty);
        case TaskKind::DslProgram: return make_dsl(rng, spec.difficulty, spec.test_case_count);
    }
    throw ConfigError("generate_corpus: unknown task kind");
}

}  // namespace corpus_detail

inline Sequence pack_sequence(const std::string& condition, const std::string& completion,
                              int pack_len, const Vocabulary& vocab, TaskKind kind) {
    Sequence seq;
    auto cond_ids = vocab.tokenize(condition);
    auto comp_ids = vocab.tokenize(completion);
    if (static_cast<int>(cond_ids.size() + comp_ids.size()) > pack_len)
        throw ContractError("pack_sequence: instance longer than pack length");
    seq.condition_len = static_cast<int>(cond_ids.size());
    seq.token_ids = std::move(cond_ids);
    seq.token_ids.insert(seq.token_ids.end(), comp_ids.begin(), comp_ids.end());
    seq.token_ids.resize(static_cast<size_t>(pack_len), vocab.pad_id());
    seq.task_kind = kind;
    return seq;
}

// Pure function of (spec, count, seed): item i draws from its own stream, so
// corpora are stable under count changes and safe to generate concurrently.
inline std::vector<Sequence> generate_corpus(const TaskSpec& spec, int count, uint64_t seed,
                                             int pack_len = 64,
                                             const Vocabulary& vocab = Vocabulary::builtin()) {
    if (count < 1) throw ContractError("generate_corpus: count must be >= 1");
    std::vector<Sequence> items;
    items.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Rng rng(mix64(seed, static_cast<uint64_t>(i)));
        const auto inst = corpus_detail::make_instance(spec.kind, rng, spec);
        auto seq = pack_sequence(inst.condition, inst.completion, pack_len, vocab, spec.kind);
        seq.test_cases = inst.test_cases;
        items.push_back(std::move(seq));
    }
    return items;
}

// Length augmentation: a fraction of items truncated to a random content
// length, a fraction given a random-length unnoised prefix.
inline void apply_length_augmentation(std::vector<Sequence>& batch, double truncate_frac,
                                      double prefix_frac, uint64_t seed,
                                      const Vocabulary& vocab = Vocabulary::builtin()) {
    if (truncate_frac < 0 || truncate_frac > 1 || prefix_frac < 0 || prefix_frac > 1)
        throw DomainError("apply_length_augmentation: fractions must be in [0,1]");
    for (size_t i = 0; i < batch.size(); ++i) {
        Rng rng(mix64(mix64(seed, 0x61756773ULL), static_cast<uint64_t>(i)));
        Sequence& seq = batch[i];
        int content_len = seq.length();
        while (content_len > 0 && seq.token_ids[static_cast<size_t>(content_len - 1)] == vocab.pad_id())
            --content_len;
        if (rng.bernoulli(truncate_frac) && content_len > seq.condition_len + 1) {
            const int new_len = rng.range(seq.condition_len + 1, content_len - 1);
            for (int j = new_len; j < seq.length(); ++j)
                seq.token_ids[static_cast<size_t>(j)] = vocab.pad_id();
            content_len = new_len;
        }
        if (rng.bernoulli(prefix_frac)) {
            const int hi = std::max(1, content_len - 1);
            seq.condition_len = rng.range(1, hi);
        }
    }
}

inline std::string condition_text(const Sequence& seq, const Vocabulary& vocab = Vocabulary::builtin()) {
    return vocab.detokenize(std::span(seq.token_ids).first(static_cast<size_t>(seq.condition_len)));
}

inline std::string completion_text(const Sequence& seq, const Vocabulary& vocab = Vocabulary::builtin()) {
    return vocab.text_without_special(
        std::span(seq.token_ids).subspan(static_cast<size_t>(seq.condition_len)));
}

// Corpus interchange format: one JSON record per line with fields
// token_ids, condition_len, task_kind, test_cases.
inline void write_corpus(const std::string& path, const std::vector<Sequence>& items) {
    std::ofstream out(path);
    if (!out) throw IoError("write_corpus: cannot open " + path);
    for (const auto& seq : items) {
        nlohmann::json rec{{"token_ids", seq.token_ids},
                           {"condition_len", seq.condition_len},
                           {"task_kind", task_kind_name(seq.task_kind)}};
        auto cases = nlohmann::json::array();
        for (const auto& tc : seq.test_cases)
            cases.push_back({{"input", tc.input}, {"expected", tc.expected}});
        rec["test_cases"] = cases;
        out << rec.dump() << "\n";
    }
}

inline std::vector<Sequence> read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_corpus: cannot open " + path);
    std::vector<Sequence> items;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IoError("read_corpus: bad record: " + std::string(e.what()));
        }
        Sequence seq;
        seq.token_ids = rec.at("token_ids").get<std::vector<int>>();
        seq.condition_len = rec.at("condition_len").get<int>();
        seq.task_kind = task_kind_from_name(rec.at("task_kind").get<std::string>());
        for (const auto& tc : rec.at("test_cases"))
            seq.test_cases.push_back(
                {tc.at("input").get<std::string>(), tc.at("expected").get<std::string>()});
        if (seq.condition_len < 0 || seq.condition_len > seq.length())
            throw IoError("read_corpus: condition_len out of range");
        items.push_back(std::move(seq));
    }
    return items;
}

}  // namespace mdlab
