#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdlab/common.hpp"

namespace mdlab {

// Character-level vocabulary: a fixed alphabet plus [MASK] and [PAD].
// The two special tokens have no alphabet character; detokenize renders them
// as '#' and '_' for display, both outside the alphabet.
class Vocabulary {
   public:
    explicit Vocabulary(std::string alphabet) : alphabet_(std::move(alphabet)) {
        to_id_.fill(-1);
        for (size_t i = 0; i < alphabet_.size(); ++i) {
            const auto c = static_cast<unsigned char>(alphabet_[i]);
            if (to_id_[c] != -1) throw ConfigError("Vocabulary: duplicate character in alphabet");
            to_id_[c] = static_cast<int>(i);
        }
        mask_id_ = static_cast<int>(alphabet_.size());
        pad_id_ = mask_id_ + 1;
    }

    // Digits, lowercase letters, and the punctuation used by tasks and the
    // program mini-language. 48 characters + [MASK] + [PAD] = 50 tokens.
    static const Vocabulary& builtin() {
        static const Vocabulary v("0123456789abcdefghijklmnopqrstuvwxyz ,.+-*={}|:\n");
        return v;
    }

    int size() const { return pad_id_ + 1; }
    int mask_id() const { return mask_id_; }
    int pad_id() const { return pad_id_; }

    bool in_alphabet(char c) const { return to_id_[static_cast<unsigned char>(c)] >= 0; }

    std::vector<int> tokenize(std::string_view text) const {
        std::vector<int> ids;
        ids.reserve(text.size());
        for (char c : text) {
            const int id = to_id_[static_cast<unsigned char>(c)];
            if (id < 0)
                throw DomainError(std::string("tokenize: character outside alphabet: '") + c + "'");
            ids.push_back(id);
        }
        return ids;
    }

    std::string detokenize(std::span<const int> ids) const {
        std::string out;
        out.reserve(ids.size());
        for (int id : ids) {
            if (id == mask_id_) {
                out.push_back('#');
            } else if (id == pad_id_) {
                out.push_back('_');
            } else if (id >= 0 && id < mask_id_) {
                out.push_back(alphabet_[static_cast<size_t>(id)]);
            } else {
                throw DomainError("detokenize: token id out of range: " + std::to_string(id));
            }
        }
        return out;
    }

    // Text with [MASK]/[PAD] dropped; what reward checking operates on.
    std::string text_without_special(std::span<const int> ids) const {
        std::string out;
        out.reserve(ids.size());
        for (int id : ids) {
            if (id == mask_id_ || id == pad_id_) continue;
            if (id < 0 || id > pad_id_)
                throw DomainError("text_without_special: token id out of range");
            out.push_back(alphabet_[static_cast<size_t>(id)]);
        }
        return out;
    }

   private:
    std::string alphabet_;
    std::array<int, 256> to_id_{};
    int mask_id_ = 0;
    int pad_id_ = 0;
};

}  // namespace mdlab
