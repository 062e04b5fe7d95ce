#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "mdlab/common.hpp"
#include "mdlab/corpus.hpp"
#include "mdlab/vocab.hpp"

namespace mdlab {

// Linear absorbing-state schedule: survival probability alpha(t) = 1 - t.
struct NoiseSchedule {
    static double alpha(double t) {
        if (t < 0.0 || t > 1.0) throw DomainError("alpha: t must be in [0,1]");
        return 1.0 - t;
    }
};

// Probability that a token masked at time t is revealed by time s < t:
// (alpha_s - alpha_t) / (1 - alpha_t).
inline double transition_reveal_prob(double s, double t) {
    if (!(s >= 0.0 && s < t && t <= 1.0)) throw DomainError("transition_reveal_prob: need 0 <= s < t <= 1");
    return (NoiseSchedule::alpha(s) - NoiseSchedule::alpha(t)) / (1.0 - NoiseSchedule::alpha(t));
}

// Binary mask over completion positions; 1 = masked. Condition positions are
// outside the pattern's domain.
struct MaskPattern {
    std::vector<uint8_t> bits;
    double t = 0.0;

    int count() const {
        int n = 0;
        for (auto b : bits) n += b;
        return n;
    }
};

struct CoupledMaskPair {
    double t = 0.0;
    double t_hat = 0.0;
    MaskPattern m;
    MaskPattern m_hat;
};

// Forward corruption q(x_t | x_0): each completion token independently
// becomes [MASK] with probability t. Pads count as completion content unless
// mask_pads is false.
inline std::pair<Sequence, MaskPattern> forward_corrupt(const Sequence& x0, double t, uint64_t seed,
                                                        const Vocabulary& vocab = Vocabulary::builtin(),
                                                        bool mask_pads = true) {
    if (t < 0.0 || t > 1.0) throw DomainError("forward_corrupt: t must be in [0,1]");
    Sequence x_t = x0;
    MaskPattern mask;
    mask.t = t;
    mask.bits.assign(static_cast<size_t>(x0.completion_len()), 0);
    Rng rng(seed);
    for (int i = x0.condition_len; i < x0.length(); ++i) {
        const auto bit_index = static_cast<size_t>(i - x0.condition_len);
        if (!mask_pads && x0.token_ids[static_cast<size_t>(i)] == vocab.pad_id()) continue;
        if (rng.bernoulli(t)) {
            x_t.token_ids[static_cast<size_t>(i)] = vocab.mask_id();
            mask.bits[bit_index] = 1;
        }
    }
    return {std::move(x_t), std::move(mask)};
}

// Per-completion-position weighted cross-entropy; zero off the mask support.
struct PerTokenLoss {
    std::vector<double> values;
    std::vector<uint8_t> counted;
};

// ELBO loss at time t: for each masked completion position n,
// (1/t) * (-log softmax(logits_n)[x0_n]); the scalar is the sum over counted
// positions. logits rows correspond to completion positions.
template <typename Derived>
std::pair<double, PerTokenLoss> elbo_loss(const Eigen::MatrixBase<Derived>& logits,
                                          std::span<const int> x0_completion,
                                          const MaskPattern& mask, double t) {
    const auto n = static_cast<size_t>(logits.rows());
    if (mask.bits.size() != n || x0_completion.size() != n)
        throw ContractError("elbo_loss: logits/mask/x0 length mismatch");
    PerTokenLoss per;
    per.values.assign(n, 0.0);
    per.counted.assign(n, 0);
    if (t <= 0.0) {
        if (mask.count() > 0) throw DomainError("elbo_loss: t = 0 with nonempty mask");
        return {0.0, per};
    }
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (!mask.bits[i]) continue;
        const auto row = logits.row(static_cast<Eigen::Index>(i)).template cast<double>().eval();
        const double mx = row.maxCoeff();
        const double lse = mx + std::log((row.array() - mx).exp().sum());
        const double ce = lse - row(x0_completion[i]);
        const double value = ce / t;
        if (!std::isfinite(value)) throw NumericError("elbo_loss: non-finite loss at position " + std::to_string(i));
        per.values[i] = value;
        per.counted[i] = 1;
        total += value;
    }
    return {total, per};
}

// Antithetic pair: t ~ U(a,b) with a + b = 1, per-position Bernoulli(t) mask,
// and the mirrored draw (1 - t, bit complement).
inline CoupledMaskPair sample_coupled_pair(int completion_len, std::pair<double, double> t_range,
                                           uint64_t seed) {
    const auto [a, b] = t_range;
    if (std::abs(a + b - 1.0) > 1e-12)
        throw ConfigError("sample_coupled_pair: t_range must be symmetric about 0.5");
    if (!(a > 0.0 && a < b)) throw ConfigError("sample_coupled_pair: need 0 < a < b");
    Rng rng(seed);
    CoupledMaskPair pair;
    pair.t = rng.uniform(a, b);
    pair.t_hat = 1.0 - pair.t;
    pair.m.t = pair.t;
    pair.m_hat.t = pair.t_hat;
    pair.m.bits.assign(static_cast<size_t>(completion_len), 0);
    pair.m_hat.bits.assign(static_cast<size_t>(completion_len), 0);
    for (int i = 0; i < completion_len; ++i) {
        const bool masked = rng.bernoulli(pair.t);
        pair.m.bits[static_cast<size_t>(i)] = masked ? 1 : 0;
        pair.m_hat.bits[static_cast<size_t>(i)] = masked ? 0 : 1;
    }
    return pair;
}

// Ablation: same number of draws, no complementary constraint.
inline std::pair<MaskPattern, MaskPattern> sample_decoupled_pair(int completion_len,
                                                                 std::pair<double, double> t_range,
                                                                 uint64_t seed) {
    const auto [a, b] = t_range;
    if (std::abs(a + b - 1.0) > 1e-12)
        throw ConfigError("sample_decoupled_pair: t_range must be symmetric about 0.5");
    if (!(a > 0.0 && a < b)) throw ConfigError("sample_decoupled_pair: need 0 < a < b");
    Rng rng(seed);
    auto draw = [&]() {
        MaskPattern m;
        m.t = rng.uniform(a, b);
        m.bits.assign(static_cast<size_t>(completion_len), 0);
        for (auto& bit : m.bits) bit = rng.bernoulli(m.t) ? 1 : 0;
        return m;
    };
    MaskPattern first = draw();
    MaskPattern second = draw();
    return {std::move(first), std::move(second)};
}

}  // namespace mdlab
