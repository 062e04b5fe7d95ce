#pragma once

#include <Eigen/Core>
#include <cmath>

#include "mdlab/common.hpp"

namespace mdlab {

inline double logsumexp(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    const double mx = row.maxCoeff();
    return mx + std::log((row.array() - mx).exp().sum());
}

// Softmax with temperature; tau = 0 collapses onto the argmax (lowest index
// wins ties).
inline Eigen::VectorXd softmax_row(const Eigen::Ref<const Eigen::RowVectorXd>& logits,
                                   double temperature = 1.0) {
    if (temperature < 0.0) throw DomainError("softmax_row: temperature must be >= 0");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(logits.size());
    if (temperature == 0.0) {
        Eigen::Index best = 0;
        logits.maxCoeff(&best);
        p(best) = 1.0;
        return p;
    }
    const Eigen::ArrayXd scaled = logits.transpose().array() / temperature;
    const double mx = scaled.maxCoeff();
    p = (scaled - mx).exp().matrix();
    p /= p.sum();
    return p;
}

inline double entropy_nats(const Eigen::Ref<const Eigen::VectorXd>& probs) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        const double p = probs(i);
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

inline int sample_categorical(const Eigen::Ref<const Eigen::VectorXd>& probs, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        acc += probs(i);
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
}

}  // namespace mdlab
