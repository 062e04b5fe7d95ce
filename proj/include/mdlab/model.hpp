#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mdlab/common.hpp"

namespace mdlab {

// Bidirectional denoiser: token + position embeddings, pre-RMSNorm attention
// and GELU MLP blocks with full (non-causal) attention, untied output head.
struct DenoiserConfig {
    int layers = 2;
    int hidden = 128;
    int heads = 4;
    int vocab = 50;
    int max_len = 64;
    uint64_t seed = 1;
    std::string positions = "learned";  // "learned" | "none" (diagnostic)
    int ffn_mult = 4;

    void validate() const {
        if (layers < 1 || hidden < 1 || heads < 1 || vocab < 2 || max_len < 1)
            throw ConfigError("DenoiserConfig: sizes must be positive");
        if (hidden % heads != 0) throw ConfigError("DenoiserConfig: hidden must be divisible by heads");
        if (positions != "learned" && positions != "none")
            throw ConfigError("DenoiserConfig: positions must be 'learned' or 'none'");
        if (ffn_mult < 1) throw ConfigError("DenoiserConfig: ffn_mult must be positive");
    }

    nlohmann::json to_json() const {
        return {{"layers", layers},   {"hidden", hidden}, {"heads", heads},
                {"vocab", vocab},     {"max_len", max_len}, {"seed", seed},
                {"positions", positions}, {"ffn_mult", ffn_mult}};
    }

    static DenoiserConfig from_json(const nlohmann::json& j) {
        DenoiserConfig cfg;
        cfg.layers = j.at("layers").get<int>();
        cfg.hidden = j.at("hidden").get<int>();
        cfg.heads = j.at("heads").get<int>();
        cfg.vocab = j.at("vocab").get<int>();
        cfg.max_len = j.at("max_len").get<int>();
        cfg.seed = j.at("seed").get<uint64_t>();
        cfg.positions = j.at("positions").get<std::string>();
        cfg.ffn_mult = j.at("ffn_mult").get<int>();
        cfg.validate();
        return cfg;
    }

    bool operator==(const DenoiserConfig&) const = default;
};

template <typename Scalar>
struct Params {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Mat tok_emb;  // vocab x hidden
    Mat pos_emb;  // max_len x hidden
    struct Layer {
        Mat norm1_g;  // 1 x hidden
        Mat wq, wk, wv, wo;  // hidden x hidden
        Mat norm2_g;  // 1 x hidden
        Mat w1;  // hidden x ffn
        Mat b1;  // 1 x ffn
        Mat w2;  // ffn x hidden
        Mat b2;  // 1 x hidden
    };
    std::vector<Layer> layers;
    Mat final_g;  // 1 x hidden
    Mat head;     // hidden x vocab

    template <typename F>
    void for_each(F&& f) {
        f("tok_emb", tok_emb);
        f("pos_emb", pos_emb);
        for (size_t i = 0; i < layers.size(); ++i) {
            const std::string p = "layers." + std::to_string(i) + ".";
            f(p + "norm1_g", layers[i].norm1_g);
            f(p + "wq", layers[i].wq);
            f(p + "wk", layers[i].wk);
            f(p + "wv", layers[i].wv);
            f(p + "wo", layers[i].wo);
            f(p + "norm2_g", layers[i].norm2_g);
            f(p + "w1", layers[i].w1);
            f(p + "b1", layers[i].b1);
            f(p + "w2", layers[i].w2);
            f(p + "b2", layers[i].b2);
        }
        f("final_g", final_g);
        f("head", head);
    }

    template <typename F>
    void for_each(F&& f) const {
        const_cast<Params*>(this)->for_each(
            [&](const std::string& name, Mat& m) { f(name, static_cast<const Mat&>(m)); });
    }

    std::vector<std::pair<std::string, Mat*>> tensors() {
        std::vector<std::pair<std::string, Mat*>> out;
        for_each([&](const std::string& name, Mat& m) { out.emplace_back(name, &m); });
        return out;
    }

    size_t count() const {
        size_t n = 0;
        for_each([&](const std::string&, const Mat& m) { n += static_cast<size_t>(m.size()); });
        return n;
    }

    void set_zero() {
        for_each([](const std::string&, Mat& m) { m.setZero(); });
    }
};

namespace model_detail {

inline constexpr double kRmsEps = 1e-6;

template <typename Scalar>
Scalar gelu(Scalar x) {
    return Scalar(0.5) * x * (Scalar(1) + std::erf(x * Scalar(M_SQRT1_2)));
}

template <typename Scalar>
Scalar gelu_grad(Scalar x) {
    const Scalar cdf = Scalar(0.5) * (Scalar(1) + std::erf(x * Scalar(M_SQRT1_2)));
    const Scalar pdf = std::exp(Scalar(-0.5) * x * x) * Scalar(0.3989422804014327);
    return cdf + x * pdf;
}

}  // namespace model_detail

template <typename Scalar>
class Denoiser {
   public:
    using Mat = typename Params<Scalar>::Mat;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit Denoiser(DenoiserConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        allocate();
        init_weights();
    }

    const DenoiserConfig& config() const { return cfg_; }
    Params<Scalar>& params() { return p_; }
    const Params<Scalar>& params() const { return p_; }
    size_t param_count() const { return p_.count(); }

    Params<Scalar> zero_like() const {
        Params<Scalar> g = p_;
        g.set_zero();
        return g;
    }

    // Logits for a batch of same-length sequences; rows are (batch, position)
    // in row-major order. Pure function of parameters and inputs.
    Mat forward(std::span<const int> tokens, int batch = 1) const {
        Cache cache;
        run_forward(tokens, batch, cache);
        return std::move(cache.logits);
    }

    // loss = sum_r weights[r] * CE(logits_r, targets[r]); rows with zero
    // weight contribute nothing. Returns analytic gradients for every
    // parameter.
    std::pair<double, Params<Scalar>> loss_and_grad(std::span<const int> tokens,
                                                    std::span<const int> targets,
                                                    std::span<const double> weights,
                                                    int batch = 1) const {
        Cache cache;
        run_forward(tokens, batch, cache);
        const int L = cache.len;
        const auto rows = static_cast<size_t>(cache.logits.rows());
        if (targets.size() != rows || weights.size() != rows)
            throw ContractError("loss_and_grad: targets/weights must match token count");

        Mat dlogits = Mat::Zero(cache.logits.rows(), cache.logits.cols());
        double total = 0.0;
        std::vector<double> seq_loss(static_cast<size_t>(batch), 0.0);
        for (size_t r = 0; r < rows; ++r) {
            const double w = weights[r];
            if (w == 0.0) continue;
            const int target = targets[r];
            if (target < 0 || target >= cfg_.vocab) throw ContractError("loss_and_grad: target id out of range");
            const auto row = cache.logits.row(static_cast<Eigen::Index>(r));
            const double mx = static_cast<double>(row.maxCoeff());
            Eigen::Array<Scalar, Eigen::Dynamic, 1> ex =
                (row.transpose().array() - Scalar(mx)).exp();
            const double denom = static_cast<double>(ex.sum());
            const double lse = mx + std::log(denom);
            const double ce = lse - static_cast<double>(row(target));
            total += w * ce;
            seq_loss[r / static_cast<size_t>(L)] += w * ce;
            ex /= Scalar(denom);
            dlogits.row(static_cast<Eigen::Index>(r)) = (ex * Scalar(w)).matrix().transpose();
            dlogits(static_cast<Eigen::Index>(r), target) -= Scalar(w);
        }
        for (size_t b = 0; b < seq_loss.size(); ++b)
            if (!std::isfinite(seq_loss[b]))
                throw NumericError("loss_and_grad: non-finite loss in batch item " + std::to_string(b));

        Params<Scalar> grads = p_;
        grads.set_zero();
        run_backward(tokens, cache, dlogits, grads);
        return {total, std::move(grads)};
    }

   private:
    struct Cache {
        int batch = 0;
        int len = 0;
        struct LayerCache {
            Mat x_in, n1, q, k, v, att, a, x_mid, n2, h1, g;
            Vec inv1, inv2;  // per-row 1/rms
        };
        Mat x0;
        std::vector<LayerCache> layers;
        Mat x_final, n_final;
        Vec invf;
        Mat logits;
    };

    void allocate() {
        const int d = cfg_.hidden;
        const int f = d * cfg_.ffn_mult;
        p_.tok_emb.resize(cfg_.vocab, d);
        p_.pos_emb.resize(cfg_.max_len, d);
        p_.layers.resize(static_cast<size_t>(cfg_.layers));
        for (auto& layer : p_.layers) {
            layer.norm1_g.resize(1, d);
            layer.wq.resize(d, d);
            layer.wk.resize(d, d);
            layer.wv.resize(d, d);
            layer.wo.resize(d, d);
            layer.norm2_g.resize(1, d);
            layer.w1.resize(d, f);
            layer.b1.resize(1, f);
            layer.w2.resize(f, d);
            layer.b2.resize(1, d);
        }
        p_.final_g.resize(1, d);
        p_.head.resize(d, cfg_.vocab);
    }

    void init_weights() {
        Rng rng(mix64(cfg_.seed, 0x6d6f64656cULL));
        const Scalar std_dev = Scalar(0.02);
        // Residual-branch output projections get a depth-scaled init.
        const Scalar resid =
            std_dev / static_cast<Scalar>(std::sqrt(2.0 * std::max(1, cfg_.layers)));
        auto fill = [&](Mat& m, Scalar sd) {
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index j = 0; j < m.cols(); ++j)
                    m(i, j) = sd * static_cast<Scalar>(rng.gaussian());
        };
        fill(p_.tok_emb, std_dev);
        fill(p_.pos_emb, std_dev);
        for (auto& layer : p_.layers) {
            layer.norm1_g.setOnes();
            fill(layer.wq, std_dev);
            fill(layer.wk, std_dev);
            fill(layer.wv, std_dev);
            fill(layer.wo, resid);
            layer.norm2_g.setOnes();
            fill(layer.w1, std_dev);
            layer.b1.setZero();
            fill(layer.w2, resid);
            layer.b2.setZero();
        }
        p_.final_g.setOnes();
        fill(p_.head, std_dev);
    }

    // y_i = x_i * g / rms(x_i); returns normalized rows, stores 1/rms.
    static void rmsnorm_rows(const Mat& x, const Mat& g, Mat& out, Vec& inv_rms) {
        const auto d = static_cast<double>(x.cols());
        out.resize(x.rows(), x.cols());
        inv_rms.resize(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const Scalar ms = x.row(i).squaredNorm() / Scalar(d) + Scalar(model_detail::kRmsEps);
            const Scalar inv = Scalar(1) / std::sqrt(ms);
            inv_rms(i) = inv;
            out.row(i) = (x.row(i).array() * g.row(0).array()).matrix() * inv;
        }
    }

    static void rmsnorm_backward(const Mat& x, const Mat& g, const Vec& inv_rms, const Mat& dn,
                                 Mat& dx_accum, Mat& dg_accum) {
        const auto d = static_cast<Scalar>(x.cols());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const Scalar inv = inv_rms(i);
            const auto xi = x.row(i).array();
            const auto dni = dn.row(i).array();
            dg_accum.row(0).array() += dni * xi * inv;
            const auto du = (dni * g.row(0).array()).eval();
            const Scalar proj = (du * xi).sum();
            dx_accum.row(i).array() += du * inv - xi * (proj * inv * inv * inv / d);
        }
    }

    void run_forward(std::span<const int> tokens, int batch, Cache& cache) const {
        if (batch < 1 || tokens.empty() || tokens.size() % static_cast<size_t>(batch) != 0)
            throw ContractError("forward: token count must be a positive multiple of batch");
        const int L = static_cast<int>(tokens.size() / static_cast<size_t>(batch));
        if (L > cfg_.max_len) throw DomainError("forward: sequence longer than max_len");
        for (int id : tokens)
            if (id < 0 || id >= cfg_.vocab) throw DomainError("forward: token id out of range");

        const int d = cfg_.hidden;
        const int H = cfg_.heads;
        const int dh = d / H;
        const auto R = static_cast<Eigen::Index>(tokens.size());
        const Scalar att_scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));

        cache.batch = batch;
        cache.len = L;
        cache.x0.resize(R, d);
        for (Eigen::Index r = 0; r < R; ++r) {
            cache.x0.row(r) = p_.tok_emb.row(tokens[static_cast<size_t>(r)]);
            if (cfg_.positions == "learned") cache.x0.row(r) += p_.pos_emb.row(r % L);
        }

        Mat x = cache.x0;
        cache.layers.resize(p_.layers.size());
        for (size_t li = 0; li < p_.layers.size(); ++li) {
            const auto& lp = p_.layers[li];
            auto& lc = cache.layers[li];
            lc.x_in = x;
            rmsnorm_rows(lc.x_in, lp.norm1_g, lc.n1, lc.inv1);
            lc.q.noalias() = lc.n1 * lp.wq;
            lc.k.noalias() = lc.n1 * lp.wk;
            lc.v.noalias() = lc.n1 * lp.wv;

            lc.att.resize(static_cast<Eigen::Index>(batch) * H * L, L);
            lc.a.resize(R, d);
            for (int b = 0; b < batch; ++b) {
                const Eigen::Index row0 = static_cast<Eigen::Index>(b) * L;
                for (int h = 0; h < H; ++h) {
                    const Eigen::Index col0 = static_cast<Eigen::Index>(h) * dh;
                    const auto qh = lc.q.block(row0, col0, L, dh);
                    const auto kh = lc.k.block(row0, col0, L, dh);
                    const auto vh = lc.v.block(row0, col0, L, dh);
                    auto ph = lc.att.middleRows((static_cast<Eigen::Index>(b) * H + h) * L, L);
                    ph.noalias() = qh * kh.transpose() * att_scale;
                    for (Eigen::Index i = 0; i < L; ++i) {
                        const Scalar mx = ph.row(i).maxCoeff();
                        ph.row(i) = (ph.row(i).array() - mx).exp();
                        ph.row(i) /= ph.row(i).sum();
                    }
                    lc.a.block(row0, col0, L, dh).noalias() = ph * vh;
                }
            }
            x.noalias() += lc.a * lp.wo;
            lc.x_mid = x;
            rmsnorm_rows(lc.x_mid, lp.norm2_g, lc.n2, lc.inv2);
            lc.h1.noalias() = lc.n2 * lp.w1;
            lc.h1.rowwise() += lp.b1.row(0);
            lc.g = lc.h1.unaryExpr([](Scalar v) { return model_detail::gelu(v); });
            x.noalias() += lc.g * lp.w2;
            x.rowwise() += lp.b2.row(0);
        }
        cache.x_final = x;
        rmsnorm_rows(cache.x_final, p_.final_g, cache.n_final, cache.invf);
        cache.logits.noalias() = cache.n_final * p_.head;
    }

    void run_backward(std::span<const int> tokens, const Cache& cache, const Mat& dlogits,
                      Params<Scalar>& grads) const {
        const int d = cfg_.hidden;
        const int H = cfg_.heads;
        const int dh = d / H;
        const int L = cache.len;
        const int batch = cache.batch;
        const auto R = static_cast<Eigen::Index>(tokens.size());
        const Scalar att_scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));

        grads.head.noalias() = cache.n_final.transpose() * dlogits;
        Mat dn = dlogits * p_.head.transpose();
        Mat dx = Mat::Zero(R, d);
        rmsnorm_backward(cache.x_final, p_.final_g, cache.invf, dn, dx, grads.final_g);

        for (size_t li = p_.layers.size(); li-- > 0;) {
            const auto& lp = p_.layers[li];
            const auto& lc = cache.layers[li];
            auto& lg = grads.layers[li];

            // MLP: dx is the gradient at the block output.
            lg.b2.row(0) += dx.colwise().sum();
            Mat dg_act = dx * lp.w2.transpose();
            lg.w2.noalias() += lc.g.transpose() * dx;
            Mat dh1 = dg_act.binaryExpr(
                lc.h1, [](Scalar upstream, Scalar pre) { return upstream * model_detail::gelu_grad(pre); });
            lg.b1.row(0) += dh1.colwise().sum();
            lg.w1.noalias() += lc.n2.transpose() * dh1;
            Mat dn2 = dh1 * lp.w1.transpose();
            rmsnorm_backward(lc.x_mid, lp.norm2_g, lc.inv2, dn2, dx, lg.norm2_g);

            // Attention.
            lg.wo.noalias() += lc.a.transpose() * dx;
            Mat da = dx * lp.wo.transpose();
            Mat dq = Mat::Zero(R, d), dk = Mat::Zero(R, d), dv = Mat::Zero(R, d);
            for (int b = 0; b < batch; ++b) {
                const Eigen::Index row0 = static_cast<Eigen::Index>(b) * L;
                for (int h = 0; h < H; ++h) {
                    const Eigen::Index col0 = static_cast<Eigen::Index>(h) * dh;
                    const auto ph = lc.att.middleRows((static_cast<Eigen::Index>(b) * H + h) * L, L);
                    const auto qh = lc.q.block(row0, col0, L, dh);
                    const auto kh = lc.k.block(row0, col0, L, dh);
                    const auto vh = lc.v.block(row0, col0, L, dh);
                    const auto dah = da.block(row0, col0, L, dh);

                    Mat dp = dah * vh.transpose();
                    dv.block(row0, col0, L, dh).noalias() = ph.transpose() * dah;
                    Mat ds(L, L);
                    for (Eigen::Index i = 0; i < L; ++i) {
                        const Scalar dot = dp.row(i).cwiseProduct(ph.row(i)).sum();
                        ds.row(i) = (ph.row(i).array() * (dp.row(i).array() - dot)).matrix();
                    }
                    ds *= att_scale;
                    dq.block(row0, col0, L, dh).noalias() = ds * kh;
                    dk.block(row0, col0, L, dh).noalias() = ds.transpose() * qh;
                }
            }
            lg.wq.noalias() += lc.n1.transpose() * dq;
            lg.wk.noalias() += lc.n1.transpose() * dk;
            lg.wv.noalias() += lc.n1.transpose() * dv;
            Mat dn1 = dq * lp.wq.transpose();
            dn1.noalias() += dk * lp.wk.transpose();
            dn1.noalias() += dv * lp.wv.transpose();
            rmsnorm_backward(lc.x_in, lp.norm1_g, lc.inv1, dn1, dx, lg.norm1_g);
        }

        for (Eigen::Index r = 0; r < R; ++r) {
            grads.tok_emb.row(tokens[static_cast<size_t>(r)]) += dx.row(r);
            if (cfg_.positions == "learned") grads.pos_emb.row(r % L) += dx.row(r);
        }
    }

    DenoiserConfig cfg_;
    Params<Scalar> p_;
};

// Standard Adam with bias correction.
template <typename Scalar>
class AdamState {
   public:
    explicit AdamState(const Denoiser<Scalar>& model)
        : m_(model.zero_like()), v_(model.zero_like()) {}

    void step(Params<Scalar>& params, const Params<Scalar>& grads, double lr,
              double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
        ++t_;
        auto ps = params.tensors();
        auto gs = const_cast<Params<Scalar>&>(grads).tensors();
        auto ms = m_.tensors();
        auto vs = v_.tensors();
        if (ps.size() != gs.size()) throw ContractError("AdamState: parameter/gradient shape mismatch");
        const Scalar c1 = Scalar(1.0 - std::pow(beta1, t_));
        const Scalar c2 = Scalar(1.0 - std::pow(beta2, t_));
        for (size_t i = 0; i < ps.size(); ++i) {
            auto& p = *ps[i].second;
            const auto& g = *gs[i].second;
            auto& m = *ms[i].second;
            auto& v = *vs[i].second;
            if (p.rows() != g.rows() || p.cols() != g.cols())
                throw ContractError("AdamState: parameter/gradient shape mismatch at " + ps[i].first);
            m = Scalar(beta1) * m + Scalar(1.0 - beta1) * g;
            v = Scalar(beta2) * v + Scalar(1.0 - beta2) * g.cwiseProduct(g);
            p.array() -= Scalar(lr) * (m.array() / c1) /
                         ((v.array() / c2).sqrt() + Scalar(eps));
        }
    }

    long long steps_taken() const { return t_; }

   private:
    Params<Scalar> m_;
    Params<Scalar> v_;
    long long t_ = 0;
};

// Checkpoint container: "MDLC" magic, a JSON manifest (config, step, tensor
// table with row-major payload offsets), then the raw little-endian payload.
namespace checkpoint_detail {

template <typename Scalar>
constexpr const char* dtype_tag() {
    if constexpr (std::is_same_v<Scalar, float>) {
        return "f32";
    } else {
        static_assert(std::is_same_v<Scalar, double>, "unsupported scalar");
        return "f64";
    }
}

}  // namespace checkpoint_detail

template <typename Scalar>
void save_checkpoint(const Denoiser<Scalar>& model, const std::string& path, long long step = 0) {
    const auto& params = model.params();
    nlohmann::json manifest{{"config", model.config().to_json()}, {"step", step}};
    auto entries = nlohmann::json::array();
    uint64_t offset = 0;
    params.for_each([&](const std::string& name, const typename Params<Scalar>::Mat& m) {
        const uint64_t bytes = static_cast<uint64_t>(m.size()) * sizeof(Scalar);
        entries.push_back({{"name", name},
                           {"rows", m.rows()},
                           {"cols", m.cols()},
                           {"dtype", checkpoint_detail::dtype_tag<Scalar>()},
                           {"offset", offset}});
        offset += bytes;
    });
    manifest["tensors"] = entries;
    const std::string header = manifest.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_checkpoint: cannot open " + path);
    out.write("MDLC", 4);
    const uint64_t header_len = header.size();
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    params.for_each([&](const std::string&, const typename Params<Scalar>::Mat& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                const Scalar v = m(i, j);
                out.write(reinterpret_cast<const char*>(&v), sizeof(Scalar));
            }
    });
    if (!out) throw IoError("save_checkpoint: write failed for " + path);
}

template <typename Scalar>
std::pair<Denoiser<Scalar>, long long> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_checkpoint: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string_view(magic, 4) != "MDLC")
        throw IoError("load_checkpoint: bad magic in " + path);
    uint64_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw IoError("load_checkpoint: truncated header in " + path);

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_checkpoint: corrupt manifest: " + std::string(e.what()));
    }
    const auto cfg = DenoiserConfig::from_json(manifest.at("config"));
    const auto step = manifest.at("step").get<long long>();
    Denoiser<Scalar> model(cfg);

    size_t entry_index = 0;
    const auto& entries = manifest.at("tensors");
    model.params().for_each([&](const std::string& name, typename Params<Scalar>::Mat& m) {
        if (entry_index >= entries.size())
            throw ContractError("load_checkpoint: manifest missing tensor " + name);
        const auto& e = entries[entry_index++];
        if (e.at("name").get<std::string>() != name ||
            e.at("rows").get<Eigen::Index>() != m.rows() ||
            e.at("cols").get<Eigen::Index>() != m.cols())
            throw ContractError("load_checkpoint: tensor mismatch at " + name);
        if (e.at("dtype").get<std::string>() != checkpoint_detail::dtype_tag<Scalar>())
            throw ContractError("load_checkpoint: precision mismatch at " + name);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                Scalar v;
                in.read(reinterpret_cast<char*>(&v), sizeof(Scalar));
                m(i, j) = v;
            }
    });
    if (entry_index != entries.size()) throw ContractError("load_checkpoint: extra tensors in manifest");
    if (!in) throw IoError("load_checkpoint: truncated payload in " + path);
    return {std::move(model), step};
}

}  // namespace mdlab
