#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "traj/predictor/model.hpp"
#include "traj/simd/kernels.hpp"

namespace traj {

namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::runtime_error(std::string("non-finite value in ") + what);
}

// ---- gated recurrent cell -------------------------------------------------

struct CellRef {
    const Tensor *wz, *wr, *wc, *uz, *ur, *uc, *bz, *br, *bc;
};

CellRef enc_cell(const ModelParams& p) {
    return {&p.t(kEncWz), &p.t(kEncWr), &p.t(kEncWc), &p.t(kEncUz),
            &p.t(kEncUr), &p.t(kEncUc), &p.t(kEncBz), &p.t(kEncBr),
            &p.t(kEncBc)};
}

CellRef dec_cell(const ModelParams& p) {
    return {&p.t(kDecWz), &p.t(kDecWr), &p.t(kDecWc), &p.t(kDecUz),
            &p.t(kDecUr), &p.t(kDecUc), &p.t(kDecBz), &p.t(kDecBr),
            &p.t(kDecBc)};
}

struct CellGradRef {
    Tensor *wz, *wr, *wc, *uz, *ur, *uc, *bz, *br, *bc;
};

CellGradRef enc_cell_grad(ModelParams& p) {
    return {&p.t(kEncWz), &p.t(kEncWr), &p.t(kEncWc), &p.t(kEncUz),
            &p.t(kEncUr), &p.t(kEncUc), &p.t(kEncBz), &p.t(kEncBr),
            &p.t(kEncBc)};
}

CellGradRef dec_cell_grad(ModelParams& p) {
    return {&p.t(kDecWz), &p.t(kDecWr), &p.t(kDecWc), &p.t(kDecUz),
            &p.t(kDecUr), &p.t(kDecUc), &p.t(kDecBz), &p.t(kDecBr),
            &p.t(kDecBc)};
}

struct StepCache {
    std::vector<double> x, h_prev, z, r, c, rh, h;
    std::vector<double> mask;  // decoder only; dropout scale per unit
    std::vector<double> hd;    // decoder only; masked hidden
    std::array<double, 2> inc{};  // decoder only; emitted increment
};

// h_out = (1-z) h_prev + z tanh(Wc x + Uc (r h_prev) + bc)
void cell_forward(const CellRef& cell, const std::vector<double>& x,
                  const std::vector<double>& h_prev, StepCache* cache) {
    const auto& k = simd::active_kernels();
    const std::size_t H = h_prev.size();
    const std::size_t in = x.size();
    cache->x = x;
    cache->h_prev = h_prev;
    cache->z.resize(H);
    cache->r.resize(H);
    cache->c.resize(H);
    cache->rh.resize(H);
    cache->h.resize(H);

    std::vector<double> a(H), b(H);
    simd::matvec(cell.wz->data(), x.data(), a.data(), H, in);
    simd::matvec(cell.uz->data(), h_prev.data(), b.data(), H, H);
    for (std::size_t i = 0; i < H; ++i)
        cache->z[i] = sigmoid(a[i] + b[i] + cell.bz->v[i]);

    simd::matvec(cell.wr->data(), x.data(), a.data(), H, in);
    simd::matvec(cell.ur->data(), h_prev.data(), b.data(), H, H);
    for (std::size_t i = 0; i < H; ++i)
        cache->r[i] = sigmoid(a[i] + b[i] + cell.br->v[i]);

    k.mul(cache->r.data(), h_prev.data(), cache->rh.data(), H);
    simd::matvec(cell.wc->data(), x.data(), a.data(), H, in);
    simd::matvec(cell.uc->data(), cache->rh.data(), b.data(), H, H);
    for (std::size_t i = 0; i < H; ++i)
        cache->c[i] = std::tanh(a[i] + b[i] + cell.bc->v[i]);

    k.gate_blend(cache->z.data(), h_prev.data(), cache->c.data(),
                 cache->h.data(), H);
}

// reverse-mode through one cell step; accumulates into grads, writes dx and
// dh_prev
void cell_backward(const CellRef& cell, const CellGradRef& grads,
                   const StepCache& cache, const std::vector<double>& dh,
                   std::vector<double>* dx, std::vector<double>* dh_prev) {
    const auto& k = simd::active_kernels();
    const std::size_t H = dh.size();
    const std::size_t in = cache.x.size();

    std::vector<double> daz(H), dar(H), dac(H), drh(H);
    dh_prev->assign(H, 0.0);
    for (std::size_t i = 0; i < H; ++i) {
        const double z = cache.z[i], r = cache.r[i], c = cache.c[i];
        const double dz = dh[i] * (c - cache.h_prev[i]);
        const double dc = dh[i] * z;
        (*dh_prev)[i] = dh[i] * (1.0 - z);
        dac[i] = dc * (1.0 - c * c);
        daz[i] = dz * z * (1.0 - z);
        (void)r;
    }
    // candidate path
    simd::outer_acc(dac.data(), cache.x.data(), grads.wc->data(), H, in);
    simd::outer_acc(dac.data(), cache.rh.data(), grads.uc->data(), H, H);
    k.add(grads.bc->data(), dac.data(), grads.bc->data(), H);
    drh.assign(H, 0.0);
    simd::matvec_t_acc(cell.uc->data(), dac.data(), drh.data(), H, H);
    for (std::size_t i = 0; i < H; ++i) {
        const double r = cache.r[i];
        const double dr = drh[i] * cache.h_prev[i];
        (*dh_prev)[i] += drh[i] * r;
        dar[i] = dr * r * (1.0 - r);
    }
    // reset gate
    simd::outer_acc(dar.data(), cache.x.data(), grads.wr->data(), H, in);
    simd::outer_acc(dar.data(), cache.h_prev.data(), grads.ur->data(), H, H);
    k.add(grads.br->data(), dar.data(), grads.br->data(), H);
    simd::matvec_t_acc(cell.ur->data(), dar.data(), dh_prev->data(), H, H);
    // update gate
    simd::outer_acc(daz.data(), cache.x.data(), grads.wz->data(), H, in);
    simd::outer_acc(daz.data(), cache.h_prev.data(), grads.uz->data(), H, H);
    k.add(grads.bz->data(), daz.data(), grads.bz->data(), H);
    simd::matvec_t_acc(cell.uz->data(), daz.data(), dh_prev->data(), H, H);

    dx->assign(in, 0.0);
    simd::matvec_t_acc(cell.wz->data(), daz.data(), dx->data(), H, in);
    simd::matvec_t_acc(cell.wr->data(), dar.data(), dx->data(), H, in);
    simd::matvec_t_acc(cell.wc->data(), dac.data(), dx->data(), H, in);
}

// ---- window preprocessing -------------------------------------------------

struct EncoderInput {
    std::vector<std::vector<double>> x;       // t_h inputs of kInputDim
    std::vector<std::vector<double>> ctx_in;  // raw 4-d context per step
    std::array<double, 2> last_increment{};
    std::array<double, 2> last_position{};
};

EncoderInput build_inputs(const ModelParams& params,
                          const PredictionWindow& window) {
    const auto& hist = window.history;
    if (hist.size() < 2) throw std::runtime_error("window history too short");
    const std::size_t t_h = hist.size() - 1;
    EncoderInput in;
    in.x.resize(t_h);
    in.ctx_in.resize(t_h);
    for (std::size_t t = 1; t <= t_h; ++t) {
        std::vector<double> ctx(kCtxDim, 0.0);
        if (t < window.neighbor_states.size()) {
            const auto& nbs = window.neighbor_states[t];
            if (!nbs.empty()) {
                for (const auto& nb : nbs) {
                    ctx[0] += nb.rel_x;
                    ctx[1] += nb.rel_y;
                    ctx[2] += nb.rel_vx;
                    ctx[3] += nb.rel_vy;
                }
                const double inv = 1.0 / static_cast<double>(nbs.size());
                for (double& c : ctx) c *= inv;
            }
        }
        std::vector<double> mapped(kCtxDim, 0.0);
        simd::matvec(params.t(kCtxW).data(), ctx.data(), mapped.data(), kCtxDim,
                     kCtxDim);
        for (int i = 0; i < kCtxDim; ++i) mapped[i] += params.t(kCtxB).v[i];

        auto& x = in.x[t - 1];
        x.resize(kInputDim);
        x[0] = hist[t].x - hist[t - 1].x;
        x[1] = hist[t].y - hist[t - 1].y;
        for (int i = 0; i < kCtxDim; ++i) x[2 + i] = mapped[i];
        in.ctx_in[t - 1] = std::move(ctx);
    }
    in.last_increment = {hist[t_h].x - hist[t_h - 1].x,
                         hist[t_h].y - hist[t_h - 1].y};
    in.last_position = {hist[t_h].x, hist[t_h].y};
    return in;
}

struct ForwardCache {
    EncoderInput inputs;
    std::vector<StepCache> enc;
    std::vector<StepCache> dec;
    Prediction prediction;
};

void run_forward(const ModelParams& params, const PredictionWindow& window,
                 std::size_t t_f, bool dropout_on, std::mt19937_64* rng,
                 ForwardCache* fc) {
    const std::size_t H = static_cast<std::size_t>(params.hidden);
    fc->inputs = build_inputs(params, window);
    const std::size_t t_h = fc->inputs.x.size();

    std::vector<double> h(H, 0.0);
    fc->enc.resize(t_h);
    for (std::size_t t = 0; t < t_h; ++t) {
        cell_forward(enc_cell(params), fc->inputs.x[t], h, &fc->enc[t]);
        h = fc->enc[t].h;
    }

    const double keep = 1.0 - params.dropout_rate;
    std::bernoulli_distribution keep_dist(keep);

    fc->dec.resize(t_f);
    std::vector<double> dec_in = {fc->inputs.last_increment[0],
                                  fc->inputs.last_increment[1]};
    std::array<double, 2> pos = fc->inputs.last_position;
    fc->prediction.positions.clear();
    for (std::size_t s = 0; s < t_f; ++s) {
        StepCache& c = fc->dec[s];
        cell_forward(dec_cell(params), dec_in, h, &c);
        h = c.h;

        c.mask.assign(H, 1.0);
        if (dropout_on) {
            if (keep <= 0.0)
                throw std::runtime_error("dropout rate 1 leaves no units");
            for (std::size_t i = 0; i < H; ++i)
                c.mask[i] = keep_dist(*rng) ? 1.0 / keep : 0.0;
        }
        c.hd.resize(H);
        simd::active_kernels().mul(c.h.data(), c.mask.data(), c.hd.data(), H);

        double inc[2];
        simd::matvec(params.t(kOutW).data(), c.hd.data(), inc, kOutputDim, H);
        inc[0] += params.t(kOutB).v[0];
        inc[1] += params.t(kOutB).v[1];
        c.inc = {inc[0], inc[1]};
        pos[0] += inc[0];
        pos[1] += inc[1];
        fc->prediction.positions.push_back(pos);
        dec_in = {inc[0], inc[1]};
    }
    for (const auto& p : fc->prediction.positions)
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
            throw std::runtime_error("non-finite prediction output");
}

}  // namespace

// ---- public API -----------------------------------------------------------

bool ModelParams::weight_tensor(int id) const {
    switch (id) {
        case kCtxB:
        case kEncBz: case kEncBr: case kEncBc:
        case kDecBz: case kDecBr: case kDecBc:
        case kOutB:
            return false;
        default:
            return true;
    }
}

ModelParams make_params(int hidden) {
    const std::size_t H = static_cast<std::size_t>(hidden);
    ModelParams p;
    p.hidden = hidden;
    p.tensors.resize(kTensorCount);
    p.tensors[kCtxW] = Tensor("ctx_w", kCtxDim, kCtxDim);
    p.tensors[kCtxB] = Tensor("ctx_b", kCtxDim, 1);
    const char* enc_names[9] = {"enc_wz", "enc_wr", "enc_wc", "enc_uz", "enc_ur",
                                "enc_uc", "enc_bz", "enc_br", "enc_bc"};
    const char* dec_names[9] = {"dec_wz", "dec_wr", "dec_wc", "dec_uz", "dec_ur",
                                "dec_uc", "dec_bz", "dec_br", "dec_bc"};
    for (int g = 0; g < 3; ++g) {
        p.tensors[kEncWz + g] = Tensor(enc_names[g], H, kInputDim);
        p.tensors[kEncUz + g] = Tensor(enc_names[3 + g], H, H);
        p.tensors[kEncBz + g] = Tensor(enc_names[6 + g], H, 1);
        p.tensors[kDecWz + g] = Tensor(dec_names[g], H, kOutputDim);
        p.tensors[kDecUz + g] = Tensor(dec_names[3 + g], H, H);
        p.tensors[kDecBz + g] = Tensor(dec_names[6 + g], H, 1);
    }
    p.tensors[kOutW] = Tensor("out_w", kOutputDim, H);
    p.tensors[kOutB] = Tensor("out_b", kOutputDim, 1);
    return p;
}

ModelParams init_model(long seed, int hidden, double dropout_rate) {
    ModelParams p = make_params(hidden);
    p.dropout_rate = dropout_rate;
    std::mt19937_64 rng(static_cast<unsigned long long>(seed));
    for (int id = 0; id < kTensorCount; ++id) {
        Tensor& t = p.tensors[id];
        if (!p.weight_tensor(id)) continue;  // biases stay zero
        const double bound = 1.0 / std::sqrt(static_cast<double>(t.cols));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& w : t.v) w = dist(rng);
    }
    return p;
}

Prediction cv_predict(const PredictionWindow& window) {
    const auto& hist = window.history;
    if (hist.size() < 2) throw std::runtime_error("window history too short");
    const double dx = hist.back().x - hist[hist.size() - 2].x;
    const double dy = hist.back().y - hist[hist.size() - 2].y;
    Prediction pred;
    double x = hist.back().x, y = hist.back().y;
    for (std::size_t i = 0; i < window.future.size(); ++i) {
        x += dx;
        y += dy;
        pred.positions.push_back({x, y});
    }
    return pred;
}

Prediction forward(const ModelParams& params, const PredictionWindow& window,
                   bool dropout_on, long rng_seed) {
    std::mt19937_64 rng(static_cast<unsigned long long>(rng_seed));
    ForwardCache fc;
    run_forward(params, window, window.future.size(), dropout_on, &rng, &fc);
    return fc.prediction;
}

LossGrad loss_and_gradients(const ModelParams& params,
                            const std::vector<PredictionWindow>& batch,
                            const TrainingConfig& config, long dropout_seed) {
    if (batch.empty()) throw std::runtime_error("empty batch");
    const std::size_t H = static_cast<std::size_t>(params.hidden);
    const auto& k = simd::active_kernels();

    LossGrad out;
    out.gradients = make_params(params.hidden);
    out.gradients.dropout_rate = params.dropout_rate;

    const bool use_dropout = config.dropout_rate > 0.0;
    double data_loss = 0.0;
    std::size_t total_points = 0;
    for (const auto& w : batch) total_points += w.future.size();
    const double inv_norm = 1.0 / static_cast<double>(total_points);

    std::vector<double> dh(H), dh_prev(H), dx;
    for (std::size_t wi = 0; wi < batch.size(); ++wi) {
        const PredictionWindow& window = batch[wi];
        const std::size_t t_f = window.future.size();
        std::mt19937_64 rng(static_cast<unsigned long long>(
            dropout_seed * 0x9e3779b97f4a7c15ULL + wi + 1));
        ForwardCache fc;
        run_forward(params, window, t_f, use_dropout, &rng, &fc);

        // position errors -> per-step increment gradients (suffix sums)
        std::vector<std::array<double, 2>> dpos(t_f);
        for (std::size_t s = 0; s < t_f; ++s) {
            const double ex = fc.prediction.positions[s][0] - window.future[s].x;
            const double ey = fc.prediction.positions[s][1] - window.future[s].y;
            data_loss += (ex * ex + ey * ey) * inv_norm;
            dpos[s] = {2.0 * ex * inv_norm, 2.0 * ey * inv_norm};
        }
        std::vector<std::array<double, 2>> dinc(t_f, {0.0, 0.0});
        std::array<double, 2> suffix = {0.0, 0.0};
        for (std::size_t s = t_f; s-- > 0;) {
            suffix[0] += dpos[s][0];
            suffix[1] += dpos[s][1];
            dinc[s] = suffix;
        }

        // decoder backward (through the autoregressive input chain)
        dh.assign(H, 0.0);
        std::array<double, 2> dnext_in = {0.0, 0.0};
        for (std::size_t s = t_f; s-- > 0;) {
            const StepCache& c = fc.dec[s];
            const double dout0 = dinc[s][0] + dnext_in[0];
            const double dout1 = dinc[s][1] + dnext_in[1];
            // output map
            Tensor& g_out_w = out.gradients.t(kOutW);
            k.axpy(dout0, c.hd.data(), g_out_w.data(), H);
            k.axpy(dout1, c.hd.data(), g_out_w.data() + H, H);
            out.gradients.t(kOutB).v[0] += dout0;
            out.gradients.t(kOutB).v[1] += dout1;
            // d(hd) = out_w^T dout, then through the dropout mask
            std::vector<double> dhd(H, 0.0);
            k.axpy(dout0, params.t(kOutW).data(), dhd.data(), H);
            k.axpy(dout1, params.t(kOutW).data() + H, dhd.data(), H);
            std::vector<double> dh_step(H);
            k.mul(dhd.data(), c.mask.data(), dh_step.data(), H);
            k.add(dh.data(), dh_step.data(), dh.data(), H);

            auto grads = dec_cell_grad(out.gradients);
            cell_backward(dec_cell(params), grads, c, dh, &dx, &dh_prev);
            dh = dh_prev;
            dnext_in = {dx[0], dx[1]};  // flows into the previous step's inc
        }
        // dnext_in at s==0 lands on the (constant) last history increment

        // encoder backward
        for (std::size_t t = fc.enc.size(); t-- > 0;) {
            auto grads = enc_cell_grad(out.gradients);
            cell_backward(enc_cell(params), grads, fc.enc[t], dh, &dx, &dh_prev);
            dh = dh_prev;
            // context-map gradient from the input slice
            double* dctx = dx.data() + 2;
            simd::outer_acc(dctx, fc.inputs.ctx_in[t].data(),
                            out.gradients.t(kCtxW).data(), kCtxDim, kCtxDim);
            k.add(out.gradients.t(kCtxB).data(), dctx,
                  out.gradients.t(kCtxB).data(), kCtxDim);
        }
    }

    // l2 on weight matrices
    double reg = 0.0;
    if (config.l2_coefficient > 0.0) {
        for (int id = 0; id < kTensorCount; ++id) {
            if (!params.weight_tensor(id)) continue;
            const Tensor& t = params.tensors[id];
            reg += k.dot(t.data(), t.data(), t.size());
            k.axpy(2.0 * config.l2_coefficient, t.data(),
                   out.gradients.tensors[id].data(), t.size());
        }
    }
    out.loss = data_loss + config.l2_coefficient * reg;
    if (!std::isfinite(out.loss))
        throw std::runtime_error("non-finite training loss");
    return out;
}

TrainResult train(const std::vector<PredictionWindow>& windows,
                  const TrainingConfig& config) {
    if (config.epochs < 1) throw std::runtime_error("epochs must be >= 1");
    if (config.batch_size < 1)
        throw std::runtime_error("batch_size must be >= 1");
    if (config.learning_rate <= 0.0)
        throw std::runtime_error("learning_rate must be positive");
    if (static_cast<int>(windows.size()) < config.batch_size)
        throw std::runtime_error("fewer windows than one batch");

    ModelParams params =
        init_model(config.seed, config.hidden, config.dropout_rate);
    ModelParams m = make_params(config.hidden);
    ModelParams v = make_params(config.hidden);
    long step = 0;

    TrainResult result;
    std::vector<std::size_t> order(windows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::mt19937_64 shuffle_rng(
            static_cast<unsigned long long>(config.seed) * 1000003ULL +
            static_cast<unsigned long long>(epoch));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t end = std::min(
                order.size(), start + static_cast<std::size_t>(config.batch_size));
            std::vector<PredictionWindow> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i)
                batch.push_back(windows[order[i]]);

            const long dropout_seed =
                config.seed * 7919 + epoch * 104729 + static_cast<long>(start);
            LossGrad lg = loss_and_gradients(params, batch, config, dropout_seed);
            epoch_loss += lg.loss;
            ++n_batches;

            ++step;
            const double bc1 = 1.0 - std::pow(config.beta1, step);
            const double bc2 = 1.0 - std::pow(config.beta2, step);
            for (int id = 0; id < kTensorCount; ++id) {
                double* w = params.tensors[id].data();
                double* mm = m.tensors[id].data();
                double* vv = v.tensors[id].data();
                const double* g = lg.gradients.tensors[id].data();
                const std::size_t n = params.tensors[id].size();
                for (std::size_t i = 0; i < n; ++i) {
                    mm[i] = config.beta1 * mm[i] + (1.0 - config.beta1) * g[i];
                    vv[i] =
                        config.beta2 * vv[i] + (1.0 - config.beta2) * g[i] * g[i];
                    const double mhat = mm[i] / bc1;
                    const double vhat = vv[i] / bc2;
                    w[i] -= config.learning_rate * mhat /
                            (std::sqrt(vhat) + config.adam_eps);
                }
            }
        }
        result.epoch_losses.push_back(epoch_loss /
                                      static_cast<double>(n_batches));
    }
    for (const auto& t : params.tensors) check_finite(t.v, t.name.c_str());
    result.params = std::move(params);
    return result;
}

GradCheckReport grad_check(int hidden, long seed, double tolerance,
                           int n_samples, int corrupt_index) {
    std::mt19937_64 rng(static_cast<unsigned long long>(seed) + 17);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // small random-walk windows with random neighbor context
    std::vector<PredictionWindow> batch;
    for (int w = 0; w < 4; ++w) {
        PredictionWindow win;
        win.target_track_id = "g" + std::to_string(w);
        double x = gauss(rng), y = gauss(rng), t = 0.0;
        for (int i = 0; i < 13; ++i) {
            if (i < 7)
                win.history.push_back({t, x, y});
            else
                win.future.push_back({t, x, y});
            x += 0.5 + 0.2 * gauss(rng);
            y += 0.2 * gauss(rng);
            t += 0.5;
        }
        win.t0 = win.history.back().t;
        win.neighbor_states.resize(7);
        for (auto& nbs : win.neighbor_states)
            nbs.push_back({gauss(rng), gauss(rng), gauss(rng), gauss(rng)});
        batch.push_back(std::move(win));
    }

    ModelParams params = init_model(seed, hidden);
    TrainingConfig config;
    config.hidden = hidden;
    config.l2_coefficient = 1e-4;
    LossGrad analytic = loss_and_gradients(params, batch, config, 0);
    if (corrupt_index >= 0) {
        int idx = corrupt_index;
        for (auto& t : analytic.gradients.tensors) {
            if (idx < static_cast<int>(t.size())) {
                t.v[idx] += 1.0;
                break;
            }
            idx -= static_cast<int>(t.size());
        }
    }

    std::size_t total = 0;
    for (const auto& t : params.tensors) total += t.size();
    std::uniform_int_distribution<std::size_t> pick(0, total - 1);

    GradCheckReport report;
    const double h = 1e-5;
    for (int s = 0; s < n_samples; ++s) {
        // always probe the corrupted entry so the negative control is reliable
        std::size_t flat =
            (s == 0 && corrupt_index >= 0 &&
             static_cast<std::size_t>(corrupt_index) < total)
                ? static_cast<std::size_t>(corrupt_index)
                : pick(rng);
        int tid = 0;
        while (flat >= params.tensors[tid].size()) {
            flat -= params.tensors[tid].size();
            ++tid;
        }
        double& wref = params.tensors[tid].v[flat];
        const double saved = wref;
        wref = saved + h;
        const double lp = loss_and_gradients(params, batch, config, 0).loss;
        wref = saved - h;
        const double lm = loss_and_gradients(params, batch, config, 0).loss;
        wref = saved;
        const double numeric = (lp - lm) / (2.0 * h);
        const double an = analytic.gradients.tensors[tid].v[flat];
        const double rel =
            std::abs(an - numeric) / std::max(1e-8, std::abs(an) + std::abs(numeric));
        report.max_rel_error = std::max(report.max_rel_error, rel);
        ++report.n_checked;
    }
    report.pass = report.max_rel_error < tolerance;
    return report;
}

// ---- checkpoint I/O -------------------------------------------------------
// Format: text header lines, then per tensor a "tensor <name> <rows> <cols>"
// line followed by rows*cols little-endian float64 values and a newline.

void save_checkpoint(const ModelParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << "TRAJCKPT 1\n";
    out << "hidden " << params.hidden << "\n";
    out << "dropout_rate " << params.dropout_rate << "\n";
    for (const auto& t : params.tensors) {
        out << "tensor " << t.name << ' ' << t.rows << ' ' << t.cols << "\n";
        static_assert(sizeof(double) == 8);
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.size() * sizeof(double)));
        out << "\n";
    }
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "TRAJCKPT" || version != 1)
        throw std::runtime_error("bad checkpoint header: " + path);
    std::string key;
    int hidden = 0;
    double dropout = 0.0;
    in >> key >> hidden;
    if (key != "hidden") throw std::runtime_error("bad checkpoint header");
    in >> key >> dropout;
    if (key != "dropout_rate") throw std::runtime_error("bad checkpoint header");

    ModelParams params = make_params(hidden);
    params.dropout_rate = dropout;
    for (auto& t : params.tensors) {
        std::string tag, name;
        std::size_t rows = 0, cols = 0;
        in >> tag >> name >> rows >> cols;
        if (tag != "tensor" || name != t.name || rows != t.rows || cols != t.cols)
            throw std::runtime_error("checkpoint tensor mismatch: " + name);
        in.ignore(1);  // newline before the raw block
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    }
    return params;
}

}  // namespace traj
