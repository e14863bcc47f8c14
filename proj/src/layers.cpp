#include "gbban/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gbban {

Eigen::VectorXd dense_forward(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& x, Activation act, DenseCache* cache) {
    if (W.cols() != x.size() || W.rows() != b.size())
        throw std::invalid_argument("dense: shape mismatch");
    Eigen::VectorXd y = W * x + b;
    if (act == Activation::Tanh) y = y.array().tanh();
    if (cache) {
        cache->x = x;
        cache->y = y;
    }
    return y;
}

void dense_backward(const Eigen::MatrixXd& W, Activation act, const DenseCache& cache,
                    const Eigen::VectorXd& dy, Eigen::MatrixXd& dW, Eigen::VectorXd& db,
                    Eigen::VectorXd* dx) {
    Eigen::VectorXd dpre = dy;
    if (act == Activation::Tanh)
        dpre.array() *= 1.0 - cache.y.array().square();
    dW.noalias() += dpre * cache.x.transpose();
    db += dpre;
    if (dx) dx->noalias() += W.transpose() * dpre;
}

Eigen::MatrixXd conv1d_forward(const Eigen::MatrixXd& filters, const Eigen::VectorXd& bias,
                               const std::vector<Eigen::MatrixXd>& channels, int width,
                               Conv1dCache* cache) {
    if (channels.empty()) throw std::invalid_argument("conv1d: no channels");
    const int C = static_cast<int>(channels.size());
    const int d = static_cast<int>(channels[0].rows());
    const int L = static_cast<int>(channels[0].cols());
    for (const auto& ch : channels)
        if (ch.rows() != d || ch.cols() != L)
            throw std::invalid_argument("conv1d: inconsistent channel shapes");
    if (filters.cols() != static_cast<Eigen::Index>(C) * d * width)
        throw std::invalid_argument("conv1d: filter width mismatch");
    if (filters.rows() != bias.size()) throw std::invalid_argument("conv1d: bias mismatch");

    const int pad = (width - 1) / 2;
    Eigen::MatrixXd patches = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(C) * d * width, L);
    for (int c = 0; c < C; ++c)
        for (int r = 0; r < d; ++r)
            for (int o = 0; o < width; ++o) {
                const Eigen::Index row = (static_cast<Eigen::Index>(c) * d + r) * width + o;
                for (int t = 0; t < L; ++t) {
                    const int src = t + o - pad;
                    if (src >= 0 && src < L) patches(row, t) = channels[c](r, src);
                }
            }

    Eigen::MatrixXd out = filters * patches;
    out.colwise() += bias;
    if (cache) {
        cache->patches = std::move(patches);
        cache->channels = C;
        cache->d = d;
        cache->length = L;
    }
    return out;
}

void conv1d_backward(const Eigen::MatrixXd& filters, int width, const Conv1dCache& cache,
                     const Eigen::MatrixXd& dout, Eigen::MatrixXd& dfilters,
                     Eigen::VectorXd& dbias, std::vector<Eigen::MatrixXd>* dchannels) {
    dfilters.noalias() += dout * cache.patches.transpose();
    dbias += dout.rowwise().sum();
    if (!dchannels) return;

    Eigen::MatrixXd dpatches = filters.transpose() * dout;
    const int pad = (width - 1) / 2;
    const int C = cache.channels, d = cache.d, L = cache.length;
    if (static_cast<int>(dchannels->size()) != C)
        throw std::invalid_argument("conv1d backward: channel grad buffer mismatch");
    for (int c = 0; c < C; ++c)
        for (int r = 0; r < d; ++r)
            for (int o = 0; o < width; ++o) {
                const Eigen::Index row = (static_cast<Eigen::Index>(c) * d + r) * width + o;
                for (int t = 0; t < L; ++t) {
                    const int src = t + o - pad;
                    if (src >= 0 && src < L) (*dchannels)[c](r, src) += dpatches(row, t);
                }
            }
}

Eigen::VectorXd max_over_time_pool(const Eigen::MatrixXd& fmap, PoolCache* cache) {
    if (fmap.cols() < 1) throw std::invalid_argument("pool: empty feature map");
    Eigen::VectorXd out(fmap.rows());
    std::vector<int> argmax(fmap.rows());
    for (Eigen::Index k = 0; k < fmap.rows(); ++k) {
        int best = 0;
        for (Eigen::Index t = 1; t < fmap.cols(); ++t)
            if (fmap(k, t) > fmap(k, best)) best = static_cast<int>(t);
        out[k] = fmap(k, best);
        argmax[k] = best;
    }
    if (cache) cache->argmax = std::move(argmax);
    return out;
}

void max_over_time_pool_backward(const PoolCache& cache, const Eigen::VectorXd& dout,
                                 Eigen::MatrixXd& dfmap) {
    for (Eigen::Index k = 0; k < dout.size(); ++k) dfmap(k, cache.argmax[k]) += dout[k];
}

Eigen::MatrixXd lstm_forward(const LstmParams& p, const Eigen::MatrixXd& inputs,
                             LstmCache* cache) {
    const int T = static_cast<int>(inputs.rows());
    const int dh = p.hidden_dim();
    if (T < 1) throw std::invalid_argument("lstm: empty sequence");
    if (p.W.value.cols() != inputs.cols()) throw std::invalid_argument("lstm: input dim mismatch");

    Eigen::MatrixXd hs(T, dh), cs(T, dh), is(T, dh), fs(T, dh), gs(T, dh), os(T, dh), tcs(T, dh);
    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(dh);
    Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(dh);
    for (int t = 0; t < T; ++t) {
        Eigen::VectorXd pre = p.W.value * inputs.row(t).transpose() + p.U.value * h_prev +
                              p.b.value.col(0);
        auto seg = [&](int k) { return pre.segment(k * dh, dh).array(); };
        Eigen::ArrayXd i = 1.0 / (1.0 + (-seg(0)).exp());
        Eigen::ArrayXd f = 1.0 / (1.0 + (-seg(1)).exp());
        Eigen::ArrayXd g = seg(2).tanh();
        Eigen::ArrayXd o = 1.0 / (1.0 + (-seg(3)).exp());
        Eigen::ArrayXd c = f * c_prev.array() + i * g;
        Eigen::ArrayXd tc = c.tanh();
        Eigen::ArrayXd h = o * tc;
        is.row(t) = i;
        fs.row(t) = f;
        gs.row(t) = g;
        os.row(t) = o;
        cs.row(t) = c;
        tcs.row(t) = tc;
        hs.row(t) = h;
        h_prev = h.matrix();
        c_prev = c.matrix();
    }
    if (cache) {
        cache->inputs = inputs;
        cache->i = std::move(is);
        cache->f = std::move(fs);
        cache->g = std::move(gs);
        cache->o = std::move(os);
        cache->c = std::move(cs);
        cache->tanh_c = std::move(tcs);
        cache->h = hs;
    }
    return hs;
}

void lstm_backward(LstmParams& p, const LstmCache& cache, const Eigen::MatrixXd& dh_states,
                   Eigen::MatrixXd* dinputs) {
    const int T = static_cast<int>(cache.inputs.rows());
    const int dh = p.hidden_dim();
    Eigen::ArrayXd dh_next = Eigen::ArrayXd::Zero(dh);
    Eigen::ArrayXd dc_next = Eigen::ArrayXd::Zero(dh);
    Eigen::VectorXd dpre(4 * dh);
    for (int t = T - 1; t >= 0; --t) {
        Eigen::ArrayXd dh_t = dh_states.row(t).transpose().array() + dh_next;
        Eigen::ArrayXd o = cache.o.row(t).transpose().array();
        Eigen::ArrayXd tc = cache.tanh_c.row(t).transpose().array();
        Eigen::ArrayXd i = cache.i.row(t).transpose().array();
        Eigen::ArrayXd f = cache.f.row(t).transpose().array();
        Eigen::ArrayXd g = cache.g.row(t).transpose().array();

        Eigen::ArrayXd do_ = dh_t * tc;
        Eigen::ArrayXd dc = dh_t * o * (1.0 - tc.square()) + dc_next;
        Eigen::ArrayXd c_prev = t > 0 ? cache.c.row(t - 1).transpose().array()
                                      : Eigen::ArrayXd::Zero(dh);
        Eigen::ArrayXd di = dc * g;
        Eigen::ArrayXd dg = dc * i;
        Eigen::ArrayXd df = dc * c_prev;
        dc_next = dc * f;

        dpre.segment(0, dh) = (di * i * (1.0 - i)).matrix();
        dpre.segment(dh, dh) = (df * f * (1.0 - f)).matrix();
        dpre.segment(2 * dh, dh) = (dg * (1.0 - g.square())).matrix();
        dpre.segment(3 * dh, dh) = (do_ * o * (1.0 - o)).matrix();

        p.W.grad.noalias() += dpre * cache.inputs.row(t);
        if (t > 0) p.U.grad.noalias() += dpre * cache.h.row(t - 1);
        p.b.grad.col(0) += dpre;
        if (dinputs) dinputs->row(t) += (p.W.value.transpose() * dpre).transpose();
        dh_next = t > 0 ? (p.U.value.transpose() * dpre).array() : Eigen::ArrayXd::Zero(dh);
    }
}

Eigen::VectorXd attention_forward(const AttentionParams& p, const Eigen::VectorXd& query,
                                  const Eigen::MatrixXd& keys, AttentionCache* cache) {
    const int T = static_cast<int>(keys.rows());
    if (T < 1) throw std::invalid_argument("attention: no keys");
    Eigen::VectorXd wq = p.W1.value * query;  // a
    Eigen::MatrixXd tanh_u(T, p.v.value.rows());
    Eigen::VectorXd scores(T);
    for (int t = 0; t < T; ++t) {
        Eigen::VectorXd u = (wq + p.W2.value * keys.row(t).transpose()).array().tanh();
        tanh_u.row(t) = u;
        scores[t] = p.v.value.col(0).dot(u);
    }
    Eigen::VectorXd weights = softmax(scores);
    Eigen::VectorXd context = keys.transpose() * weights;
    if (cache) {
        cache->query = query;
        cache->keys = keys;
        cache->tanh_u = std::move(tanh_u);
        cache->weights = weights;
    }
    return context;
}

void attention_backward(AttentionParams& p, const AttentionCache& cache,
                        const Eigen::VectorXd& dcontext, Eigen::VectorXd* dquery,
                        Eigen::MatrixXd* dkeys) {
    const int T = static_cast<int>(cache.keys.rows());
    Eigen::VectorXd dweights = cache.keys * dcontext;                   // T
    Eigen::VectorXd dscores = softmax_backward(cache.weights, dweights);  // T
    for (int t = 0; t < T; ++t) {
        Eigen::VectorXd tu = cache.tanh_u.row(t).transpose();
        Eigen::VectorXd dpre =
            (dscores[t] * p.v.value.col(0).array() * (1.0 - tu.array().square())).matrix();
        p.v.grad.col(0) += dscores[t] * tu;
        p.W1.grad.noalias() += dpre * cache.query.transpose();
        p.W2.grad.noalias() += dpre * cache.keys.row(t);
        if (dquery) dquery->noalias() += p.W1.value.transpose() * dpre;
        if (dkeys) dkeys->row(t) += (p.W2.value.transpose() * dpre).transpose() +
                                    cache.weights[t] * dcontext.transpose();
    }
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    Eigen::ArrayXd shifted = logits.array() - logits.maxCoeff();
    Eigen::ArrayXd e = shifted.exp();
    return (e / e.sum()).matrix();
}

Eigen::VectorXd softmax_backward(const Eigen::VectorXd& y, const Eigen::VectorXd& dy) {
    const double inner = y.dot(dy);
    return (y.array() * (dy.array() - inner)).matrix();
}

double gradient_check(const std::function<double()>& recompute_loss, Eigen::MatrixXd& x,
                      const Eigen::MatrixXd& analytic, double eps) {
    double max_err = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double saved = x(i, j);
            x(i, j) = saved + eps;
            const double fp = recompute_loss();
            x(i, j) = saved - eps;
            const double fm = recompute_loss();
            x(i, j) = saved;
            const double numeric = (fp - fm) / (2.0 * eps);
            const double a = analytic(i, j);
            const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
            max_err = std::max(max_err, err);
        }
    return max_err;
}

}  // namespace gbban
