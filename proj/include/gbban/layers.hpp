#ifndef GBBAN_LAYERS_HPP
#define GBBAN_LAYERS_HPP

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

namespace gbban {

// Trainable tensor plus its gradient accumulator. Vectors are stored n x 1.
// Every backward pass below accumulates (+=) into grad buffers; callers zero
// them at batch boundaries.
struct Parameter {
    std::string name;
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;

    Parameter() = default;
    Parameter(std::string n, int rows, int cols)
        : name(std::move(n)),
          value(Eigen::MatrixXd::Zero(rows, cols)),
          grad(Eigen::MatrixXd::Zero(rows, cols)) {}

    void zero_grad() { grad.setZero(); }
};

enum class Activation { None, Tanh };

// --- dense: y = act(W x + b) -------------------------------------------------

struct DenseCache {
    Eigen::VectorXd x;
    Eigen::VectorXd y;  // post-activation
};

Eigen::VectorXd dense_forward(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& x, Activation act, DenseCache* cache);

void dense_backward(const Eigen::MatrixXd& W, Activation act, const DenseCache& cache,
                    const Eigen::VectorXd& dy, Eigen::MatrixXd& dW, Eigen::VectorXd& db,
                    Eigen::VectorXd* dx);

// --- multi-channel 1-d convolution -------------------------------------------
//
// Input: C channels, each a d x L matrix. Filters are stored flattened as a
// K x (C*d*width) matrix, entry order ((c*d)+r)*width + o. Stride 1 with
// same-length zero padding, so the K x L output keeps the input length.
// Cross-correlation summed over channels and embedding rows.

struct Conv1dCache {
    Eigen::MatrixXd patches;  // (C*d*width) x L im2col buffer
    int channels = 0;
    int d = 0;
    int length = 0;
};

Eigen::MatrixXd conv1d_forward(const Eigen::MatrixXd& filters, const Eigen::VectorXd& bias,
                               const std::vector<Eigen::MatrixXd>& channels, int width,
                               Conv1dCache* cache);

void conv1d_backward(const Eigen::MatrixXd& filters, int width, const Conv1dCache& cache,
                     const Eigen::MatrixXd& dout, Eigen::MatrixXd& dfilters,
                     Eigen::VectorXd& dbias, std::vector<Eigen::MatrixXd>* dchannels);

// --- max-over-time pooling ----------------------------------------------------

struct PoolCache {
    std::vector<int> argmax;  // first maximizing column per row
};

Eigen::VectorXd max_over_time_pool(const Eigen::MatrixXd& fmap, PoolCache* cache);

void max_over_time_pool_backward(const PoolCache& cache, const Eigen::VectorXd& dout,
                                 Eigen::MatrixXd& dfmap);

// --- LSTM over a sequence ------------------------------------------------------
//
// Standard forget/input/output-gate LSTM, gate order [i, f, g, o] in the
// stacked 4*dh rows. h0 = c0 = 0.

struct LstmParams {
    Parameter W;  // 4*dh x din
    Parameter U;  // 4*dh x dh
    Parameter b;  // 4*dh x 1

    LstmParams() = default;
    LstmParams(const std::string& prefix, int din, int dh)
        : W(prefix + ".W", 4 * dh, din), U(prefix + ".U", 4 * dh, dh), b(prefix + ".b", 4 * dh, 1) {}
    int hidden_dim() const { return static_cast<int>(U.value.cols()); }
};

struct LstmCache {
    Eigen::MatrixXd inputs;                    // T x din
    Eigen::MatrixXd i, f, g, o, c, h, tanh_c;  // T x dh each
};

// returns all hidden states, T x dh
Eigen::MatrixXd lstm_forward(const LstmParams& p, const Eigen::MatrixXd& inputs, LstmCache* cache);

void lstm_backward(LstmParams& p, const LstmCache& cache, const Eigen::MatrixXd& dh_states,
                   Eigen::MatrixXd* dinputs);

// --- additive attention ---------------------------------------------------------
//
// score_t = v . tanh(W1 query + W2 key_t); weights = softmax(score);
// context = sum_t weights_t key_t.

struct AttentionParams {
    Parameter W1;  // a x dq
    Parameter W2;  // a x dk
    Parameter v;   // a x 1

    AttentionParams() = default;
    AttentionParams(const std::string& prefix, int attn_dim, int dq, int dk)
        : W1(prefix + ".W1", attn_dim, dq), W2(prefix + ".W2", attn_dim, dk),
          v(prefix + ".v", attn_dim, 1) {}
};

struct AttentionCache {
    Eigen::VectorXd query;
    Eigen::MatrixXd keys;    // T x dk
    Eigen::MatrixXd tanh_u;  // T x a
    Eigen::VectorXd weights;
};

Eigen::VectorXd attention_forward(const AttentionParams& p, const Eigen::VectorXd& query,
                                  const Eigen::MatrixXd& keys, AttentionCache* cache);

void attention_backward(AttentionParams& p, const AttentionCache& cache,
                        const Eigen::VectorXd& dcontext, Eigen::VectorXd* dquery,
                        Eigen::MatrixXd* dkeys);

// --- softmax ----------------------------------------------------------------------

// exp-normalized with max subtraction
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// dlogits for y = softmax(logits): y .* (dy - <y, dy>)
Eigen::VectorXd softmax_backward(const Eigen::VectorXd& y, const Eigen::VectorXd& dy);

// --- finite-difference gradient checking --------------------------------------------
//
// Central differences on every coordinate of `x`, comparing against
// `analytic`; `recompute_loss` re-evaluates the scalar loss from current
// values. Returns the max relative error |a-n| / max(|a|,|n|,1e-8).
double gradient_check(const std::function<double()>& recompute_loss, Eigen::MatrixXd& x,
                      const Eigen::MatrixXd& analytic, double eps = 1e-5);

}  // namespace gbban

#endif
