#include "gbban/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "gbban/rng.hpp"
#include "gbban/tsv.hpp"

namespace gbban {

Vocabulary::Vocabulary(const Corpus& corpus) {
    for (const auto& sentence : corpus)
        for (const auto& symbol : sentence) {
            auto it = index_.find(symbol);
            if (it == index_.end()) {
                index_.emplace(symbol, static_cast<int>(symbols_.size()));
                symbols_.push_back(symbol);
                counts_.push_back(1);
            } else {
                ++counts_[it->second];
            }
        }
}

int Vocabulary::index_of(const std::string& symbol) const {
    auto it = index_.find(symbol);
    return it == index_.end() ? -1 : it->second;
}

HuffmanCoding build_huffman(const std::vector<std::uint64_t>& freqs) {
    const int n = static_cast<int>(freqs.size());
    if (n < 2) throw std::invalid_argument("Huffman coding needs at least 2 symbols");

    // nodes 0..n-1 are leaves, n..2n-2 are inner nodes in creation order
    struct Item {
        std::uint64_t freq;
        int node;
        bool operator>(const Item& o) const {
            return freq != o.freq ? freq > o.freq : node > o.node;
        }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (int i = 0; i < n; ++i) heap.push({freqs[i], i});

    std::vector<int> parent(2 * n - 1, -1);
    std::vector<std::uint8_t> branch(2 * n - 1, 0);  // bit of the edge to the parent
    int next = n;
    while (heap.size() > 1) {
        Item a = heap.top(); heap.pop();
        Item b = heap.top(); heap.pop();
        parent[a.node] = next;
        parent[b.node] = next;
        branch[a.node] = 0;  // smaller (freq, index) goes left
        branch[b.node] = 1;
        heap.push({a.freq + b.freq, next});
        ++next;
    }

    HuffmanCoding coding;
    coding.codes.resize(n);
    coding.paths.resize(n);
    for (int i = 0; i < n; ++i) {
        std::vector<std::uint8_t> code;
        std::vector<int> path;
        for (int v = i; parent[v] != -1; v = parent[v]) {
            code.push_back(branch[v]);
            path.push_back(parent[v] - n);  // inner nodes re-indexed to 0..n-2
        }
        std::reverse(code.begin(), code.end());
        std::reverse(path.begin(), path.end());
        coding.codes[i] = std::move(code);
        coding.paths[i] = std::move(path);
    }
    return coding;
}

int EmbeddingTable::index_of(const std::string& symbol) const {
    if (index_.empty())
        for (std::size_t i = 0; i < symbols.size(); ++i) index_.emplace(symbols[i], static_cast<int>(i));
    auto it = index_.find(symbol);
    return it == index_.end() ? -1 : it->second;
}

void save_embeddings(const std::string& path, const EmbeddingTable& table) {
    auto out = open_output(path);
    for (int i = 0; i < table.size(); ++i) {
        out << table.symbols[i] << '\t';
        for (int d = 0; d < table.dim(); ++d) {
            if (d) out << ' ';
            out << format_double(table.vectors(i, d));
        }
        out << '\n';
    }
}

EmbeddingTable load_embeddings(const std::string& path) {
    EmbeddingTable table;
    std::vector<std::vector<double>> rows;
    for (const auto& line : read_lines(path)) {
        auto f = split(line, '\t');
        if (f.size() != 2) throw std::runtime_error(path + ": malformed embedding line");
        table.symbols.push_back(f[0]);
        std::vector<double> row;
        for (const auto& tok : split(f[1], ' '))
            if (!tok.empty()) row.push_back(parse_double(tok));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": empty embedding table");
    table.vectors.resize(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw std::runtime_error(path + ": ragged embedding rows");
        for (std::size_t d = 0; d < rows[i].size(); ++d) table.vectors(i, d) = rows[i][d];
    }
    return table;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double pair_probability(const EmbeddingTable& table, const HuffmanCoding& coding, int center,
                        int context) {
    if (center < 0 || center >= table.size() || context < 0 || context >= table.size())
        throw std::invalid_argument("symbol index out of vocabulary");
    const auto& code = coding.codes.at(context);
    const auto& path = coding.paths.at(context);
    double prob = 1.0;
    for (std::size_t i = 0; i < code.size(); ++i) {
        double dot = table.vectors.row(center).dot(coding.inner.row(path[i]));
        double sign = code[i] == 0 ? 1.0 : -1.0;  // P(bit 0) = sigmoid(+dot)
        prob *= sigmoid(sign * dot);
    }
    return prob;
}

double pair_loss_grad(const EmbeddingTable& table, const HuffmanCoding& coding, int center,
                      int context, Eigen::VectorXd& grad_center, Eigen::MatrixXd& grad_inner) {
    const auto& code = coding.codes.at(context);
    const auto& path = coding.paths.at(context);
    double loss = 0.0;
    for (std::size_t i = 0; i < code.size(); ++i) {
        double dot = table.vectors.row(center).dot(coding.inner.row(path[i]));
        double sign = code[i] == 0 ? 1.0 : -1.0;
        double s = sigmoid(sign * dot);
        loss -= std::log(std::max(s, 1e-300));
        // d(-log sigmoid(sign*dot))/d(dot) = -sign * (1 - s)
        double dldot = -sign * (1.0 - s);
        grad_center += dldot * coding.inner.row(path[i]).transpose();
        grad_inner.row(path[i]) += dldot * table.vectors.row(center);
    }
    return loss;
}

SkipGramModel train_skipgram(const Corpus& corpus, const SkipGramConfig& cfg) {
    if (corpus.empty()) throw std::invalid_argument("empty corpus");
    SkipGramModel model;
    model.vocab = Vocabulary(corpus);
    const int n = model.vocab.size();
    if (n < 2) throw std::invalid_argument("skipgram needs a vocabulary of at least 2 symbols");

    std::vector<std::uint64_t> freqs(n);
    for (int i = 0; i < n; ++i) freqs[i] = model.vocab.count(i);
    model.coding = build_huffman(freqs);
    model.coding.inner = Eigen::MatrixXd::Zero(n - 1, cfg.dim);

    model.table.symbols = model.vocab.symbols();
    model.table.vectors.resize(n, cfg.dim);
    Rng init_rng(derive_seed(cfg.seed, "skipgram-init"));
    const double r = 0.5 / cfg.dim;
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < cfg.dim; ++d) model.table.vectors(i, d) = init_rng.uniform(-r, r);

    // pre-encode the corpus
    std::vector<std::vector<int>> encoded(corpus.size());
    for (std::size_t s = 0; s < corpus.size(); ++s) {
        encoded[s].reserve(corpus[s].size());
        for (const auto& sym : corpus[s]) encoded[s].push_back(model.vocab.index_of(sym));
    }

    std::uint64_t total_centers = 0;
    for (const auto& sent : encoded) total_centers += sent.size();
    total_centers *= static_cast<std::uint64_t>(std::max(cfg.epochs, 1));

    Eigen::VectorXd grad_center(cfg.dim);
    std::uint64_t processed = 0;
    std::vector<std::size_t> order(encoded.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng order_rng(derive_seed(cfg.seed, "skipgram-order", static_cast<std::uint64_t>(epoch)));
        order_rng.shuffle(order);
        for (std::size_t s : order) {
            const auto& sent = encoded[s];
            const int len = static_cast<int>(sent.size());
            for (int pos = 0; pos < len; ++pos, ++processed) {
                double lr = cfg.lr * std::max(1.0 - static_cast<double>(processed) / total_centers,
                                              1e-4);
                int center = sent[pos];
                for (int off = -cfg.window; off <= cfg.window; ++off) {
                    if (off == 0) continue;
                    int cpos = pos + off;
                    if (cpos < 0 || cpos >= len) continue;
                    int context = sent[cpos];
                    // accumulate center grad over the path, update inner rows in place
                    grad_center.setZero();
                    const auto& code = model.coding.codes[context];
                    const auto& path = model.coding.paths[context];
                    for (std::size_t i = 0; i < code.size(); ++i) {
                        double dot = model.table.vectors.row(center)
                                         .dot(model.coding.inner.row(path[i]));
                        double sign = code[i] == 0 ? 1.0 : -1.0;
                        double dldot = -sign * (1.0 - sigmoid(sign * dot));
                        grad_center += dldot * model.coding.inner.row(path[i]).transpose();
                        model.coding.inner.row(path[i]) -=
                            lr * dldot * model.table.vectors.row(center);
                    }
                    model.table.vectors.row(center) -= lr * grad_center.transpose();
                }
            }
        }
    }
    return model;
}

}  // namespace gbban
