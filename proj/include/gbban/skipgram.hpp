#ifndef GBBAN_SKIPGRAM_HPP
#define GBBAN_SKIPGRAM_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace gbban {

using Corpus = std::vector<std::vector<std::string>>;

// symbol <-> dense index bijection with frequency counts,
// indexes in first-appearance order over the corpus
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(const Corpus& corpus);

    int index_of(const std::string& symbol) const;  // -1 if absent
    const std::string& symbol(int index) const { return symbols_.at(index); }
    std::uint64_t count(int index) const { return counts_.at(index); }
    int size() const { return static_cast<int>(symbols_.size()); }
    const std::vector<std::string>& symbols() const { return symbols_; }

private:
    std::vector<std::string> symbols_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, int> index_;
};

// Huffman tree over symbol frequencies: per-symbol binary code, the matching
// path of inner-node indexes, and the trainable inner-node vectors.
struct HuffmanCoding {
    std::vector<std::vector<std::uint8_t>> codes;  // bit per tree branch
    std::vector<std::vector<int>> paths;           // inner-node index per branch
    Eigen::MatrixXd inner;                         // (|V|-1) x d, zero-initialized by trainer

    int code_length(int symbol) const { return static_cast<int>(codes.at(symbol).size()); }
};

// Optimal prefix code by frequency; equal-frequency ties merge by smaller
// node index so the tree is deterministic. Needs at least two symbols.
HuffmanCoding build_huffman(const std::vector<std::uint64_t>& freqs);

// symbol -> d-dimensional vector, rows aligned with a Vocabulary
struct EmbeddingTable {
    std::vector<std::string> symbols;
    Eigen::MatrixXd vectors;  // |V| x d

    int dim() const { return static_cast<int>(vectors.cols()); }
    int size() const { return static_cast<int>(vectors.rows()); }
    int index_of(const std::string& symbol) const;

private:
    mutable std::unordered_map<std::string, int> index_;  // built lazily
};

void save_embeddings(const std::string& path, const EmbeddingTable& table);
EmbeddingTable load_embeddings(const std::string& path);

struct SkipGramConfig {
    int dim = 300;
    int window = 5;
    int epochs = 5;
    double lr = 0.025;
    std::uint64_t seed = 0;
};

// Hierarchical-softmax probability of `context` given `center`:
// product over the context's Huffman path of sigmoid(±<v_center, u_inner>).
double pair_probability(const EmbeddingTable& table, const HuffmanCoding& coding, int center,
                        int context);

// -log pair_probability and its gradients; grad buffers are accumulated into.
double pair_loss_grad(const EmbeddingTable& table, const HuffmanCoding& coding, int center,
                      int context, Eigen::VectorXd& grad_center, Eigen::MatrixXd& grad_inner);

struct SkipGramModel {
    Vocabulary vocab;
    EmbeddingTable table;
    HuffmanCoding coding;
};

// SkipGram with hierarchical softmax, plain SGD with linear lr decay.
// Single-threaded and bit-deterministic in the seed.
SkipGramModel train_skipgram(const Corpus& corpus, const SkipGramConfig& cfg);

}  // namespace gbban

#endif
