#include "gbban/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gbban/tsv.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is little-endian; big-endian hosts need byte swapping");

namespace gbban {

namespace {
constexpr const char* kMagic = "GBBAN-CKPT 1";
}

const Eigen::MatrixXd& Checkpoint::tensor(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return t;
    throw std::out_of_range("checkpoint has no tensor '" + name + "'");
}

bool Checkpoint::has(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return true;
    return false;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << kMagic << '\n';
    for (const auto& [k, v] : ckpt.meta) out << "meta " << k << ' ' << v << '\n';
    for (const auto& [name, t] : ckpt.tensors)
        out << "tensor " << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
    out << "end\n";
    for (const auto& [name, t] : ckpt.tensors)
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            for (Eigen::Index j = 0; j < t.cols(); ++j) {
                const double v = t(i, j);
                out.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
    if (!out) throw std::runtime_error("write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw std::runtime_error(path + ": not a checkpoint file");

    Checkpoint ckpt;
    std::vector<std::pair<std::string, std::pair<Eigen::Index, Eigen::Index>>> shapes;
    while (std::getline(in, line)) {
        if (line == "end") break;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "meta") {
            std::string key;
            ls >> key;
            std::string value;
            std::getline(ls, value);
            if (!value.empty() && value.front() == ' ') value.erase(0, 1);
            ckpt.meta[key] = value;
        } else if (kind == "tensor") {
            std::string name;
            Eigen::Index rows = 0, cols = 0;
            ls >> name >> rows >> cols;
            if (name.empty() || rows < 0 || cols < 0)
                throw std::runtime_error(path + ": malformed tensor header");
            shapes.emplace_back(name, std::make_pair(rows, cols));
        } else {
            throw std::runtime_error(path + ": unexpected header line '" + line + "'");
        }
    }

    for (const auto& [name, shape] : shapes) {
        Eigen::MatrixXd t(shape.first, shape.second);
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            for (Eigen::Index j = 0; j < t.cols(); ++j) {
                double v = 0;
                if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
                    throw std::runtime_error(path + ": truncated payload");
                t(i, j) = v;
            }
        ckpt.tensors.emplace_back(name, std::move(t));
    }
    return ckpt;
}

}  // namespace gbban
