#ifndef GBBAN_CHECKPOINT_HPP
#define GBBAN_CHECKPOINT_HPP

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

namespace gbban {

// Named-tensor checkpoint: a text header listing metadata lines and tensor
// shapes, followed by the concatenated row-major little-endian double
// payload in header order.
struct Checkpoint {
    std::map<std::string, std::string> meta;            // ordered for stable output
    std::vector<std::pair<std::string, Eigen::MatrixXd>> tensors;

    const Eigen::MatrixXd& tensor(const std::string& name) const;
    bool has(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gbban

#endif
