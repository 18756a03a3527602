#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace treebandit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using ItemId = std::uint64_t;
using UserId = std::uint64_t;
using NodeId = int;

}  // namespace treebandit
