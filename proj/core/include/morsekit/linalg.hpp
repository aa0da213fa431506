#pragma once

#include <Eigen/Dense>

namespace morsekit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace morsekit
