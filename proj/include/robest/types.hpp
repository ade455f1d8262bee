#pragma once

#include <Eigen/Dense>

namespace robest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace robest
