#pragma once

#include "robest/systems.hpp"

namespace robest::detail {

// RK4 without the dt·‖A‖ precondition; callers check step size themselves.
SimulationResult integrate_rk4(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D, const Vector& x0,
                               const InputSignal& u, const TimeGrid& grid);

}  // namespace robest::detail
