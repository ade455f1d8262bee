#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robest/metric.hpp"
#include "robest/systems.hpp"

namespace robest {

struct Scenario {
    std::string               name;
    std::string               description;
    StateSpace                truth;
    StateSpace                estimate;
    InputSignal               input;
    std::optional<double>     horizon;  ///< chosen from the log-norm when empty
    std::vector<std::size_t>  params_of_interest;
    std::optional<double>     fd_step;  ///< default_fd_step(θᵢ*) when empty
    std::vector<MetricSource> bounds;   ///< bound sources evaluated by `run`

    void validate() const;
};

/// The six mass-spring-damper scenarios: four with parameter-dependent A and
/// two with parameter-dependent x(0).
std::vector<Scenario> paper_scenarios();

/// Looks up a preset scenario by name; rejects unknown names.
Scenario paper_scenario(const std::string& name);

/// Random stable truth/estimate pair with affine dependence on one parameter,
/// shifted so that μ(Ā(θ*)) = −delta. Reproducible from the seed.
Scenario random_stable_augmented(int n, std::uint64_t seed, double delta);

/// Random stable pair with parameter-free dynamics and affine x(0)(θ).
Scenario random_stable_initial_condition(int n, std::uint64_t seed, double delta);

/// Deterministic uniform generator (bit-identical across platforms).
class Rng {
   public:
    explicit Rng(std::uint64_t seed);
    double uniform(double lo, double hi);
    Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi);

   private:
    std::uint64_t next();
    std::uint64_t state_;
};

}  // namespace robest
