#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robest/types.hpp"

namespace robest {

/// Names and nominal values θ* of the scheduling parameters.
struct ParamVectorSpec {
    std::vector<std::string> names;
    std::vector<double>      nominal;

    ParamVectorSpec() = default;
    ParamVectorSpec(std::vector<std::string> names, std::vector<double> nominal);

    std::size_t size() const { return names.size(); }
    Vector      nominal_vector() const;

    /// Index of `name`, or std::nullopt.
    std::optional<std::size_t> index_of(const std::string& name) const;

    /// Rejects theta whose length differs from size().
    void check(const Vector& theta) const;

    bool operator==(const ParamVectorSpec&) const = default;
};

/// Product of parameter powers. The empty monomial is the constant 1.
class Monomial {
   public:
    using Exponents = std::map<std::size_t, unsigned>;

    Monomial() = default;
    explicit Monomial(Exponents exponents);

    static Monomial variable(std::size_t index, unsigned power = 1);

    const Exponents& exponents() const { return exponents_; }
    bool             is_constant() const { return exponents_.empty(); }
    unsigned         degree() const;
    unsigned         power_of(std::size_t index) const;

    /// One past the highest parameter index referenced (0 for the constant).
    std::size_t required_size() const;

    double evaluate(const Vector& theta) const;

    /// ∂/∂θ_index as (multiplier, monomial); nullopt when the result is zero.
    std::optional<std::pair<double, Monomial>> derivative(std::size_t index) const;

    friend Monomial operator*(const Monomial& a, const Monomial& b);

    auto operator<=>(const Monomial&) const = default;

   private:
    Exponents exponents_;
};

/// Matrix-valued polynomial in θ: Σ coeff_j · monomial_j(θ).
///
/// Terms are kept in canonical form: at most one coefficient per monomial,
/// all coefficients rows()×cols(). Instances are immutable once built by the
/// free functions below; ParamMatrix::with_term is the only builder.
class ParamMatrix {
   public:
    using Terms = std::map<Monomial, Matrix>;

    ParamMatrix() = default;
    ParamMatrix(Eigen::Index rows, Eigen::Index cols);

    static ParamMatrix constant(const Matrix& value);
    static ParamMatrix zero(Eigen::Index rows, Eigen::Index cols) { return {rows, cols}; }

    /// Copy with `coeff · monomial` added (merged into an existing term).
    ParamMatrix with_term(const Monomial& monomial, const Matrix& coeff) const;

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    const Terms& terms() const { return terms_; }

    bool        is_constant() const;
    bool        depends_on(std::size_t index) const;
    std::size_t required_size() const;
    unsigned    degree() const;

    Matrix eval(const Vector& theta) const;

    /// eval(a) − eval(b), summed term by term so that parameter-free terms
    /// cancel exactly instead of leaving rounding residue.
    Matrix difference(const Vector& a, const Vector& b) const;

    /// Exact ∂/∂θ_index evaluated at theta.
    Matrix partial(std::size_t index, const Vector& theta) const;

    /// Exact ∂/∂θ_index as a ParamMatrix.
    ParamMatrix derivative(std::size_t index) const;

   private:
    void insert(const Monomial& monomial, const Matrix& coeff);

    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    Terms        terms_;
};

using ParamVector = ParamMatrix;

ParamMatrix add(const ParamMatrix& a, const ParamMatrix& b);
ParamMatrix scale(const ParamMatrix& a, double factor);
ParamMatrix negate(const ParamMatrix& a);
ParamMatrix block_diag(const ParamMatrix& a, const ParamMatrix& b);
ParamMatrix vstack(const ParamMatrix& top, const ParamMatrix& bottom);
ParamMatrix hstack(const ParamMatrix& left, const ParamMatrix& right);

/// left · pm · right for constant left/right factors.
ParamMatrix sandwich(const Matrix& left, const ParamMatrix& pm, const Matrix& right);

}  // namespace robest
