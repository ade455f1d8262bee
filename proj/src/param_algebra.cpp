#include "robest/param_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "robest/error.hpp"

namespace robest {

ParamVectorSpec::ParamVectorSpec(std::vector<std::string> n, std::vector<double> nom)
    : names(std::move(n)), nominal(std::move(nom)) {
    if (names.size() != nominal.size()) {
        std::ostringstream os;
        os << "parameter spec: " << names.size() << " names but " << nominal.size() << " nominal values";
        detail::reject(os.str());
    }
    std::set<std::string> seen;
    for (const auto& name : names) {
        if (!seen.insert(name).second) detail::reject("parameter spec: duplicate name '" + name + "'");
    }
}

Vector ParamVectorSpec::nominal_vector() const {
    return Eigen::Map<const Vector>(nominal.data(), static_cast<Eigen::Index>(nominal.size()));
}

std::optional<std::size_t> ParamVectorSpec::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

void ParamVectorSpec::check(const Vector& theta) const {
    if (static_cast<std::size_t>(theta.size()) != size()) {
        std::ostringstream os;
        os << "theta has length " << theta.size() << ", parameter spec has " << size() << " parameters";
        detail::reject(os.str());
    }
}

// ---------------------------------------------------------------------------

Monomial::Monomial(Exponents exponents) {
    for (const auto& [index, power] : exponents) {
        if (power != 0) exponents_.emplace(index, power);
    }
}

Monomial Monomial::variable(std::size_t index, unsigned power) { return Monomial(Exponents{{index, power}}); }

unsigned Monomial::degree() const {
    unsigned d = 0;
    for (const auto& [_, power] : exponents_) d += power;
    return d;
}

unsigned Monomial::power_of(std::size_t index) const {
    auto it = exponents_.find(index);
    return it == exponents_.end() ? 0U : it->second;
}

std::size_t Monomial::required_size() const { return exponents_.empty() ? 0 : exponents_.rbegin()->first + 1; }

double Monomial::evaluate(const Vector& theta) const {
    double value = 1.0;
    for (const auto& [index, power] : exponents_) {
        const double base = theta[static_cast<Eigen::Index>(index)];
        for (unsigned k = 0; k < power; ++k) value *= base;
    }
    return value;
}

std::optional<std::pair<double, Monomial>> Monomial::derivative(std::size_t index) const {
    const unsigned power = power_of(index);
    if (power == 0) return std::nullopt;
    Exponents reduced = exponents_;
    reduced[index]    = power - 1;
    return std::make_pair(static_cast<double>(power), Monomial(std::move(reduced)));
}

Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial::Exponents merged = a.exponents_;
    for (const auto& [index, power] : b.exponents_) merged[index] += power;
    return Monomial(std::move(merged));
}

// ---------------------------------------------------------------------------

ParamMatrix::ParamMatrix(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) detail::reject("ParamMatrix: negative dimension");
}

ParamMatrix ParamMatrix::constant(const Matrix& value) {
    ParamMatrix pm(value.rows(), value.cols());
    pm.insert(Monomial{}, value);
    return pm;
}

ParamMatrix ParamMatrix::with_term(const Monomial& monomial, const Matrix& coeff) const {
    ParamMatrix out = *this;
    out.insert(monomial, coeff);
    return out;
}

void ParamMatrix::insert(const Monomial& monomial, const Matrix& coeff) {
    if (coeff.rows() != rows_ || coeff.cols() != cols_) {
        std::ostringstream os;
        os << "ParamMatrix: coefficient is " << coeff.rows() << "x" << coeff.cols() << ", expected " << rows_ << "x"
           << cols_;
        detail::reject(os.str());
    }
    if (!coeff.allFinite()) detail::reject("ParamMatrix: non-finite coefficient");
    auto [it, inserted] = terms_.try_emplace(monomial, coeff);
    if (!inserted) it->second += coeff;
}

bool ParamMatrix::is_constant() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& term) { return term.first.is_constant() || term.second.isZero(0.0); });
}

bool ParamMatrix::depends_on(std::size_t index) const {
    return std::any_of(terms_.begin(), terms_.end(), [index](const auto& term) {
        return term.first.power_of(index) > 0 && !term.second.isZero(0.0);
    });
}

std::size_t ParamMatrix::required_size() const {
    std::size_t size = 0;
    for (const auto& [monomial, _] : terms_) size = std::max(size, monomial.required_size());
    return size;
}

unsigned ParamMatrix::degree() const {
    unsigned d = 0;
    for (const auto& [monomial, _] : terms_) d = std::max(d, monomial.degree());
    return d;
}

Matrix ParamMatrix::eval(const Vector& theta) const {
    if (static_cast<std::size_t>(theta.size()) < required_size()) {
        std::ostringstream os;
        os << "ParamMatrix::eval: theta has length " << theta.size() << " but the polynomial references "
           << required_size() << " parameters";
        detail::reject(os.str());
    }
    Matrix out = Matrix::Zero(rows_, cols_);
    for (const auto& [monomial, coeff] : terms_) out += monomial.evaluate(theta) * coeff;
    return out;
}

Matrix ParamMatrix::difference(const Vector& a, const Vector& b) const {
    const std::size_t need = required_size();
    if (static_cast<std::size_t>(a.size()) < need || static_cast<std::size_t>(b.size()) < need)
        detail::reject("ParamMatrix::difference: theta shorter than the referenced parameters");
    Matrix out = Matrix::Zero(rows_, cols_);
    for (const auto& [monomial, coeff] : terms_) {
        if (monomial.is_constant()) continue;
        out += (monomial.evaluate(a) - monomial.evaluate(b)) * coeff;
    }
    return out;
}

Matrix ParamMatrix::partial(std::size_t index, const Vector& theta) const {
    if (index >= static_cast<std::size_t>(theta.size())) {
        std::ostringstream os;
        os << "ParamMatrix::partial: parameter index " << index << " out of range for theta of length "
           << theta.size();
        detail::reject(os.str());
    }
    return derivative(index).eval(theta);
}

ParamMatrix ParamMatrix::derivative(std::size_t index) const {
    ParamMatrix out(rows_, cols_);
    for (const auto& [monomial, coeff] : terms_) {
        if (auto d = monomial.derivative(index)) out.insert(d->second, d->first * coeff);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void require_same_shape(const ParamMatrix& a, const ParamMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
        detail::reject(os.str());
    }
}

// Places a's terms at (row, col) of a zero rows×cols canvas.
ParamMatrix embed(const ParamMatrix& a, Eigen::Index rows, Eigen::Index cols, Eigen::Index row, Eigen::Index col) {
    ParamMatrix out(rows, cols);
    for (const auto& [monomial, coeff] : a.terms()) {
        Matrix big                                       = Matrix::Zero(rows, cols);
        big.block(row, col, coeff.rows(), coeff.cols()) = coeff;
        out                                              = out.with_term(monomial, big);
    }
    return out;
}

}  // namespace

ParamMatrix add(const ParamMatrix& a, const ParamMatrix& b) {
    require_same_shape(a, b, "add");
    ParamMatrix out = a;
    for (const auto& [monomial, coeff] : b.terms()) out = out.with_term(monomial, coeff);
    return out;
}

ParamMatrix scale(const ParamMatrix& a, double factor) {
    ParamMatrix out(a.rows(), a.cols());
    for (const auto& [monomial, coeff] : a.terms()) out = out.with_term(monomial, factor * coeff);
    return out;
}

ParamMatrix negate(const ParamMatrix& a) { return scale(a, -1.0); }

ParamMatrix block_diag(const ParamMatrix& a, const ParamMatrix& b) {
    const Eigen::Index rows = a.rows() + b.rows();
    const Eigen::Index cols = a.cols() + b.cols();
    return add(embed(a, rows, cols, 0, 0), embed(b, rows, cols, a.rows(), a.cols()));
}

ParamMatrix vstack(const ParamMatrix& top, const ParamMatrix& bottom) {
    if (top.cols() != bottom.cols()) detail::reject("vstack: column counts differ");
    const Eigen::Index rows = top.rows() + bottom.rows();
    return add(embed(top, rows, top.cols(), 0, 0), embed(bottom, rows, top.cols(), top.rows(), 0));
}

ParamMatrix hstack(const ParamMatrix& left, const ParamMatrix& right) {
    if (left.rows() != right.rows()) detail::reject("hstack: row counts differ");
    const Eigen::Index cols = left.cols() + right.cols();
    return add(embed(left, left.rows(), cols, 0, 0), embed(right, left.rows(), cols, 0, left.cols()));
}

ParamMatrix sandwich(const Matrix& left, const ParamMatrix& pm, const Matrix& right) {
    if (left.cols() != pm.rows() || pm.cols() != right.rows()) detail::reject("sandwich: nonconforming factors");
    ParamMatrix out(left.rows(), right.cols());
    for (const auto& [monomial, coeff] : pm.terms()) out = out.with_term(monomial, left * coeff * right);
    return out;
}

}  // namespace robest
