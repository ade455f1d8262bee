#include "robest/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "robest/error.hpp"

namespace robest {

namespace {

void require_square(const Matrix& M, const char* op) {
    if (M.rows() != M.cols()) {
        std::ostringstream os;
        os << op << ": expected a square matrix, got " << M.rows() << "x" << M.cols();
        detail::reject(os.str());
    }
}

}  // namespace

SymmetricEigen sym_eig(const Matrix& S) {
    require_square(S, "sym_eig");
    const Eigen::Index n = S.rows();
    Matrix             a = 0.5 * (S + S.transpose());
    Matrix             v = Matrix::Identity(n, n);

    const double scale = a.norm();
    if (n > 1 && scale > 0.0) {
        const double tol = 1e-15 * scale;
        for (int sweep = 0; sweep < 100; ++sweep) {
            double off = 0.0;
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
            if (std::sqrt(2.0 * off) <= tol) break;

            for (Eigen::Index p = 0; p < n - 1; ++p) {
                for (Eigen::Index q = p + 1; q < n; ++q) {
                    const double apq = a(p, q);
                    if (apq == 0.0) continue;
                    // Rotation annihilating a(p,q), Golub & Van Loan Alg. 8.4.1.
                    const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                    const double t   = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    const double c   = 1.0 / std::sqrt(1.0 + t * t);
                    const double s   = t * c;
                    for (Eigen::Index k = 0; k < n; ++k) {
                        const double akp = a(k, p);
                        const double akq = a(k, q);
                        a(k, p)          = c * akp - s * akq;
                        a(k, q)          = s * akp + c * akq;
                    }
                    for (Eigen::Index k = 0; k < n; ++k) {
                        const double apk = a(p, k);
                        const double aqk = a(q, k);
                        a(p, k)          = c * apk - s * aqk;
                        a(q, k)          = s * apk + c * aqk;
                    }
                    for (Eigen::Index k = 0; k < n; ++k) {
                        const double vkp = v(k, p);
                        const double vkq = v(k, q);
                        v(k, p)          = c * vkp - s * vkq;
                        v(k, q)          = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });

    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values[i]     = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

double sym_eig_max(const Matrix& S) {
    require_square(S, "sym_eig_max");
    if (S.size() == 0) detail::reject("sym_eig_max: empty matrix");
    return sym_eig(S).values.maxCoeff();
}

double sym_eig_min(const Matrix& S) {
    require_square(S, "sym_eig_min");
    if (S.size() == 0) detail::reject("sym_eig_min: empty matrix");
    return sym_eig(S).values.minCoeff();
}

double norm2(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    const Matrix gram = M.rows() < M.cols() ? Matrix(M * M.transpose()) : Matrix(M.transpose() * M);
    return std::sqrt(std::max(0.0, sym_eig_max(gram)));
}

LogNormResult log_norm(const Matrix& A) {
    require_square(A, "log_norm");
    const double mu = sym_eig_max(0.5 * (A + A.transpose()));
    return {mu, mu < 0.0};
}

double spectral_abscissa(const Matrix& A) {
    require_square(A, "spectral_abscissa");
    if (A.size() == 0) detail::reject("spectral_abscissa: empty matrix");
    Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("spectral_abscissa: eigenvalue iteration failed");
    return solver.eigenvalues().real().maxCoeff();
}

// ---------------------------------------------------------------------------
// Matrix exponential: Higham, "The scaling and squaring method for the matrix
// exponential revisited", SIAM J. Matrix Anal. Appl. 26(4), 2005.

namespace {

constexpr std::array<double, 14> kPade13 = {64764752532480000.0,
                                            32382376266240000.0,
                                            7771770303897600.0,
                                            1187353796428800.0,
                                            129060195264000.0,
                                            10559470521600.0,
                                            670442572800.0,
                                            33522128640.0,
                                            1323241920.0,
                                            40840800.0,
                                            960960.0,
                                            16380.0,
                                            182.0,
                                            1.0};

double norm1(const Matrix& M) { return M.cwiseAbs().colwise().sum().maxCoeff(); }

// Numerator U/V split for the low-degree approximants (m = 3, 5, 7, 9).
void pade_low(const Matrix& A, int m, Matrix& U, Matrix& V) {
    static const double b3[] = {120.0, 60.0, 12.0, 1.0};
    static const double b5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
    static const double b7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
    static const double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                2162160.0,     110880.0,     3960.0,       90.0,        1.0};
    const double*       b    = m == 3 ? b3 : m == 5 ? b5 : m == 7 ? b7 : b9;

    const Eigen::Index n  = A.rows();
    const Matrix       I  = Matrix::Identity(n, n);
    const Matrix       A2 = A * A;
    Matrix             power = I;
    Matrix             u     = b[1] * I;
    V                        = b[0] * I;
    for (int k = 2; k <= m; k += 2) {
        power = power * A2;
        u += b[k + 1] * power;
        V += b[k] * power;
    }
    U = A * u;
}

}  // namespace

Matrix expm(const Matrix& A) {
    require_square(A, "expm");
    if (!A.allFinite()) detail::reject("expm: non-finite entries");
    const Eigen::Index n = A.rows();
    if (n == 0) return A;
    const Matrix I = Matrix::Identity(n, n);

    const double a1 = norm1(A);
    Matrix       U, V;
    constexpr std::array<std::pair<int, double>, 4> kLow = {
        {{3, 1.495585217958292e-2}, {5, 2.539398330063230e-1}, {7, 9.504178996162932e-1}, {9, 2.097847961257068e0}}};
    for (const auto& [m, theta] : kLow) {
        if (a1 <= theta) {
            pade_low(A, m, U, V);
            return (V - U).partialPivLu().solve(V + U);
        }
    }

    constexpr double theta13 = 5.371920351148152;
    int              squarings = 0;
    if (a1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(a1 / theta13)));
    const Matrix As = A * std::ldexp(1.0, -squarings);

    const auto&  b  = kPade13;
    const Matrix A2 = As * As;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    U = As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;

    Matrix R = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < squarings; ++k) R = R * R;
    return R;
}

Matrix expm_param_derivative(const Matrix& A, const Matrix& E, double t) {
    require_square(A, "expm_param_derivative");
    if (E.rows() != A.rows() || E.cols() != A.cols()) detail::reject("expm_param_derivative: A and E differ in shape");
    if (!std::isfinite(t)) detail::reject("expm_param_derivative: non-finite time");
    const Eigen::Index n = A.rows();
    Matrix             block = Matrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n)     = t * A;
    block.topRightCorner(n, n)    = t * E;
    block.bottomRightCorner(n, n) = t * A;
    return expm(block).topRightCorner(n, n);
}

// ---------------------------------------------------------------------------

LyapunovSolution lyap_observability(const Matrix& Abar, const Matrix& Q) {
    require_square(Abar, "lyap_observability");
    require_square(Q, "lyap_observability");
    if (Q.rows() != Abar.rows()) detail::reject("lyap_observability: Q and Abar differ in size");
    const Eigen::Index n = Abar.rows();

    const double alpha = spectral_abscissa(Abar);
    if (!(alpha < 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "lyap_observability: Abar is not Hurwitz (spectral abscissa " << alpha << " >= 0)";
        detail::reject(os.str());
    }

    const Matrix I  = Matrix::Identity(n, n);
    const Matrix At = Abar.transpose();
    Matrix       K  = Matrix::Zero(n * n, n * n);
    // Column-major vec: vec(AᵀP) = (I⊗Aᵀ)vec(P), vec(PA) = (Aᵀ⊗I)vec(P).
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            K.block(i * n, j * n, n, n) += I(i, j) * At;
            K.block(i * n, j * n, n, n) += At(i, j) * I;
        }
    }
    const Matrix sym_q = 0.5 * (Q + Q.transpose());
    const Vector rhs   = -Eigen::Map<const Vector>(sym_q.data(), n * n);

    Eigen::FullPivLU<Matrix> lu(K);
    if (!lu.isInvertible()) throw NumericalError("lyap_observability: Kronecker system is singular");
    const Vector vec_p = lu.solve(rhs);
    if (!vec_p.allFinite()) throw NumericalError("lyap_observability: non-finite solution");

    Matrix P = Eigen::Map<const Matrix>(vec_p.data(), n, n);
    P        = 0.5 * (P + P.transpose());
    const double residual = (At * P + P * Abar + sym_q).norm();
    return {std::move(P), residual};
}

Matrix gramian_finite(const Matrix& Abar, const Matrix& Cbar, double horizon) {
    require_square(Abar, "gramian_finite");
    if (Cbar.cols() != Abar.rows()) detail::reject("gramian_finite: Cbar column count differs from Abar order");
    if (!(horizon > 0.0)) detail::reject("gramian_finite: horizon must be positive");
    const Eigen::Index n   = Abar.rows();
    const Matrix       CtC = Cbar.transpose() * Cbar;
    if (CtC.isZero(0.0)) return Matrix::Zero(n, n);

    auto integrand = [&](double s) {
        const Matrix E = expm(Abar * s);
        return Matrix(E.transpose() * CtC * E);
    };

    constexpr std::size_t kStartIntervals = 64;
    constexpr std::size_t kMaxIntervals   = std::size_t{1} << 20;

    std::vector<Matrix> samples;
    samples.reserve(kStartIntervals + 1);
    for (std::size_t k = 0; k <= kStartIntervals; ++k)
        samples.push_back(integrand(horizon * static_cast<double>(k) / kStartIntervals));

    auto integrate = [&](const std::vector<Matrix>& f) {
        const std::size_t m    = f.size() - 1;
        const double      step = horizon / static_cast<double>(m);
        Matrix            sum  = f.front() + f.back();
        for (std::size_t k = 1; k < m; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * f[k];
        return Matrix(sum * (step / 3.0));
    };

    Matrix current = integrate(samples);
    for (std::size_t m = kStartIntervals; m < kMaxIntervals; m *= 2) {
        std::vector<Matrix> refined;
        refined.reserve(2 * m + 1);
        for (std::size_t k = 0; k < m; ++k) {
            refined.push_back(std::move(samples[k]));
            refined.push_back(integrand(horizon * (static_cast<double>(2 * k + 1) / static_cast<double>(2 * m))));
        }
        refined.push_back(std::move(samples[m]));
        samples = std::move(refined);

        Matrix       next = integrate(samples);
        const double tr   = next.trace();
        const bool   done = std::abs(tr - current.trace()) < 1e-8 * std::abs(tr);
        current           = std::move(next);
        if (done) return 0.5 * (current + current.transpose());
    }
    throw NumericalError("gramian_finite: Simpson quadrature did not converge");
}

Matrix sqrtm_psd(const Matrix& S) {
    const SymmetricEigen eig = sym_eig(S);
    const Vector         root = eig.values.cwiseMax(0.0).cwiseSqrt();
    return eig.vectors * root.asDiagonal() * eig.vectors.transpose();
}

double simpson(std::span<const double> f, double step) {
    if (f.size() < 2) detail::reject("simpson: need at least two samples");
    const std::size_t intervals = f.size() - 1;
    if (intervals == 1) return 0.5 * step * (f[0] + f[1]);

    auto composite = [&](std::size_t last) {  // Simpson on [0, last], last even
        double sum = f[0] + f[last];
        for (std::size_t k = 1; k < last; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * f[k];
        return sum * step / 3.0;
    };
    if (intervals % 2 == 0) return composite(intervals);

    const std::size_t j     = intervals - 3;
    const double      tail  = 3.0 * step / 8.0 * (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]);
    return (j == 0 ? 0.0 : composite(j)) + tail;
}

}  // namespace robest
