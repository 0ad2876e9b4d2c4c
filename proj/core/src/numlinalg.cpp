#include "nleq/numlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nleq/errors.hpp"

namespace nleq {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace

// ---- DenseMatrix -------------------------------------------------------------

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require(r.size() == cols_, "ragged matrix initializer");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Vector DenseMatrix::column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> v) {
    require(v.size() == rows_, "set_column: length mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool DenseMatrix::all_finite() const noexcept { return nleq::all_finite(entries_); }

// ---- vector helpers ----------------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "dot: length mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> v) {
    // scaled to avoid overflow for the large residuals met far from a root
    double scale = 0.0, ssq = 1.0;
    for (double x : v) {
        if (x == 0.0) continue;
        const double ax = std::fabs(x);
        if (scale < ax) {
            ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
            scale = ax;
        } else {
            ssq += (ax / scale) * (ax / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double sum_of_squares(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

bool all_finite(std::span<const double> v) noexcept {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Vector multiply(const DenseMatrix& a, std::span<const double> x) {
    require(a.cols() == x.size(), "multiply: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Vector multiply_transposed(const DenseMatrix& a, std::span<const double> x) {
    require(a.rows() == x.size(), "multiply_transposed: dimension mismatch");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += r[j] * x[i];
    }
    return y;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.cols() == b.rows(), "multiply: dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

DenseMatrix gram(const DenseMatrix& a) {
    const std::size_t n = a.cols();
    DenseMatrix g(n, n);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p; q < n; ++q) g(p, q) += r[p] * r[q];
    }
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < p; ++q) g(p, q) = g(q, p);
    return g;
}

double frobenius_norm(const DenseMatrix& a) { return norm2(a.data()); }

double inf_norm(const DenseMatrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (double x : a.row(i)) s += std::fabs(x);
        m = std::max(m, s);
    }
    return m;
}

// ---- solves ------------------------------------------------------------------

Vector solve_linear(const DenseMatrix& a, std::span<const double> b) {
    require(a.rows() == a.cols(), "solve_linear: matrix not square");
    require(a.rows() == b.size(), "solve_linear: right-hand side length mismatch");
    const std::size_t n = a.rows();
    const double threshold = static_cast<double>(n) * kEps * inf_norm(a);

    DenseMatrix lu = a;
    Vector y(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::fabs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::fabs(lu(i, k)) > best) {
                best = std::fabs(lu(i, k));
                p = i;
            }
        }
        if (!(best > threshold)) {
            throw SingularMatrixError("solve_linear: matrix is numerically singular (pivot " +
                                          std::to_string(best) + ")",
                                      best);
        }
        if (p != k) {
            std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(p).begin());
            std::swap(y[k], y[p]);
        }
        const double pivot = lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = lu(i, k) / pivot;
            if (m == 0.0) continue;
            lu(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
            y[i] -= m * y[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = y[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= lu(k, j) * y[j];
        y[k] = s / lu(k, k);
    }
    return y;
}

namespace {

// Four partial sums so the loop vectorizes under strict floating point.
double dot_contiguous(const double* a, const double* b, std::size_t len) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < len; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

}  // namespace

Vector solve_least_squares(const DenseMatrix& a, std::span<const double> b) {
    const std::size_t m = a.rows(), n = a.cols();
    require(m >= n, "solve_least_squares: fewer rows than columns");
    require(b.size() == m, "solve_least_squares: right-hand side length mismatch");

    // rt holds A^T so that column k of A is the contiguous row k
    DenseMatrix rt = a.transposed();
    Vector qtb(b.begin(), b.end());
    Vector diag(n);
    const double threshold = static_cast<double>(std::max(m, n)) * kEps * frobenius_norm(a);

    for (std::size_t k = 0; k < n; ++k) {
        double* const vk = rt.row(k).data();
        double alpha = 0.0;
        for (std::size_t i = k; i < m; ++i) alpha = std::hypot(alpha, vk[i]);
        if (!(alpha > threshold)) {
            throw SingularMatrixError("solve_least_squares: rank-deficient matrix", alpha);
        }
        if (vk[k] > 0) alpha = -alpha;
        // Householder vector v = x - alpha e1 stored in column k below the diagonal
        vk[k] -= alpha;
        const double vnorm2 = dot_contiguous(vk + k, vk + k, m - k);
        for (std::size_t j = k + 1; j < n; ++j) {
            double* const cj = rt.row(j).data();
            const double s = dot_contiguous(vk + k, cj + k, m - k);
            const double f = 2.0 * s / vnorm2;
            for (std::size_t i = k; i < m; ++i) cj[i] -= f * vk[i];
        }
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += vk[i] * qtb[i];
        const double f = 2.0 * s / vnorm2;
        for (std::size_t i = k; i < m; ++i) qtb[i] -= f * vk[i];
        diag[k] = alpha;
    }
    Vector y(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = qtb[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= rt(j, k) * y[j];
        y[k] = s / diag[k];
    }
    return y;
}

Vector solve_truncated_least_squares(const DenseMatrix& a, std::span<const double> b,
                                     double rel_tol) {
    require(b.size() == a.rows(), "solve_truncated_least_squares: length mismatch");
    const SvdResult d = svd(a);
    Vector y(a.cols(), 0.0);
    if (d.sigma.empty() || d.sigma.front() == 0.0) return y;
    const double cut = rel_tol * d.sigma.front();
    for (std::size_t k = 0; k < d.sigma.size(); ++k) {
        if (d.sigma[k] <= cut) break;
        double c = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) c += d.u(i, k) * b[i];
        c /= d.sigma[k];
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += c * d.v(j, k);
    }
    return y;
}

// ---- SVD ---------------------------------------------------------------------

namespace {

// One-sided Jacobi on the columns of w (m x n, m >= n). On return the columns
// of w are mutually orthogonal and v accumulates the rotations. Works on
// transposed copies so each column is contiguous.
void jacobi_orthogonalize(DenseMatrix& w, DenseMatrix& v) {
    constexpr double kTol = 1e-12;
    constexpr int kMaxSweeps = 80;
    const std::size_t m = w.rows(), n = w.cols();
    DenseMatrix wt = w.transposed();
    DenseMatrix vt = v.transposed();

    auto dot_rows = [m](const double* a, const double* b) { return dot_contiguous(a, b, m); };

    Vector norms(n);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        // squared column norms, refreshed each sweep and updated per rotation
        for (std::size_t j = 0; j < n; ++j) norms[j] = dot_rows(wt.row(j).data(), wt.row(j).data());
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            double* const wp = wt.row(p).data();
            double* const vp = vt.row(p).data();
            for (std::size_t q = p + 1; q < n; ++q) {
                double* const wq = wt.row(q).data();
                const double alpha = norms[p], beta = norms[q];
                const double gamma = dot_rows(wp, wq);
                if (gamma == 0.0 || std::fabs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    std::copysign(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double a = wp[i], b = wq[i];
                    wp[i] = c * a - s * b;
                    wq[i] = s * a + c * b;
                }
                norms[p] = std::max(alpha - t * gamma, 0.0);
                norms[q] = beta + t * gamma;
                double* const vq = vt.row(q).data();
                for (std::size_t i = 0; i < vt.cols(); ++i) {
                    const double a = vp[i], b = vq[i];
                    vp[i] = c * a - s * b;
                    vq[i] = s * a + c * b;
                }
            }
        }
        if (!rotated) break;
    }
    w = wt.transposed();
    v = vt.transposed();
}

}  // namespace

SvdResult svd(const DenseMatrix& a) {
    const bool wide = a.rows() < a.cols();
    DenseMatrix w = wide ? a.transposed() : a;
    const std::size_t m = w.rows(), n = w.cols();
    DenseMatrix v = DenseMatrix::identity(n);
    jacobi_orthogonalize(w, v);

    Vector sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(w.column(j));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    SvdResult out{DenseMatrix(m, n), Vector(n), DenseMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        out.sigma[k] = sigma[j];
        for (std::size_t i = 0; i < m; ++i) out.u(i, k) = sigma[j] > 0.0 ? w(i, j) / sigma[j] : 0.0;
        for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
    }
    if (wide) std::swap(out.u, out.v);
    return out;
}

Vector singular_values(const DenseMatrix& a) {
    if (!a.all_finite()) throw InputError("singular_values: non-finite matrix entry");
    return svd(a).sigma;
}

// ---- finite differences ------------------------------------------------------

std::string_view to_string(DiffScheme s) noexcept {
    switch (s) {
        case DiffScheme::forward: return "forward";
        case DiffScheme::backward: return "backward";
        case DiffScheme::central: return "central";
    }
    return "unknown";
}

DiffScheme parse_diff_scheme(std::string_view name) {
    if (name == "forward") return DiffScheme::forward;
    if (name == "backward") return DiffScheme::backward;
    if (name == "central") return DiffScheme::central;
    throw InputError("unknown difference scheme: " + std::string(name));
}

double JacobianScheme::default_step(DiffScheme kind) noexcept {
    return kind == DiffScheme::central ? std::cbrt(kEps) : std::sqrt(kEps);
}

void JacobianScheme::validate() const {
    if (!(std::isfinite(rel_step) && rel_step > 0.0))
        throw InputError("finite-difference step must be positive");
}

std::size_t fd_evaluations(DiffScheme kind, std::size_t n) noexcept {
    return kind == DiffScheme::central ? 2 * n : n;
}

DenseMatrix fd_jacobian(const VectorFunction& f, const Vector& x, const JacobianScheme& scheme,
                        const Vector* fx) {
    scheme.validate();
    const std::size_t n = x.size();

    auto eval = [&](const Vector& p, std::size_t col) {
        Vector r = f(p);
        if (!all_finite(r))
            throw EvaluationError("fd_jacobian: non-finite residual perturbing column " +
                                      std::to_string(col),
                                  p, static_cast<std::ptrdiff_t>(col));
        return r;
    };

    Vector base;
    if (scheme.kind != DiffScheme::central) {
        base = fx ? *fx : f(x);
        if (!all_finite(base)) throw EvaluationError("fd_jacobian: non-finite residual at base point", x);
    }

    DenseMatrix jac;
    Vector xp = x;
    for (std::size_t j = 0; j < n; ++j) {
        const double h = scheme.rel_step * std::max(std::fabs(x[j]), 1.0);
        Vector col;
        if (scheme.kind == DiffScheme::central) {
            xp[j] = x[j] + h;
            const double hi = xp[j];
            Vector fp = eval(xp, j);
            xp[j] = x[j] - h;
            const double lo = xp[j];
            Vector fm = eval(xp, j);
            const double span = hi - lo;
            col.resize(fp.size());
            for (std::size_t i = 0; i < fp.size(); ++i) col[i] = (fp[i] - fm[i]) / span;
        } else {
            xp[j] = scheme.kind == DiffScheme::forward ? x[j] + h : x[j] - h;
            const double step = xp[j] - x[j];
            Vector fp = eval(xp, j);
            require(fp.size() == base.size(), "fd_jacobian: residual length changed");
            col.resize(fp.size());
            for (std::size_t i = 0; i < fp.size(); ++i) col[i] = (fp[i] - base[i]) / step;
        }
        xp[j] = x[j];
        if (j == 0) jac = DenseMatrix(col.size(), n);
        require(col.size() == jac.rows(), "fd_jacobian: residual length changed");
        jac.set_column(j, col);
    }
    return jac;
}

Vector fd_gradient(const ScalarFunction& g, const Vector& x, const JacobianScheme& scheme,
                   const double* gx) {
    // A scalar function is a 1 x n Jacobian.
    VectorFunction wrapped = [&g](const Vector& p) { return Vector{g(p)}; };
    Vector base;
    if (gx) base = Vector{*gx};
    const DenseMatrix j = fd_jacobian(wrapped, x, scheme, gx ? &base : nullptr);
    return Vector(j.row(0).begin(), j.row(0).end());
}

}  // namespace nleq
