#pragma once

// Small dense linear algebra and finite-difference derivatives.
//
// Everything here is O(n^3) dense code sized for the test problems in this
// library (n <= 500). Matrices are row-major.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace nleq {

using Vector = std::vector<double>;
using VectorFunction = std::function<Vector(const Vector&)>;
using ScalarFunction = std::function<double(const Vector&)>;

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Row-major nested initializer; all rows must have equal length.
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return entries_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {entries_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {entries_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return entries_; }

    Vector column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> v);

    DenseMatrix transposed() const;
    bool all_finite() const noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

// ---- vector helpers ----------------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
double sum_of_squares(std::span<const double> v);
bool all_finite(std::span<const double> v) noexcept;

Vector multiply(const DenseMatrix& a, std::span<const double> x);
/// Computes A^T x without forming the transpose.
Vector multiply_transposed(const DenseMatrix& a, std::span<const double> x);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// A^T A.
DenseMatrix gram(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a);
double inf_norm(const DenseMatrix& a);

// ---- solves ------------------------------------------------------------------

/// Solves A y = b by LU with partial pivoting.
///
/// Throws SingularMatrixError when a pivot satisfies |p| < n * eps * ||A||_inf.
Vector solve_linear(const DenseMatrix& a, std::span<const double> b);

/// Minimizes ||A y - b||_2 for a full-column-rank A (rows >= cols) using
/// Householder QR. Rank deficiency is reported as SingularMatrixError.
Vector solve_least_squares(const DenseMatrix& a, std::span<const double> b);

/// Minimum-norm least-squares solution through the SVD, discarding singular
/// values below rel_tol * sigma_max. Never throws for rank deficiency.
Vector solve_truncated_least_squares(const DenseMatrix& a, std::span<const double> b,
                                     double rel_tol);

// ---- SVD ---------------------------------------------------------------------

struct SvdResult {
    DenseMatrix u;   // rows x k
    Vector sigma;    // k, descending
    DenseMatrix v;   // cols x k
};

/// Thin SVD by one-sided Jacobi orthogonalization, k = min(rows, cols).
SvdResult svd(const DenseMatrix& a);

/// Singular values in descending order.
Vector singular_values(const DenseMatrix& a);

// ---- finite differences ------------------------------------------------------

enum class DiffScheme { forward, backward, central };

std::string_view to_string(DiffScheme s) noexcept;
DiffScheme parse_diff_scheme(std::string_view name);

/// Finite-difference rule. The step for coordinate j is
/// rel_step * max(|x_j|, 1).
struct JacobianScheme {
    DiffScheme kind = DiffScheme::central;
    double rel_step = default_step(DiffScheme::central);

    static double default_step(DiffScheme kind) noexcept;
    static JacobianScheme of(DiffScheme kind) { return {kind, default_step(kind)}; }
    static JacobianScheme forward() { return of(DiffScheme::forward); }
    static JacobianScheme backward() { return of(DiffScheme::backward); }
    static JacobianScheme central() { return of(DiffScheme::central); }

    /// Throws InputError unless rel_step is finite and positive.
    void validate() const;
};

/// Finite-difference Jacobian of f at x. Pass fx = f(x) to save an evaluation
/// for the one-sided schemes; it is ignored for central differences.
///
/// A non-finite component at a perturbed point throws EvaluationError naming
/// the column.
DenseMatrix fd_jacobian(const VectorFunction& f, const Vector& x, const JacobianScheme& scheme,
                        const Vector* fx = nullptr);

Vector fd_gradient(const ScalarFunction& g, const Vector& x, const JacobianScheme& scheme,
                   const double* gx = nullptr);

/// Number of function evaluations fd_jacobian / fd_gradient spend for an
/// n-vector (excluding the base point).
std::size_t fd_evaluations(DiffScheme kind, std::size_t n) noexcept;

}  // namespace nleq
