#pragma once

// Dense complex operator algebra over composite Hilbert spaces built from
// qudit factors and truncated bosonic modes.
//
// Composite basis convention: lexicographic over factor indices with the
// leftmost factor slowest.  For factors of dimensions (d0, d1, ..., dk) the
// basis index of the product state |i0, i1, ..., ik> is
//     ((i0*d1 + i1)*d2 + i2)*... ,
// so matrix entries are bit-comparable across implementations.
//
// All values are immutable after construction and all operations are pure;
// everything here is safe to share across threads.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "heff/errors.hpp"

namespace heff {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

enum class FactorKind { Qudit, Boson };

struct Factor {
    FactorKind kind;
    int dim;
};

class HilbertSpace {
public:
    explicit HilbertSpace(std::vector<Factor> factors);

    static HilbertSpace qudit(int dim) { return HilbertSpace({{FactorKind::Qudit, dim}}); }

    int dim() const { return dim_; }
    int factor_count() const { return static_cast<int>(factors_.size()); }
    const Factor& factor(int f) const;
    const std::vector<Factor>& factors() const { return factors_; }

    // Product of factor dimensions strictly left / right of factor f.
    int dim_left(int f) const;
    int dim_right(int f) const;

    bool operator==(const HilbertSpace& other) const;
    bool operator!=(const HilbertSpace& other) const { return !(*this == other); }

private:
    std::vector<Factor> factors_;
    int dim_ = 0;
};

class Operator {
public:
    Operator(HilbertSpace space, Matrix m);

    static Operator zero(const HilbertSpace& space);
    static Operator identity(const HilbertSpace& space);

    const HilbertSpace& space() const { return space_; }
    const Matrix& matrix() const { return mat_; }
    int dim() const { return static_cast<int>(mat_.rows()); }

    Operator adjoint() const { return Operator(space_, mat_.adjoint().eval()); }
    Complex trace() const { return mat_.trace(); }

    Operator operator-() const { return Operator(space_, (-mat_).eval()); }

private:
    HilbertSpace space_;
    Matrix mat_;
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex c, const Operator& a);
Operator operator*(double c, const Operator& a);

// Embeds a local matrix on one factor, identity on all others.
Operator embed(const HilbertSpace& space, int f, const Matrix& local);

// |i><j| on factor f, identity elsewhere.
Operator ketbra(const HilbertSpace& space, int f, int i, int j);

enum class LadderKind { Lower, Raise };

// Truncated bosonic ladder operator on factor f.  lower has entries sqrt(k)
// at (k-1, k); raise is its adjoint.  Note [lower, raise] = 1 only below the
// top Fock level (equals 1-N there).
Operator ladder(const HilbertSpace& space, int f, LadderKind kind);

// Number operator a^dag a on boson factor f, built exactly as diag(0..N-1).
Operator number_op(const HilbertSpace& space, int f);

enum class SpinAxis { X, Y, Z, Plus, Minus };

// Collective spin over the listed two-level factors:
//   plus  = sum of embedded |2><1|,   minus = adjoint(plus),
//   x = (plus+minus)/2,  y = i(plus-minus)/2  (so plus = x - i y),
//   z = sum of embedded (|2><2| - |1><1|)/2.
Operator collective_spin(const HilbertSpace& space, const std::vector<int>& qubit_factors,
                         SpinAxis axis);

Operator commutator(const Operator& a, const Operator& b);

// (A + A^dag)/2.
Operator hermitian_part(const Operator& a);

double frobenius_norm(const Operator& a);

// ||A - A^dag||_F <= tol * max(1, ||A||_F).
bool is_hermitian(const Operator& a, double tol);

namespace detail {
void require_same_space(const Operator& a, const Operator& b, const char* what);
}

}  // namespace heff
