#include "heff/opalg.hpp"

#include <cmath>
#include <sstream>

namespace heff {

HilbertSpace::HilbertSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) {
        throw InvariantError("HilbertSpace: factor list must not be empty");
    }
    dim_ = 1;
    for (std::size_t f = 0; f < factors_.size(); ++f) {
        if (factors_[f].dim < 2) {
            std::ostringstream msg;
            msg << "HilbertSpace: factor " << f << " has dim " << factors_[f].dim << " (must be >= 2)";
            throw InvariantError(msg.str());
        }
        dim_ *= factors_[f].dim;
    }
}

const Factor& HilbertSpace::factor(int f) const {
    if (f < 0 || f >= factor_count()) {
        std::ostringstream msg;
        msg << "HilbertSpace: factor index " << f << " out of range [0, " << factor_count() << ")";
        throw InvariantError(msg.str());
    }
    return factors_[static_cast<std::size_t>(f)];
}

int HilbertSpace::dim_left(int f) const {
    int d = 1;
    for (int k = 0; k < f; ++k) d *= factors_[static_cast<std::size_t>(k)].dim;
    return d;
}

int HilbertSpace::dim_right(int f) const {
    int d = 1;
    for (int k = f + 1; k < factor_count(); ++k) d *= factors_[static_cast<std::size_t>(k)].dim;
    return d;
}

bool HilbertSpace::operator==(const HilbertSpace& other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t f = 0; f < factors_.size(); ++f) {
        if (factors_[f].kind != other.factors_[f].kind || factors_[f].dim != other.factors_[f].dim) {
            return false;
        }
    }
    return true;
}

Operator::Operator(HilbertSpace space, Matrix m) : space_(std::move(space)), mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() != space_.dim()) {
        std::ostringstream msg;
        msg << "Operator: matrix is " << mat_.rows() << "x" << mat_.cols() << " but space dim is "
            << space_.dim();
        throw InvariantError(msg.str());
    }
}

Operator Operator::zero(const HilbertSpace& space) {
    return Operator(space, Matrix::Zero(space.dim(), space.dim()));
}

Operator Operator::identity(const HilbertSpace& space) {
    return Operator(space, Matrix::Identity(space.dim(), space.dim()));
}

namespace detail {
void require_same_space(const Operator& a, const Operator& b, const char* what) {
    if (a.space() != b.space()) {
        throw InvariantError(std::string(what) + ": operators live on different spaces");
    }
}
}  // namespace detail

Operator operator+(const Operator& a, const Operator& b) {
    detail::require_same_space(a, b, "operator+");
    return Operator(a.space(), (a.matrix() + b.matrix()).eval());
}

Operator operator-(const Operator& a, const Operator& b) {
    detail::require_same_space(a, b, "operator-");
    return Operator(a.space(), (a.matrix() - b.matrix()).eval());
}

Operator operator*(const Operator& a, const Operator& b) {
    detail::require_same_space(a, b, "operator*");
    return Operator(a.space(), (a.matrix() * b.matrix()).eval());
}

Operator operator*(Complex c, const Operator& a) {
    return Operator(a.space(), (c * a.matrix()).eval());
}

Operator operator*(double c, const Operator& a) { return Complex(c, 0.0) * a; }

Operator embed(const HilbertSpace& space, int f, const Matrix& local) {
    const int d = space.factor(f).dim;
    if (local.rows() != d || local.cols() != d) {
        std::ostringstream msg;
        msg << "embed: local matrix is " << local.rows() << "x" << local.cols() << " but factor " << f
            << " has dim " << d;
        throw InvariantError(msg.str());
    }
    const int dl = space.dim_left(f);
    const int dr = space.dim_right(f);
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int l = 0; l < dl; ++l) {
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                if (local(i, j) == Complex(0.0, 0.0)) continue;
                for (int r = 0; r < dr; ++r) {
                    m((l * d + i) * dr + r, (l * d + j) * dr + r) = local(i, j);
                }
            }
        }
    }
    return Operator(space, std::move(m));
}

Operator ketbra(const HilbertSpace& space, int f, int i, int j) {
    const Factor& fac = space.factor(f);
    if (i < 0 || i >= fac.dim || j < 0 || j >= fac.dim) {
        std::ostringstream msg;
        msg << "ketbra: level (" << i << ", " << j << ") out of range for factor " << f << " of dim "
            << fac.dim;
        throw InvariantError(msg.str());
    }
    Matrix local = Matrix::Zero(fac.dim, fac.dim);
    local(i, j) = Complex(1.0, 0.0);
    return embed(space, f, local);
}

Operator ladder(const HilbertSpace& space, int f, LadderKind kind) {
    const Factor& fac = space.factor(f);
    if (fac.kind != FactorKind::Boson) {
        std::ostringstream msg;
        msg << "ladder: factor " << f << " is not a boson factor";
        throw InvariantError(msg.str());
    }
    Matrix local = Matrix::Zero(fac.dim, fac.dim);
    for (int k = 1; k < fac.dim; ++k) {
        local(k - 1, k) = Complex(std::sqrt(static_cast<double>(k)), 0.0);
    }
    if (kind == LadderKind::Raise) local = local.adjoint().eval();
    return embed(space, f, local);
}

Operator number_op(const HilbertSpace& space, int f) {
    const Factor& fac = space.factor(f);
    if (fac.kind != FactorKind::Boson) {
        std::ostringstream msg;
        msg << "number_op: factor " << f << " is not a boson factor";
        throw InvariantError(msg.str());
    }
    Matrix local = Matrix::Zero(fac.dim, fac.dim);
    for (int k = 0; k < fac.dim; ++k) local(k, k) = Complex(static_cast<double>(k), 0.0);
    return embed(space, f, local);
}

Operator collective_spin(const HilbertSpace& space, const std::vector<int>& qubit_factors,
                         SpinAxis axis) {
    if (qubit_factors.empty()) {
        throw InvariantError("collective_spin: empty factor list");
    }
    for (int f : qubit_factors) {
        if (space.factor(f).dim != 2) {
            std::ostringstream msg;
            msg << "collective_spin: factor " << f << " is not a two-level factor";
            throw InvariantError(msg.str());
        }
    }
    if (axis == SpinAxis::Z) {
        Operator z = Operator::zero(space);
        for (int f : qubit_factors) {
            z = z + 0.5 * (ketbra(space, f, 1, 1) - ketbra(space, f, 0, 0));
        }
        return z;
    }
    Operator plus = Operator::zero(space);
    for (int f : qubit_factors) plus = plus + ketbra(space, f, 1, 0);
    switch (axis) {
        case SpinAxis::Plus:
            return plus;
        case SpinAxis::Minus:
            return plus.adjoint();
        case SpinAxis::X:
            return 0.5 * (plus + plus.adjoint());
        case SpinAxis::Y:
            // sign such that plus = x - i*y (collective raising convention)
            return Complex(0.0, 0.5) * (plus - plus.adjoint());
        default:
            break;
    }
    throw InvariantError("collective_spin: unknown axis");
}

Operator commutator(const Operator& a, const Operator& b) {
    detail::require_same_space(a, b, "commutator");
    return Operator(a.space(), (a.matrix() * b.matrix() - b.matrix() * a.matrix()).eval());
}

Operator hermitian_part(const Operator& a) {
    return Operator(a.space(), (0.5 * (a.matrix() + a.matrix().adjoint())).eval());
}

double frobenius_norm(const Operator& a) { return a.matrix().norm(); }

bool is_hermitian(const Operator& a, double tol) {
    const double defect = (a.matrix() - a.matrix().adjoint()).norm();
    return defect <= tol * std::max(1.0, a.matrix().norm());
}

}  // namespace heff
