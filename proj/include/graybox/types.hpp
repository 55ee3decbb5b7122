#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace graybox {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Raised when input data cannot support the requested computation
/// (e.g. the input is not persistently exciting).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative routine encounters non-finite values or an
/// otherwise unrecoverable numerical state.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised by rank-1 extraction when the scalar ambiguity cannot be resolved.
struct ExtractionError : NumericError {
    using NumericError::NumericError;
};

/// Raised on malformed configuration files or inconsistent run options.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// vec(M): column-major stacking, the convention used throughout.
template <typename Scalar>
VecX<Scalar> vec(const MatX<Scalar>& m) {
    return Eigen::Map<const VecX<Scalar>>(m.data(), m.size());
}

template <typename Scalar>
MatX<Scalar> unvec(const VecX<Scalar>& v, Index rows, Index cols) {
    if (v.size() != rows * cols)
        throw std::invalid_argument("unvec: size mismatch");
    return Eigen::Map<const MatX<Scalar>>(v.data(), rows, cols);
}

template <typename Scalar>
MatX<Scalar> kron(const MatX<Scalar>& a, const MatX<Scalar>& b) {
    MatX<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace graybox
