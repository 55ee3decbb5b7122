#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graybox/state_space.hpp"

namespace graybox {

template <typename Scalar>
struct Fixture {
    std::string name;
    ParametrizedStructure<Scalar> structure;
    std::optional<VecX<Scalar>> theta_true;  // nominal for the unidentifiable case
};

namespace detail {

template <typename Scalar>
ParametrizedStructure<Scalar> empty_structure(Index n, Index m, Index p, Index q) {
    ParametrizedStructure<Scalar> s;
    s.n = n; s.m = m; s.p = p; s.q = q;
    s.A_coeffs.assign(static_cast<std::size_t>(q) + 1, MatX<Scalar>::Zero(n, n));
    s.B_coeffs.assign(static_cast<std::size_t>(q) + 1, MatX<Scalar>::Zero(n, m));
    s.C_coeffs.assign(static_cast<std::size_t>(q) + 1, MatX<Scalar>::Zero(p, n));
    return s;
}

}  // namespace detail

/// Compartmental network, the identifiable variant: output at the third
/// compartment.
///   A(th) = [-th1   th3    0 ;
///             th1  -th2-th3 th4;
///             0     th2   -th4],  B = [0;0;1],  C = [0 0 1].
template <typename Scalar>
Fixture<Scalar> example1() {
    auto s = detail::empty_structure<Scalar>(3, 1, 1, 4);
    s.A_coeffs[1](0, 0) = Scalar(-1); s.A_coeffs[1](1, 0) = Scalar(1);
    s.A_coeffs[2](1, 1) = Scalar(-1); s.A_coeffs[2](2, 1) = Scalar(1);
    s.A_coeffs[3](0, 1) = Scalar(1);  s.A_coeffs[3](1, 1) = Scalar(-1);
    s.A_coeffs[4](1, 2) = Scalar(1);  s.A_coeffs[4](2, 2) = Scalar(-1);
    s.B_coeffs[0](2, 0) = Scalar(1);
    s.C_coeffs[0](0, 2) = Scalar(1);
    VecX<Scalar> th(4);
    th << Scalar(-0.394), Scalar(-0.893), Scalar(0.325), Scalar(0.383);
    return {"example1", std::move(s), th};
}

/// Printer belt drive: first two rows of A fixed, third row and the input
/// gain parametrized.
///   A(th) = [0 -1 0.15; 0.2 0 0; th1 th2 th3],  B = [0;0;th4],  C = [0 1 0].
template <typename Scalar>
Fixture<Scalar> example2() {
    auto s = detail::empty_structure<Scalar>(3, 1, 1, 4);
    s.A_coeffs[0](0, 1) = Scalar(-1);
    s.A_coeffs[0](0, 2) = Scalar(0.15);
    s.A_coeffs[0](1, 0) = Scalar(0.2);
    s.A_coeffs[1](2, 0) = Scalar(1);
    s.A_coeffs[2](2, 1) = Scalar(1);
    s.A_coeffs[3](2, 2) = Scalar(1);
    s.B_coeffs[4](2, 0) = Scalar(1);
    s.C_coeffs[0](0, 1) = Scalar(1);
    VecX<Scalar> th(4);
    th << Scalar(-0.537), Scalar(0.567), Scalar(-0.363), Scalar(0.156);
    return {"example2", std::move(s), th};
}

/// Compartmental network variant that is NOT identifiable: observation moved
/// to the first compartment and the (3,2) coupling tied to th3.
///   A(th) = [-th1   th3      0 ;
///             th1  -(th2+th3) th4;
///             0     th3     -th4],  B = [0;0;1],  C = [1 0 0].
/// No true parameter vector is associated with it in the literature; the
/// example1 values are attached as a nominal point for simulation.
template <typename Scalar>
Fixture<Scalar> unidentifiable_example() {
    auto s = detail::empty_structure<Scalar>(3, 1, 1, 4);
    s.A_coeffs[1](0, 0) = Scalar(-1); s.A_coeffs[1](1, 0) = Scalar(1);
    s.A_coeffs[2](1, 1) = Scalar(-1);
    s.A_coeffs[3](0, 1) = Scalar(1);  s.A_coeffs[3](1, 1) = Scalar(-1); s.A_coeffs[3](2, 1) = Scalar(1);
    s.A_coeffs[4](1, 2) = Scalar(1);  s.A_coeffs[4](2, 2) = Scalar(-1);
    s.B_coeffs[0](2, 0) = Scalar(1);
    s.C_coeffs[0](0, 0) = Scalar(1);
    VecX<Scalar> th(4);
    th << Scalar(-0.394), Scalar(-0.893), Scalar(0.325), Scalar(0.383);
    return {"unidentifiable", std::move(s), th};
}

template <typename Scalar>
std::vector<Fixture<Scalar>> fixtures() {
    return {example1<Scalar>(), example2<Scalar>(), unidentifiable_example<Scalar>()};
}

template <typename Scalar>
Fixture<Scalar> fixture(const std::string& name) {
    for (auto& f : fixtures<Scalar>())
        if (f.name == name)
            return f;
    throw ConfigError("unknown fixture: " + name);
}

}  // namespace graybox
