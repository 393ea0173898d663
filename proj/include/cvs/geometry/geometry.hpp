#pragma once

// Change-of-variables data for the interface-flattening map
// Psi(x) = (x', x3 + psi): inverse Jacobian A, determinant J = 1 + d3 psi,
// cofactor transpose a = J A, interface normal N = (-d1 psi, -d2 psi, 1),
// and the transport fields with vanishing normal component on all
// boundaries. Only row 3 of A is non-trivial; the bundle stores just that
// row. All derivatives of psi entering A use the grid operators (spectral
// in x', collocation in x3), which makes Piola's identity d_k a_ki = 0
// hold to rounding: each residual column is a commutator of the two exact
// linear operators.

#include "cvs/lifting/lift.hpp"

namespace cvs {

struct SideGeometry {
    SlabGrid grid;
    VolumeField psi, psi_t;          // scalars; psi_t = lifted dt f
    VolumeField d1psi, d2psi, d3psi; // grid-operator gradient of psi
    VolumeField J;                   // 1 + d3psi
    VolumeField A31, A32, A33;       // row 3 of A: (-d1psi/J, -d2psi/J, 1/J)
    VolumeField A31_t, A32_t, A33_t; // time derivative of that row
};

struct GeometryBundle {
    FrontField f;
    SideGeometry plus, minus;

    const SideGeometry& side(Side s) const { return s == Side::plus ? plus : minus; }
};

namespace detail {

inline SideGeometry build_side(const VolumeField& psi, const VolumeField& psi_t) {
    SideGeometry g;
    g.grid = psi.grid();
    g.psi = psi;
    g.psi_t = psi_t;
    g.d1psi = psi.tangential_derivative(1, 0);
    g.d2psi = psi.tangential_derivative(0, 1);
    g.d3psi = psi.d3();
    const size_t n = g.d3psi.data(0).size();
    g.J = VolumeField::scalar(g.grid);
    g.A31 = VolumeField::scalar(g.grid);
    g.A32 = VolumeField::scalar(g.grid);
    g.A33 = VolumeField::scalar(g.grid);
    for (size_t i = 0; i < n; ++i) {
        const double J = 1.0 + g.d3psi.data(0)[i];
        g.J.data(0)[i] = J;
        g.A31.data(0)[i] = -g.d1psi.data(0)[i] / J;
        g.A32.data(0)[i] = -g.d2psi.data(0)[i] / J;
        g.A33.data(0)[i] = 1.0 / J;
    }
    VolumeField d1t = psi_t.tangential_derivative(1, 0);
    VolumeField d2t = psi_t.tangential_derivative(0, 1);
    VolumeField d3t = psi_t.d3();
    g.A31_t = VolumeField::scalar(g.grid);
    g.A32_t = VolumeField::scalar(g.grid);
    g.A33_t = VolumeField::scalar(g.grid);
    for (size_t i = 0; i < n; ++i) {
        const double J = g.J.data(0)[i], Jt = d3t.data(0)[i];
        g.A31_t.data(0)[i] = -d1t.data(0)[i] / J + g.d1psi.data(0)[i] * Jt / (J * J);
        g.A32_t.data(0)[i] = -d2t.data(0)[i] / J + g.d2psi.data(0)[i] * Jt / (J * J);
        g.A33_t.data(0)[i] = -Jt / (J * J);
    }
    return g;
}

} // namespace detail

// psi_t comes from lifting dt f; during static checks pass a zero lift.
inline GeometryBundle build_geometry(const LiftedFront& psi, const LiftedFront& psi_t) {
    auto dc = check_diffeomorphism(psi);
    if (!dc.ok) throw std::runtime_error("build_geometry: |grad psi| >= 1/2, map is not a diffeomorphism");
    GeometryBundle g;
    g.f = psi.source;
    g.plus = detail::build_side(psi.psi_plus, psi_t.psi_plus);
    g.minus = detail::build_side(psi.psi_minus, psi_t.psi_minus);
    return g;
}

inline GeometryBundle build_geometry(const LiftedFront& psi) {
    LiftedFront zero;
    zero.source = FrontField(psi.source.grid());
    zero.psi_plus = VolumeField::scalar(psi.psi_plus.grid());
    zero.psi_minus = VolumeField::scalar(psi.psi_minus.grid());
    zero.d3psi_plus = zero.psi_plus;
    zero.d3psi_minus = zero.psi_minus;
    return build_geometry(psi, zero);
}

// Plain grid derivative d_j of a scalar, j in {0,1,2} for (x1, x2, x3).
inline VolumeField dpart(const VolumeField& u, int j) {
    switch (j) {
        case 0: return u.tangential_derivative(1, 0);
        case 1: return u.tangential_derivative(0, 1);
        case 2: return u.d3();
    }
    throw std::invalid_argument("dpart: direction out of range");
}

// i-th component of A^T grad applied to a scalar:
//   (A^T grad u)_1 = d1 u + A31 d3 u, _2 = d2 u + A32 d3 u, _3 = A33 d3 u.
inline VolumeField da(const SideGeometry& g, int i, const VolumeField& u) {
    VolumeField d3u = u.d3();
    switch (i) {
        case 0: return u.tangential_derivative(1, 0) + multiply(g.A31, d3u);
        case 1: return u.tangential_derivative(0, 1) + multiply(g.A32, d3u);
        case 2: return multiply(g.A33, d3u);
    }
    throw std::invalid_argument("da: direction out of range");
}

inline VolumeField grad_transformed(const SideGeometry& g, const VolumeField& q) {
    VolumeField d3q = q.d3();
    VolumeField out = VolumeField::vector(g.grid);
    out.set_component(0, q.tangential_derivative(1, 0) + multiply(g.A31, d3q));
    out.set_component(1, q.tangential_derivative(0, 1) + multiply(g.A32, d3q));
    out.set_component(2, multiply(g.A33, d3q));
    return out;
}

inline VolumeField div_transformed(const SideGeometry& g, const VolumeField& u) {
    if (u.ncomp() != 3) throw std::invalid_argument("div_transformed: vector field expected");
    VolumeField d3u = u.d3();
    VolumeField out = u.component(0).tangential_derivative(1, 0);
    out += u.component(1).tangential_derivative(0, 1);
    out += multiply(g.A31, d3u.component(0));
    out += multiply(g.A32, d3u.component(1));
    out += multiply(g.A33, d3u.component(2));
    return out;
}

// div u - (grad psi . d3 u) / J, equal to (A^T grad) . u as an identity.
inline VolumeField div_residual_form(const SideGeometry& g, const VolumeField& u) {
    VolumeField d3u = u.d3();
    VolumeField out = u.component(0).tangential_derivative(1, 0);
    out += u.component(1).tangential_derivative(0, 1);
    out += d3u.component(2);
    VolumeField dot = multiply(g.d1psi, d3u.component(0));
    dot += multiply(g.d2psi, d3u.component(1));
    dot += multiply(g.d3psi, d3u.component(2));
    for (size_t i = 0; i < out.data(0).size(); ++i) out.data(0)[i] -= dot.data(0)[i] / g.J.data(0)[i];
    return out;
}

inline VolumeField curl_transformed(const SideGeometry& g, const VolumeField& u) {
    if (u.ncomp() != 3) throw std::invalid_argument("curl_transformed: vector field expected");
    VolumeField out = VolumeField::vector(g.grid);
    out.set_component(0, da(g, 1, u.component(2)) - da(g, 2, u.component(1)));
    out.set_component(1, da(g, 2, u.component(0)) - da(g, 0, u.component(2)));
    out.set_component(2, da(g, 0, u.component(1)) - da(g, 1, u.component(0)));
    return out;
}

// vt = (v1, v2, (v.N - dt psi)/J), Bt = (B1, B2, B.N/J), N = (-d1psi, -d2psi, 1).
inline VolumeField transport_velocity(const SideGeometry& g, const VolumeField& v, bool subtract_psi_t) {
    if (v.ncomp() != 3) throw std::invalid_argument("transport_velocity: vector field expected");
    VolumeField out = v;
    auto& c3 = out.data(2);
    for (size_t i = 0; i < c3.size(); ++i) {
        double vN = -g.d1psi.data(0)[i] * v.data(0)[i] - g.d2psi.data(0)[i] * v.data(1)[i] + v.data(2)[i];
        if (subtract_psi_t) vN -= g.psi_t.data(0)[i];
        c3[i] = vN / g.J.data(0)[i];
    }
    return out;
}

inline std::pair<VolumeField, VolumeField> transport_fields(const SideGeometry& g, const VolumeField& v,
                                                            const VolumeField& B) {
    return {transport_velocity(g, v, true), transport_velocity(g, B, false)};
}

// max_i || d_k a_ki ||_inf with a = J A:
//   column 1: d1 J - d3 d1 psi, column 2: d2 J - d3 d2 psi, column 3: 0.
inline double piola_residual(const SideGeometry& g) {
    VolumeField r1 = g.J.tangential_derivative(1, 0) - g.d1psi.d3();
    VolumeField r2 = g.J.tangential_derivative(0, 1) - g.d2psi.d3();
    return std::max(r1.max_abs(), r2.max_abs());
}

} // namespace cvs
