#pragma once

// Binary checkpoint container. All integers are little-endian int32, all
// reals little-endian float64 (host is required to be little-endian).
//
// layout (bytes):
//   magic   "CVSCHK01"                     8
//   kind    int32: 0 state, 1 volume field, 2 front field
//   kind 0: n1 n2 n3 (int32), time (f64),
//           f, f_t coefficients (n1*n2 complex = 2 f64 each, row-major),
//           then vp(3) vm(3) Bp(3) Bm(3) Qp(1) Qm(1) as raw level-major
//           component blocks of n1*n2*n3 f64.
//   kind 1: n1 n2 n3 side(0 plus / 1 minus) ncomp (int32), data blocks.
//   kind 2: n1 n2 (int32), complex coefficients.

#include <bit>
#include <cstdint>
#include <fstream>

#include "cvs/evolution/evolution.hpp"

namespace cvs {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format requires a little-endian host");

namespace ioutil {

constexpr char kMagic[9] = "CVSCHK01";

inline void put_i32(std::ostream& o, int32_t v) { o.write(reinterpret_cast<const char*>(&v), 4); }
inline void put_f64(std::ostream& o, double v) { o.write(reinterpret_cast<const char*>(&v), 8); }
inline int32_t get_i32(std::istream& i) {
    int32_t v;
    i.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
inline double get_f64(std::istream& i) {
    double v;
    i.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

inline void put_front(std::ostream& o, const FrontField& f) {
    for (const auto& c : f.coef()) {
        put_f64(o, c.real());
        put_f64(o, c.imag());
    }
}
inline FrontField get_front(std::istream& in, const TorusGrid& g) {
    std::vector<cplx> c(g.size());
    for (auto& v : c) {
        double re = get_f64(in), im = get_f64(in);
        v = {re, im};
    }
    return FrontField(g, std::move(c));
}

inline void put_volume(std::ostream& o, const VolumeField& u) {
    for (int c = 0; c < u.ncomp(); ++c)
        o.write(reinterpret_cast<const char*>(u.data(c).data()),
                static_cast<std::streamsize>(u.data(c).size() * 8));
}
inline void get_volume(std::istream& in, VolumeField& u) {
    for (int c = 0; c < u.ncomp(); ++c)
        in.read(reinterpret_cast<char*>(u.data(c).data()),
                static_cast<std::streamsize>(u.data(c).size() * 8));
}

inline void check_magic_kind(std::istream& in, int32_t want_kind, const std::string& path) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != std::string(kMagic, 8))
        throw std::runtime_error("checkpoint: bad magic in " + path);
    const int32_t kind = get_i32(in);
    if (kind != want_kind)
        throw std::runtime_error("checkpoint: wrong record kind in " + path);
}

} // namespace ioutil

inline void write_state(const std::string& path, const PlasmaState& s) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw std::runtime_error("checkpoint: cannot open " + path);
    o.write(ioutil::kMagic, 8);
    ioutil::put_i32(o, 0);
    const auto& t = s.f.grid();
    ioutil::put_i32(o, t.n1);
    ioutil::put_i32(o, t.n2);
    ioutil::put_i32(o, s.vp.grid().n3());
    ioutil::put_f64(o, s.time);
    ioutil::put_front(o, s.f);
    ioutil::put_front(o, s.f_t);
    for (const VolumeField* u : {&s.vp, &s.vm, &s.Bp, &s.Bm, &s.Qp, &s.Qm}) ioutil::put_volume(o, *u);
    if (!o) throw std::runtime_error("checkpoint: short write to " + path);
}

inline PlasmaState read_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    ioutil::check_magic_kind(in, 0, path);
    const int n1 = ioutil::get_i32(in), n2 = ioutil::get_i32(in), n3 = ioutil::get_i32(in);
    TorusGrid t(n1, n2);
    SlabGrid plus(t, n3, Side::plus), minus(t, n3, Side::minus);
    PlasmaState s = PlasmaState::zero(plus, minus);
    s.time = ioutil::get_f64(in);
    s.f = ioutil::get_front(in, t);
    s.f_t = ioutil::get_front(in, t);
    for (VolumeField* u : {&s.vp, &s.vm, &s.Bp, &s.Bm, &s.Qp, &s.Qm}) ioutil::get_volume(in, *u);
    if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
    return s;
}

inline void write_field(const std::string& path, const VolumeField& u) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw std::runtime_error("checkpoint: cannot open " + path);
    o.write(ioutil::kMagic, 8);
    ioutil::put_i32(o, 1);
    ioutil::put_i32(o, u.grid().torus().n1);
    ioutil::put_i32(o, u.grid().torus().n2);
    ioutil::put_i32(o, u.grid().n3());
    ioutil::put_i32(o, u.grid().side() == Side::plus ? 0 : 1);
    ioutil::put_i32(o, u.ncomp());
    ioutil::put_volume(o, u);
}

inline VolumeField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    ioutil::check_magic_kind(in, 1, path);
    const int n1 = ioutil::get_i32(in), n2 = ioutil::get_i32(in), n3 = ioutil::get_i32(in);
    const Side side = ioutil::get_i32(in) == 0 ? Side::plus : Side::minus;
    const int ncomp = ioutil::get_i32(in);
    SlabGrid g(TorusGrid(n1, n2), n3, side);
    VolumeField u(g, ncomp);
    ioutil::get_volume(in, u);
    if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
    return u;
}

inline void write_front(const std::string& path, const FrontField& f) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw std::runtime_error("checkpoint: cannot open " + path);
    o.write(ioutil::kMagic, 8);
    ioutil::put_i32(o, 2);
    ioutil::put_i32(o, f.grid().n1);
    ioutil::put_i32(o, f.grid().n2);
    ioutil::put_front(o, f);
}

inline FrontField read_front(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    ioutil::check_magic_kind(in, 2, path);
    const int n1 = ioutil::get_i32(in), n2 = ioutil::get_i32(in);
    FrontField f = ioutil::get_front(in, TorusGrid(n1, n2));
    if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
    return f;
}

} // namespace cvs
