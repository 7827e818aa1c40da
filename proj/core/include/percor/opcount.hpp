// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>

namespace percor::num {

struct OpCounter {
    std::uint64_t divs = 0;
    std::uint64_t muls = 0;
    std::uint64_t adds = 0;
    std::uint64_t cmps = 0;

    OpCounter& operator+=(const OpCounter& o) {
        divs += o.divs;
        muls += o.muls;
        adds += o.adds;
        cmps += o.cmps;
        return *this;
    }
    std::uint64_t total() const { return divs + muls + adds + cmps; }
};

namespace detail {
// Counter of the innermost live counted_scope on this thread, null outside.
extern thread_local OpCounter* active;

#if PERCOR_COUNT_OPS
inline void bump_div() {
    if (active) ++active->divs;
}
inline void bump_mul() {
    if (active) ++active->muls;
}
inline void bump_add() {
    if (active) ++active->adds;
}
inline void bump_cmp() {
    if (active) ++active->cmps;
}
#else
inline void bump_div() {}
inline void bump_mul() {}
inline void bump_add() {}
inline void bump_cmp() {}
#endif
}  // namespace detail

// Drop-in scalar that tallies counted arithmetic into the active scope.
// It performs exactly the same double operations in the same order as the
// plain path, so instrumented results are bit-identical to uninstrumented
// ones; only the side tallies differ.
struct Real {
    double v = 0.0;

    Real() = default;
    Real(double x) : v(x) {}

    friend Real operator+(Real a, Real b) {
        detail::bump_add();
        return {a.v + b.v};
    }
    friend Real operator-(Real a, Real b) {
        detail::bump_add();
        return {a.v - b.v};
    }
    friend Real operator*(Real a, Real b) {
        detail::bump_mul();
        return {a.v * b.v};
    }
    friend Real operator/(Real a, Real b) {
        detail::bump_div();
        return {a.v / b.v};
    }
    Real operator-() const { return {-v}; }

    Real& operator+=(Real o) { return *this = *this + o; }
    Real& operator-=(Real o) { return *this = *this - o; }
    Real& operator*=(Real o) { return *this = *this * o; }
    Real& operator/=(Real o) { return *this = *this / o; }

    friend bool operator<(Real a, Real b) {
        detail::bump_cmp();
        return a.v < b.v;
    }
    friend bool operator<=(Real a, Real b) {
        detail::bump_cmp();
        return a.v <= b.v;
    }
    friend bool operator>(Real a, Real b) {
        detail::bump_cmp();
        return a.v > b.v;
    }
    friend bool operator>=(Real a, Real b) {
        detail::bump_cmp();
        return a.v >= b.v;
    }
};

// Raw value access uniform over double and Real, for kernels templated on
// the scalar type.
inline double raw(double x) { return x; }
inline double raw(Real x) { return x.v; }

// Round half up, floor(x + 1/2). Quantizer step, outside the counted budget;
// the adds that consume its result are counted by the caller.
inline double round_half_up(double x) { return std::floor(x + 0.5); }
inline Real round_half_up(Real x) { return {std::floor(x.v + 0.5)}; }

// Upward quantizer, same budget rules as round_half_up.
inline double ceil_quantize(double x) { return std::ceil(x); }
inline Real ceil_quantize(Real x) { return {std::ceil(x.v)}; }

// Runs body with a fresh counter and returns its tallies. Scopes nest: a
// scope's total is folded into its parent when it closes.
template <class F>
OpCounter counted_scope([[maybe_unused]] std::string_view label, F&& body) {
    OpCounter local;
    OpCounter* parent = detail::active;
    detail::active = &local;
    try {
        std::forward<F>(body)();
    } catch (...) {
        detail::active = parent;
        throw;
    }
    detail::active = parent;
    if (parent) *parent += local;
    return local;
}

}  // namespace percor::num
