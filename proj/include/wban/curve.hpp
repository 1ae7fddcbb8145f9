#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "wban/errors.hpp"
#include "wban/fp256.hpp"
#include "wban/rng.hpp"
#include "wban/u256.hpp"

namespace wban {

namespace p256 {

// FIPS 186 Curve P-256 domain parameters. a = p - 3.
inline constexpr U256 kA{0xfffffffffffffffcULL, 0x00000000ffffffffULL,
                         0x0000000000000000ULL, 0xffffffff00000001ULL};
inline constexpr U256 kB{0x3bce3c3e27d2604bULL, 0x651d06b0cc53b0f6ULL,
                         0xb3ebbd55769886bcULL, 0x5ac635d8aa3a93e7ULL};
inline constexpr U256 kGx{0xf4a13945d898c296ULL, 0x77037d812deb33a0ULL,
                          0xf8bce6e563a440f2ULL, 0x6b17d1f2e12c4247ULL};
inline constexpr U256 kGy{0xcbb6406837bf51f5ULL, 0x2bce33576b315eceULL,
                          0x8ee7eb4a7c0f9e16ULL, 0x4fe342e2fe1a7f9bULL};
inline constexpr U256 kOrder{0xf3b9cac2fc632551ULL, 0xbce6faada7179e84ULL,
                             0xffffffffffffffffULL, 0xffffffff00000000ULL};
inline constexpr unsigned kCofactor = 1;

}  // namespace p256

/// Evaluates the curve's Weierstrass right-hand side x^3 + ax + b.
inline U256 curve_rhs(const U256& x) {
    using namespace fp256;
    return add(add(mul(sqr(x), x), mul(p256::kA, x)), p256::kB);
}

inline bool on_curve(const U256& x, const U256& y) {
    return fp256::sqr(y) == curve_rhs(x);
}

/// Affine point on P-256 or the distinguished infinity element. Non-infinity
/// values built through from_affine are guaranteed to satisfy the curve
/// equation; arithmetic results use the unchecked path.
class CurvePoint {
public:
    CurvePoint() = default;  // infinity

    static CurvePoint infinity() { return CurvePoint{}; }

    static CurvePoint from_affine(const U256& x, const U256& y) {
        if (x >= fp256::kP || y >= fp256::kP)
            throw Error(ErrorCode::invalid_point, "coordinate not in GF(p)");
        if (!on_curve(x, y))
            throw Error(ErrorCode::invalid_point, "coordinates off curve");
        return CurvePoint(x, y);
    }

    static CurvePoint from_affine_unchecked(const U256& x, const U256& y) {
        return CurvePoint(x, y);
    }

    bool is_infinity() const { return infinity_; }

    const U256& x() const {
        if (infinity_) throw std::logic_error("x() of the infinity point");
        return x_;
    }

    const U256& y() const {
        if (infinity_) throw std::logic_error("y() of the infinity point");
        return y_;
    }

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;

private:
    CurvePoint(const U256& x, const U256& y) : infinity_(false), x_(x), y_(y) {}

    bool infinity_ = true;
    U256 x_{};
    U256 y_{};
};

inline CurvePoint base_point() {
    return CurvePoint::from_affine_unchecked(p256::kGx, p256::kGy);
}

inline CurvePoint point_negate(const CurvePoint& p) {
    if (p.is_infinity()) return p;
    return CurvePoint::from_affine_unchecked(p.x(), fp256::negate(p.y()));
}

/// Group addition, total on valid points: identity, inverse pairs and
/// doubling are all handled.
inline CurvePoint point_add(const CurvePoint& p, const CurvePoint& q) {
    using namespace fp256;
    if (p.is_infinity()) return q;
    if (q.is_infinity()) return p;

    U256 lambda;
    if (p.x() == q.x()) {
        if (add(p.y(), q.y()).is_zero()) return CurvePoint::infinity();
        // Tangent slope (3x^2 + a) / 2y.
        U256 num = add(mul(U256{3}, sqr(p.x())), p256::kA);
        lambda = mul(num, inv(add(p.y(), p.y())));
    } else {
        lambda = mul(sub(q.y(), p.y()), inv(sub(q.x(), p.x())));
    }
    U256 x3 = sub(sub(sqr(lambda), p.x()), q.x());
    U256 y3 = sub(mul(lambda, sub(p.x(), x3)), p.y());
    return CurvePoint::from_affine_unchecked(x3, y3);
}

inline CurvePoint point_sub(const CurvePoint& p, const CurvePoint& q) {
    return point_add(p, point_negate(q));
}

namespace detail {

// Jacobian coordinates for the scalar-multiplication ladder:
// (X, Y, Z) represents affine (X/Z^2, Y/Z^3); Z = 0 is infinity.
struct JacobianPoint {
    U256 x{}, y{}, z{};
    bool is_infinity() const { return z.is_zero(); }
};

inline JacobianPoint jacobian_double(const JacobianPoint& p) {
    using namespace fp256;
    if (p.is_infinity() || p.y.is_zero()) return {};
    U256 xx = sqr(p.x);
    U256 yy = sqr(p.y);
    U256 yyyy = sqr(yy);
    U256 zz = sqr(p.z);
    U256 s = mul(U256{4}, mul(p.x, yy));
    U256 m = add(mul(U256{3}, xx), mul(p256::kA, sqr(zz)));
    U256 x3 = sub(sqr(m), add(s, s));
    U256 y3 = sub(mul(m, sub(s, x3)), mul(U256{8}, yyyy));
    U256 z3 = mul(add(p.y, p.y), p.z);
    return {x3, y3, z3};
}

inline JacobianPoint jacobian_add_affine(const JacobianPoint& p, const CurvePoint& q) {
    using namespace fp256;
    if (q.is_infinity()) return p;
    if (p.is_infinity()) return {q.x(), q.y(), U256{1}};
    U256 zz = sqr(p.z);
    U256 u2 = mul(q.x(), zz);
    U256 s2 = mul(q.y(), mul(p.z, zz));
    U256 h = sub(u2, p.x);
    U256 r = sub(s2, p.y);
    if (h.is_zero()) {
        if (r.is_zero()) return jacobian_double(p);
        return {};
    }
    U256 hh = sqr(h);
    U256 hhh = mul(h, hh);
    U256 v = mul(p.x, hh);
    U256 x3 = sub(sub(sqr(r), hhh), add(v, v));
    U256 y3 = sub(mul(r, sub(v, x3)), mul(p.y, hhh));
    U256 z3 = mul(p.z, h);
    return {x3, y3, z3};
}

inline CurvePoint jacobian_to_affine(const JacobianPoint& p) {
    using namespace fp256;
    if (p.is_infinity()) return CurvePoint::infinity();
    U256 zi = inv(p.z);
    U256 zi2 = sqr(zi);
    return CurvePoint::from_affine_unchecked(mul(p.x, zi2), mul(p.y, mul(zi, zi2)));
}

}  // namespace detail

/// k-fold group addition by the binary ladder; k may be any nonnegative
/// 256-bit integer (in particular the group order, giving infinity).
inline CurvePoint scalar_mul(const U256& k, const CurvePoint& p) {
    if (k.is_zero() || p.is_infinity()) return CurvePoint::infinity();
    detail::JacobianPoint acc{};
    for (int i = k.top_bit(); i >= 0; --i) {
        acc = detail::jacobian_double(acc);
        if (k.bit(static_cast<unsigned>(i))) acc = detail::jacobian_add_affine(acc, p);
    }
    return detail::jacobian_to_affine(acc);
}

// ---------------------------------------------------------------------------
// Public-key validation
// ---------------------------------------------------------------------------

/// Raw wire-format point before any checking: coordinates straight out of a
/// frame, or an explicit infinity marker.
struct UncheckedPoint {
    bool is_infinity = false;
    U256 x{};
    U256 y{};

    static UncheckedPoint infinity() { return {true, {}, {}}; }
    static UncheckedPoint from_coords(const U256& x, const U256& y) { return {false, x, y}; }
    static UncheckedPoint from_point(const CurvePoint& p) {
        return p.is_infinity() ? infinity() : from_coords(p.x(), p.y());
    }
};

enum class KeyValidity { valid, invalid_infinity, invalid_out_of_range, invalid_off_curve, invalid_wrong_order };

const char* key_validity_name(KeyValidity v);

enum class ValidationMode {
    standard,  // non-infinity, coordinates in GF(p), on curve
    full,      // additionally n * P = O (implied by the rest when h = 1)
};

inline KeyValidity validate_public_key(const UncheckedPoint& raw,
                                       ValidationMode mode = ValidationMode::standard) {
    if (raw.is_infinity) return KeyValidity::invalid_infinity;
    if (raw.x >= fp256::kP || raw.y >= fp256::kP) return KeyValidity::invalid_out_of_range;
    if (!on_curve(raw.x, raw.y)) return KeyValidity::invalid_off_curve;
    if (mode == ValidationMode::full) {
        CurvePoint p = CurvePoint::from_affine_unchecked(raw.x, raw.y);
        if (!scalar_mul(p256::kOrder, p).is_infinity()) return KeyValidity::invalid_wrong_order;
    }
    return KeyValidity::valid;
}

inline const char* key_validity_name(KeyValidity v) {
    switch (v) {
        case KeyValidity::valid: return "valid";
        case KeyValidity::invalid_infinity: return "invalid(infinity)";
        case KeyValidity::invalid_out_of_range: return "invalid(out_of_range)";
        case KeyValidity::invalid_off_curve: return "invalid(off_curve)";
        case KeyValidity::invalid_wrong_order: return "invalid(wrong_order)";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Key generation
// ---------------------------------------------------------------------------

struct KeyPair {
    U256 sk;        // in [1, n-1]
    CurvePoint pk;  // sk * G, never infinity
};

inline U256 random_scalar(RandomSource& rng) {
    for (;;) {
        U256 k = U256::from_be_bytes(rng.bytes256());
        if (!k.is_zero() && k < p256::kOrder) return k;
    }
}

inline KeyPair generate_keypair(RandomSource& rng) {
    U256 sk = random_scalar(rng);
    return {sk, scalar_mul(sk, base_point())};
}

/// Keypair whose public X-coordinate avoids a forbidden value; used by the
/// password-authenticated association so the masked key can never degenerate.
inline KeyPair generate_keypair_excluding_x(RandomSource& rng, const U256& forbidden_x,
                                            int max_attempts = 64) {
    for (int i = 0; i < max_attempts; ++i) {
        KeyPair kp = generate_keypair(rng);
        if (kp.pk.x() != forbidden_x) return kp;
    }
    throw Error(ErrorCode::keygen_exhausted, "could not avoid forbidden X-coordinate");
}

// ---------------------------------------------------------------------------
// Password-to-point mapping
// ---------------------------------------------------------------------------

/// Q(PW) = (Q_X, Q_Y) with Q_X = 2^32 * PW + M_X for the smallest M_X >= 0
/// that lands on the curve, and Q_Y the even square root.
inline CurvePoint map_password_to_point(const U256& pw) {
    if (pw.is_zero()) throw Error(ErrorCode::out_of_range, "PW must be positive");
    // Q_X must stay below p across the whole M_X window.
    if (pw >= shift_right_small(fp256::kP, 32))
        throw Error(ErrorCode::out_of_range, "2^32 * PW exceeds the field");

    U256 base = shift_left_small(pw, 32);
    for (std::uint64_t m = 0; m <= 0xffffffffULL; ++m) {
        U256 qx = add_with_carry(base, U256{m}).first;
        if (auto root = fp256::sqrt(curve_rhs(qx))) {
            U256 qy = root->is_odd() ? fp256::negate(*root) : *root;
            return CurvePoint::from_affine_unchecked(qx, qy);
        }
    }
    throw Error(ErrorCode::no_point_in_window, "no curve point with M_X < 2^32");
}

/// Inverse of the packing: PW = floor(Q_X / 2^32).
inline U256 password_integer_from_x(const U256& qx) { return shift_right_small(qx, 32); }

// ---------------------------------------------------------------------------
// Hex serialization
// ---------------------------------------------------------------------------

/// "O" for infinity, otherwise the two 64-digit big-endian coordinates
/// separated by a colon.
inline std::string format_point(const CurvePoint& p) {
    if (p.is_infinity()) return "O";
    return p.x().to_hex() + ":" + p.y().to_hex();
}

inline CurvePoint parse_point(std::string_view text) {
    if (text == "O") return CurvePoint::infinity();
    auto colon = text.find(':');
    if (colon == std::string_view::npos || text.size() != 129 || colon != 64)
        throw Error(ErrorCode::invalid_hex, "expected \"O\" or <x64>:<y64>");
    return CurvePoint::from_affine(U256::from_hex(text.substr(0, 64)),
                                   U256::from_hex(text.substr(65)));
}

}  // namespace wban
