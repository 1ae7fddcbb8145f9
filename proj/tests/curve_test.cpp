#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "test_oracles.hpp"
#include "wban/curve.hpp"
#include "wban/password.hpp"
#include "wban/rng.hpp"

using namespace wban;

namespace {

const std::string kDataDir = WBAN_DATA_DIR;

/// Brute-force k-fold addition through the affine formulas, the
/// independent route against the Jacobian ladder.
CurvePoint repeated_add(unsigned k, const CurvePoint& p) {
    CurvePoint acc = CurvePoint::infinity();
    for (unsigned i = 0; i < k; ++i) acc = point_add(acc, p);
    return acc;
}

}  // namespace

TEST_CASE("P-256 domain parameters are sound") {
    using namespace fp256;
    // 4a^3 + 27b^2 != 0
    U256 a3 = mul(mul(p256::kA, p256::kA), p256::kA);
    U256 disc = add(mul(U256{4}, a3), mul(U256{27}, sqr(p256::kB)));
    CHECK_FALSE(disc.is_zero());

    CHECK(on_curve(p256::kGx, p256::kGy));
    CHECK(scalar_mul(p256::kOrder, base_point()).is_infinity());
    CHECK(p256::kCofactor == 1);
}

TEST_CASE("scalar multiplication matches published multiples of G") {
    auto rows = oracle::load_vector_file(kDataDir + "/p256_scalar_mult_vectors.txt");
    REQUIRE(rows.size() >= 10);
    for (const auto& row : rows) {
        REQUIRE(row.size() == 3);
        U256 k = U256::from_hex(row[0]);
        CurvePoint expected = CurvePoint::from_affine(U256::from_hex(row[1]), U256::from_hex(row[2]));
        CHECK(scalar_mul(k, base_point()) == expected);
    }
}

TEST_CASE("group identity and inverses") {
    CurvePoint g = base_point();
    CHECK(point_add(g, CurvePoint::infinity()) == g);
    CHECK(point_add(CurvePoint::infinity(), g) == g);
    CHECK(point_add(g, point_negate(g)).is_infinity());
    CHECK(point_negate(CurvePoint::infinity()).is_infinity());
    CHECK(point_negate(g).y() == fp256::negate(g.y()));
    CHECK(point_add(g, g) == scalar_mul(U256{2}, g));
}

TEST_CASE("scalar ladder agrees with the repeated-addition oracle") {
    CurvePoint g = base_point();
    for (unsigned k = 1; k <= 20; ++k)
        CHECK(scalar_mul(U256{k}, g) == repeated_add(k, g));
    CHECK(scalar_mul(U256{0}, g).is_infinity());
}

TEST_CASE("group laws on small multiples") {
    CurvePoint g = base_point();
    CtrRandomSource rng(0x6c617773);
    for (int trial = 0; trial < 12; ++trial) {
        std::uint8_t raw[3];
        rng.fill(raw);
        unsigned a = raw[0] % 20 + 1, b = raw[1] % 20 + 1, c = raw[2] % 20 + 1;
        CurvePoint pa = repeated_add(a, g), pb = repeated_add(b, g), pc = repeated_add(c, g);
        CHECK(point_add(pa, pb) == point_add(pb, pa));
        CHECK(point_add(point_add(pa, pb), pc) == point_add(pa, point_add(pb, pc)));
        CHECK(point_add(pa, pb) == repeated_add(a + b, g));
    }
}

TEST_CASE("public-key validation distinguishes every rejection") {
    CurvePoint g = base_point();
    CHECK(validate_public_key(UncheckedPoint::infinity()) == KeyValidity::invalid_infinity);
    CHECK(validate_public_key(UncheckedPoint::from_point(g)) == KeyValidity::valid);
    CHECK(validate_public_key(UncheckedPoint::from_point(g), ValidationMode::full) ==
          KeyValidity::valid);

    // Perturb the Y-coordinate: the curve equation must fail, checked here
    // by direct evaluation with the oracle arithmetic.
    U256 bad_y = fp256::add(g.y(), U256{1});
    U256 lhs = oracle::mulmod(bad_y, bad_y, fp256::kP);
    U256 x3 = oracle::mulmod(oracle::mulmod(g.x(), g.x(), fp256::kP), g.x(), fp256::kP);
    U256 rhs = oracle::addmod(oracle::addmod(x3, oracle::mulmod(p256::kA, g.x(), fp256::kP), fp256::kP),
                              p256::kB, fp256::kP);
    REQUIRE(lhs != rhs);
    CHECK(validate_public_key(UncheckedPoint::from_coords(g.x(), bad_y)) ==
          KeyValidity::invalid_off_curve);

    CHECK(validate_public_key(UncheckedPoint::from_coords(fp256::kP, g.y())) ==
          KeyValidity::invalid_out_of_range);
    CHECK(validate_public_key(UncheckedPoint::from_coords(g.x(), fp256::kP)) ==
          KeyValidity::invalid_out_of_range);
    CHECK(std::string(key_validity_name(KeyValidity::invalid_off_curve)) == "invalid(off_curve)");
    CHECK(std::string(key_validity_name(KeyValidity::invalid_wrong_order)) ==
          "invalid(wrong_order)");
}

TEST_CASE("checked point construction rejects junk") {
    CHECK_THROWS_AS(CurvePoint::from_affine(U256{1}, U256{1}), Error);
    CurvePoint g = base_point();
    CHECK(CurvePoint::from_affine(g.x(), g.y()) == g);
}

TEST_CASE("keypair generation is reproducible and valid") {
    CtrRandomSource rng_a(42), rng_b(42), rng_c(43);
    KeyPair k1 = generate_keypair(rng_a);
    KeyPair k2 = generate_keypair(rng_b);
    KeyPair k3 = generate_keypair(rng_c);
    CHECK(k1.sk == k2.sk);
    CHECK(k1.pk == k2.pk);
    CHECK(k1.sk != k3.sk);
    CHECK(validate_public_key(UncheckedPoint::from_point(k1.pk)) == KeyValidity::valid);
    CHECK(scalar_mul(k1.sk, base_point()) == k1.pk);
    CHECK(!k1.sk.is_zero());
    CHECK(k1.sk < p256::kOrder);
}

TEST_CASE("distinct seeds give distinct secrets") {
    std::set<std::string> seen;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        CtrRandomSource rng(seed);
        seen.insert(random_scalar(rng).to_hex());
    }
    CHECK(seen.size() == 1000);
}

TEST_CASE("validation holds along the scalar ladder") {
    CtrRandomSource rng(7);
    for (int i = 0; i < 16; ++i) {
        U256 k = random_scalar(rng);
        CurvePoint p = scalar_mul(k, base_point());
        CHECK(validate_public_key(UncheckedPoint::from_point(p)) == KeyValidity::valid);
    }
}

TEST_CASE("scalar multiplication is a homomorphism on full-width scalars") {
    CtrRandomSource rng(0x4f6d);
    CurvePoint g = base_point();
    for (int i = 0; i < 8; ++i) {
        U256 a = random_scalar(rng);
        U256 b = random_scalar(rng);
        U256 sum = oracle::addmod(a, b, p256::kOrder);
        CHECK(point_add(scalar_mul(a, g), scalar_mul(b, g)) == scalar_mul(sum, g));
        // And against the product route.
        U256 prod = oracle::mulmod(a, b, p256::kOrder);
        CHECK(scalar_mul(a, scalar_mul(b, g)) == scalar_mul(prod, g));
    }
}

TEST_CASE("password-to-point packing and recovery") {
    CtrRandomSource rng(0x5057);
    for (int i = 0; i < 24; ++i) {
        Bytes16 raw = rng.nonce128();
        U256 pw = U256::from_os2ip(Bytes(raw.begin(), raw.begin() + 6));
        if (pw.is_zero()) continue;
        CurvePoint q = map_password_to_point(pw);

        CHECK(on_curve(q.x(), q.y()));
        CHECK_FALSE(q.y().is_odd());
        CHECK(password_integer_from_x(q.x()) == pw);

        // The chosen M_X must be the smallest offset that lands on the
        // curve: every smaller offset must be a non-residue.
        U256 base = shift_left_small(pw, 32);
        U256 m_x = sub_with_borrow(q.x(), base).first;
        REQUIRE(m_x < U256{0x100000000ULL});
        for (U256 probe = base; probe < q.x(); probe = add_with_carry(probe, U256{1}).first) {
            U256 rhs = oracle::addmod(
                oracle::addmod(
                    oracle::mulmod(oracle::mulmod(probe, probe, fp256::kP), probe, fp256::kP),
                    oracle::mulmod(p256::kA, probe, fp256::kP), fp256::kP),
                p256::kB, fp256::kP);
            CHECK_FALSE(oracle::is_quadratic_residue(rhs, fp256::kP));
        }

        // When the packed X is itself a residue, M_X must be zero.
        U256 rhs0 = oracle::addmod(
            oracle::addmod(oracle::mulmod(oracle::mulmod(base, base, fp256::kP), base, fp256::kP),
                           oracle::mulmod(p256::kA, base, fp256::kP), fp256::kP),
            p256::kB, fp256::kP);
        if (oracle::is_quadratic_residue(rhs0, fp256::kP)) CHECK(q.x() == base);
    }
}

TEST_CASE("password-to-point domain errors") {
    CHECK_THROWS_AS(map_password_to_point(U256{0}), Error);
    try {
        map_password_to_point(U256{0});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::out_of_range);
    }
    // 2^32 * PW would leave no room below p.
    U256 huge = shift_right_small(fp256::kP, 32);
    CHECK_THROWS_AS(map_password_to_point(huge), Error);
    CHECK_NOTHROW(map_password_to_point(sub_with_borrow(huge, U256{1}).first));
}

TEST_CASE("keypair generation can avoid a forbidden X") {
    CtrRandomSource rng(11);
    CurvePoint q = map_password_to_point(U256{0x68756e74ULL});
    KeyPair kp = generate_keypair_excluding_x(rng, q.x());
    CHECK(kp.pk.x() != q.x());
}

TEST_CASE("floor-division recovery is the identity across the whole dictionary") {
    auto rows = oracle::load_vector_file(kDataDir + "/dictionary_10k.txt");
    REQUIRE(rows.size() == 10000);
    for (const auto& row : rows) {
        U256 pw = U256::from_os2ip(password_to_integer(row[0]));
        CurvePoint q = map_password_to_point(pw);
        REQUIRE(password_integer_from_x(q.x()) == pw);
        REQUIRE_FALSE(q.y().is_odd());
    }
}

TEST_CASE("point hex serialization") {
    CurvePoint g = base_point();
    CHECK(format_point(CurvePoint::infinity()) == "O");
    CHECK(parse_point("O").is_infinity());
    std::string text = format_point(g);
    CHECK(text.size() == 129);
    CHECK(text.substr(0, 64) == g.x().to_hex());
    CHECK(parse_point(text) == g);
    CHECK_THROWS_AS(parse_point("garbage"), Error);
    // Parsing is checked: off-curve coordinates are refused.
    std::string off = g.x().to_hex() + ":" + fp256::add(g.y(), U256{1}).to_hex();
    CHECK_THROWS_AS(parse_point(off), Error);
}
