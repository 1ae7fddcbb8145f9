#pragma once

// Test-side reference arithmetic, deliberately independent of the field
// implementation under test: everything here reduces by conditional
// subtraction over plain limb add/sub, never through the fast-reduction
// path.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wban/u256.hpp"

namespace oracle {

inline wban::U256 addmod(const wban::U256& a, const wban::U256& b, const wban::U256& m) {
    auto [r, carry] = wban::add_with_carry(a, b);
    if (carry || r >= m) r = wban::sub_with_borrow(r, m).first;
    return r;
}

/// Double-and-add multiplication mod m; inputs must already be < m.
inline wban::U256 mulmod(const wban::U256& a, const wban::U256& b, const wban::U256& m) {
    wban::U256 r{};
    for (int i = b.top_bit(); i >= 0; --i) {
        r = addmod(r, r, m);
        if (b.bit(static_cast<unsigned>(i))) r = addmod(r, a, m);
    }
    return r;
}

inline wban::U256 powmod(const wban::U256& base, const wban::U256& exp, const wban::U256& m) {
    wban::U256 r{1};
    for (int i = exp.top_bit(); i >= 0; --i) {
        r = mulmod(r, r, m);
        if (exp.bit(static_cast<unsigned>(i))) r = mulmod(r, base, m);
    }
    return r;
}

/// Euler criterion: true when x is a nonzero quadratic residue mod p.
inline bool is_quadratic_residue(const wban::U256& x, const wban::U256& p) {
    auto exp = wban::shift_right_small(wban::sub_with_borrow(p, wban::U256{1}).first, 1);
    return powmod(x, exp, p) == wban::U256{1};
}

/// Whitespace-separated hex columns, '#' comments, one record per line.
inline std::vector<std::vector<std::string>> load_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vector file " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<std::string> cols;
        std::string col;
        while (ls >> col) cols.push_back(col);
        if (!cols.empty()) rows.push_back(cols);
    }
    return rows;
}

}  // namespace oracle
