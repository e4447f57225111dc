#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "torus_ends/farey.hpp"
#include "torus_ends/parse_error.hpp"

namespace torus_ends {

using Complex = std::complex<double>;

inline constexpr double default_tol = 1e-9;
inline constexpr double saturation_bound = 1e120;

inline bool near(Complex a, Complex b, double eps) { return std::abs(a - b) <= eps; }
inline bool is_real(Complex v, double eps) { return std::abs(v.imag()) <= eps; }
inline bool is_pure_imag(Complex v, double eps) { return std::abs(v.real()) <= eps; }

inline Complex kappa(Complex x, Complex y, Complex z) { return x * x + y * y + z * z - x * y * z - 2.0; }

// Root r of r + 1/r = t with |r| >= 1; on the unit circle the one with arg in [0, pi).
inline Complex big_root(Complex t) {
    Complex d = std::sqrt(t * t - 4.0);
    Complex r1 = (t + d) / 2.0, r2 = (t - d) / 2.0;
    double m1 = std::abs(r1), m2 = std::abs(r2);
    if (std::abs(m1 - m2) > 1e-12 * std::max(1.0, std::max(m1, m2))) return m1 > m2 ? r1 : r2;
    auto upper = [](Complex r) {
        double a = std::arg(r);
        return a >= 0 && a < std::numbers::pi;
    };
    if (upper(r1)) return r1;
    if (upper(r2)) return r2;
    return r1;
}

class Character {
public:
    Character() : Character(0, 0, 0) {}
    Character(Complex x, Complex y, Complex z) : v_{x, y, z}, kappa_(torus_ends::kappa(x, y, z)) {}

    Complex x() const { return v_[0]; }
    Complex y() const { return v_[1]; }
    Complex z() const { return v_[2]; }
    Complex operator[](std::size_t i) const { return v_[i]; }
    const std::array<Complex, 3>& values() const { return v_; }
    Complex kappa() const { return kappa_; }

    bool approx_equal(const Character& o, double eps) const {
        for (int i = 0; i < 3; ++i)
            if (!near(v_[i], o.v_[i], eps * (1 + std::abs(v_[i])))) return false;
        return true;
    }
    bool operator==(const Character& o) const { return v_ == o.v_; }

private:
    std::array<Complex, 3> v_;
    Complex kappa_;
};

inline Character act_c(const Character& ch) { return {ch.z(), ch.x(), ch.y()}; }
inline Character act_s(const Character& ch) { return {ch.y(), ch.x(), ch.x() * ch.y() - ch.z()}; }

enum class SignPair { xy, yz, zx };

inline Character sign_change(const Character& ch, SignPair p) {
    switch (p) {
        case SignPair::xy: return {-ch.x(), -ch.y(), ch.z()};
        case SignPair::yz: return {ch.x(), -ch.y(), -ch.z()};
        case SignPair::zx: return {-ch.x(), ch.y(), -ch.z()};
    }
    return ch;
}

// Generators of the action, written c, s, xy, yz, zx.
enum class Move { c, s, xy, yz, zx };

inline std::string move_name(Move m) {
    switch (m) {
        case Move::c: return "c";
        case Move::s: return "s";
        case Move::xy: return "xy";
        case Move::yz: return "yz";
        case Move::zx: return "zx";
    }
    return "?";
}

inline Character act(const Character& ch, Move m) {
    switch (m) {
        case Move::c: return act_c(ch);
        case Move::s: return act_s(ch);
        case Move::xy: return sign_change(ch, SignPair::xy);
        case Move::yz: return sign_change(ch, SignPair::yz);
        case Move::zx: return sign_change(ch, SignPair::zx);
    }
    return ch;
}

inline Character act(Character ch, const std::vector<Move>& word) {
    for (Move m : word) ch = act(ch, m);
    return ch;
}

// Whitespace or comma separated tokens; applied left to right.
inline std::vector<Move> parse_moves(std::string_view text, std::size_t offset = 0) {
    std::vector<Move> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == ' ' || text[i] == ',' || text[i] == '\t') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != ',' && text[j] != '\t') ++j;
        auto tok = text.substr(i, j - i);
        if (tok == "c") out.push_back(Move::c);
        else if (tok == "s") out.push_back(Move::s);
        else if (tok == "xy") out.push_back(Move::xy);
        else if (tok == "yz") out.push_back(Move::yz);
        else if (tok == "zx") out.push_back(Move::zx);
        else throw ParseError(offset + i, "unknown move '" + std::string(tok) + "'");
        i = j;
    }
    return out;
}

namespace detail {

inline double parse_real(std::string_view s, std::size_t at) {
    if (!s.empty() && s[0] == '+') s.remove_prefix(1), ++at;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || s.empty()) throw ParseError(at, "expected number");
    if (ptr != s.data() + s.size()) throw ParseError(at + (ptr - s.data()), "unexpected character");
    if (!std::isfinite(v)) throw ParseError(at, "non-finite number");
    return v;
}

}  // namespace detail

// "a", "bi", "a+bi", "a-bi", "i", "-i".
inline Complex parse_complex(std::string_view text, std::size_t offset = 0) {
    auto l = text.find_first_not_of(" \t");
    if (l == std::string_view::npos) throw ParseError(offset, "empty number");
    auto r = text.find_last_not_of(" \t");
    std::string_view t = text.substr(l, r - l + 1);
    offset += l;
    if (t.back() != 'i') return {detail::parse_real(t, offset), 0.0};
    std::string_view body = t.substr(0, t.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_of = [&](std::string_view s, std::size_t at) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        return detail::parse_real(s, at);
    };
    if (split == std::string_view::npos) return {0.0, imag_of(body, offset)};
    return {detail::parse_real(body.substr(0, split), offset), imag_of(body.substr(split), offset + split)};
}

// "x,y,z", optionally parenthesized.
inline Character parse_character(std::string_view text, std::size_t offset = 0) {
    auto l = text.find_first_not_of(" \t");
    if (l == std::string_view::npos) throw ParseError(offset, "empty character");
    auto r = text.find_last_not_of(" \t");
    std::string_view t = text.substr(l, r - l + 1);
    offset += l;
    if (t.front() == '(') {
        if (t.back() != ')') throw ParseError(offset + t.size(), "expected ')'");
        t = t.substr(1, t.size() - 2);
        ++offset;
    }
    std::array<Complex, 3> v;
    std::size_t start = 0;
    for (int k = 0; k < 3; ++k) {
        auto comma = t.find(',', start);
        if (k < 2 && comma == std::string_view::npos) throw ParseError(offset + t.size(), "expected 3 comma-separated values");
        if (k == 2 && comma != std::string_view::npos) throw ParseError(offset + comma, "too many values");
        auto end = k < 2 ? comma : t.size();
        v[k] = parse_complex(t.substr(start, end - start), offset + start);
        start = end + 1;
    }
    return {v[0], v[1], v[2]};
}

enum class Tri { no, yes, boundary };

inline const char* tri_name(Tri t) { return t == Tri::yes ? "yes" : t == Tri::no ? "no" : "boundary"; }

// a <= b, with an exact tie counted as yes and the rest of the band as boundary.
inline Tri tri_leq(double a, double b, double eps) {
    if (a == b || a < b - eps) return Tri::yes;
    if (a > b + eps) return Tri::no;
    return Tri::boundary;
}

inline Tri tri_and(Tri a, Tri b) {
    if (a == Tri::no || b == Tri::no) return Tri::no;
    if (a == Tri::boundary || b == Tri::boundary) return Tri::boundary;
    return Tri::yes;
}

// Real entry moved to z and made nonnegative.
struct ImaginaryNormalForm {
    std::size_t real_slot = 2;
    std::vector<Move> word;
    Character normalized;
};

struct ClassReport {
    Tri real = Tri::no;
    Tri imaginary = Tri::no;
    Tri dihedral = Tri::no;
    Tri su2 = Tri::no;
    Tri reducible = Tri::no;
    std::vector<Move> normalization_word;
    std::optional<ImaginaryNormalForm> imaginary_form;
};

inline Tri dihedral_flag(const Character& ch, double eps) {
    int zeros = 0;
    for (auto v : ch.values()) zeros += std::abs(v) <= eps;
    return zeros >= 2 ? Tri::yes : Tri::no;
}

inline std::optional<ImaginaryNormalForm> imaginary_form(const Character& ch, double eps) {
    if (dihedral_flag(ch, eps) == Tri::yes) return std::nullopt;
    for (std::size_t k = 0; k < 3; ++k) {
        if (!is_real(ch[k], eps)) continue;
        bool others = true;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != k && !is_pure_imag(ch[j], eps)) others = false;
        if (!others) continue;
        ImaginaryNormalForm f;
        f.real_slot = k;
        // c sends slot 0 to 1 and slot 1 to 2
        for (std::size_t r = k; r < 2; ++r) f.word.push_back(Move::c);
        Character n = act(ch, f.word);
        if (n.z().real() < 0) {
            f.word.push_back(Move::zx);
            n = act(n, Move::zx);
        }
        f.normalized = n;
        return f;
    }
    return std::nullopt;
}

inline ClassReport classify_type(const Character& ch, double eps = default_tol) {
    ClassReport r;
    bool real = true;
    for (auto v : ch.values()) real = real && is_real(v, eps);
    r.real = real ? Tri::yes : Tri::no;
    r.dihedral = dihedral_flag(ch, eps);
    r.reducible = std::abs(ch.kappa() - 2.0) <= eps ? Tri::yes : Tri::no;
    if (real) {
        Tri s = tri_leq(ch.kappa().real(), 2.0, eps);
        for (auto v : ch.values()) s = tri_and(s, tri_leq(std::abs(v.real()), 2.0, eps));
        r.su2 = s;
    }
    if (auto f = imaginary_form(ch, eps)) {
        r.imaginary = Tri::yes;
        r.normalization_word = f->word;
        r.imaginary_form = std::move(f);
    }
    return r;
}

// Letters X, Y and their inverses x, y.
enum class Letter { X, Xinv, Y, Yinv };
using Word = std::vector<Letter>;

inline std::string word_str(const Word& w) {
    std::string s;
    for (Letter l : w) s += l == Letter::X ? 'X' : l == Letter::Xinv ? 'x' : l == Letter::Y ? 'Y' : 'y';
    return s;
}

// Accepts X, Y, lowercase inverses, and the suffixes ^-1 or a superscript minus one.
inline Word parse_word(std::string_view text, std::size_t offset = 0) {
    Word w;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ') {
            ++i;
            continue;
        }
        Letter l;
        if (c == 'X') l = Letter::X;
        else if (c == 'Y') l = Letter::Y;
        else if (c == 'x') l = Letter::Xinv;
        else if (c == 'y') l = Letter::Yinv;
        else throw ParseError(offset + i, "unexpected letter");
        ++i;
        bool inv = false;
        if (text.substr(i, 3) == "^-1") inv = true, i += 3;
        else if (text.substr(i, 5) == "⁻¹") inv = true, i += 5;
        if (inv) {
            if (l == Letter::X) l = Letter::Xinv;
            else if (l == Letter::Y) l = Letter::Yinv;
            else throw ParseError(offset + i, "double inverse");
        }
        w.push_back(l);
    }
    if (w.empty()) throw ParseError(offset, "empty word");
    return w;
}

using Mat2 = std::array<Complex, 4>;  // row major

inline Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}
inline Complex det(const Mat2& m) { return m[0] * m[3] - m[1] * m[2]; }
inline Complex tr(const Mat2& m) { return m[0] + m[3]; }
// Inverse of a determinant-one matrix.
inline Mat2 inv_sl2(const Mat2& m) { return {m[3], -m[1], -m[2], m[0]}; }

struct MatrixPair {
    Mat2 A;
    Mat2 B;
};

inline MatrixPair matrices(const Character& ch) {
    Complex zeta = big_root(ch.z());
    return {{ch.x(), 1.0, -1.0, 0.0}, {0.0, -zeta, 1.0 / zeta, ch.y()}};
}

struct WordTrace {
    Complex value;
    bool saturated = false;
};

inline WordTrace trace_word(const MatrixPair& m, const Word& w) {
    const std::array<Mat2, 4> gen{m.A, inv_sl2(m.A), m.B, inv_sl2(m.B)};
    Mat2 acc{1.0, 0.0, 0.0, 1.0};
    bool sat = false;
    std::size_t since = 0;
    for (Letter l : w) {
        acc = mul(acc, gen[static_cast<int>(l)]);
        for (auto e : acc) sat = sat || !(std::abs(e) <= saturation_bound);
        if (++since == 64) {
            since = 0;
            Complex d = det(acc);
            // the computed determinant is only trustworthy while the entries are moderate
            double cond = std::abs(acc[0]) * std::abs(acc[3]) + std::abs(acc[1]) * std::abs(acc[2]);
            if (cond < 1e6 && std::abs(d) > 0) {
                Complex s = std::sqrt(d);
                for (auto& e : acc) e /= s;
            }
        }
    }
    Complex t = tr(acc);
    sat = sat || !(std::abs(t) <= saturation_bound);
    return {t, sat};
}

inline WordTrace trace_word(const Character& ch, const Word& w) { return trace_word(matrices(ch), w); }

// Primitive representative of slope p/q: W(0/1) = X, W(1/0) = Y, W(lo + hi) = W(lo) W(hi).
inline Word primitive_word(const Slope& s) {
    auto letter_word = [](const SlopeVector& v) -> Word {
        if (v.q == 1 && v.p == 0) return {Letter::X};
        if (v.q == 0 && v.p == 1) return {Letter::Y};
        if (v.q == 0 && v.p == -1) return {Letter::Yinv};
        return {Letter::X, Letter::Y};  // (1, 1)
    };
    if (s == Slope(0, 1)) return {Letter::X};
    if (s.is_infinite()) return {Letter::Y};
    if (s == Slope(1, 1)) return {Letter::X, Letter::Y};
    Word lo, hi;
    std::optional<DescentStep> prev;
    descend(s, [&](const DescentStep& st) {
        if (!prev) {
            lo = letter_word(st.lo);
            hi = letter_word(st.hi);
        } else {
            Word m = lo;
            m.insert(m.end(), hi.begin(), hi.end());
            (st.lo == prev->mid() ? lo : hi) = std::move(m);
        }
        prev = st;
    });
    lo.insert(lo.end(), hi.begin(), hi.end());
    return lo;
}

}  // namespace torus_ends
