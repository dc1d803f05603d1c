#pragma once

#include "rational.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace epicert {

constexpr int kMaxDim = 7;

// Partial derivative multi-index. Packed so that integer order equals the
// derivative order: total order first, then h from the last coordinate down.
class Derivative {
public:
    Derivative() = default;

    Derivative(std::initializer_list<int> h)
    {
        int i = 0;
        for (int e : h) set(i++, e);
    }

    static Derivative from(const std::vector<int>& h)
    {
        Derivative d;
        for (std::size_t i = 0; i < h.size(); ++i) d.set(static_cast<int>(i), h[i]);
        return d;
    }

    static Derivative unit(int a) { return Derivative().raised(a); }

    int operator[](int i) const { return static_cast<int>((key_ >> (8 * i)) & 0xff); }
    int order() const { return static_cast<int>(key_ >> 56); }
    bool is_p() const { return key_ == 0; }

    Derivative raised(int a, int k = 1) const
    {
        Derivative d = *this;
        d.set(a, (*this)[a] + k);
        return d;
    }

    Derivative lowered(int a) const
    {
        if ((*this)[a] == 0) throw std::logic_error("cannot lower zero exponent");
        Derivative d = *this;
        d.set(a, (*this)[a] - 1);
        return d;
    }

    Derivative substituted(const std::vector<int>& map) const
    {
        Derivative d;
        for (std::size_t i = 0; i < map.size(); ++i)
            if ((*this)[static_cast<int>(i)]) d.set(map[i], d[map[i]] + (*this)[static_cast<int>(i)]);
        return d;
    }

    int dimension_used() const
    {
        for (int i = kMaxDim - 1; i >= 0; --i)
            if ((*this)[i]) return i + 1;
        return 0;
    }

    std::uint64_t key() const { return key_; }
    auto operator<=>(const Derivative&) const = default;

private:
    void set(int i, int e)
    {
        if (i < 0 || i >= kMaxDim) throw std::out_of_range("coordinate index");
        if (e < 0 || e > 255) throw std::out_of_range("derivative exponent");
        int old = (*this)[i];
        key_ &= ~(std::uint64_t(0xff) << (8 * i));
        key_ |= std::uint64_t(e) << (8 * i);
        std::uint64_t ord = (key_ >> 56) + e - old;
        key_ = (key_ & ((std::uint64_t(1) << 56) - 1)) | (ord << 56);
    }

    std::uint64_t key_ = 0;
};

// Product of derivatives, factors kept in descending derivative order.
// Lexicographic comparison of the descending factor lists is the monomial order.
class Monomial {
public:
    Monomial() = default;
    Monomial(std::initializer_list<Derivative> fs) : f_(fs) { normalize(); }
    explicit Monomial(std::vector<Derivative> fs) : f_(std::move(fs)) { normalize(); }

    const std::vector<Derivative>& factors() const { return f_; }
    int degree() const { return static_cast<int>(f_.size()); }

    int total_order() const
    {
        int s = 0;
        for (auto d : f_) s += d.order();
        return s;
    }

    int max_order() const { return f_.empty() ? -1 : f_.front().order(); }

    int count(Derivative d) const { return static_cast<int>(std::count(f_.begin(), f_.end(), d)); }

    Monomial times(const Monomial& o) const
    {
        std::vector<Derivative> r;
        r.reserve(f_.size() + o.f_.size());
        std::merge(f_.begin(), f_.end(), o.f_.begin(), o.f_.end(), std::back_inserter(r), std::greater<>());
        Monomial m;
        m.f_ = std::move(r);
        return m;
    }

    Monomial times(Derivative d, int k = 1) const
    {
        Monomial m = *this;
        for (int i = 0; i < k; ++i) m.f_.push_back(d);
        m.normalize();
        return m;
    }

    Monomial without(Derivative d) const
    {
        Monomial m = *this;
        auto it = std::find(m.f_.begin(), m.f_.end(), d);
        if (it == m.f_.end()) throw std::logic_error("factor not present");
        m.f_.erase(it);
        return m;
    }

    Monomial replaced(Derivative from, Derivative to) const { return without(from).times(to); }

    Monomial substituted(const std::vector<int>& map) const
    {
        std::vector<Derivative> r;
        r.reserve(f_.size());
        for (auto d : f_) r.push_back(d.substituted(map));
        return Monomial(std::move(r));
    }

    int dimension_used() const
    {
        int n = 0;
        for (auto d : f_) n = std::max(n, d.dimension_used());
        return n;
    }

    auto operator<=>(const Monomial& o) const
    {
        return std::lexicographical_compare_three_way(f_.begin(), f_.end(), o.f_.begin(), o.f_.end());
    }
    bool operator==(const Monomial& o) const = default;

private:
    void normalize() { std::sort(f_.begin(), f_.end(), std::greater<>()); }
    std::vector<Derivative> f_;
};

// Polynomial in the derivatives of p with rational coefficients; terms are
// stored greatest monomial first.
class DiffForm {
public:
    using Terms = std::map<Monomial, Rational, std::greater<>>;

    DiffForm() = default;
    DiffForm(const Monomial& m, const Rational& c = 1) { add(m, c); }

    static DiffForm p() { return DiffForm(Monomial{Derivative()}); }
    static DiffForm d(Derivative h) { return DiffForm(Monomial{h}); }
    static DiffForm constant(const Rational& c) { return DiffForm(Monomial(), c); }

    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }

    void add(const Monomial& m, const Rational& c)
    {
        if (c == 0) return;
        auto [it, inserted] = t_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) t_.erase(it);
        }
    }

    Rational coeff(const Monomial& m) const
    {
        auto it = t_.find(m);
        return it == t_.end() ? Rational(0) : it->second;
    }

    const Monomial& leading_monomial() const { return t_.begin()->first; }
    const Rational& leading_coeff() const { return t_.begin()->second; }

    DiffForm& operator+=(const DiffForm& o)
    {
        for (const auto& [m, c] : o.t_) add(m, c);
        return *this;
    }

    DiffForm& operator-=(const DiffForm& o)
    {
        for (const auto& [m, c] : o.t_) add(m, -c);
        return *this;
    }

    DiffForm& add_scaled(const DiffForm& o, const Rational& s)
    {
        if (s == 0) return *this;
        for (const auto& [m, c] : o.t_) add(m, c * s);
        return *this;
    }

    DiffForm& operator*=(const Rational& s)
    {
        if (s == 0) {
            t_.clear();
            return *this;
        }
        for (auto& [m, c] : t_) c *= s;
        return *this;
    }

    friend DiffForm operator+(DiffForm a, const DiffForm& b) { return a += b; }
    friend DiffForm operator-(DiffForm a, const DiffForm& b) { return a -= b; }
    friend DiffForm operator-(DiffForm a) { return a *= Rational(-1); }
    friend DiffForm operator*(DiffForm a, const Rational& s) { return a *= s; }
    friend DiffForm operator*(const Rational& s, DiffForm a) { return a *= s; }

    friend DiffForm operator*(const DiffForm& a, const DiffForm& b)
    {
        DiffForm r;
        for (const auto& [ma, ca] : a.t_)
            for (const auto& [mb, cb] : b.t_) r.add(ma.times(mb), ca * cb);
        return r;
    }

    bool operator==(const DiffForm& o) const = default;

    bool is_homogeneous(int degree, int order) const
    {
        for (const auto& [m, c] : t_)
            if (m.degree() != degree || m.total_order() != order) return false;
        return true;
    }

    int max_factor_order() const
    {
        int r = -1;
        for (const auto& [m, c] : t_) r = std::max(r, m.max_order());
        return r;
    }

    int dimension_used() const
    {
        int n = 0;
        for (const auto& [m, c] : t_) n = std::max(n, m.dimension_used());
        return n;
    }

    // Scaled so the greatest monomial has coefficient 1.
    DiffForm normalized() const
    {
        if (t_.empty()) return *this;
        DiffForm r = *this;
        r *= Rational(1) / leading_coeff();
        return r;
    }

    DiffForm substituted(const std::vector<int>& map) const
    {
        DiffForm r;
        for (const auto& [m, c] : t_) r.add(m.substituted(map), c);
        return r;
    }

private:
    Terms t_;
};

inline DiffForm differentiate(const Monomial& m, int a)
{
    DiffForm r;
    const auto& f = m.factors();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i > 0 && f[i] == f[i - 1]) continue;
        int cnt = m.count(f[i]);
        r.add(m.replaced(f[i], f[i].raised(a)), Rational(cnt));
    }
    return r;
}

inline DiffForm differentiate(const DiffForm& g, int a)
{
    DiffForm r;
    for (const auto& [m, c] : g.terms()) r.add_scaled(differentiate(m, a), c);
    return r;
}

inline DiffForm laplacian(const DiffForm& g, int n)
{
    DiffForm r;
    for (int a = 0; a < n; ++a) r += differentiate(differentiate(g, a), a);
    return r;
}

// Time derivative along the heat flow: each factor's t-derivative is half its Laplacian.
inline DiffForm heat_dt(const DiffForm& g, int n)
{
    DiffForm r;
    for (const auto& [m, c] : g.terms()) {
        const auto& f = m.factors();
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i > 0 && f[i] == f[i - 1]) continue;
            Rational k = Rational(m.count(f[i])) / 2;
            Monomial rest = m.without(f[i]);
            for (int a = 0; a < n; ++a) r.add(rest.times(f[i].raised(a, 2)), c * k);
        }
    }
    return r;
}

// Divide every term by one factor p; throws if some term has no p.
inline DiffForm divide_by_p(const DiffForm& g)
{
    DiffForm r;
    for (const auto& [m, c] : g.terms()) {
        if (m.count(Derivative()) == 0) throw std::logic_error("term not divisible by p");
        r.add(m.without(Derivative()), c);
    }
    return r;
}

inline std::string to_string(Derivative d, int n)
{
    std::string s = "d(";
    for (int i = 0; i < n; ++i) {
        if (i) s += ',';
        s += std::to_string(d[i]);
    }
    return s + ")";
}

inline std::string to_string(const Monomial& m, int n)
{
    if (m.degree() == 0) return "1";
    std::string s;
    const auto& f = m.factors();
    for (std::size_t i = 0; i < f.size();) {
        std::size_t j = i;
        while (j < f.size() && f[j] == f[i]) ++j;
        if (!s.empty()) s += '*';
        s += to_string(f[i], n);
        if (j - i > 1) s += '^' + std::to_string(j - i);
        i = j;
    }
    return s;
}

inline std::string to_string(const DiffForm& g, int n)
{
    if (g.is_zero()) return "0";
    std::string s;
    for (const auto& [m, c] : g.terms()) {
        Rational a = abs(c);
        if (s.empty())
            s += c < 0 ? "-" : "";
        else
            s += c < 0 ? " - " : " + ";
        if (a != 1 || m.degree() == 0) s += a.get_str() + (m.degree() ? "*" : "");
        if (m.degree()) s += to_string(m, n);
    }
    return s;
}

// Human notation: p, p_1, p_12 ... (coordinates 1-based); f, f1, f2 for n = 1.
inline std::string pretty(Derivative d, int n)
{
    if (n == 1) return d.is_p() ? "f" : "f_" + std::to_string(d[0]);
    if (d.is_p()) return "p";
    std::string s = "p_";
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d[i]; ++k) s += std::to_string(i + 1);
    return s;
}

inline std::string pretty(const Monomial& m, int n)
{
    std::string s;
    std::vector<Derivative> f(m.factors().rbegin(), m.factors().rend());
    for (std::size_t i = 0; i < f.size();) {
        std::size_t j = i;
        while (j < f.size() && f[j] == f[i]) ++j;
        if (!s.empty()) s += n == 1 ? "" : "*";
        s += pretty(f[i], n);
        if (j - i > 1) s += '^' + std::to_string(j - i);
        i = j;
    }
    return s.empty() ? "1" : s;
}

inline std::string pretty(const DiffForm& g, int n)
{
    if (g.is_zero()) return "0";
    std::string s;
    for (const auto& [m, c] : g.terms()) {
        Rational a = abs(c);
        if (s.empty())
            s += c < 0 ? "-" : "";
        else
            s += c < 0 ? " - " : " + ";
        if (a != 1) s += a.get_str() + (n == 1 ? "" : "*");
        s += pretty(m, n);
    }
    return s;
}

class FormParser {
public:
    explicit FormParser(std::string s) : s_(std::move(s)) {}

    DiffForm parse()
    {
        DiffForm r;
        skip();
        if (s_.compare(i_, 1, "0") == 0 && rest_blank(i_ + 1)) return r;
        bool first = true;
        while (true) {
            skip();
            if (i_ >= s_.size()) break;
            Rational sign = 1;
            if (s_[i_] == '+' || s_[i_] == '-') {
                if (s_[i_] == '-') sign = -1;
                ++i_;
                skip();
            } else if (!first) {
                fail("expected sign");
            }
            first = false;
            Rational c = 1;
            Monomial m;
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                c = number();
                skip();
                if (peek() == '*') {
                    ++i_;
                    skip();
                    m = monomial();
                }
            } else {
                m = monomial();
            }
            r.add(m, sign * c);
        }
        if (first) fail("empty form");
        return r;
    }

    int dimension() const { return dim_; }

private:
    char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
    void skip()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool rest_blank(std::size_t j) const
    {
        for (; j < s_.size(); ++j)
            if (!std::isspace(static_cast<unsigned char>(s_[j]))) return false;
        return true;
    }
    [[noreturn]] void fail(const std::string& what) const
    {
        throw std::invalid_argument("form parse error at " + std::to_string(i_) + ": " + what);
    }

    Integer integer()
    {
        std::size_t j = i_;
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
        if (j == i_) fail("expected digits");
        Integer v(s_.substr(i_, j - i_));
        i_ = j;
        return v;
    }

    Rational number()
    {
        Integer a = integer();
        if (peek() == '/') {
            ++i_;
            Integer b = integer();
            if (b == 0) fail("zero denominator");
            Rational q(a, b);
            q.canonicalize();
            return q;
        }
        return Rational(a);
    }

    Derivative derivative()
    {
        if (peek() != 'd') fail("expected d(");
        ++i_;
        if (peek() != '(') fail("expected (");
        ++i_;
        std::vector<int> h;
        while (true) {
            skip();
            h.push_back(static_cast<int>(integer().get_si()));
            skip();
            if (peek() == ',') {
                ++i_;
                continue;
            }
            if (peek() == ')') {
                ++i_;
                break;
            }
            fail("expected , or )");
        }
        if (dim_ == 0) dim_ = static_cast<int>(h.size());
        if (static_cast<int>(h.size()) != dim_) fail("inconsistent dimension");
        return Derivative::from(h);
    }

    Monomial monomial()
    {
        std::vector<Derivative> fs;
        while (true) {
            skip();
            Derivative d = derivative();
            int k = 1;
            if (peek() == '^') {
                ++i_;
                k = static_cast<int>(integer().get_si());
            }
            for (int j = 0; j < k; ++j) fs.push_back(d);
            skip();
            if (peek() == '*') {
                ++i_;
                continue;
            }
            break;
        }
        return Monomial(std::move(fs));
    }

    std::string s_;
    std::size_t i_ = 0;
    int dim_ = 0;
};

inline DiffForm parse_form(const std::string& s) { return FormParser(s).parse(); }

}  // namespace epicert
