#pragma once

#include "diffalg.hpp"

#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace epicert {

struct ResourceLimitExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::size_t& generation_cap()
{
    static std::size_t cap = 2'000'000;
    return cap;
}

// All derivatives of order <= max_order in n coordinates, greatest first.
inline std::vector<Derivative> enumerate_derivatives(int n, int max_order)
{
    std::vector<Derivative> out;
    std::vector<int> h(n, 0);
    for (int o = 0; o <= max_order; ++o) {
        auto rec = [&](auto&& self, int i, int left) -> void {
            if (i == n - 1) {
                h[i] = left;
                out.push_back(Derivative::from(h));
                return;
            }
            for (int e = 0; e <= left; ++e) {
                h[i] = e;
                self(self, i + 1, left - e);
            }
        };
        rec(rec, 0, o);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

// Monomials with the given degree and total order whose factors have order <= max_order,
// greatest first.
inline std::vector<Monomial> enumerate_monomials(int n, int degree, int total_order, int max_order)
{
    auto ds = enumerate_derivatives(n, max_order);
    std::vector<Monomial> out;
    std::vector<Derivative> cur;
    auto rec = [&](auto&& self, std::size_t from, int left_deg, int left_ord) -> void {
        if (left_deg == 0) {
            if (left_ord == 0) out.push_back(Monomial(cur));
            return;
        }
        for (std::size_t i = from; i < ds.size(); ++i) {
            int o = ds[i].order();
            if (o > left_ord) continue;
            if (o * left_deg < left_ord) break;
            cur.push_back(ds[i]);
            self(self, i, left_deg - 1, left_ord - o);
            cur.pop_back();
            if (out.size() > generation_cap()) throw ResourceLimitExceeded("monomial enumeration exceeds cap");
        }
    };
    rec(rec, 0, degree, total_order);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

// Integration by parts on M = v*M1: with N = w*M1/p, w = v lowered in direction a,
// R = p*d_a(N) - (2m-2)*N*p_a has zero integral against p^(2m-1).
inline DiffForm ibp_form(int m, const Monomial& M, Derivative v, int a)
{
    Monomial pN = M.without(v).times(v.lowered(a));
    Monomial N = pN.without(Derivative());
    DiffForm Nf(N);
    return DiffForm::p() * differentiate(Nf, a) - Rational(2 * m - 2) * (Nf * DiffForm::d(Derivative::unit(a)));
}

inline DiffForm laplacian_power(int k, int n)
{
    DiffForm f = DiffForm::p();
    for (int i = 0; i < k; ++i) f = laplacian(f, n);
    return f;
}

// Divergence-theorem constraint for Q = prod of nabla^k p over the power signature.
// Odd powers are paired adjacently after sorting in descending order.
inline DiffForm nabla_form(int m, int n, std::vector<int> powers)
{
    std::sort(powers.begin(), powers.end(), std::greater<>());
    std::vector<int> even, odd;
    for (int k : powers) (k % 2 ? odd : even).push_back(k);
    if (odd.size() % 2) throw std::invalid_argument("odd count of odd powers");
    int total = 0;
    for (int k : powers) total += k;
    if (total != 2 * m) throw std::invalid_argument("powers must sum to 2m");
    while (static_cast<int>(even.size() + odd.size()) < 2 * m) even.push_back(0);

    auto L = [&](int k) { return laplacian_power(k / 2, n); };
    auto G = [&](int k) {
        DiffForm base = laplacian_power((k - 1) / 2, n);
        std::vector<DiffForm> g;
        for (int i = 0; i < n; ++i) g.push_back(differentiate(base, i));
        return g;
    };
    auto dot = [&](int k1, int k2) {
        auto g1 = G(k1), g2 = G(k2);
        DiffForm r;
        for (int i = 0; i < n; ++i) r += g1[i] * g2[i];
        return r;
    };
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < odd.size(); i += 2) pairs.emplace_back(odd[i], odd[i + 1]);

    auto product = [&](const std::vector<int>& ev, const std::vector<std::pair<int, int>>& ps) {
        DiffForm f = DiffForm::constant(1);
        for (int k : ev) f = f * L(k);
        for (auto [x, y] : ps) f = f * dot(x, y);
        return f;
    };
    DiffForm Q = product(even, pairs);
    DiffForm p = DiffForm::p();
    int oe = even.empty() ? -1 : even.front();
    int oo = odd.empty() ? -1 : odd.front();
    DiffForm R = Q;
    if (oe >= oo) {
        std::vector<int> rest(even.begin() + 1, even.end());
        DiffForm Q1 = product(rest, pairs);
        auto g = G(oe - 1);
        for (int i = 0; i < n; ++i) {
            DiffForm T = p * differentiate(Q1, i) - Rational(2 * m - 1) * (Q1 * DiffForm::d(Derivative::unit(i)));
            R += divide_by_p(g[i] * T);
        }
    } else {
        int u = pairs.front().second;
        std::vector<std::pair<int, int>> rest(pairs.begin() + 1, pairs.end());
        DiffForm Qp = product(even, rest);
        auto gu = G(u);
        DiffForm s = L(oo - 1);
        for (int i = 0; i < n; ++i) {
            DiffForm UQ = gu[i] * Qp;
            DiffForm T = p * differentiate(UQ, i) - Rational(2 * m - 1) * (UQ * DiffForm::d(Derivative::unit(i)));
            R += divide_by_p(s * T);
        }
    }
    return R;
}

// Time-derivative lift of an order-m constraint to order m+1.
inline DiffForm lift_form(int m, const DiffForm& R, int n)
{
    DiffForm p = DiffForm::p();
    DiffForm pdot = laplacian(p, n) * Rational(1, 2);
    return p * p * heat_dt(R, n) - Rational(2 * m - 1) * (R * p * pdot);
}

struct Provenance {
    enum class Kind { Ibp, Nabla, Lift };
    Kind kind = Kind::Ibp;
    int m = 0;
    int n = 0;
    Monomial mono;
    Derivative pivot;
    int dir = 0;
    std::vector<int> powers;
    std::shared_ptr<const Provenance> parent;

    static Provenance ibp(int m, int n, Monomial M, Derivative v, int a)
    {
        Provenance p;
        p.kind = Kind::Ibp;
        p.m = m;
        p.n = n;
        p.mono = std::move(M);
        p.pivot = v;
        p.dir = a;
        return p;
    }

    static Provenance nabla(int m, int n, std::vector<int> powers)
    {
        Provenance p;
        p.kind = Kind::Nabla;
        p.m = m;
        p.n = n;
        std::vector<int> nz;
        for (int k : powers)
            if (k) nz.push_back(k);
        std::sort(nz.begin(), nz.end(), std::greater<>());
        p.powers = nz;
        return p;
    }

    static Provenance lift(const Provenance& parent)
    {
        Provenance p;
        p.kind = Kind::Lift;
        p.m = parent.m + 1;
        p.n = parent.n;
        p.parent = std::make_shared<const Provenance>(parent);
        return p;
    }
};

inline DiffForm regenerate(const Provenance& p)
{
    switch (p.kind) {
    case Provenance::Kind::Ibp: return ibp_form(p.m, p.mono, p.pivot, p.dir);
    case Provenance::Kind::Nabla: return nabla_form(p.m, p.n, p.powers);
    case Provenance::Kind::Lift: return lift_form(p.parent->m, regenerate(*p.parent), p.n);
    }
    throw std::logic_error("unknown provenance");
}

inline std::string to_string(const Provenance& p)
{
    std::ostringstream os;
    switch (p.kind) {
    case Provenance::Kind::Ibp:
        os << "ibp " << p.m << ' ' << p.n << ' ' << to_string(p.mono, p.n) << ' ' << to_string(p.pivot, p.n) << ' '
           << p.dir;
        break;
    case Provenance::Kind::Nabla:
        os << "nabla " << p.m << ' ' << p.n << ' ';
        for (std::size_t i = 0; i < p.powers.size(); ++i) os << (i ? "," : "") << p.powers[i];
        break;
    case Provenance::Kind::Lift: os << "lift " << to_string(*p.parent); break;
    }
    return os.str();
}

inline Provenance parse_provenance(const std::string& s)
{
    std::istringstream is(s);
    std::string kind;
    is >> kind;
    if (kind == "lift") {
        std::string rest;
        std::getline(is, rest);
        return Provenance::lift(parse_provenance(rest));
    }
    int m = 0, n = 0;
    if (!(is >> m >> n) || m < 1 || n < 1 || n > kMaxDim) throw std::invalid_argument("bad provenance: " + s);
    if (kind == "ibp") {
        std::string mono, piv;
        int a = -1;
        if (!(is >> mono >> piv >> a)) throw std::invalid_argument("bad ibp provenance: " + s);
        DiffForm M = parse_form(mono), v = parse_form(piv);
        if (M.size() != 1 || v.size() != 1 || v.leading_monomial().degree() != 1)
            throw std::invalid_argument("bad ibp provenance: " + s);
        Monomial mm = M.leading_monomial();
        Derivative vv = v.leading_monomial().factors().front();
        if (a < 0 || a >= n || vv[a] == 0 || mm.count(vv) == 0 || mm.degree() != 2 * m || mm.dimension_used() > n)
            throw std::invalid_argument("bad ibp provenance: " + s);
        return Provenance::ibp(m, n, mm, vv, a);
    }
    if (kind == "nabla") {
        std::string list;
        is >> list;
        std::vector<int> powers;
        std::stringstream ls(list);
        std::string tok;
        while (std::getline(ls, tok, ',')) powers.push_back(std::stoi(tok));
        return Provenance::nabla(m, n, powers);
    }
    throw std::invalid_argument("unknown provenance kind: " + kind);
}

struct Constraint {
    DiffForm form;
    Provenance prov;
    int m = 0;
};

// Deduplicating collection: forms equal up to a nonzero scalar are kept once,
// first arrival wins; zero forms are dropped.
class ConstraintPool {
public:
    bool add(Constraint c)
    {
        if (c.form.is_zero()) return false;
        if (!seen_.insert(key(c.form)).second) return false;
        items_.push_back(std::move(c));
        return true;
    }

    void add_all(const std::vector<Constraint>& cs)
    {
        for (const auto& c : cs) add(c);
    }

    bool contains(const DiffForm& f) const { return !f.is_zero() && seen_.count(key(f)); }

    const std::vector<Constraint>& items() const { return items_; }
    std::vector<Constraint> take() { return std::move(items_); }
    std::size_t size() const { return items_.size(); }

private:
    static std::vector<std::pair<Monomial, Rational>> key(const DiffForm& f)
    {
        DiffForm g = f.normalized();
        return {g.terms().begin(), g.terms().end()};
    }

    std::set<std::vector<std::pair<Monomial, Rational>>> seen_;
    std::vector<Constraint> items_;
};

struct IbpTriple {
    Monomial mono;
    Derivative pivot;
    int dir = 0;
    auto operator<=>(const IbpTriple&) const = default;
};

// Every (M, pivot factor of positive order, direction) with M of degree 2m,
// total order 2m and factor orders <= 2m-1.
inline std::vector<IbpTriple> ibp_triples(int m, int n)
{
    std::vector<IbpTriple> out;
    for (const auto& M : enumerate_monomials(n, 2 * m, 2 * m, 2 * m - 1)) {
        const auto& f = M.factors();
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i].is_p() || (i > 0 && f[i] == f[i - 1])) continue;
            for (int a = 0; a < n; ++a)
                if (f[i][a] > 0) out.push_back({M, f[i], a});
        }
    }
    return out;
}

// Images of triples under every map from `letters` symbolic indices into [n].
inline std::vector<IbpTriple> instantiate(const std::vector<IbpTriple>& triples, int letters, int n)
{
    std::set<IbpTriple> seen;
    std::vector<IbpTriple> out;
    std::vector<int> map(letters, 0);
    for (const auto& t : triples) {
        std::fill(map.begin(), map.end(), 0);
        while (true) {
            IbpTriple u{t.mono.substituted(map), t.pivot.substituted(map), map[t.dir]};
            if (seen.insert(u).second) out.push_back(u);
            int k = 0;
            while (k < letters && ++map[k] == n) map[k++] = 0;
            if (k == letters) break;
        }
        if (out.size() > generation_cap()) throw ResourceLimitExceeded("instantiated triples exceed cap");
    }
    return out;
}

inline std::vector<Constraint> ibp_constraints(int m, int n, const std::vector<IbpTriple>& triples, bool filtered)
{
    ConstraintPool pool;
    for (const auto& t : triples) {
        DiffForm R = ibp_form(m, t.mono, t.pivot, t.dir);
        if (filtered && R.max_factor_order() > 2 * m - 1) continue;
        pool.add({std::move(R), Provenance::ibp(m, n, t.mono, t.pivot, t.dir), m});
    }
    return pool.take();
}

// Type 1 constraints; letters > 0 generates over a symbolic alphabet and instantiates into [n].
inline std::vector<Constraint> ibp_constraints(int m, int n, bool filtered, int letters = 0)
{
    if (letters <= 0 || letters >= n) return ibp_constraints(m, n, ibp_triples(m, n), filtered);
    return ibp_constraints(m, n, instantiate(ibp_triples(m, letters), letters, n), filtered);
}

// Power signatures: partitions of 2m into at most 2m parts, each <= 2m-1, with an even
// number of odd parts.
inline std::vector<std::vector<int>> nabla_signatures(int m)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int left, int maxp) -> void {
        if (left == 0) {
            int odd = 0;
            for (int k : cur) odd += k % 2;
            if (odd % 2 == 0) out.push_back(cur);
            return;
        }
        for (int x = std::min(left, maxp); x >= 1; --x) {
            cur.push_back(x);
            self(self, left - x, x);
            cur.pop_back();
        }
    };
    rec(rec, 2 * m, 2 * m - 1);
    return out;
}

inline std::vector<Constraint> nabla_constraints(int m, int n)
{
    ConstraintPool pool;
    for (const auto& sig : nabla_signatures(m))
        pool.add({nabla_form(m, n, sig), Provenance::nabla(m, n, sig), m});
    return pool.take();
}

inline std::vector<Constraint> lift_constraints(const std::vector<Constraint>& parents, int n)
{
    ConstraintPool pool;
    for (const auto& c : parents) pool.add({lift_form(c.m, c.form, n), Provenance::lift(c.prov), c.m + 1});
    return pool.take();
}

// Two-letter second-order family used for the symmetric-pair problem: monomials
// p^2*v1*v3 and p*v1*v1'*v2, pivot the highest-order factor, direction the
// coordinate with the larger exponent in the pivot (ties to the first letter).
inline std::vector<IbpTriple> pair_family_triples()
{
    std::vector<IbpTriple> out;
    for (const auto& M : enumerate_monomials(2, 4, 4, 3)) {
        std::vector<int> ords;
        for (auto d : M.factors()) ords.push_back(d.order());
        std::sort(ords.begin(), ords.end());
        if (ords != std::vector<int>{0, 0, 1, 3} && ords != std::vector<int>{0, 1, 1, 2}) continue;
        Derivative v = M.factors().front();
        int a = v[0] >= v[1] ? 0 : 1;
        out.push_back({M, v, a});
    }
    return out;
}

// Letters a, b fixed as coordinates 0 and 1.
inline std::vector<Constraint> pair_family_constraints() { return ibp_constraints(2, 2, pair_family_triples(), false); }

namespace detail {

inline std::vector<Constraint> union_of(std::initializer_list<std::vector<Constraint>> parts)
{
    ConstraintPool pool;
    for (const auto& p : parts) pool.add_all(p);
    return pool.take();
}

// Filtered type-1 constraints lifted recursively from order 2 up to order m (n = 1).
inline std::vector<Constraint> univariate_chain(int m)
{
    if (m == 2) return ibp_constraints(2, 1, true);
    return union_of({ibp_constraints(m, 1, true), nabla_constraints(m, 1), lift_constraints(univariate_chain(m - 1), 1)});
}

}  // namespace detail

// Raw constraint set C_{m,n} used for proofs.
inline std::vector<Constraint> constraint_suite(int m, int n)
{
    using detail::union_of;
    if (m < 2 || n < 1 || n > kMaxDim) throw std::invalid_argument("constraint_suite needs m >= 2, 1 <= n <= kMaxDim");
    if (n == 1) {
        if (m <= 4) return ibp_constraints(m, 1, true);
        return union_of({ibp_constraints(m, 1, false), nabla_constraints(m, 1),
                         lift_constraints(detail::univariate_chain(m - 1), 1)});
    }
    if (m == 2) return union_of({ibp_constraints(2, n, instantiate(pair_family_triples(), 2, n), false), nabla_constraints(2, n)});
    if (m == 3) {
        std::vector<Constraint> second;
        if (n >= 3) second = lift_constraints(ibp_constraints(2, n, false, 2), n);
        return union_of({ibp_constraints(3, n, false, 3), nabla_constraints(3, n),
                         lift_constraints(nabla_constraints(2, n), n), second});
    }
    auto lower = m == 4 ? union_of({constraint_suite(3, n), lift_constraints(ibp_constraints(2, n, false, 2), n)})
                        : constraint_suite(m - 1, n);
    return union_of({ibp_constraints(m, n, false), nabla_constraints(m, n), lift_constraints(lower, n)});
}

// Type 1 and type 2 members of the suite; lifts are left out of the Step 3 split.
inline std::vector<Constraint> reduction_pool(const std::vector<Constraint>& suite)
{
    std::vector<Constraint> r;
    for (const auto& c : suite)
        if (c.prov.kind != Provenance::Kind::Lift) r.push_back(c);
    return r;
}

}  // namespace epicert
