#pragma once

#include "assemble.hpp"
#include "constraints.hpp"
#include "linalg.hpp"
#include "targets.hpp"

#include <Eigen/Dense>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace epicert {

inline std::vector<Rational> rationalize(const std::vector<double>& y, const Integer& max_den)
{
    std::vector<Rational> r;
    r.reserve(y.size());
    for (double v : y) r.push_back(best_rational(v, max_den));
    return r;
}

// Rounding to a fixed common denominator.
inline std::vector<Rational> rationalize_common(const std::vector<double>& y, const Integer& den)
{
    std::vector<Rational> r;
    r.reserve(y.size());
    for (double v : y) {
        Rational q(std::nearbyint(v * den.get_d()));
        q /= den;
        r.push_back(q);
    }
    return r;
}

struct SosTerm {
    Rational c;
    std::vector<Rational> l;
};

struct LdlResult {
    bool psd = true;
    std::vector<SosTerm> terms;      // G = sum c_i l_i l_i^T, leads strictly increasing
    std::vector<Rational> witness;   // x with x^T G x < 0 when not psd
};

// Exact G = sum c_i l_i l_i^T with c_i > 0 and echelon l_i, or a negative direction.
inline LdlResult rational_ldl(RatMatrix A)
{
    const int n = static_cast<int>(A.size());
    LdlResult res;
    std::vector<int> pivots;
    auto witness_from = [&](std::vector<Rational> x) {
        for (auto it = res.terms.rbegin(); it != res.terms.rend(); ++it) {
            int p = 0;
            while (it->l[p] == 0) ++p;
            Rational s = 0;
            for (int i = p + 1; i < n; ++i) s += it->l[i] * x[i];
            x[p] = -s;
        }
        res.psd = false;
        res.witness = std::move(x);
    };
    for (int k = 0; k < n; ++k) {
        const Rational& d = A[k][k];
        if (d > 0) {
            SosTerm t;
            t.c = d;
            t.l.assign(n, Rational(0));
            for (int j = k; j < n; ++j) t.l[j] = A[k][j] / d;
            for (int i = k + 1; i < n; ++i) {
                if (A[i][k] == 0) continue;
                Rational f = A[i][k] / d;
                for (int j = k + 1; j < n; ++j)
                    if (A[k][j] != 0) A[i][j] -= f * A[k][j];
            }
            for (int j = k; j < n; ++j) A[k][j] = A[j][k] = 0;
            res.terms.push_back(std::move(t));
            continue;
        }
        if (d < 0) {
            std::vector<Rational> x(n, Rational(0));
            x[k] = 1;
            witness_from(std::move(x));
            return res;
        }
        for (int j = k + 1; j < n; ++j)
            if (A[k][j] != 0) {
                std::vector<Rational> x(n, Rational(0));
                x[j] = 1;
                x[k] = -(A[j][j] + 1) / (2 * A[k][j]);
                witness_from(std::move(x));
                return res;
            }
    }
    return res;
}

inline Rational quadratic_value(const RatMatrix& G, const std::vector<Rational>& x)
{
    Rational s = 0;
    for (std::size_t i = 0; i < G.size(); ++i)
        for (std::size_t j = 0; j < G.size(); ++j)
            if (G[i][j] != 0 && x[i] != 0 && x[j] != 0) s += G[i][j] * x[i] * x[j];
    return s;
}

// Rational basis of the numerical kernel of a symmetric matrix, rows in reduced echelon form.
inline std::vector<std::vector<Rational>> rational_kernel(const Eigen::MatrixXd& G, double rel_tol, const Integer& max_den)
{
    const int n = static_cast<int>(G.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    std::vector<int> cols;
    for (int i = 0; i < n; ++i)
        if (es.eigenvalues()(i) < rel_tol * scale) cols.push_back(i);
    const int r = static_cast<int>(cols.size());
    Eigen::MatrixXd V(r, n);
    for (int a = 0; a < r; ++a) V.row(a) = es.eigenvectors().col(cols[a]).transpose();
    int row = 0;
    for (int c = 0; c < n && row < r; ++c) {
        int best = row;
        for (int a = row + 1; a < r; ++a)
            if (std::abs(V(a, c)) > std::abs(V(best, c))) best = a;
        if (std::abs(V(best, c)) < 1e-8) continue;
        V.row(row).swap(V.row(best));
        V.row(row) /= V(row, c);
        for (int a = 0; a < r; ++a)
            if (a != row) V.row(a) -= V(a, c) * V.row(row);
        ++row;
    }
    std::vector<std::vector<Rational>> K;
    for (int a = 0; a < row; ++a) {
        std::vector<Rational> v(n);
        for (int c = 0; c < n; ++c) v[c] = std::abs(V(a, c)) < 1e-10 ? Rational(0) : best_rational(V(a, c), max_den);
        K.push_back(std::move(v));
    }
    return K;
}

// Facial reduction rounding: rationalize the kernel of each numerical Gram
// matrix, then choose exact multipliers with G_k(y) K_k = 0, free ones rounded.
inline std::optional<std::vector<Rational>> facial_round(const ExactSdp& s, const std::vector<Eigen::MatrixXd>& G,
                                                        const std::vector<double>& y, const Integer& max_den,
                                                        double kernel_tol = 1e-5)
{
    const int nv = static_cast<int>(s.vars.size());
    const int N = s.basis.size();
    Echelon eq;
    auto apply = [&](const SparseVec& q, const std::vector<Rational>& x) {
        std::vector<Rational> r(N, Rational(0));
        for (const auto& [idx, c] : q) {
            auto [i, j] = s.basis.pair_of(idx);
            if (i == j)
                r[i] += c * x[i];
            else {
                r[i] += c * x[j] / 2;
                r[j] += c * x[i] / 2;
            }
        }
        return r;
    };
    for (int k = 0; k < s.blocks(); ++k) {
        auto K = rational_kernel(G[k], kernel_tol, max_den);
        for (const auto& kv : K) {
            std::vector<std::vector<Rational>> cols(nv);
            for (int i = 0; i < nv; ++i)
                for (const auto& [kk, q] : s.vars[i].blocks)
                    if (kk == k) cols[i] = apply(q, kv);
            auto rhs = apply(s.C[k], kv);
            for (int r = 0; r < N; ++r) {
                SparseVec row;
                for (int i = 0; i < nv; ++i)
                    if (!cols[i].empty() && cols[i][r] != 0) row.emplace_back(i, cols[i][r]);
                if (rhs[r] != 0) row.emplace_back(nv, rhs[r]);
                if (!row.empty()) eq.insert(row);
            }
        }
    }
    if (eq.rows().count(nv)) return std::nullopt;
    eq.make_reduced();
    std::vector<Rational> yr = rationalize(y, max_den);
    std::vector<bool> pivot(nv, false);
    for (const auto& [lead, row] : eq.rows()) pivot[lead] = true;
    for (const auto& [lead, row] : eq.rows()) {
        Rational v = 0;
        for (const auto& [c, x] : row) {
            if (c == lead) continue;
            if (c == nv)
                v += x;
            else
                v -= x * yr[c];
        }
        yr[lead] = v;
    }
    return yr;
}

struct CertificateBlock {
    std::vector<std::pair<Rational, Provenance>> multipliers;
    std::vector<SosTerm> sos;
};

struct Certificate {
    TargetKind kind = TargetKind::Dmn;
    int m = 0;
    int n = 0;
    std::vector<Monomial> basis;
    std::vector<std::pair<std::string, Rational>> params;
    std::vector<CertificateBlock> blocks;

    std::string problem_id() const
    {
        TargetProblem t;
        t.kind = kind;
        t.m = m;
        t.n = n;
        return t.id();
    }
};

inline TargetProblem target_for(TargetKind kind, int m, int n)
{
    switch (kind) {
    case TargetKind::Dmn: return dmn_target(m, n);
    case TargetKind::CostaConcrete: return costa_target(n);
    case TargetKind::CostaGeneral: return costa_general_target();
    }
    throw std::invalid_argument("unknown target kind");
}

inline DiffForm sos_expand(const std::vector<Monomial>& basis, const std::vector<SosTerm>& sos)
{
    DiffForm S;
    for (const auto& t : sos) {
        DiffForm l;
        for (std::size_t i = 0; i < basis.size() && i < t.l.size(); ++i) l.add(basis[i], t.l[i]);
        S.add_scaled(l * l, t.c);
    }
    return S;
}

// Multipliers mu with sum mu_j R_j = D over the pool; nullopt when D is outside the span.
inline std::optional<std::vector<std::pair<Rational, Provenance>>> express_in_span(const std::vector<Constraint>& pool,
                                                                                  const DiffForm& D)
{
    std::map<Monomial, int> col;
    auto index = [&](const Monomial& mo) {
        auto [it, ins] = col.try_emplace(mo, static_cast<int>(col.size()));
        return it->second;
    };
    auto to_vec = [&](const DiffForm& f) {
        SparseVec v;
        for (const auto& [mo, c] : f.terms()) v.emplace_back(index(mo), c);
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return v;
    };
    std::vector<SparseVec> vecs;
    for (const auto& c : pool) vecs.push_back(to_vec(c.form));
    auto mu = solve_in_span(vecs, to_vec(D));
    if (!mu) return std::nullopt;
    std::vector<std::pair<Rational, Provenance>> r;
    for (std::size_t j = 0; j < pool.size(); ++j)
        if ((*mu)[j] != 0) r.emplace_back((*mu)[j], pool[j].prov);
    return r;
}

inline std::optional<Certificate> build_certificate(const TargetProblem& tp, const QuadBasis& qb,
                                                    const std::vector<Constraint>& pool,
                                                    const std::vector<Rational>& params,
                                                    const std::vector<std::vector<SosTerm>>& sos)
{
    Certificate cert;
    cert.kind = tp.kind;
    cert.m = tp.m;
    cert.n = tp.n;
    cert.basis = qb.monomials();
    for (std::size_t i = 0; i < tp.param_names.size(); ++i)
        cert.params.emplace_back(tp.param_names[i], i < params.size() ? params[i] : Rational(0));
    auto targets = tp.sos_targets();
    for (std::size_t k = 0; k < targets.size(); ++k) {
        DiffForm D = targets[k].at(params) - sos_expand(cert.basis, sos[k]);
        auto mu = express_in_span(pool, D);
        if (!mu) return std::nullopt;
        cert.blocks.push_back({std::move(*mu), sos[k]});
    }
    return cert;
}

struct VerifyResult {
    bool ok = false;
    std::string message;
};

inline VerifyResult verify(const Certificate& cert)
{
    try {
        TargetProblem tp = target_for(cert.kind, cert.m, cert.n);
        auto targets = tp.sos_targets();
        if (targets.size() != cert.blocks.size()) return {false, "block count mismatch"};
        if (cert.params.size() != tp.param_names.size()) return {false, "parameter count mismatch"};
        std::vector<Rational> pv;
        for (std::size_t i = 0; i < cert.params.size(); ++i) {
            if (cert.params[i].first != tp.param_names[i]) return {false, "unknown parameter " + cert.params[i].first};
            pv.push_back(cert.params[i].second);
        }
        for (const auto& mo : cert.basis)
            if (mo.degree() != cert.m || mo.total_order() != cert.m) return {false, "basis monomial of wrong order"};
        for (std::size_t k = 0; k < targets.size(); ++k) {
            const auto& b = cert.blocks[k];
            DiffForm lhs = targets[k].at(pv);
            for (const auto& [mu, prov] : b.multipliers) {
                if (prov.m != cert.m || prov.n != cert.n) return {false, "constraint of wrong order or dimension"};
                lhs.add_scaled(regenerate(prov), -mu);
            }
            for (const auto& t : b.sos) {
                if (t.c < 0) return {false, "negative SOS coefficient in block " + std::to_string(k)};
                if (t.l.size() != cert.basis.size()) return {false, "SOS vector length mismatch"};
            }
            lhs -= sos_expand(cert.basis, b.sos);
            if (!lhs.is_zero())
                return {false, "identity fails in block " + std::to_string(k) + " (" + std::to_string(lhs.size()) +
                                   " residual terms)"};
        }
        return {true, "ok"};
    } catch (const std::exception& e) {
        return {false, e.what()};
    }
}

inline const char* kind_name(TargetKind k)
{
    switch (k) {
    case TargetKind::Dmn: return "dmn";
    case TargetKind::CostaConcrete: return "costa";
    case TargetKind::CostaGeneral: return "costa-general";
    }
    return "";
}

inline TargetKind parse_kind(const std::string& s)
{
    if (s == "dmn") return TargetKind::Dmn;
    if (s == "costa") return TargetKind::CostaConcrete;
    if (s == "costa-general") return TargetKind::CostaGeneral;
    throw std::invalid_argument("unknown kind: " + s);
}

inline std::string serialize(const Certificate& c)
{
    std::ostringstream os;
    int nd = c.kind == TargetKind::CostaGeneral ? 2 : c.n;
    os << "epicert-certificate 1\n";
    os << "problem " << c.problem_id() << "\n";
    os << "kind " << kind_name(c.kind) << "\n";
    os << "m " << c.m << "\nn " << c.n << "\n";
    os << "basis " << c.basis.size() << "\n";
    for (const auto& mo : c.basis) os << to_string(mo, nd) << "\n";
    os << "params " << c.params.size() << "\n";
    for (const auto& [name, v] : c.params) os << name << ' ' << v.get_str() << "\n";
    os << "blocks " << c.blocks.size() << "\n";
    for (std::size_t k = 0; k < c.blocks.size(); ++k) {
        const auto& b = c.blocks[k];
        os << "block " << k << "\n";
        os << "multipliers " << b.multipliers.size() << "\n";
        for (const auto& [mu, prov] : b.multipliers) os << mu.get_str() << ' ' << to_string(prov) << "\n";
        os << "sos " << b.sos.size() << "\n";
        for (const auto& t : b.sos) {
            os << t.c.get_str() << " :";
            for (const auto& x : t.l) os << ' ' << x.get_str();
            os << "\n";
        }
    }
    os << "end\n";
    return os.str();
}

struct CertificateParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Certificate parse_certificate(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto next = [&]() -> std::string {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return line;
        }
        throw CertificateParseError("unexpected end of certificate");
    };
    auto fail = [&](const std::string& what) -> CertificateParseError {
        return CertificateParseError("line " + std::to_string(lineno) + ": " + what);
    };
    auto keyed = [&](const std::string& key) {
        std::string l = next();
        if (l.rfind(key + " ", 0) != 0) throw fail("expected '" + key + "'");
        return l.substr(key.size() + 1);
    };
    auto count = [&](const std::string& key) {
        std::string v = keyed(key);
        try {
            long c = std::stol(v);
            if (c < 0 || c > 10'000'000) throw fail("bad count");
            return static_cast<std::size_t>(c);
        } catch (const std::logic_error&) {
            throw fail("bad count");
        }
    };
    try {
        if (next() != "epicert-certificate 1") throw fail("bad header");
        Certificate c;
        keyed("problem");
        c.kind = parse_kind(keyed("kind"));
        c.m = std::stoi(keyed("m"));
        c.n = std::stoi(keyed("n"));
        std::size_t nb = count("basis");
        for (std::size_t i = 0; i < nb; ++i) {
            DiffForm f = parse_form(next());
            if (f.size() != 1 || f.leading_coeff() != 1) throw fail("bad basis monomial");
            c.basis.push_back(f.leading_monomial());
        }
        std::size_t np = count("params");
        for (std::size_t i = 0; i < np; ++i) {
            std::istringstream ls(next());
            std::string name, v;
            if (!(ls >> name >> v)) throw fail("bad parameter line");
            c.params.emplace_back(name, parse_rational(v));
        }
        std::size_t nblocks = count("blocks");
        for (std::size_t k = 0; k < nblocks; ++k) {
            if (keyed("block") != std::to_string(k)) throw fail("block index");
            CertificateBlock b;
            std::size_t nm = count("multipliers");
            for (std::size_t i = 0; i < nm; ++i) {
                std::string l = next();
                auto sp = l.find(' ');
                if (sp == std::string::npos) throw fail("bad multiplier line");
                b.multipliers.emplace_back(parse_rational(l.substr(0, sp)), parse_provenance(l.substr(sp + 1)));
            }
            std::size_t ns = count("sos");
            for (std::size_t i = 0; i < ns; ++i) {
                std::istringstream ls(next());
                std::string tok;
                SosTerm t;
                if (!(ls >> tok)) throw fail("bad sos line");
                t.c = parse_rational(tok);
                if (!(ls >> tok) || tok != ":") throw fail("bad sos line");
                while (ls >> tok) t.l.push_back(parse_rational(tok));
                b.sos.push_back(std::move(t));
            }
            c.blocks.push_back(std::move(b));
        }
        if (next() != "end") throw fail("expected end");
        return c;
    } catch (const CertificateParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw fail(e.what());
    }
}

}  // namespace epicert
