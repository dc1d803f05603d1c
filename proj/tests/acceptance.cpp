#include <epicert/epicert.hpp>

#include "golden.hpp"

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace epicert;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects mismatches; one summary line is printed per criterion.
struct Report {
    std::vector<std::string> failures;
    std::ostringstream info;

    void expect(bool ok, const std::string& what)
    {
        if (!ok) failures.push_back(what);
    }
    bool ok() const { return failures.empty(); }
};

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

// ---- 1

void basis_sizes(Report& r)
{
    struct Row {
        const char* name;
        int m, n;
        int vars;
    };
    const Row rows[] = {{"D(3,1)", 3, 1, 3},  {"D(4,1)", 4, 1, 5},  {"D(5,1)", 5, 1, 7}, {"D(3,2)", 3, 2, 14},
                        {"D(3,3)", 3, 3, 38}, {"D(3,4)", 3, 4, 80}, {"D(4,2)", 4, 2, 80}, {"Costa", 2, 2, 6}};
    for (const auto& row : rows) {
        auto t0 = Clock::now();
        int got = quad_basis(row.m, row.n).size();
        double dt = seconds_since(t0);
        r.expect(got == row.vars, std::string(row.name) + " Vars " + std::to_string(got) + " != " + std::to_string(row.vars));
        r.expect(dt < 1.0, std::string(row.name) + " took " + fmt(dt) + " s");
    }
}

// ---- 2

void constraint_counts(Report& r)
{
    struct Row {
        int m, n;
        std::size_t raw, intrinsic, total, n2;
        double limit;
    };
    // total = C1 + intrinsic; 0 where no total is listed
    const Row rows[] = {{3, 1, 6, 0, 0, 2, 60},          {4, 1, 14, 1, 0, 8, 60},      {5, 1, 52, 3, 0, 16, 60},
                        {3, 2, 143, 15, 0, 63, 60},      {3, 3, 1029, 189, 539, 512, 60}, {3, 4, 3172, 1080, 2200, 1966, 600},
                        {4, 2, 771, 182, 0, 417, 600}};
    for (const auto& row : rows) {
        auto t0 = Clock::now();
        Prepared pr = prepare(dmn_target(row.m, row.n));
        double dt = seconds_since(t0);
        const auto& s = pr.reduction->stats();
        std::string id = pr.target.id();
        r.expect(s.raw == row.raw, id + " N1 " + std::to_string(s.raw));
        r.expect(s.intrinsic == row.intrinsic, id + " intrinsic " + std::to_string(s.intrinsic));
        r.expect(row.total == 0 || s.c1 + s.intrinsic == row.total, id + " total " + std::to_string(s.c1 + s.intrinsic));
        r.expect(s.n2 == row.n2, id + " N2 " + std::to_string(s.n2));
        r.expect(dt < row.limit, id + " took " + fmt(dt) + " s");
    }
}

// ---- 3

void golden_containment(Report& r)
{
    using golden::Sum;
    struct Row {
        const char* file;
        const char* letters;
        int m, n;
        Sum sum;
        int expected_total;
    };
    const Row rows[] = {{"univariate_order3.tex", "", 3, 1, Sum::None, 6},
                        {"univariate_order4.tex", "", 4, 1, Sum::None, 14},
                        {"two_index_family.tex", "ab", 2, 2, Sum::None, -1},
                        {"gradient_order3.tex", "abc", 3, 2, Sum::All, 6},
                        {"gradient_lift_order3.tex", "abc", 3, 2, Sum::All, 2},
                        {"pair_lift_order3.tex", "abc", 3, 3, Sum::LastLetter, -1}};
    int forms = 0;
    for (const auto& row : rows) {
        auto res = golden::check(row.file, row.letters, row.n, row.sum, constraint_suite(row.m, row.n));
        forms += res.total;
        for (const auto& name : res.missing) r.failures.push_back(name + " missing");
        r.expect(row.expected_total < 0 || res.total == row.expected_total,
                 std::string(row.file) + " parsed " + std::to_string(res.total) + " forms");
    }
    auto keys = golden::scalar_keys(pair_family_constraints());
    int listed = 0;
    for (const auto& e : latex::load(golden::data("two_index_family.tex"))) {
        ++listed;
        r.expect(keys.count(to_string(latex::parse(e.tex, {{'a', 0}, {'b', 1}}).normalized(), kMaxDim)) > 0,
                 "two-letter " + e.name + " missing from the symmetric pair pool");
    }
    r.expect(listed == 17, "expected 17 two-letter families");
    r.info << forms << " listed forms";
}

// ---- 4

DiffForm quad(const QuadBasis& qb, std::initializer_list<std::tuple<int, int, Rational>> entries)
{
    DiffForm f;
    for (const auto& [i, j, c] : entries) f.add(qb.monomials()[i - 1].times(qb.monomials()[j - 1]), c);
    return f;
}

bool certify(Report& r, const TargetProblem& tp, const std::vector<Rational>& params,
             const std::vector<std::vector<SosTerm>>& sos)
{
    Prepared pr = prepare(tp);
    auto cert = build_certificate(tp, pr.reduction->basis(), pr.pool, params, sos);
    if (!cert) {
        r.failures.push_back(tp.id() + ": residual outside the constraint span");
        return false;
    }
    auto text = serialize(*cert);
    auto v = verify(parse_certificate(text));
    r.expect(v.ok, tp.id() + ": " + v.message);
    return v.ok;
}

void univariate_order_three(Report& r)
{
    QuadBasis qb(3, 1);
    DiffForm F = quad(qb, {{1, 1, Rational(1, 2)}, {1, 2, Rational(-1)}, {2, 2, Rational(-1, 2)}, {3, 3, Rational(3, 5)}});
    DiffForm R1 = quad(qb, {{2, 3, Rational(5)}, {3, 3, Rational(-4)}});
    DiffForm R2 = quad(qb, {{1, 3, Rational(1)}, {2, 2, Rational(3)}, {3, 3, Rational(-12, 5)}});
    std::vector<SosTerm> sos{
        {Rational(1, 2036162), {Rational(1009), Rational(-1009), Rational(407)}},
        {Rational("1/1784109085952"), {Rational(0), Rational(612256), Rational(-486877)}},
        {Rational("69485907702371/9000830338627840"), {Rational(0), Rational(0), Rational(1)}},
    };
    DiffForm res = F - Rational(213, 1444) * R1 - Rational(-407, 1009) * R2 - sos_expand(qb.monomials(), sos);
    r.expect(res.is_zero(), "D(3,1) listed identity has residual");
    Prepared pr = prepare(dmn_target(3, 1));
    r.expect(pr.reduction->basis().expand(pr.quad_targets[0].base) == F, "D(3,1) reduced target differs");
    certify(r, dmn_target(3, 1), {}, {sos});
}

void univariate_order_four(Report& r)
{
    QuadBasis qb(4, 1);
    DiffForm F = quad(qb, {{1, 1, Rational(1, 2)}, {1, 3, Rational(-1)}, {2, 2, Rational(-2)}, {3, 3, Rational(5, 6)},
                           {3, 4, Rational(-10)}, {4, 4, Rational(18)}, {5, 5, Rational(-45, 7)}});
    std::vector<DiffForm> R{
        quad(qb, {{4, 5, Rational(7)}, {5, 5, Rational(-6)}}),
        quad(qb, {{2, 3, Rational(3)}, {3, 3, Rational(1)}, {3, 4, Rational(-3)}}),
        quad(qb, {{1, 2, Rational(2)}, {1, 3, Rational(-1, 2)}, {2, 2, Rational(-2)}, {3, 3, Rational(-1, 3)}, {3, 4, Rational(1)}}),
        quad(qb, {{2, 4, Rational(2)}, {3, 4, Rational(3)}, {4, 4, Rational(-4)}}),
        quad(qb, {{1, 5, Rational(1)}, {3, 4, Rational(-6)}, {4, 4, Rational(28)}, {5, 5, Rational(-120, 7)}}),
        quad(qb, {{2, 5, Rational(1)}, {4, 4, Rational(5)}, {5, 5, Rational(-30, 7)}}),
        quad(qb, {{1, 4, Rational(1)}, {2, 2, Rational(1)}, {3, 3, Rational(-2, 3)}, {3, 4, Rational(13, 2)}, {4, 4, Rational(-6)}}),
        quad(qb, {{3, 5, Rational(1)}, {4, 4, Rational(-1)}}),
    };
    const std::vector<Rational> p{Rational(100, 779), Rational(-131, 465), Rational(643, 1030), Rational(251, 243),
                                  Rational(127, 264), Rational(-108, 191), Rational(-1037, 640), Rational(-177, 496)};
    const std::vector<Rational> c{
        Rational(1, 2), Rational(3035889, 33948800), Rational("187043606491/32053482761280"),
        Rational("34954092290170394422572362033/1201809187649038672153249873920"),
        Rational("13282901500034025857972998812856415717525/23595304673035248961784746798960118147608956")};
    const std::vector<std::vector<Rational>> e{
        {Rational(1), Rational(-643, 515), Rational(-1417, 2060), Rational(1037, 640), Rational(-127, 264)},
        {Rational(0), Rational(1), Rational(-2397232, 31370853), Rational(-353185661, 1475442054),
         Rational("-3763912520/19135208367")},
        {Rational(0), Rational(0), Rational(1), Rational("-26403161591590331/7999480962407088"),
         Rational("2349867732846895/1178935851712773")},
        {Rational(0), Rational(0), Rational(0), Rational(1),
         Rational("-23761583089169700449786558901840/27229237894042737255183870023707")},
        {Rational(0), Rational(0), Rational(0), Rational(0), Rational(1)}};
    std::vector<SosTerm> sos;
    for (int i = 0; i < 5; ++i) sos.push_back({c[i], e[i]});
    DiffForm res = F - sos_expand(qb.monomials(), sos);
    for (int i = 0; i < 8; ++i) res -= p[i] * R[i];
    r.expect(res.is_zero(), "D(4,1) listed identity has residual");
    Prepared pr = prepare(dmn_target(4, 1));
    r.expect(pr.reduction->basis().expand(pr.quad_targets[0].base) == F, "D(4,1) reduced target differs");
    certify(r, dmn_target(4, 1), {}, {sos});
}

void costa_one(Report& r)
{
    DiffForm p = DiffForm::p(), f1 = DiffForm::d(Derivative({1})), f2 = DiffForm::d(Derivative({2})),
             f3 = DiffForm::d(Derivative({3}));
    DiffForm R1 = p * p * f1 * f3 + p * p * f2 * f2 - p * f1 * f1 * f2;
    DiffForm R2 = Rational(3) * p * f1 * f1 * f2 - Rational(2) * f1 * f1 * f1 * f1;
    DiffForm J = Rational(2) * p * p * f1 * f3 + Rational(2) * p * p * f2 * f2 - Rational(5) * p * f1 * f1 * f2 +
                 Rational(2) * f1 * f1 * f1 * f1;
    r.expect(J - Rational(2) * R1 + R2 == DiffForm(), "Costa n=1 listed identity has residual");
    r.expect(J == Rational(2) * build_J2(1), "Costa n=1 listed form is not twice the target");
    certify(r, costa_target(1), {}, {{}});
}

void symmetric_pair(Report& r)
{
    DiffForm P = DiffForm::p();
    auto d = [](std::initializer_list<int> h) { return DiffForm::d(Derivative(h)); };
    DiffForm m1 = d({1, 0}) * d({1, 0}), m2 = d({0, 1}) * d({0, 1}), m3 = d({1, 0}) * d({0, 1});
    DiffForm m4 = P * d({1, 1}), m5 = P * d({2, 0}), m6 = P * d({0, 2});
    const Rational c1(0), c2(-1, 1314);
    DiffForm L1 = Rational(-1, 2) * (2 * c2 - 1) * (Rational(2) * m1 * m1 - Rational(3) * m1 * m5 + Rational(2) * m2 * m2 - Rational(3) * m2 * m6);
    DiffForm L2 = (c2 - c1 - Rational(1, 2)) * m1 * m6 + (c2 - c1 - Rational(1, 2)) * m2 * m5 - 4 * c2 * m3 * m3 +
                  (2 * c1 + 4 * c2 + 2) * m3 * m4 - (2 + 2 * c1) * m4 * m4 + 2 * c1 * m5 * m6;
    std::vector<DiffForm> R{m1 * m6 - Rational(2) * m3 * m3 + Rational(2) * m3 * m4,
                            Rational(-2) * m2 * m3 + m2 * m4 + Rational(2) * m3 * m6,
                            Rational(-2) * m2 * m2 + Rational(3) * m2 * m6,
                            Rational(-2) * m1 * m3 + m1 * m4 + Rational(2) * m3 * m5,
                            m2 * m5 - Rational(2) * m3 * m3 + Rational(2) * m3 * m4,
                            Rational(-2) * m2 * m3 + Rational(3) * m2 * m4,
                            Rational(-2) * m1 * m1 + Rational(3) * m1 * m5,
                            m1 * m2 - m3 * m3};
    std::vector<Rational> pk(8, Rational(0)), qk(8, Rational(0));
    pk[2] = pk[6] = Rational(-329, 657);
    qk[0] = qk[4] = Rational(-329, 657);
    DiffForm res1 = L1, res2 = L2 + Rational(2) * (m3 - m4) * (m3 - m4);
    for (int k = 0; k < 8; ++k) {
        res1 -= pk[k] * R[k];
        res2 -= qk[k] * R[k];
    }
    r.expect(res1.is_zero() && res2.is_zero(), "Problem II listed identity has residual");

    QuadBasis qb(2, 2);
    auto index = [&](const DiffForm& mono) {
        const auto& ms = qb.monomials();
        return static_cast<int>(std::find(ms.begin(), ms.end(), mono.leading_monomial()) - ms.begin());
    };
    std::vector<Rational> l(qb.size(), Rational(0));
    l[index(m3)] = 1;
    l[index(m4)] = -1;
    certify(r, costa_general_target(), {c1, c2}, {{}, {{Rational(2), l}}});
}

void paper_certificates(Report& r)
{
    auto t0 = Clock::now();
    univariate_order_three(r);
    univariate_order_four(r);
    costa_one(r);
    symmetric_pair(r);
    double dt = seconds_since(t0);
    r.expect(dt < 10, "took " + fmt(dt) + " s");
    r.info << fmt(dt) << " s";
}

// ---- 5

void end_to_end(Report& r)
{
    struct Row {
        TargetProblem tp;
        double limit;
    };
    const Row rows[] = {{dmn_target(3, 1), 300}, {dmn_target(4, 1), 300}, {costa_target(1), 300},
                        {costa_general_target(), 300}, {dmn_target(3, 2), 300}, {dmn_target(3, 3), 3600},
                        {dmn_target(3, 4), 3600}};
    for (const auto& row : rows) {
        ProveReport rep = prove(row.tp);
        std::string id = row.tp.id();
        r.info << id << " " << fmt(rep.seconds) << "s ";
        if (rep.status != ProveStatus::Proved) {
            r.failures.push_back(id + " " + to_string(rep.status) + ": " + rep.message);
            continue;
        }
        auto v = verify(parse_certificate(serialize(*rep.certificate)));
        r.expect(v.ok, id + " re-verification: " + v.message);
        r.expect(rep.seconds < row.limit, id + " took " + fmt(rep.seconds) + " s");
    }
}

// ---- 6

void negative(Report& r)
{
    for (auto tp : {dmn_target(5, 1), dmn_target(4, 2)}) {
        ProveReport rep = prove(tp);
        r.info << tp.id() << " lambda=" << rep.lambda << " ";
        r.expect(rep.status == ProveStatus::NoCertificate, tp.id() + " status " + to_string(rep.status));
        r.expect(rep.lambda < -1e-6, tp.id() + " lambda " + std::to_string(rep.lambda));
    }
}

// ---- 7

void oracle_suite(Report& r)
{
    auto t0 = Clock::now();
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> num(1, 30), den(1, 11);
    int checked = 0;
    for (auto [m, n] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 1}, std::pair{3, 2},
                        std::pair{3, 3}, std::pair{4, 1}}) {
        auto suite = constraint_suite(m, n);
        for (int s = 0; s < 3; ++s) {
            DiagonalGaussian g;
            for (int a = 0; a < n; ++a) g.variances.push_back(Rational(num(rng)) / den(rng));
            GaussianOracle o(g);
            for (const auto& c : suite) {
                ++checked;
                if (o.expectation(c.form, c.m) != 0)
                    r.failures.push_back("nonzero expectation: " + to_string(c.prov));
            }
        }
    }
    for (const Rational& v : {Rational(1), Rational(2), Rational(5, 3)})
        for (int m = 1; m <= 4; ++m)
            for (int n = 1; n <= 3; ++n)
                r.expect(gaussian_expectation(build_F(m, n), m, DiagonalGaussian::isotropic(n, v)) == isotropic_F_value(m, n, v),
                         "F(" + std::to_string(m) + "," + std::to_string(n) + ") at v=" + v.get_str());
    double dt = seconds_since(t0);
    r.expect(dt < 300, "took " + fmt(dt) + " s");
    r.info << checked << " constraint integrals, " << fmt(dt) << " s";
}

// ---- 8

RatMatrix ltdl(std::mt19937& rng, int n, bool indefinite)
{
    std::uniform_int_distribution<int> entry(-9, 9), den(1, 6), diag(0, 5);
    std::vector<std::vector<Rational>> L(n, std::vector<Rational>(n, Rational(0)));
    std::vector<Rational> D(n);
    for (int i = 0; i < n; ++i) {
        L[i][i] = 1;
        for (int j = 0; j < i; ++j) L[i][j] = Rational(entry(rng)) / den(rng);
        D[i] = Rational(diag(rng)) / den(rng);
    }
    if (indefinite) D[std::uniform_int_distribution<int>(0, n - 1)(rng)] = Rational(-1) / den(rng);
    RatMatrix A(n, std::vector<Rational>(n, Rational(0)));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            if (L[k][i] == 0 || D[k] == 0) continue;
            for (int j = 0; j < n; ++j) A[i][j] += L[k][i] * D[k] * L[k][j];
        }
    return A;
}

void exactness(Report& r)
{
    for (auto tp : {dmn_target(3, 1), dmn_target(4, 1), dmn_target(3, 2), costa_general_target()}) {
        Prepared pr = prepare(tp);
        auto targets = tp.sos_targets();
        for (std::size_t k = 0; k < targets.size(); ++k) {
            std::vector<DiffForm> parts{targets[k].base};
            std::vector<SparseVec> reduced{pr.quad_targets[k].base};
            for (std::size_t j = 0; j < targets[k].params.size(); ++j) {
                parts.push_back(targets[k].params[j].second);
                reduced.push_back(pr.quad_targets[k].params[j]);
            }
            for (std::size_t j = 0; j < parts.size(); ++j) {
                DiffForm diff = parts[j] - pr.reduction->basis().expand(reduced[j]);
                auto mu = express_in_span(pr.pool, diff);
                if (!mu) {
                    r.failures.push_back(tp.id() + " elimination residual outside span");
                    continue;
                }
                for (const auto& [x, prov] : *mu) diff.add_scaled(regenerate(prov), -x);
                r.expect(diff.is_zero(), tp.id() + " elimination residual nonzero");
            }
        }
        ProveReport rep = prove(tp);
        if (!rep.certificate) {
            r.failures.push_back(tp.id() + " not proved");
            continue;
        }
        std::string text = serialize(*rep.certificate);
        r.expect(serialize(parse_certificate(text)) == text, tp.id() + " serialization round trip");
    }
    std::mt19937 rng(8);
    int psd_ok = 0, witness_ok = 0;
    for (int t = 0; t < 100; ++t) {
        int n = 1 + t % 20;
        RatMatrix A = ltdl(rng, n, false);
        auto res = rational_ldl(A);
        bool ok = res.psd;
        if (ok) {
            RatMatrix B(n, std::vector<Rational>(n, Rational(0)));
            for (const auto& term : res.terms)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) B[i][j] += term.c * term.l[i] * term.l[j];
            ok = B == A;
        }
        psd_ok += ok;
        RatMatrix C = ltdl(rng, n, true);
        auto neg = rational_ldl(C);
        witness_ok += !neg.psd && quadratic_value(C, neg.witness) < 0;
    }
    r.expect(psd_ok == 100, std::to_string(psd_ok) + "/100 PSD reconstructions");
    r.expect(witness_ok == 100, std::to_string(witness_ok) + "/100 negative witnesses");
    r.info << psd_ok << " reconstructions, " << witness_ok << " witnesses";
}

const std::vector<std::pair<std::string, std::function<void(Report&)>>> kCriteria{
    {"basis sizes", basis_sizes},
    {"constraint counts", constraint_counts},
    {"golden constraints", golden_containment},
    {"listed certificates", paper_certificates},
    {"end-to-end proofs", end_to_end},
    {"negative instances", negative},
    {"Gaussian oracle", oracle_suite},
    {"exactness invariants", exactness},
};

bool run(int k)
{
    const auto& [name, fn] = kCriteria.at(k - 1);
    Report r;
    try {
        fn(r);
    } catch (const std::exception& e) {
        r.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << k << " " << name << ": " << (r.ok() ? "PASS" : "FAIL");
    std::string info = r.info.str();
    if (!info.empty()) std::cout << "  (" << info << ")";
    std::cout << "\n";
    for (const auto& f : r.failures) std::cout << "  " << f << "\n";
    return r.ok();
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc > 1) {
        int k = std::atoi(argv[1]);
        if (k < 1 || k > static_cast<int>(kCriteria.size())) {
            std::cerr << "usage: acceptance [1-" << kCriteria.size() << "]\n";
            return 2;
        }
        return run(k) ? 0 : 1;
    }
    bool all = true;
    for (int k = 1; k <= static_cast<int>(kCriteria.size()); ++k) all &= run(k);
    return all ? 0 : 1;
}
