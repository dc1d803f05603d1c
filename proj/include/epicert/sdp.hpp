#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace epicert {

struct SymEntry {
    int i = 0;
    int j = 0;
    double v = 0;
};

// One scalar unknown y and its coefficient matrices, block by block.
struct SdpVariable {
    std::string name;
    std::vector<std::pair<int, std::vector<SymEntry>>> blocks;  // upper triangle entries
};

// maximize lambda  s.t.  C_k - sum_i y_i A_{i,k} >= lambda * I  for every block k.
struct SdpProblem {
    std::vector<int> dims;
    std::vector<Eigen::MatrixXd> C;
    std::vector<SdpVariable> vars;

    int add_block(const Eigen::MatrixXd& c)
    {
        dims.push_back(static_cast<int>(c.rows()));
        C.push_back(c);
        return static_cast<int>(dims.size()) - 1;
    }
};

struct SdpOptions {
    double tol = 1e-8;
    int max_iters = 500;
    double lambda_cap = 1.0;  // relative to the scale of C
    bool verbose = false;
};

enum class SdpStatus { Optimal, MaxIterations, NumericalFailure };

inline const char* to_string(SdpStatus s)
{
    switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::MaxIterations: return "max_iterations";
    case SdpStatus::NumericalFailure: return "numerical_failure";
    }
    return "";
}

struct SdpResult {
    SdpStatus status = SdpStatus::NumericalFailure;
    double lambda = -std::numeric_limits<double>::infinity();
    std::vector<double> y;
    std::vector<Eigen::MatrixXd> G;  // C - sum y A per block
    std::vector<Eigen::MatrixXd> X;  // primal matrices per block
    int iterations = 0;
    double primal_infeasibility = 0;
    double dual_infeasibility = 0;
    double gap = 0;
};

namespace sdp_detail {

using Mat = Eigen::MatrixXd;

struct FullEntry {
    int r, s;
    double v;
};

struct Var {
    std::vector<std::pair<int, std::vector<FullEntry>>> blocks;
    bool identity = false;  // identity on every original block plus the cap block
};

inline double inner(const std::vector<FullEntry>& a, const Mat& B)
{
    double s = 0;
    for (const auto& e : a) s += e.v * B(e.s, e.r);
    return s;
}

inline void add_scaled(Mat& M, const std::vector<FullEntry>& a, double f)
{
    for (const auto& e : a) M(e.r, e.s) += f * e.v;
}

inline double max_step(const Mat& X, const Mat& dX)
{
    Eigen::LLT<Mat> llt(X);
    if (llt.info() != Eigen::Success) return 0;
    Mat L = llt.matrixL();
    Mat S = L.triangularView<Eigen::Lower>().solve(dX);
    S = L.triangularView<Eigen::Lower>().solve(S.transpose()).transpose();
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
    double mn = es.eigenvalues().minCoeff();
    return mn >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / mn;
}

}  // namespace sdp_detail

// Primal-dual infeasible interior point method, HKM direction with Mehrotra
// predictor-corrector. The lambda variable is capped by an extra 1x1 block.
inline SdpResult solve_max_margin(const SdpProblem& P, const SdpOptions& opt = {})
{
    using namespace sdp_detail;
    const int K = static_cast<int>(P.dims.size());
    const int nv = static_cast<int>(P.vars.size());
    const int nb = K + 1;
    std::vector<int> dims = P.dims;
    dims.push_back(1);

    double cscale = 0;
    for (const auto& c : P.C) cscale = std::max(cscale, c.norm());
    if (cscale == 0) cscale = 1;

    std::vector<Var> vars(nv + 1);
    std::vector<double> vscale(nv, 1.0);
    for (int i = 0; i < nv; ++i) {
        double nrm = 0;
        for (const auto& [k, es] : P.vars[i].blocks)
            for (const auto& e : es) nrm += (e.i == e.j ? 1 : 2) * e.v * e.v;
        nrm = std::sqrt(nrm);
        if (nrm == 0) nrm = 1;
        vscale[i] = nrm;
        for (const auto& [k, es] : P.vars[i].blocks) {
            std::vector<FullEntry> f;
            for (const auto& e : es) {
                f.push_back({e.i, e.j, e.v / nrm});
                if (e.i != e.j) f.push_back({e.j, e.i, e.v / nrm});
            }
            vars[i].blocks.emplace_back(k, std::move(f));
        }
    }
    vars[nv].identity = true;
    for (int k = 0; k < nb; ++k) {
        std::vector<FullEntry> f;
        for (int r = 0; r < dims[k]; ++r) f.push_back({r, r, 1.0});
        vars[nv].blocks.emplace_back(k, std::move(f));
    }
    const int m = nv + 1;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    b(nv) = 1.0;

    std::vector<Mat> C(nb);
    for (int k = 0; k < K; ++k) C[k] = P.C[k] / cscale;
    C[K] = Mat::Constant(1, 1, opt.lambda_cap);

    int ntot = 0;
    for (int d : dims) ntot += d;

    auto Aop = [&](const std::vector<Mat>& X) {
        Eigen::VectorXd r(m);
        for (int i = 0; i < m; ++i) {
            double s = 0;
            for (const auto& [k, es] : vars[i].blocks) s += inner(es, X[k]);
            r(i) = s;
        }
        return r;
    };
    auto ATop = [&](const Eigen::VectorXd& y) {
        std::vector<Mat> R(nb);
        for (int k = 0; k < nb; ++k) R[k] = Mat::Zero(dims[k], dims[k]);
        for (int i = 0; i < m; ++i)
            for (const auto& [k, es] : vars[i].blocks) add_scaled(R[k], es, y(i));
        return R;
    };
    auto dotm = [&](const std::vector<Mat>& A, const std::vector<Mat>& B) {
        double s = 0;
        for (int k = 0; k < nb; ++k) s += (A[k].array() * B[k].array()).sum();
        return s;
    };
    double cnorm = 0;
    for (const auto& c : C) cnorm += c.squaredNorm();
    cnorm = std::sqrt(cnorm);

    std::vector<Mat> X(nb), Z(nb);
    double xi = std::max(10.0, std::sqrt(static_cast<double>(ntot)));
    for (int k = 0; k < nb; ++k) {
        X[k] = Mat::Identity(dims[k], dims[k]) * xi;
        Z[k] = Mat::Identity(dims[k], dims[k]) * xi;
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    SdpResult res;
    res.status = SdpStatus::MaxIterations;
    for (int it = 0; it < opt.max_iters; ++it) {
        res.iterations = it;
        Eigen::VectorXd rp = b - Aop(X);
        std::vector<Mat> ATy = ATop(y);
        std::vector<Mat> Rd(nb);
        double rdn = 0;
        for (int k = 0; k < nb; ++k) {
            Rd[k] = C[k] - Z[k] - ATy[k];
            rdn += Rd[k].squaredNorm();
        }
        rdn = std::sqrt(rdn);
        double mu = dotm(X, Z) / ntot;
        double pobj = dotm(C, X), dobj = b.dot(y);
        res.primal_infeasibility = rp.norm() / (1 + b.norm());
        res.dual_infeasibility = rdn / (1 + cnorm);
        res.gap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
        if (opt.verbose)
            std::fprintf(stderr, "it %3d  pobj %+.10e  dobj %+.10e  pinf %.2e  dinf %.2e  gap %.2e\n", it, pobj, dobj,
                         res.primal_infeasibility, res.dual_infeasibility, res.gap);
        if (res.primal_infeasibility < opt.tol && res.dual_infeasibility < opt.tol && res.gap < opt.tol) {
            res.status = SdpStatus::Optimal;
            break;
        }

        std::vector<Mat> W(nb);
        bool ok = true;
        for (int k = 0; k < nb; ++k) {
            Eigen::LLT<Mat> llt(Z[k]);
            if (llt.info() != Eigen::Success) {
                ok = false;
                break;
            }
            W[k] = llt.solve(Mat::Identity(dims[k], dims[k]));
            W[k] = 0.5 * (W[k] + W[k].transpose());
        }
        if (!ok) {
            res.status = SdpStatus::NumericalFailure;
            break;
        }

        Mat M = Mat::Zero(m, m);
        for (int k = 0; k < nb; ++k) {
            std::vector<int> ids;
            std::vector<const std::vector<FullEntry>*> ents;
            for (int i = 0; i < m; ++i)
                for (const auto& [kk, es] : vars[i].blocks)
                    if (kk == k) {
                        ids.push_back(i);
                        ents.push_back(&es);
                    }
            const int n = dims[k];
            for (std::size_t jj = 0; jj < ids.size(); ++jj) {
                Mat WA = Mat::Zero(n, n);
                for (const auto& e : *ents[jj]) WA.col(e.s) += e.v * W[k].col(e.r);
                Mat B = WA * X[k];
                for (std::size_t ii = 0; ii <= jj; ++ii) {
                    double v = inner(*ents[ii], B);
                    M(ids[ii], ids[jj]) += v;
                    if (ii != jj) M(ids[jj], ids[ii]) += v;
                }
            }
        }
        M = 0.5 * (M + M.transpose());
        Eigen::LLT<Mat> Mllt(M);
        Eigen::LDLT<Mat> Mldlt;
        bool use_ldlt = Mllt.info() != Eigen::Success;
        if (use_ldlt) {
            double ridge = 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
            M.diagonal().array() += ridge;
            Mldlt.compute(M);
        }
        auto solveM = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
            return use_ldlt ? Eigen::VectorXd(Mldlt.solve(r)) : Eigen::VectorXd(Mllt.solve(r));
        };

        auto direction = [&](const std::vector<Mat>& Kt, std::vector<Mat>& dX, std::vector<Mat>& dZ,
                             Eigen::VectorXd& dy) {
            Eigen::VectorXd rhs = rp;
            std::vector<Mat> T(nb);
            for (int k = 0; k < nb; ++k) T[k] = W[k] * Rd[k] * X[k] - Kt[k];
            for (int i = 0; i < m; ++i)
                for (const auto& [k, es] : vars[i].blocks) rhs(i) += inner(es, T[k]);
            dy = solveM(rhs);
            std::vector<Mat> ATdy = ATop(dy);
            for (int k = 0; k < nb; ++k) {
                dZ[k] = Rd[k] - ATdy[k];
                Mat d = Kt[k] - W[k] * dZ[k] * X[k];
                dX[k] = 0.5 * (d + d.transpose());
            }
        };

        std::vector<Mat> dXa(nb), dZa(nb), Kt(nb);
        Eigen::VectorXd dya;
        for (int k = 0; k < nb; ++k) Kt[k] = -X[k];
        direction(Kt, dXa, dZa, dya);
        double ap = 1, ad = 1;
        for (int k = 0; k < nb; ++k) {
            ap = std::min(ap, max_step(X[k], dXa[k]));
            ad = std::min(ad, max_step(Z[k], dZa[k]));
        }
        double mu_aff = 0;
        for (int k = 0; k < nb; ++k)
            mu_aff += ((X[k] + ap * dXa[k]).array() * (Z[k] + ad * dZa[k]).array()).sum();
        mu_aff /= ntot;
        double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        for (int k = 0; k < nb; ++k)
            Kt[k] = W[k] * (sigma * mu * Mat::Identity(dims[k], dims[k]) - dZa[k] * dXa[k]) - X[k];
        std::vector<Mat> dX(nb), dZ(nb);
        Eigen::VectorXd dy;
        direction(Kt, dX, dZ, dy);
        double sp = std::numeric_limits<double>::infinity(), sd = sp;
        for (int k = 0; k < nb; ++k) {
            sp = std::min(sp, max_step(X[k], dX[k]));
            sd = std::min(sd, max_step(Z[k], dZ[k]));
        }
        const double gamma = 0.95;
        sp = std::min(1.0, gamma * sp);
        sd = std::min(1.0, gamma * sd);
        if (!(sp > 1e-14) || !(sd > 1e-14) || !dy.allFinite()) {
            res.status = SdpStatus::NumericalFailure;
            break;
        }
        for (int k = 0; k < nb; ++k) {
            X[k] += sp * dX[k];
            Z[k] += sd * dZ[k];
            X[k] = 0.5 * (X[k] + X[k].transpose());
            Z[k] = 0.5 * (Z[k] + Z[k].transpose());
        }
        y += sd * dy;
    }

    res.lambda = y(nv) * cscale;
    res.y.resize(nv);
    for (int i = 0; i < nv; ++i) res.y[i] = y(i) * cscale / vscale[i];
    res.G.resize(K);
    res.X.resize(K);
    for (int k = 0; k < K; ++k) {
        res.G[k] = P.C[k];
        res.X[k] = X[k];
    }
    for (int i = 0; i < nv; ++i)
        for (const auto& [k, es] : P.vars[i].blocks)
            for (const auto& e : es) {
                res.G[k](e.i, e.j) -= res.y[i] * e.v;
                if (e.i != e.j) res.G[k](e.j, e.i) -= res.y[i] * e.v;
            }
    return res;
}

// SDPA sparse format of the max-margin problem: variables y_1..y_N then lambda;
// minimize -lambda s.t. sum_i y_i F_i - F_0 >= 0 with F_0 = -C, F_i = -A_i,
// F_lambda = -I, plus the 1x1 cap block lambda <= cap.
inline std::string to_sdpa(const SdpProblem& P, double lambda_cap = 1.0)
{
    std::ostringstream os;
    os << std::setprecision(17);
    const int K = static_cast<int>(P.dims.size());
    const int nv = static_cast<int>(P.vars.size());
    os << "\"max-margin SOS problem\n";
    os << nv + 1 << "\n" << K + 1 << "\n";
    for (int k = 0; k < K; ++k) os << P.dims[k] << ' ';
    os << "1\n";
    for (int i = 0; i < nv; ++i) os << "0 ";
    os << "-1\n";
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < P.dims[k]; ++i)
            for (int j = i; j < P.dims[k]; ++j)
                if (P.C[k](i, j) != 0) os << 0 << ' ' << k + 1 << ' ' << i + 1 << ' ' << j + 1 << ' ' << -P.C[k](i, j) << "\n";
    os << 0 << ' ' << K + 1 << " 1 1 " << -lambda_cap << "\n";
    for (int v = 0; v < nv; ++v)
        for (const auto& [k, es] : P.vars[v].blocks)
            for (const auto& e : es)
                if (e.v != 0)
                    os << v + 1 << ' ' << k + 1 << ' ' << std::min(e.i, e.j) + 1 << ' ' << std::max(e.i, e.j) + 1 << ' '
                       << -e.v << "\n";
    for (int k = 0; k <= K; ++k)
        for (int i = 0; i < (k < K ? P.dims[k] : 1); ++i) os << nv + 1 << ' ' << k + 1 << ' ' << i + 1 << ' ' << i + 1 << " -1\n";
    return os.str();
}

// Inverse of to_sdpa; the lambda column and cap block are dropped.
inline SdpProblem parse_sdpa(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    std::vector<std::string> tokens;
    while (std::getline(is, line)) {
        if (!line.empty() && (line[0] == '"' || line[0] == '*')) continue;
        for (char& ch : line)
            if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
        std::istringstream ls(line);
        std::string t;
        while (ls >> t) tokens.push_back(t);
    }
    std::size_t p = 0;
    auto next = [&]() -> const std::string& {
        if (p >= tokens.size()) throw std::invalid_argument("truncated SDPA data");
        return tokens[p++];
    };
    int m = std::stoi(next());
    int nblocks = std::stoi(next());
    if (m < 1 || nblocks < 2) throw std::invalid_argument("SDPA header");
    std::vector<int> dims(nblocks);
    for (auto& d : dims) d = std::abs(std::stoi(next()));
    for (int i = 0; i < m; ++i) next();
    const int K = nblocks - 1;
    SdpProblem P;
    for (int k = 0; k < K; ++k) P.add_block(Eigen::MatrixXd::Zero(dims[k], dims[k]));
    P.vars.resize(m - 1);
    for (int v = 0; v < m - 1; ++v) P.vars[v].name = "y" + std::to_string(v + 1);
    std::vector<std::vector<std::vector<SymEntry>>> acc(m - 1, std::vector<std::vector<SymEntry>>(K));
    while (p < tokens.size()) {
        int mat = std::stoi(next()), blk = std::stoi(next()) - 1, i = std::stoi(next()) - 1, j = std::stoi(next()) - 1;
        double v = std::stod(next());
        if (blk < 0 || blk > K || mat < 0 || mat > m) throw std::invalid_argument("SDPA entry out of range");
        if (blk == K || mat == m) continue;
        if (i < 0 || j < 0 || i >= dims[blk] || j >= dims[blk]) throw std::invalid_argument("SDPA index out of range");
        if (mat == 0) {
            P.C[blk](i, j) = -v;
            P.C[blk](j, i) = -v;
        } else {
            acc[mat - 1][blk].push_back({std::min(i, j), std::max(i, j), -v});
        }
    }
    for (int v = 0; v < m - 1; ++v)
        for (int k = 0; k < K; ++k)
            if (!acc[v][k].empty()) P.vars[v].blocks.emplace_back(k, std::move(acc[v][k]));
    return P;
}

}  // namespace epicert
