#pragma once

#include "assemble.hpp"
#include "certificate.hpp"
#include "constraints.hpp"
#include "reduction.hpp"
#include "sdp.hpp"
#include "targets.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace epicert {

struct ProveOptions {
    double tol = 1e-8;
    double margin = 1e-7;
    int max_iters = 500;
    unsigned seed = 0;
    std::vector<Integer> den_ladder{Integer(1000), Integer(1000000), Integer(1000000000)};
    std::size_t common_denominator_above = 400;
    std::string sdpa_path;
    bool verbose = false;
};

enum class ProveStatus { Proved, NoCertificate, RoundingFailed, SolverFailure };

inline const char* to_string(ProveStatus s)
{
    switch (s) {
    case ProveStatus::Proved: return "proved";
    case ProveStatus::NoCertificate: return "no_certificate";
    case ProveStatus::RoundingFailed: return "rounding_failed";
    case ProveStatus::SolverFailure: return "solver_failure";
    }
    return "";
}

struct ProveReport {
    ProveStatus status = ProveStatus::SolverFailure;
    double lambda = 0;
    SdpStatus sdp_status = SdpStatus::NumericalFailure;
    int iterations = 0;
    ReductionStats stats;
    std::string rounding;
    std::string message;
    double seconds = 0;
    std::optional<Certificate> certificate;
};

// Everything up to the numerical SDP: constraint pools, split, reduced targets.
struct Prepared {
    TargetProblem target;
    std::vector<Constraint> suite;
    std::vector<Constraint> pool;
    std::optional<Reduction> reduction;
    std::vector<QuadTarget> quad_targets;
    std::optional<ExactSdp> exact;
    std::string error;
};

inline std::vector<Constraint> suite_for(const TargetProblem& tp)
{
    switch (tp.kind) {
    case TargetKind::Dmn: return constraint_suite(tp.m, tp.n);
    case TargetKind::CostaConcrete: return tp.n == 1 ? ibp_constraints(2, 1, true) : constraint_suite(2, tp.n);
    case TargetKind::CostaGeneral: return pair_family_constraints();
    }
    return {};
}

inline Prepared prepare(const TargetProblem& tp)
{
    Prepared pr;
    pr.target = tp;
    pr.suite = suite_for(tp);
    pr.pool = reduction_pool(pr.suite);
    pr.reduction.emplace(pr.pool, QuadBasis(tp.m, tp.n), pr.suite.size());
    for (const auto& block : tp.sos_targets()) {
        QuadTarget qt;
        auto base = pr.reduction->eliminate(block.base);
        if (!base) {
            pr.error = "target is not quadratic after elimination";
            return pr;
        }
        qt.base = *base;
        for (const auto& [name, f] : block.params) {
            auto q = pr.reduction->eliminate(f);
            if (!q) {
                pr.error = "parameter form " + name + " is not quadratic after elimination";
                return pr;
            }
            qt.params.push_back(*q);
        }
        pr.quad_targets.push_back(std::move(qt));
    }
    pr.exact = assemble(*pr.reduction, pr.quad_targets, tp.param_names);
    return pr;
}

namespace detail {

inline std::optional<std::vector<std::vector<SosTerm>>> exact_sos(const ExactSdp& s, const std::vector<Rational>& y)
{
    std::vector<std::vector<SosTerm>> out;
    for (int k = 0; k < s.blocks(); ++k) {
        auto ldl = rational_ldl(s.gram(k, y));
        if (!ldl.psd) return std::nullopt;
        out.push_back(std::move(ldl.terms));
    }
    return out;
}

}  // namespace detail

inline ProveReport prove(const TargetProblem& tp, const ProveOptions& opt = {})
{
    auto t0 = std::chrono::steady_clock::now();
    ProveReport rep;
    auto done = [&]() {
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    };
    Prepared pr = prepare(tp);
    rep.stats = pr.reduction->stats();
    if (!pr.error.empty()) {
        rep.status = ProveStatus::NoCertificate;
        rep.message = pr.error;
        return done();
    }
    const ExactSdp& ex = *pr.exact;
    SdpProblem P = ex.numeric();
    if (!opt.sdpa_path.empty()) {
        std::ofstream f(opt.sdpa_path);
        f << to_sdpa(P);
    }
    SdpOptions so;
    so.tol = opt.tol;
    so.max_iters = opt.max_iters;
    so.verbose = opt.verbose;
    SdpResult res = solve_max_margin(P, so);
    rep.lambda = res.lambda;
    rep.sdp_status = res.status;
    rep.iterations = res.iterations;
    if (res.lambda < -opt.margin) {
        rep.status = res.status == SdpStatus::Optimal ? ProveStatus::NoCertificate : ProveStatus::SolverFailure;
        rep.message = "maximal margin is negative";
        return done();
    }

    std::optional<std::vector<Rational>> y;
    std::optional<std::vector<std::vector<SosTerm>>> sos;
    const bool common = res.y.size() > opt.common_denominator_above;
    if (res.lambda > opt.margin) {
        for (const auto& bound : opt.den_ladder) {
            auto cand = common ? rationalize_common(res.y, bound) : rationalize(res.y, bound);
            sos = detail::exact_sos(ex, cand);
            if (sos) {
                y = std::move(cand);
                rep.rounding = std::string(common ? "common denominator " : "continued fraction ") + bound.get_str();
                break;
            }
        }
    }
    if (!y) {
        for (const auto& bound : opt.den_ladder) {
            auto cand = facial_round(ex, res.G, res.y, bound);
            if (!cand) continue;
            sos = detail::exact_sos(ex, *cand);
            if (sos) {
                y = std::move(cand);
                rep.rounding = "facial reduction " + bound.get_str();
                break;
            }
        }
    }
    if (!y) {
        rep.status = ProveStatus::RoundingFailed;
        rep.message = "no exact PSD Gram matrix found on the denominator ladder";
        return done();
    }
    std::vector<Rational> params(y->begin(), y->begin() + static_cast<long>(tp.param_names.size()));
    auto cert = build_certificate(tp, pr.reduction->basis(), pr.pool, params, *sos);
    if (!cert) {
        rep.status = ProveStatus::RoundingFailed;
        rep.message = "residual is outside the constraint span";
        return done();
    }
    auto v = verify(*cert);
    if (!v.ok) {
        rep.status = ProveStatus::RoundingFailed;
        rep.message = "certificate failed verification: " + v.message;
        return done();
    }
    rep.status = ProveStatus::Proved;
    rep.certificate = std::move(cert);
    return done();
}

}  // namespace epicert
