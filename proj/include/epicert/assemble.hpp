#pragma once

#include "reduction.hpp"
#include "sdp.hpp"

#include <string>
#include <vector>

namespace epicert {

using RatMatrix = std::vector<std::vector<Rational>>;

// Exact data of the Gram problem: G_k(y) = C_k - sum_i y_i A_{i,k}, all as
// quadratic forms over the pair indices of a common basis.
struct ExactSdp {
    QuadBasis basis;
    std::vector<SparseVec> C;
    struct Var {
        std::string name;
        std::vector<std::pair<int, SparseVec>> blocks;
    };
    std::vector<Var> vars;
    std::vector<std::string> params;  // names of shared target parameters (first vars)

    int blocks() const { return static_cast<int>(C.size()); }

    RatMatrix matrix(const SparseVec& q) const
    {
        const int N = basis.size();
        RatMatrix M(N, std::vector<Rational>(N, Rational(0)));
        for (const auto& [idx, c] : q) {
            auto [i, j] = basis.pair_of(idx);
            if (i == j)
                M[i][i] += c;
            else {
                Rational h = c / 2;
                M[i][j] += h;
                M[j][i] += h;
            }
        }
        return M;
    }

    SparseVec gram_vector(int k, const std::vector<Rational>& y) const
    {
        std::map<int, Rational> acc;
        for (const auto& [idx, c] : C[k]) acc[idx] += c;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (y[i] == 0) continue;
            for (const auto& [kk, q] : vars[i].blocks)
                if (kk == k)
                    for (const auto& [idx, c] : q) acc[idx] -= y[i] * c;
        }
        SparseVec v;
        for (auto& [idx, c] : acc)
            if (c != 0) v.emplace_back(idx, c);
        return v;
    }

    RatMatrix gram(int k, const std::vector<Rational>& y) const { return matrix(gram_vector(k, y)); }

    SdpProblem numeric() const
    {
        SdpProblem P;
        for (const auto& c : C) {
            RatMatrix M = matrix(c);
            Eigen::MatrixXd D(M.size(), M.size());
            for (std::size_t i = 0; i < M.size(); ++i)
                for (std::size_t j = 0; j < M.size(); ++j) D(i, j) = M[i][j].get_d();
            P.add_block(D);
        }
        for (const auto& v : vars) {
            SdpVariable sv;
            sv.name = v.name;
            for (const auto& [k, q] : v.blocks) {
                std::vector<SymEntry> es;
                for (const auto& [idx, c] : q) {
                    auto [i, j] = basis.pair_of(idx);
                    es.push_back({i, j, i == j ? c.get_d() : c.get_d() / 2});
                }
                sv.blocks.emplace_back(k, std::move(es));
            }
            P.vars.push_back(std::move(sv));
        }
        return P;
    }
};

// Quadratic data of one target block after elimination: base plus parameter parts.
struct QuadTarget {
    SparseVec base;
    std::vector<SparseVec> params;
};

// Blocks share the parameters; each block gets its own copy of the Step 4 multipliers.
inline ExactSdp assemble(const Reduction& red, const std::vector<QuadTarget>& targets,
                         const std::vector<std::string>& param_names = {})
{
    ExactSdp s;
    s.basis = red.basis();
    s.params = param_names;
    for (std::size_t p = 0; p < param_names.size(); ++p) {
        ExactSdp::Var v;
        v.name = param_names[p];
        for (std::size_t k = 0; k < targets.size(); ++k) {
            SparseVec q = targets[k].params.at(p);
            for (auto& [idx, c] : q) c = -c;
            if (!q.empty()) v.blocks.emplace_back(static_cast<int>(k), std::move(q));
        }
        s.vars.push_back(std::move(v));
    }
    for (std::size_t k = 0; k < targets.size(); ++k) {
        s.C.push_back(targets[k].base);
        for (std::size_t i = 0; i < red.sdp_rows().size(); ++i) {
            ExactSdp::Var v;
            v.name = "y" + std::to_string(k) + "_" + std::to_string(i);
            v.blocks.emplace_back(static_cast<int>(k), red.sdp_rows()[i]);
            s.vars.push_back(std::move(v));
        }
    }
    return s;
}

}  // namespace epicert
