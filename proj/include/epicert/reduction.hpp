#pragma once

#include "constraints.hpp"
#include "linalg.hpp"
#include "targets.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace epicert {

// Degree m, total order m monomials m_1 > m_2 > ...; quadratic monomials of degree 2m
// are indexed by canonical pairs (i, j), i <= j, with the smallest i.
class QuadBasis {
public:
    QuadBasis() = default;
    QuadBasis(int m, int n) : QuadBasis(enumerate_monomials(n, m, m, m), n) {}

    QuadBasis(std::vector<Monomial> basis, int n) : basis_(std::move(basis)), n_(n)
    {
        const int N = size();
        for (int i = 0; i < N; ++i)
            for (int j = i; j < N; ++j) {
                Monomial q = basis_[i].times(basis_[j]);
                canon_.try_emplace(q, pair_index(i, j));
                groups_[q].push_back(pair_index(i, j));
            }
    }

    int size() const { return static_cast<int>(basis_.size()); }
    int dim() const { return n_; }
    const std::vector<Monomial>& monomials() const { return basis_; }
    int pair_count() const { return size() * (size() + 1) / 2; }

    int pair_index(int i, int j) const
    {
        if (i > j) std::swap(i, j);
        return i * size() - i * (i - 1) / 2 + (j - i);
    }

    std::pair<int, int> pair_of(int idx) const
    {
        int i = 0;
        while (idx >= size() - i) {
            idx -= size() - i;
            ++i;
        }
        return {i, i + idx};
    }

    bool is_quadratic(const Monomial& q) const { return canon_.count(q) > 0; }

    std::optional<int> canonical(const Monomial& q) const
    {
        auto it = canon_.find(q);
        if (it == canon_.end()) return std::nullopt;
        return it->second;
    }

    const std::map<Monomial, std::vector<int>>& groups() const { return groups_; }

    // Quadratic form sum q_ij m_i m_j as a sparse vector over pair indices.
    std::optional<SparseVec> quadratize(const DiffForm& f) const
    {
        std::map<int, Rational> acc;
        for (const auto& [mono, c] : f.terms()) {
            auto idx = canonical(mono);
            if (!idx) return std::nullopt;
            acc[*idx] += c;
        }
        SparseVec v;
        for (auto& [k, c] : acc)
            if (c != 0) v.emplace_back(k, c);
        return v;
    }

    DiffForm expand(const SparseVec& q) const
    {
        DiffForm f;
        for (const auto& [idx, c] : q) {
            auto [i, j] = pair_of(idx);
            f.add(basis_[i].times(basis_[j]), c);
        }
        return f;
    }

    DiffForm linear(const std::vector<Rational>& l) const
    {
        DiffForm f;
        for (int i = 0; i < size() && i < static_cast<int>(l.size()); ++i) f.add(basis_[i], l[i]);
        return f;
    }

private:
    std::vector<Monomial> basis_;
    int n_ = 0;
    std::map<Monomial, int> canon_;
    std::map<Monomial, std::vector<int>> groups_;
};

struct ReductionStats {
    std::size_t raw = 0;
    std::size_t c1 = 0;
    std::size_t c2 = 0;
    std::size_t intrinsic = 0;
    std::size_t n2 = 0;
    std::size_t vars = 0;
};

// Step 3-4: eliminate non-quadratic monomials from the constraint pool.
class Reduction {
public:
    // raw: size of the suite the pool came from (defaults to the pool size).
    Reduction(const std::vector<Constraint>& pool, QuadBasis qb, std::size_t raw = 0) : qb_(std::move(qb))
    {
        std::vector<Monomial> nonquad, quad;
        std::set<Monomial, std::greater<>> all;
        for (const auto& c : pool)
            for (const auto& [mono, x] : c.form.terms()) all.insert(mono);
        for (const auto& mono : all) (qb_.is_quadratic(mono) ? quad : nonquad).push_back(mono);
        columns_ = nonquad;
        columns_.insert(columns_.end(), quad.begin(), quad.end());
        for (int i = 0; i < static_cast<int>(columns_.size()); ++i) col_of_[columns_[i]] = i;
        first_quad_ = static_cast<int>(nonquad.size());

        for (const auto& c : pool) rref_.insert(to_row(c.form));
        rref_.make_reduced();
        stats_.raw = raw ? raw : pool.size();
        for (const auto& [lead, row] : rref_.rows()) {
            if (lead >= first_quad_) {
                c1_.push_back(*qb_.quadratize(from_row(row)));
                ++stats_.c1;
            } else {
                c2_.insert(row);
                ++stats_.c2;
            }
        }
        for (const auto& [mono, g] : qb_.groups())
            for (std::size_t a = 0; a < g.size(); ++a)
                for (std::size_t b = a + 1; b < g.size(); ++b) intrinsic_.push_back({{g[a], Rational(1)}, {g[b], Rational(-1)}});
        stats_.intrinsic = intrinsic_.size();

        Echelon span;
        for (const auto* group : {&c1_, &intrinsic_})
            for (const auto& v : *group)
                if (span.insert(v)) sdp_rows_.push_back(v);
        stats_.n2 = sdp_rows_.size();
        stats_.vars = static_cast<std::size_t>(qb_.size());
    }

    const QuadBasis& basis() const { return qb_; }
    const ReductionStats& stats() const { return stats_; }
    const std::vector<SparseVec>& c1() const { return c1_; }
    const std::vector<SparseVec>& intrinsic() const { return intrinsic_; }
    const std::vector<SparseVec>& sdp_rows() const { return sdp_rows_; }

    std::vector<DiffForm> c2_forms() const
    {
        std::vector<DiffForm> r;
        for (const auto& [lead, row] : c2_.rows()) r.push_back(from_row(row));
        return r;
    }

    std::vector<DiffForm> c1_forms() const
    {
        std::vector<DiffForm> r;
        for (const auto& v : c1_) r.push_back(qb_.expand(v));
        return r;
    }

    // Reduce a target by the reduced constraint rows; nullopt when a
    // non-quadratic monomial survives. With only_c2 the quadratic rows are not used.
    std::optional<SparseVec> eliminate(const DiffForm& target, bool only_c2 = false) const
    {
        DiffForm rest;
        SparseVec row;
        for (const auto& [mono, c] : target.terms()) {
            auto it = col_of_.find(mono);
            if (it == col_of_.end())
                rest.add(mono, c);
            else
                row.emplace_back(it->second, c);
        }
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        SparseVec red = only_c2 ? c2_.reduce(row) : rref_.reduce(row);
        DiffForm out = from_row(red) + rest;
        return qb_.quadratize(out);
    }

    std::optional<DiffForm> eliminate_form(const DiffForm& target, bool only_c2 = false) const
    {
        auto q = eliminate(target, only_c2);
        if (!q) return std::nullopt;
        return qb_.expand(*q);
    }

private:
    SparseVec to_row(const DiffForm& f) const
    {
        SparseVec v;
        for (const auto& [mono, c] : f.terms()) v.emplace_back(col_of_.at(mono), c);
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return v;
    }

    DiffForm from_row(const SparseVec& v) const
    {
        DiffForm f;
        for (const auto& [c, x] : v) f.add(columns_[c], x);
        return f;
    }

    QuadBasis qb_;
    std::vector<Monomial> columns_;
    std::map<Monomial, int> col_of_;
    int first_quad_ = 0;
    Echelon rref_;
    Echelon c2_;
    std::vector<SparseVec> c1_;
    std::vector<SparseVec> intrinsic_;
    std::vector<SparseVec> sdp_rows_;
    ReductionStats stats_;
};

inline QuadBasis quad_basis(int m, int n) { return QuadBasis(m, n); }

}  // namespace epicert
