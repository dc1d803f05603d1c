#pragma once

#include "rational.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace epicert {

// Sparse rational vector, entries sorted by column, no zeros.
using SparseVec = std::vector<std::pair<int, Rational>>;

namespace detail {

using WorkRow = std::map<int, Rational>;

inline WorkRow to_work(const SparseVec& v)
{
    WorkRow w;
    for (const auto& [c, x] : v)
        if (x != 0) w[c] += x;
    return w;
}

inline SparseVec to_sparse(const WorkRow& w)
{
    SparseVec v;
    v.reserve(w.size());
    for (const auto& [c, x] : w)
        if (x != 0) v.emplace_back(c, x);
    return v;
}

inline void axpy(WorkRow& w, const Rational& f, const SparseVec& row)
{
    for (const auto& [c, x] : row) {
        auto [it, inserted] = w.try_emplace(c, 0);
        it->second -= f * x;
        if (it->second == 0) w.erase(it);
    }
}

}  // namespace detail

// Row echelon form over Q; the lead of a row is its smallest column.
class Echelon {
public:
    // Returns true when the row is independent of the rows inserted so far.
    bool insert(const SparseVec& v)
    {
        detail::WorkRow w = detail::to_work(v);
        while (!w.empty()) {
            auto it = rows_.find(w.begin()->first);
            if (it == rows_.end()) break;
            Rational f = w.begin()->second;
            detail::axpy(w, f, it->second);
        }
        if (w.empty()) return false;
        Rational lead = w.begin()->second;
        for (auto& [c, x] : w) x /= lead;
        rows_.emplace(w.begin()->first, detail::to_sparse(w));
        reduced_ = false;
        return true;
    }

    SparseVec reduce(const SparseVec& v) const
    {
        detail::WorkRow w = detail::to_work(v);
        auto it = w.begin();
        while (it != w.end()) {
            auto p = rows_.find(it->first);
            if (p == rows_.end()) {
                ++it;
                continue;
            }
            int col = it->first;
            Rational f = it->second;
            detail::axpy(w, f, p->second);
            it = w.upper_bound(col);
        }
        return detail::to_sparse(w);
    }

    bool in_span(const SparseVec& v) const { return reduce(v).empty(); }

    // Back substitution to reduced row echelon form.
    void make_reduced()
    {
        if (reduced_) return;
        for (auto it = rows_.rbegin(); it != rows_.rend(); ++it) {
            detail::WorkRow w = detail::to_work(it->second);
            auto jt = std::next(w.begin());
            while (jt != w.end()) {
                auto p = rows_.find(jt->first);
                if (p == rows_.end()) {
                    ++jt;
                    continue;
                }
                int col = jt->first;
                Rational f = jt->second;
                detail::axpy(w, f, p->second);
                jt = w.upper_bound(col);
            }
            it->second = detail::to_sparse(w);
        }
        reduced_ = true;
    }

    std::size_t rank() const { return rows_.size(); }
    const std::map<int, SparseVec>& rows() const { return rows_; }

private:
    std::map<int, SparseVec> rows_;
    bool reduced_ = true;
};

// Coefficients mu with sum_j mu_j vecs[j] = target, free variables set to zero.
inline std::optional<std::vector<Rational>> solve_in_span(const std::vector<SparseVec>& vecs,
                                                          const SparseVec& target)
{
    const int nv = static_cast<int>(vecs.size());
    std::map<int, SparseVec> eqs;
    for (int j = 0; j < nv; ++j)
        for (const auto& [c, x] : vecs[j]) eqs[c].emplace_back(j, x);
    for (const auto& [c, x] : target) eqs[c].emplace_back(nv, x);
    Echelon e;
    for (auto& [c, row] : eqs) e.insert(row);
    if (e.rows().count(nv)) return std::nullopt;
    e.make_reduced();
    std::vector<Rational> mu(nv, Rational(0));
    for (const auto& [lead, row] : e.rows())
        if (!row.empty() && row.back().first == nv) mu[lead] = row.back().second;
    return mu;
}

inline std::size_t rank_of(const std::vector<SparseVec>& vecs)
{
    Echelon e;
    for (const auto& v : vecs) e.insert(v);
    return e.rank();
}

}  // namespace epicert
