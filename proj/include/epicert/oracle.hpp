#pragma once

#include "diffalg.hpp"
#include "targets.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace epicert {

// Diagonal centered Gaussian N(0, diag(v)).
struct DiagonalGaussian {
    std::vector<Rational> variances;

    int n() const { return static_cast<int>(variances.size()); }

    static DiagonalGaussian isotropic(int n, const Rational& v) { return {std::vector<Rational>(n, v)}; }
};

// Coefficients in x, lowest degree first.
using Poly = std::vector<Rational>;

inline Poly poly_mul(const Poly& a, const Poly& b)
{
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// p^{(k)} = q_k p for the 1-D Gaussian of variance v.
class HermiteQuotient {
public:
    explicit HermiteQuotient(Rational v) : v_(std::move(v)) { q_.push_back({Rational(1)}); }

    const Poly& operator()(int k)
    {
        while (static_cast<int>(q_.size()) <= k) {
            const Poly& q = q_.back();
            Poly next(q.size() + 1, Rational(0));
            for (std::size_t i = 1; i < q.size(); ++i) next[i - 1] += q[i] * static_cast<long>(i);
            for (std::size_t i = 0; i < q.size(); ++i) next[i + 1] -= q[i] / v_;
            q_.push_back(std::move(next));
        }
        return q_[k];
    }

    // E[poly(X)] for X ~ N(0, v).
    Rational expectation(const Poly& p) const
    {
        Rational acc = 0, moment = 1;
        for (std::size_t i = 0; i < p.size(); i += 2) {
            acc += p[i] * moment;
            moment *= v_ * static_cast<long>(i + 1);
        }
        return acc;
    }

    const Rational& variance() const { return v_; }

private:
    Rational v_;
    std::vector<Poly> q_;
};

class GaussianOracle {
public:
    explicit GaussianOracle(const DiagonalGaussian& g)
    {
        for (const auto& v : g.variances) {
            if (v <= 0) throw std::invalid_argument("variances must be positive");
            h_.emplace_back(v);
        }
        memo_.resize(h_.size());
    }

    int n() const { return static_cast<int>(h_.size()); }

    // Integral of mono / p^{deg-1}: a product over coordinates of E[prod_f q_{h_f[a]}(x_a)].
    Rational monomial(const Monomial& mono)
    {
        if (mono.dimension_used() > n()) throw std::invalid_argument("monomial uses more coordinates than the Gaussian");
        Rational r = 1;
        for (int a = 0; a < n() && r != 0; ++a) {
            std::vector<int> orders;
            for (const auto& d : mono.factors())
                if (d[a] > 0) orders.push_back(d[a]);
            std::sort(orders.begin(), orders.end());
            r *= coordinate(a, orders);
        }
        return r;
    }

    Rational expectation(const DiffForm& f, int m)
    {
        Rational acc = 0;
        for (const auto& [mono, c] : f.terms()) {
            if (mono.degree() != 2 * m) throw std::invalid_argument("form is not homogeneous of degree 2m");
            acc += c * monomial(mono);
        }
        return acc;
    }

private:
    Rational coordinate(int a, const std::vector<int>& orders)
    {
        auto it = memo_[a].find(orders);
        if (it != memo_[a].end()) return it->second;
        Poly p{Rational(1)};
        for (int k : orders) p = poly_mul(p, h_[a](k));
        Rational v = h_[a].expectation(p);
        memo_[a].emplace(orders, v);
        return v;
    }

    std::vector<HermiteQuotient> h_;
    std::vector<std::map<std::vector<int>, Rational>> memo_;
};

// Integral of form / p^{2m-1} over the Gaussian with the given variances.
inline Rational gaussian_expectation(const DiffForm& form, int m, const DiagonalGaussian& g)
{
    GaussianOracle o(g);
    return o.expectation(form, m);
}

// n (m-1)! (-1)^{m-1} / (2 v^m): the m-th time derivative of Gaussian entropy.
inline Rational isotropic_F_value(int m, int n, const Rational& v)
{
    Rational r = n;
    for (int k = 2; k < m; ++k) r *= k;
    if (m % 2 == 0) r = -r;
    Rational vm = 1;
    for (int k = 0; k < m; ++k) vm *= v;
    return r / (2 * vm);
}

struct SignCheck {
    bool ok = true;
    std::vector<Rational> values;
    std::string message;
};

// Evaluates every target block (parameters at the supplied values) on every Gaussian.
inline SignCheck sign_check(const TargetProblem& tp, const std::vector<DiagonalGaussian>& specs,
                            const std::vector<Rational>& params = {})
{
    SignCheck r;
    std::vector<Rational> pv = params;
    pv.resize(tp.param_names.size(), Rational(0));
    for (const auto& g : specs) {
        GaussianOracle o(g);
        for (const auto& block : tp.blocks) {
            Rational v = o.expectation(block.at(pv), tp.m);
            r.values.push_back(v);
            bool good = tp.sense == Sense::NonNegative ? v >= 0 : v <= 0;
            if (!good && r.ok) {
                r.ok = false;
                r.message = "sign violated: value " + to_string(v);
            }
        }
    }
    return r;
}

}  // namespace epicert
