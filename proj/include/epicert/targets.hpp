#pragma once

#include "diffalg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace epicert {

enum class TargetKind { Dmn, CostaConcrete, CostaGeneral };
enum class Sense { NonNegative, NonPositive };

// base + sum_k params[k].second * value(params[k].first)
struct AffineForm {
    DiffForm base;
    std::vector<std::pair<std::string, DiffForm>> params;

    DiffForm at(const std::vector<Rational>& values) const
    {
        DiffForm r = base;
        for (std::size_t k = 0; k < params.size() && k < values.size(); ++k) r.add_scaled(params[k].second, values[k]);
        return r;
    }
};

struct TargetProblem {
    TargetKind kind = TargetKind::Dmn;
    int m = 0;
    int n = 0;
    Sense sense = Sense::NonNegative;
    std::vector<AffineForm> blocks;  // raw target forms; CostaGeneral has two
    std::vector<std::string> param_names;

    std::string id() const
    {
        switch (kind) {
        case TargetKind::Dmn: return "D(" + std::to_string(m) + "," + std::to_string(n) + ")";
        case TargetKind::CostaConcrete: return "Costa(" + std::to_string(n) + ")";
        case TargetKind::CostaGeneral: return "CostaGeneral";
        }
        return "";
    }

    // Forms that must be shown nonnegative modulo constraints.
    std::vector<AffineForm> sos_targets() const
    {
        std::vector<AffineForm> r = blocks;
        if (sense == Sense::NonPositive)
            for (auto& b : r) {
                b.base *= Rational(-1);
                for (auto& [name, f] : b.params) f *= Rational(-1);
            }
        return r;
    }
};

inline DiffForm build_F(int m, int n)
{
    if (m < 1 || n < 1 || n > kMaxDim) throw std::invalid_argument("build_F needs m >= 1 and 1 <= n <= kMaxDim");
    DiffForm F;
    for (int i = 0; i < n; ++i) F.add(Monomial{Derivative::unit(i), Derivative::unit(i)}, Rational(1, 2));
    DiffForm p = DiffForm::p();
    DiffForm pdot = laplacian(p, n) * Rational(1, 2);
    for (int k = 2; k <= m; ++k) F = p * p * heat_dt(F, n) - Rational(2 * k - 3) * (p * pdot * F);
    return F;
}

// Form whose integral over p^7 is -d^4H/dt^4 in one dimension.
inline DiffForm build_F41() { return -build_F(4, 1); }

inline TargetProblem dmn_target(int m, int n)
{
    TargetProblem t;
    t.kind = TargetKind::Dmn;
    t.m = m;
    t.n = n;
    t.sense = m % 2 == 1 ? Sense::NonNegative : Sense::NonPositive;
    t.blocks.push_back({build_F(m, n), {}});
    return t;
}

namespace costa {

inline DiffForm S(int a)
{
    DiffForm p = DiffForm::p();
    DiffForm inner = p * DiffForm::d(Derivative().raised(a, 2)) - DiffForm::d(Derivative::unit(a)) * DiffForm::d(Derivative::unit(a));
    return inner * inner;
}

inline DiffForm T(int a, int b)
{
    DiffForm p = DiffForm::p();
    DiffForm pa = DiffForm::d(Derivative::unit(a));
    return p * p * pa * DiffForm::d(Derivative::unit(a).raised(b, 2)) -
           Rational(1, 2) * (p * pa * pa * DiffForm::d(Derivative().raised(b, 2)));
}

inline DiffForm R0_1(int a, int b)
{
    DiffForm p = DiffForm::p();
    DiffForm pb = DiffForm::d(Derivative::unit(b));
    return p * p * DiffForm::d(Derivative::unit(a).raised(b, 2)) * DiffForm::d(Derivative::unit(a)) +
           DiffForm::d(Derivative().raised(a, 2)) * (p * p * DiffForm::d(Derivative().raised(b, 2)) - p * pb * pb);
}

inline DiffForm R0_2(int a, int b)
{
    DiffForm p = DiffForm::p();
    DiffForm pa = DiffForm::d(Derivative::unit(a));
    DiffForm pb = DiffForm::d(Derivative::unit(b));
    DiffForm pab = DiffForm::d(Derivative::unit(a).raised(b));
    return p * DiffForm::d(Derivative().raised(a, 2)) * pb * pb + Rational(2) * pa * (p * pab * pb - pa * pb * pb);
}

}  // namespace costa

inline DiffForm build_J2(int n)
{
    DiffForm J;
    for (int a = 0; a < n; ++a) J += costa::S(a);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) J += costa::T(a, b);
    return J;
}

inline TargetProblem costa_target(int n)
{
    TargetProblem t;
    t.kind = TargetKind::CostaConcrete;
    t.m = 2;
    t.n = n;
    t.sense = Sense::NonPositive;
    t.blocks.push_back({build_J2(n), {}});
    return t;
}

// Symmetric-pair reduction over the alphabet a = coordinate 0, b = coordinate 1.
inline std::pair<AffineForm, AffineForm> symmetric_pair_reduce()
{
    using namespace costa;
    AffineForm L1, L2;
    L1.base = S(0) + S(1) + T(0, 0) + T(1, 1);
    L1.params = {{"c1", R0_1(0, 0) + R0_1(1, 1)}, {"c2", R0_2(0, 0) + R0_2(1, 1)}};
    L2.base = T(0, 1) + T(1, 0);
    L2.params = {{"c1", R0_1(0, 1) + R0_1(1, 0)}, {"c2", R0_2(0, 1) + R0_2(1, 0)}};
    return {L1, L2};
}

inline TargetProblem costa_general_target()
{
    TargetProblem t;
    t.kind = TargetKind::CostaGeneral;
    t.m = 2;
    t.n = 2;
    t.sense = Sense::NonPositive;
    auto [L1, L2] = symmetric_pair_reduce();
    t.blocks = {L1, L2};
    t.param_names = {"c1", "c2"};
    return t;
}

}  // namespace epicert
