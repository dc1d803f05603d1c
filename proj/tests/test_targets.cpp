#include <epicert/pipeline.hpp>

#include "latex_forms.hpp"

#include <gtest/gtest.h>

using namespace epicert;

namespace {

DiffForm d(std::initializer_list<int> h) { return DiffForm::d(Derivative(h)); }

// Span of a constraint list over monomial columns.
class Span {
public:
    explicit Span(const std::vector<Constraint>& cs)
    {
        for (const auto& c : cs) e_.insert(row(c.form));
    }
    bool contains(const DiffForm& f) { return e_.in_span(row(f)); }

private:
    SparseVec row(const DiffForm& f)
    {
        SparseVec v;
        for (const auto& [m, c] : f.terms()) v.emplace_back(col_.try_emplace(m, static_cast<int>(col_.size())).first->second, c);
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return v;
    }
    std::map<Monomial, int> col_;
    Echelon e_;
};

}  // namespace

TEST(Targets, F31MatchesListedForm)
{
    DiffForm listed = latex::parse(R"(\frac{1}{4}f^4f_{3}^2-\frac{1}{2}f^3f_{1}f_{3}f_{2}+\frac{1}{4}f^4f_{1}f_{5}+\frac{1}{4}f^2f_{1}^2f_{2}^2-\frac{1}{8}f^3f_{1}^2f_{4})");
    EXPECT_EQ(build_F(3, 1), listed);
}

TEST(Targets, F41MatchesListedForm)
{
    DiffForm listed = latex::parse(R"(-\frac{3}{8}f^6f_{3}f_{5}+\frac{3}{8}f^5f_{3}^2f_{2}-\frac{3}{4}f^4f_{1}f_{3}f_{2}^2
        +\frac{3}{8}f^5f_{1}f_{5}f_{2}+\frac{3}{8}f^5f_{1}f_{3}f_{4}-\frac{1}{8}f^6f_{1}f_{7}+\frac{3}{8}f^3f_{1}^2f_{2}^3
        -\frac{3}{8}f^4f_{1}^2f_{4}f_{2}+\frac{1}{16}f^5f_{1}^2f_{6})");
    EXPECT_EQ(build_F41(), listed);
    EXPECT_EQ(listed.size(), 9u);
}

TEST(Targets, FirstOrderIsFisherInformation)
{
    EXPECT_EQ(build_F(1, 2), Rational(1, 2) * (d({1, 0}) * d({1, 0}) + d({0, 1}) * d({0, 1})));
}

TEST(Targets, FIsHomogeneousOfDegreeAndOrder2m)
{
    for (int m = 1; m <= 5; ++m)
        for (int n = 1; n <= 2; ++n) EXPECT_TRUE(build_F(m, n).is_homogeneous(2 * m, 2 * m)) << m << "," << n;
}

TEST(Targets, FIsSymmetricUnderCoordinateSwap)
{
    for (int m = 2; m <= 4; ++m) EXPECT_EQ(build_F(m, 2).substituted({1, 0}), build_F(m, 2));
    EXPECT_EQ(build_F(3, 3).substituted({2, 0, 1}), build_F(3, 3));
}

TEST(Targets, DmnSense)
{
    EXPECT_EQ(dmn_target(3, 1).sense, Sense::NonNegative);
    EXPECT_EQ(dmn_target(4, 1).sense, Sense::NonPositive);
    EXPECT_EQ(dmn_target(4, 1).sos_targets()[0].base, build_F41());
    EXPECT_EQ(dmn_target(3, 2).id(), "D(3,2)");
    EXPECT_THROW(build_F(3, 0), std::invalid_argument);
}

TEST(Targets, CostaOneDimensionalFormIsTwoR1MinusR2)
{
    DiffForm p = DiffForm::p();
    DiffForm f1 = d({1}), f2 = d({2}), f3 = d({3});
    DiffForm R1 = p * p * f1 * f3 + p * p * f2 * f2 - p * f1 * f1 * f2;
    DiffForm R2 = Rational(3) * p * f1 * f1 * f2 - Rational(2) * f1 * f1 * f1 * f1;
    DiffForm listed = Rational(2) * p * p * f1 * f3 + Rational(2) * p * p * f2 * f2 - Rational(5) * p * f1 * f1 * f2 +
                      Rational(2) * f1 * f1 * f1 * f1;
    EXPECT_EQ(listed, Rational(2) * R1 - R2);
    EXPECT_EQ(Rational(2) * build_J2(1), listed);
}

TEST(Targets, J2IsSymmetricAndHomogeneous)
{
    DiffForm J = build_J2(3);
    EXPECT_TRUE(J.is_homogeneous(4, 4));
    EXPECT_EQ(J.substituted({1, 0, 2}), J);
    EXPECT_EQ(J.substituted({2, 1, 0}), J);
    EXPECT_EQ(costa_target(2).sense, Sense::NonPositive);
}

TEST(Targets, SymmetricPairSplitsTheTwoLetterForm)
{
    auto [L1, L2] = symmetric_pair_reduce();
    EXPECT_EQ(L1.base + L2.base, build_J2(2));
    auto tp = costa_general_target();
    EXPECT_EQ(tp.blocks.size(), 2u);
    EXPECT_EQ(tp.param_names, (std::vector<std::string>{"c1", "c2"}));
}

TEST(Targets, ReducedPairFormsMatchListedQuadraticForms)
{
    DiffForm p = DiffForm::p();
    DiffForm m1 = d({1, 0}) * d({1, 0}), m2 = d({0, 1}) * d({0, 1}), m3 = d({1, 0}) * d({0, 1});
    DiffForm m4 = p * d({1, 1}), m5 = p * d({2, 0}), m6 = p * d({0, 2});
    // L1hat = -(2 c2 - 1)/2 (2 m1^2 - 3 m1 m5 + 2 m2^2 - 3 m2 m6)
    DiffForm q1 = Rational(2) * m1 * m1 - Rational(3) * m1 * m5 + Rational(2) * m2 * m2 - Rational(3) * m2 * m6;
    AffineForm L1hat{Rational(1, 2) * q1, {{"c1", DiffForm()}, {"c2", -q1}}};
    AffineForm L2hat{-Rational(1, 2) * m1 * m6 - Rational(1, 2) * m2 * m5 + Rational(2) * m3 * m4 - Rational(2) * m4 * m4,
                     {{"c1", -m1 * m6 - m2 * m5 + Rational(2) * m3 * m4 - Rational(2) * m4 * m4 + Rational(2) * m5 * m6},
                      {"c2", m1 * m6 + m2 * m5 - Rational(4) * m3 * m3 + Rational(4) * m3 * m4}}};
    auto [L1, L2] = symmetric_pair_reduce();
    Span span(pair_family_constraints());
    for (auto [L, H] : {std::pair{L1, L1hat}, std::pair{L2, L2hat}}) {
        EXPECT_TRUE(span.contains(L.base - H.base));
        for (std::size_t k = 0; k < 2; ++k) EXPECT_TRUE(span.contains(L.params[k].second - H.params[k].second)) << k;
    }
    EXPECT_FALSE(span.contains(L2hat.base));
}
