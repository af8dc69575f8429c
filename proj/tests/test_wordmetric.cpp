#include "fixtures.hpp"

#include "nilgrowth/wordmetric.hpp"

#include "gtest/gtest.h"

#include <array>
#include <map>
#include <set>

using namespace nilgrowth;

namespace {

MatrixGroupDescriptor free2()
{
	return MatrixGroupDescriptor::make("free2", {"a", "b"},
	                                   {RationalMatrix{{1, 2}, {0, 1}}, RationalMatrix{{1, 0}, {2, 1}}});
}

MatrixGroupDescriptor z2_rot4()
{
	return affine_matrix_group(RationalMatrix{{0, -1}, {1, 0}}, 2, "z2_rot4");
}

// Heisenberg ball sizes from integer triples (a, b, c) with
// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab'); shares no code with the library.
std::vector<size_t> heisenberg_oracle(size_t radius)
{
	using T = std::array<long, 3>;
	std::set<T> seen{{0, 0, 0}};
	std::vector<T> frontier{{0, 0, 0}};
	std::vector<size_t> sizes{1};
	T const gens[] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
	for (size_t r = 1; r <= radius; ++r)
	{
		std::vector<T> next;
		for (auto const &x : frontier)
			for (auto const &g : gens)
			{
				T y{x[0] + g[0], x[1] + g[1], x[2] + g[2] + x[0] * g[1]};
				if (seen.insert(y).second)
					next.push_back(y);
			}
		sizes.push_back(seen.size());
		frontier = std::move(next);
	}
	return sizes;
}

} // namespace

TEST(Balls, IntegersAndLattice)
{
	auto z = balls(fixtures::free_abelian(1), 5);
	EXPECT_EQ(z.sizes(), (std::vector<size_t>{1, 3, 5, 7, 9, 11}));
	auto z2 = balls(fixtures::free_abelian(2), 3);
	EXPECT_EQ(z2.sizes(), (std::vector<size_t>{1, 5, 13, 25}));
	for (size_t n = 0; n <= 3; ++n)
		EXPECT_EQ(z2.sizes()[n], 2 * n * n + 2 * n + 1);
}

TEST(Balls, HeisenbergMatchesIndependentBfs)
{
	auto t = balls(fixtures::heisenberg_group(), 12);
	EXPECT_EQ(t.sizes(), heisenberg_oracle(12));
	EXPECT_EQ(t.size(), t.sizes().back());
	for (size_t r = 0; r <= 12; ++r)
	{
		auto [lo, hi] = t.sphere(r);
		for (size_t i = lo; i < hi; ++i)
			ASSERT_EQ(t.tau_at(i), r);
	}
}

TEST(Balls, FreeGroupSizes)
{
	auto t = balls(free2(), 8);
	for (size_t n = 0; n <= 8; ++n)
	{
		size_t p = 1;
		for (size_t i = 0; i < n; ++i)
			p *= 3;
		EXPECT_EQ(t.sizes()[n], 2 * p - 1);
	}
}

TEST(Balls, FiniteGroupSaturates)
{
	auto g = MatrixGroupDescriptor::make("c4", {"r"}, {RationalMatrix{{0, -1}, {1, 0}}});
	auto t = balls(g, 6);
	EXPECT_EQ(t.sizes(), (std::vector<size_t>{1, 3, 4, 4, 4, 4, 4}));
}

TEST(Balls, BudgetCarriesCompletedPrefix)
{
	try
	{
		balls(fixtures::heisenberg_group(), 10, 400);
		FAIL() << "expected budget_exceeded";
	}
	catch (budget_exceeded const &e)
	{
		auto const &p = *e.partial();
		EXPECT_EQ(p.sizes(), (std::vector<size_t>{1, 5, 17, 53, 135, 299}));
		EXPECT_EQ(p.size(), 299u);
		EXPECT_TRUE(p.tau(evaluate_word(fixtures::heisenberg_group(), "a^5")).has_value());
		EXPECT_FALSE(p.tau(evaluate_word(fixtures::heisenberg_group(), "a^6")).has_value());
	}
}

TEST(Tau, Examples)
{
	auto g = fixtures::heisenberg_group();
	auto t = balls(g, 6);
	EXPECT_EQ(t.tau(g.identity()), 0u);
	EXPECT_EQ(t.tau(g.generators[0]), 1u);
	EXPECT_EQ(t.tau(g.generators[1].inverse()), 1u);
	auto c = t.tau(evaluate_word(g, "a b a^-1 b^-1"));
	ASSERT_TRUE(c.has_value());
	EXPECT_GE(*c, 3u);
	EXPECT_LE(*c, 4u);
	// exhaustive V^3 check: the commutator is not a product of three steps
	for (size_t i = 0; i < t.sizes()[3]; ++i)
		EXPECT_NE(t.element(i), evaluate_word(g, "a b a^-1 b^-1"));
	EXPECT_FALSE(t.tau(evaluate_word(g, "a^7")).has_value());
}

TEST(Tau, SubadditiveAndSymmetric)
{
	auto t = balls(fixtures::heisenberg_group(), 8);
	size_t half = t.sizes()[4];
	std::vector<RationalMatrix> el;
	for (size_t i = 0; i < half; ++i)
		el.push_back(t.element(i));
	for (size_t i = 0; i < half; ++i)
	{
		ASSERT_EQ(t.tau(el[i].inverse()), t.tau_at(i));
		for (size_t j = 0; j < half; ++j)
		{
			auto v = t.tau(el[i] * el[j]);
			ASSERT_TRUE(v.has_value());
			ASSERT_LE(*v, t.tau_at(i) + t.tau_at(j));
		}
	}
}

TEST(Tau, HorizonSearchMatchesLargerTable)
{
	auto g = fixtures::heisenberg_group();
	auto big = balls(g, 12);
	auto small = balls(g, 6);
	HorizonSearch s(small);
	EXPECT_EQ(s.reach(), 12u);
	for (size_t i = 0; i < big.size(); i += 7)
		ASSERT_EQ(s.tau(big.element(i)), big.tau_at(i)) << big.key(i);
	EXPECT_FALSE(s.tau(evaluate_word(g, "a^13")).has_value());
}

TEST(Gamma, Examples)
{
	auto z = balls(fixtures::free_abelian(1), 16);
	HorizonSearch sz(z);
	auto one = gamma_estimate(z.group().generators[0], sz, 32);
	EXPECT_EQ(one.verdict, GammaEstimate::Verdict::matched);
	EXPECT_NEAR(one.exponent, 1.0, 1e-9);
	EXPECT_EQ(one.j, 1u);

	auto g = fixtures::heisenberg_group();
	auto h = balls(g, 16);
	HorizonSearch sh(h);
	auto c = gamma_estimate(evaluate_word(g, "a b a^-1 b^-1"), sh, 64);
	EXPECT_EQ(c.verdict, GammaEstimate::Verdict::matched);
	EXPECT_GE(c.exponent, 0.4);
	EXPECT_LE(c.exponent, 0.6);
	EXPECT_EQ(c.j, 2u);
	auto gen = gamma_estimate(g.generators[0], sh, 64);
	EXPECT_EQ(gen.j, 1u);

	auto r = balls(z2_rot4(), 6);
	HorizonSearch sr(r);
	auto rot = gamma_estimate(r.group().generators[2], sr, 16);
	EXPECT_EQ(rot.verdict, GammaEstimate::Verdict::bounded);
	EXPECT_EQ(rot.exponent, 0.0);

	EXPECT_THROW(gamma_estimate(g.generators[0], sh, 8), domain_error);
}

TEST(Gamma, InconclusiveBeyondReach)
{
	auto g = fixtures::heisenberg_group();
	auto h = balls(g, 6);
	HorizonSearch s(h);
	auto e = gamma_estimate(evaluate_word(g, "a b"), s, 32);
	EXPECT_EQ(e.verdict, GammaEstimate::Verdict::inconclusive);
	EXPECT_TRUE(std::isnan(e.exponent));
}

TEST(Gamma, LayerConsistency)
{
	auto g = fixtures::heisenberg_group();
	auto a = malcev_lie_algebra(g);
	auto h = balls(g, 16);
	HorizonSearch s(h);
	size_t conclusive = 0;
	for (size_t i = 1; i < h.sizes()[3]; ++i)
	{
		auto x = h.element(i);
		auto est = gamma_estimate(x, s, 64);
		if (est.verdict != GammaEstimate::Verdict::matched)
			continue;
		++conclusive;
		EXPECT_EQ(est.j, *layer(x, a) + 1) << h.key(i) << " exponent " << est.exponent;
	}
	EXPECT_GT(conclusive, 10u);
}

TEST(ConjGrowth, AbelianAndCentral)
{
	auto z2 = balls(fixtures::free_abelian(2), 6);
	HorizonSearch s2(z2);
	auto x = evaluate_word(z2.group(), "x1^2 x2");
	for (size_t n = 0; n <= 6; ++n)
		EXPECT_EQ(conj_growth(x, n, s2).value, 3u);

	auto g = fixtures::heisenberg_group();
	auto h = balls(g, 10);
	HorizonSearch s(h);
	auto zc = evaluate_word(g, "a b a^-1 b^-1");
	for (size_t n = 0; n <= 10; ++n)
		EXPECT_EQ(conj_growth(zc, n, s).value, 4u);
	EXPECT_THROW(conj_growth(zc, 11, s), domain_error);
}

TEST(ConjGrowth, HeisenbergGeneratorIsSublinear)
{
	auto g = fixtures::heisenberg_group();
	auto h = balls(g, 12);
	HorizonSearch s(h);
	std::vector<unsigned> norms;
	for (size_t n = 1; n <= 10; ++n)
	{
		auto c = conj_growth(g.generators[0], n, s);
		ASSERT_TRUE(c.exact);
		norms.push_back(c.value);
	}
	for (size_t i = 1; i < norms.size(); ++i)
		EXPECT_GE(norms[i], norms[i - 1]);
	// ||a||_n / n decays overall (roughly like n^{-1/2})
	EXPECT_LT(norms[9] / 10.0, norms[3] / 4.0);
	EXPECT_LT(norms[9], 2 * 10u);
}

TEST(Doubling, Examples)
{
	std::vector<size_t> linear, expo;
	for (size_t n = 0; n <= 12; ++n)
	{
		linear.push_back(2 * n + 1);
		expo.push_back(3 * (size_t(1) << n));
	}
	auto l = doubling_classifier(linear);
	EXPECT_EQ(l.kind, DoublingVerdict::Kind::polynomial);
	EXPECT_EQ(l.degree, 1);
	EXPECT_EQ(doubling_classifier(expo).kind, DoublingVerdict::Kind::exponential);
	EXPECT_THROW(doubling_classifier({1, 3, 5}), domain_error);

	auto f = balls(free2(), 10);
	EXPECT_EQ(doubling_classifier(f.sizes()).kind, DoublingVerdict::Kind::exponential);
	auto h = doubling_classifier(balls(fixtures::heisenberg_group(), 12).sizes());
	EXPECT_EQ(h.kind, DoublingVerdict::Kind::polynomial);
	EXPECT_EQ(h.degree, 4);
}

TEST(Growth, SandwichAndRobustness)
{
	auto g = fixtures::heisenberg_group();
	auto h = balls(g, 12);
	double lo = 1e300, hi = 0;
	for (size_t n = 4; n <= 12; ++n)
	{
		double r = static_cast<double>(h.sizes()[n]) / std::pow(n, 4.0);
		lo = std::min(lo, r);
		hi = std::max(hi, r);
	}
	EXPECT_LE(hi / lo, 50.0);

	auto g2 = MatrixGroupDescriptor::make("heisenberg_abc", {"a", "b", "c"},
	                                      {g.generators[0], g.generators[1],
	                                       g.generators[0] * g.generators[1]},
	                                      true);
	double e1 = fitted_growth_exponent(h.sizes());
	double e2 = fitted_growth_exponent(balls(g2, 12).sizes());
	EXPECT_LT(std::abs(e1 - e2), 0.2) << e1 << " vs " << e2;
}

TEST(Growth, QuasiNormComparability)
{
	auto g = fixtures::heisenberg_group();
	auto a = malcev_lie_algebra(g);
	auto d = a.grading();
	auto h = balls(g, 12);
	double lo = 1e300, hi = 0;
	for (size_t i = 1; i < h.size(); ++i)
	{
		double phi = quasi_norm(ConeVector(a.coordinates(log_unitriangular(h.element(i)))), d);
		double r = h.tau_at(i) / phi;
		lo = std::min(lo, r);
		hi = std::max(hi, r);
	}
	EXPECT_LT(hi / lo, 20.0) << lo << " .. " << hi;
}

TEST(CoordinateProfile, Examples)
{
	auto z2 = balls(fixtures::free_abelian(2), 12);
	auto pz = coordinate_growth_profile(z2, malcev_lie_algebra(z2.group()));
	for (double e : pz.exponents)
		EXPECT_NEAR(e, 1.0, 0.05);

	auto g = fixtures::heisenberg_group();
	auto a = malcev_lie_algebra(g);
	auto p = coordinate_growth_profile(balls(g, 12), a);
	ASSERT_EQ(p.exponents.size(), 3u);
	EXPECT_NEAR(p.exponents[0], 1.0, 0.2);
	EXPECT_NEAR(p.exponents[1], 1.0, 0.2);
	EXPECT_NEAR(p.exponents[2], 2.0, 0.3);
	for (size_t j = 0; j < 3; ++j)
		EXPECT_LE(p.exponents[j], static_cast<double>(p.layer_of[j] + 1) + 0.2);
}
