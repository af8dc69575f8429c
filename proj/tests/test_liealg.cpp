#include "fixtures.hpp"

#include "gtest/gtest.h"

#include <cmath>
#include <random>

using namespace nilgrowth;
using fixtures::vec;

using fixtures::random_grading;
using fixtures::unit_grading;

TEST(LieAlgebra, RejectsConflictingAntisymmetry)
{
	EXPECT_THROW(LieAlgebraQ({"a", "b"}, {{0, 1, vec({1, 0})}, {1, 0, vec({1, 0})}}),
	             invariant_violation);
	EXPECT_THROW(LieAlgebraQ({"a", "b"}, {{0, 0, vec({1, 0})}}), invariant_violation);
	EXPECT_THROW(LieAlgebraQ({"a", "b"}, {{0, 2, vec({1, 0})}}), dimension_mismatch);
}

TEST(LieAlgebra, RejectsJacobiFailure)
{
	// [a,b]=c, [a,c]=a: the Jacobi sum on (a,b,c) is c
	EXPECT_THROW(LieAlgebraQ({"a", "b", "c"}, {{0, 1, vec({0, 0, 1})}, {0, 2, vec({1, 0, 0})}}),
	             invariant_violation);
	// so(3) itself is a Lie algebra
	EXPECT_NO_THROW(LieAlgebraQ({"a", "b", "c"}, {{0, 1, vec({0, 0, 1})},
	                                              {1, 2, vec({1, 0, 0})},
	                                              {2, 0, vec({0, 1, 0})}}));
}

TEST(LieAlgebra, AntisymmetryIsFilledIn)
{
	auto h = fixtures::heisenberg_algebra();
	EXPECT_EQ(h.structure(1, 0), vec({0, 0, -1}));
	EXPECT_EQ(h.bracket(vec({0, 1, 0}), vec({1, 0, 0})), vec({0, 0, -1}));
}

TEST(Lcs, Examples)
{
	EXPECT_EQ(lcs_algebra(LieAlgebraQ::abelian(3)).dims, (std::vector<size_t>{3, 0}));
	EXPECT_EQ(lcs_algebra(fixtures::heisenberg_algebra()).dims, (std::vector<size_t>{3, 1, 0}));
	EXPECT_EQ(lcs_algebra(fixtures::filiform4()).dims, (std::vector<size_t>{4, 2, 1, 0}));
}

TEST(Lcs, NonNilpotentRejected)
{
	// [h,x] = x: solvable, not nilpotent
	LieAlgebraQ l({"h", "x"}, {{0, 1, vec({0, 1})}});
	EXPECT_THROW(lcs_algebra(l), invariant_violation);
}

TEST(GrowthDegree, Examples)
{
	for (size_t k = 1; k <= 6; ++k)
		EXPECT_EQ(growth_degree_algebra(LieAlgebraQ::abelian(k)), static_cast<long>(k));
	// t, z1, z2, w1, w2 with [t,z1]=w1, [t,z2]=w2
	LieAlgebraQ a({"t", "z1", "z2", "w1", "w2"},
	              {{0, 1, vec({0, 0, 0, 1, 0})}, {0, 2, vec({0, 0, 0, 0, 1})}});
	EXPECT_EQ(growth_degree_algebra(a), 7);
	// Heisenberg + Q^2
	LieAlgebraQ b({"x", "y", "z", "u1", "u2"}, {{0, 1, vec({0, 0, 1, 0, 0})}});
	EXPECT_EQ(growth_degree_algebra(b), 6);
	EXPECT_EQ(b.dim(), 5u);
	EXPECT_EQ(growth_degree_algebra(fixtures::filiform4()), 2 + 2 + 3);
}

TEST(Grading, DefaultExamples)
{
	using Sets = std::vector<std::vector<size_t>>;
	EXPECT_EQ(default_grading(fixtures::heisenberg_algebra()).index_sets(), (Sets{{0, 1}, {2}}));
	EXPECT_EQ(default_grading(LieAlgebraQ::abelian(3)).index_sets(), (Sets{{0, 1, 2}}));
	EXPECT_EQ(default_grading(fixtures::filiform4()).index_sets(), (Sets{{0, 1}, {2}, {3}}));
}

TEST(Grading, RejectsWrongLayers)
{
	auto h = fixtures::heisenberg_algebra();
	// z does not complement C_1 in C_0
	EXPECT_THROW(GradedDecomposition(h, {{vec({1, 0, 0}), vec({0, 0, 1})}, {vec({0, 0, 1})}}),
	             invariant_violation);
	EXPECT_THROW(GradedDecomposition(h, {{vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})}}),
	             invariant_violation);
}

TEST(Graded, Examples)
{
	auto h = fixtures::heisenberg_algebra();
	EXPECT_EQ(graded_algebra(h, default_grading(h)), h);
	auto ab = LieAlgebraQ::abelian(4);
	EXPECT_TRUE(graded_algebra(ab, default_grading(ab)).is_abelian());

	auto g = graded_algebra(fixtures::filiform4_skewed(), default_grading(fixtures::filiform4_skewed()));
	EXPECT_EQ(g.structure(0, 1), vec({0, 0, 1, 0}));
	EXPECT_EQ(g.structure(0, 2), vec({0, 0, 0, 1}));
	EXPECT_EQ(g.structure(1, 2), vec({0, 0, 0, 0}));
}

TEST(Graded, PreservesLcsAndDegreeOnRandomAlgebras)
{
	std::mt19937_64 rng(11);
	for (int trial = 0; trial < 60; ++trial)
	{
		auto l = fixtures::random_malcev(rng).algebra;
		auto d = random_grading(l, rng);
		auto g = graded_algebra(l, d);
		EXPECT_EQ(lcs_algebra(l).dims, lcs_algebra(g).dims);
		EXPECT_EQ(growth_degree_algebra(l), growth_degree_algebra(g));
		EXPECT_FALSE(g.jacobi_failure().has_value());
	}
}

TEST(Dilation, AutomorphismOfGradedAlgebra)
{
	std::mt19937_64 rng(12);
	std::uniform_int_distribution<long> num(1, 7), den(1, 4);
	for (int trial = 0; trial < 40; ++trial)
	{
		auto l = fixtures::random_malcev(rng).algebra;
		auto d = random_grading(l, rng);
		auto g = graded_algebra(l, d);
		auto u = unit_grading(g, d);
		Rational t(Integer(num(rng)), Integer(den(rng)));
		t.canonicalize();
		Vector x = fixtures::random_vector(rng, g.dim()), y = fixtures::random_vector(rng, g.dim());
		EXPECT_EQ(g.bracket(dilate(t, x, u), dilate(t, y, u)), dilate(t, g.bracket(x, y), u));
	}
}

TEST(Dilation, Examples)
{
	auto h = fixtures::heisenberg_algebra();
	auto d = default_grading(h);
	Vector x = vec({3, -1, 5});
	EXPECT_EQ(dilate(Rational(1), x, d), x);
	EXPECT_EQ(dilate(Rational(2), vec({0, 0, 1}), d), vec({0, 0, 4}));
	EXPECT_EQ(dilate(Rational(2), dilate(Rational(3), x, d), d), dilate(Rational(6), x, d));
	EXPECT_THROW(dilate(Rational(0), x, d), domain_error);
	EXPECT_THROW(dilate(-1.0, std::vector<double>{1, 2, 3}, d), domain_error);
}

TEST(QuasiNorm, Examples)
{
	auto h = fixtures::heisenberg_algebra();
	auto d = default_grading(h);
	EXPECT_DOUBLE_EQ(quasi_norm(ConeVector(vec({3, -2, 0})), d), 3.0);
	EXPECT_DOUBLE_EQ(quasi_norm(ConeVector(vec({0, 0, 4})), d), 2.0);
	EXPECT_DOUBLE_EQ(quasi_norm(ConeVector(vec({3, 0, -4})), d), 3.0);
	EXPECT_DOUBLE_EQ(quasi_norm(ConeVector(vec({0, 0, 0})), d), 0.0);
}

TEST(QuasiNorm, Homogeneous)
{
	std::mt19937_64 rng(13);
	auto l = fixtures::filiform4_skewed();
	auto d = default_grading(l);
	std::uniform_int_distribution<long> num(1, 9), den(1, 5);
	for (int trial = 0; trial < 50; ++trial)
	{
		Vector x = fixtures::random_vector(rng, 4);
		Rational t(Integer(num(rng)), Integer(den(rng)));
		t.canonicalize();
		double lhs = quasi_norm(ConeVector(dilate(t, x, d)), d);
		double rhs = t.get_d() * quasi_norm(ConeVector(x), d);
		EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, rhs));
	}
}

TEST(Bch, AbelianIsSum)
{
	auto ab = LieAlgebraQ::abelian(3);
	EXPECT_EQ(bch(ab, vec({1, 2, 3}), vec({-4, 5, 1})), vec({-3, 7, 4}));
}

TEST(Bch, ClassTwoAgreesWithMatrices)
{
	auto h = fixtures::heisenberg_algebra();
	Vector x = vec({2, -3, 1}), y = vec({5, 7, -2});
	Vector expect = x;
	Vector br = h.bracket(x, y);
	for (size_t k = 0; k < 3; ++k)
		expect[k] += y[k] + br[k] / 2;
	EXPECT_EQ(bch(h, x, y), expect);

	// matrix realisation: x -> xE12 + yE23 + zE13
	auto mat = [](Vector const &v) {
		RationalMatrix m(3, 3);
		m(0, 1) = v[0];
		m(1, 2) = v[1];
		m(0, 2) = v[2];
		return m;
	};
	EXPECT_EQ(mat(expect), log_unitriangular(exp_nilpotent(mat(x)) * exp_nilpotent(mat(y))));
}

TEST(Bch, MatchesMatrixProductOnUnitriangular5x5)
{
	auto a = malcev_lie_algebra(fixtures::unitriangular_group(5));
	ASSERT_EQ(a.dim(), 10u);
	std::mt19937_64 rng(2024);
	for (int trial = 0; trial < 100; ++trial)
	{
		auto p = fixtures::random_unitriangular(rng, 5, 3);
		auto q = fixtures::random_unitriangular(rng, 5, 3);
		Vector x = a.coordinates(log_unitriangular(p));
		Vector y = a.coordinates(log_unitriangular(q));
		Vector z = bch(a.algebra, x, y);
		ASSERT_EQ(a.element(z), log_unitriangular(p * q)) << "trial " << trial;
	}
}

TEST(Bch, AssociativeWithInverses)
{
	std::mt19937_64 rng(14);
	for (int trial = 0; trial < 40; ++trial)
	{
		auto l = fixtures::random_malcev(rng).algebra;
		ASSERT_LE(lcs_algebra(l).nilpotency_class(), 5u);
		size_t n = l.dim();
		Vector x = fixtures::random_vector(rng, n, 3), y = fixtures::random_vector(rng, n, 3),
		       z = fixtures::random_vector(rng, n, 3);
		EXPECT_EQ(bch(l, x, bch(l, y, z)), bch(l, bch(l, x, y), z));
		Vector minus = x;
		for (auto &c : minus)
			c = -c;
		EXPECT_TRUE(is_zero(bch(l, x, minus)));
	}
}

TEST(Bch, CapacityError)
{
	// filiform of dimension 11 has class 10
	size_t n = 11;
	std::vector<std::string> labels;
	std::vector<LieAlgebraQ::Bracket> br;
	for (size_t i = 0; i < n; ++i)
		labels.push_back("e" + std::to_string(i + 1));
	for (size_t j = 1; j + 1 < n; ++j)
		br.push_back({0, j, unit_vector(n, j + 1)});
	LieAlgebraQ f(labels, br);
	EXPECT_EQ(lcs_algebra(f).nilpotency_class(), 10u);
	EXPECT_THROW(bch(f, zero_vector(n), zero_vector(n)), capacity_error);
}

TEST(Bch, FloatingMatchesExact)
{
	auto l = fixtures::filiform4_skewed();
	Vector x = vec({1, 2, -1, 3}), y = vec({-2, 1, 4, 0});
	auto exact = to_doubles(bch(l, x, y));
	auto approx = bch(l, ConeVector(to_doubles(x)), ConeVector(to_doubles(y)));
	ASSERT_FALSE(approx.exact());
	for (size_t k = 0; k < 4; ++k)
		EXPECT_NEAR(approx.approximate()[k], exact[k], 1e-12);
}
