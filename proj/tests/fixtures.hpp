#pragma once
// Small algebras and groups shared by the unit tests.

#include "nilgrowth/liealg.hpp"
#include "nilgrowth/nilgroup.hpp"

#include <random>

namespace fixtures {

using namespace nilgrowth;

inline Vector vec(std::initializer_list<long> xs)
{
	Vector v;
	for (long x : xs)
		v.emplace_back(x);
	return v;
}

inline LieAlgebraQ heisenberg_algebra()
{
	return LieAlgebraQ({"x", "y", "z"}, {{0, 1, vec({0, 0, 1})}});
}

/// [e1,e2]=e3, [e1,e3]=e4
inline LieAlgebraQ filiform4()
{
	return LieAlgebraQ({"e1", "e2", "e3", "e4"},
	                   {{0, 1, vec({0, 0, 1, 0})}, {0, 2, vec({0, 0, 0, 1})}});
}

/// [e1,e2]=e3+e4, [e1,e3]=e4 -- the same LCS as filiform4, but not graded
/// in the standard basis.
inline LieAlgebraQ filiform4_skewed()
{
	return LieAlgebraQ({"e1", "e2", "e3", "e4"},
	                   {{0, 1, vec({0, 0, 1, 1})}, {0, 2, vec({0, 0, 0, 1})}});
}

inline RationalMatrix random_unitriangular(std::mt19937_64 &rng, size_t n, long spread = 2)
{
	std::uniform_int_distribution<long> d(-spread, spread);
	RationalMatrix m = RationalMatrix::identity(n);
	for (size_t i = 0; i < n; ++i)
		for (size_t j = i + 1; j < n; ++j)
			m(i, j) = d(rng);
	return m;
}

/// Full unitriangular group of n x n integer matrices, generated by the
/// elementary matrices I + E_{i,i+1}.
inline MatrixGroupDescriptor unitriangular_group(size_t n)
{
	std::vector<RationalMatrix> gens;
	std::vector<std::string> names;
	for (size_t i = 0; i + 1 < n; ++i)
	{
		gens.push_back(RationalMatrix::elementary(n, i, i + 1));
		names.push_back(std::string(1, static_cast<char>('a' + i)));
	}
	return MatrixGroupDescriptor::make("ut" + std::to_string(n), names, gens, true);
}

/// Random nilpotent algebra: the Malcev algebra of a few random
/// unitriangular matrices of size <= 6 (class <= 5).
inline MalcevAlgebra random_malcev(std::mt19937_64 &rng)
{
	std::uniform_int_distribution<size_t> size(3, 6), count(1, 3);
	size_t n = size(rng), k = count(rng);
	std::vector<RationalMatrix> gens;
	std::vector<std::string> names;
	for (size_t i = 0; i < k; ++i)
	{
		RationalMatrix g = random_unitriangular(rng, n);
		if (g.is_identity())
			g(0, n - 1) = 1;
		gens.push_back(g);
		names.push_back("g" + std::to_string(i + 1));
	}
	return malcev_lie_algebra(MatrixGroupDescriptor::make("random", names, gens, true));
}

inline Vector random_vector(std::mt19937_64 &rng, size_t n, long spread = 5)
{
	std::uniform_int_distribution<long> num(-spread, spread), den(1, 3);
	Vector v(n);
	for (auto &x : v)
		x = Rational(Integer(num(rng)), Integer(den(rng)));
	for (auto &x : v)
		x.canonicalize();
	return v;
}

/// Grading with the same LCS but skewed complements: each default layer
/// vector gets a random element of the next LCS step added to it.
inline GradedDecomposition random_grading(LieAlgebraQ const &l, std::mt19937_64 &rng)
{
	auto chain = lcs_algebra(l);
	std::uniform_int_distribution<long> d(-2, 2);
	std::vector<std::vector<Vector>> layers;
	for (size_t j = 0; j + 1 < chain.bases.size(); ++j)
	{
		auto w = echelon_complement(chain.bases[j], chain.bases[j + 1]);
		for (auto &v : w)
			for (auto const &c : chain.bases[j + 1])
			{
				Rational f = d(rng);
				for (size_t k = 0; k < v.size(); ++k)
					v[k] += f * c[k];
			}
		layers.push_back(std::move(w));
	}
	return GradedDecomposition(l, std::move(layers));
}

/// Grading of an algebra already written in an adapted basis.
inline GradedDecomposition unit_grading(LieAlgebraQ const &l, GradedDecomposition const &shape)
{
	std::vector<std::vector<Vector>> layers(shape.layer_count());
	for (size_t i = 0; i < shape.dim(); ++i)
		layers[shape.weight(i) - 1].push_back(unit_vector(shape.dim(), i));
	return GradedDecomposition(l, std::move(layers));
}

} // namespace fixtures

namespace fixtures {

inline nilgrowth::MatrixGroupDescriptor heisenberg_group()
{
	using nilgrowth::RationalMatrix;
	return nilgrowth::MatrixGroupDescriptor::make(
	    "heisenberg", {"a", "b"},
	    {RationalMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}, RationalMatrix{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}}},
	    true);
}

/// Z^k as commuting shears I + E_{1,i+1} in dimension k+1.
inline nilgrowth::MatrixGroupDescriptor free_abelian(size_t k)
{
	using nilgrowth::RationalMatrix;
	std::vector<RationalMatrix> gens;
	std::vector<std::string> names;
	for (size_t i = 0; i < k; ++i)
	{
		gens.push_back(RationalMatrix::elementary(k + 1, 0, i + 1));
		names.push_back("x" + std::to_string(i + 1));
	}
	return nilgrowth::MatrixGroupDescriptor::make("z" + std::to_string(k), names, gens, true);
}

} // namespace fixtures
