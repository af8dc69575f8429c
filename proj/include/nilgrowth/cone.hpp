#pragma once

#include "nilgrowth/errors.hpp"
#include "nilgrowth/liealg.hpp"
#include "nilgrowth/nilgroup.hpp"
#include "nilgrowth/wordmetric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace nilgrowth {

/// delta_{1/n}(log x^n) in the adapted coordinates of `d` (a grading of
/// a.algebra). Exact.
inline ConeVector cone_point(RationalMatrix const &x, long n, MalcevAlgebra const &a,
                             GradedDecomposition const &d)
{
	if (n <= 0)
		throw domain_error("cone_point: scale must be positive");
	Vector c = a.coordinates(log_unipotent(x.power(n)));
	return ConeVector(dilate(Rational(1, static_cast<unsigned long>(n)), d.to_adapted(c), d));
}

struct GradedLimit
{
	std::vector<long> scales;
	std::vector<Rational> errors; ///< exact max-abs distances
	bool nonincreasing = true;    ///< within 10% slack
	/// final <= first / 4; only asserted when the scales span a factor >= 10
	bool contracts = true;
	Vector graded_value; ///< bch in the graded algebra
};

inline constexpr double graded_limit_slack = 0.10;

/// Compares delta_{1/n} bch(delta_n X, delta_n Y) with the graded product of
/// X and Y. X, Y are in the adapted coordinates of `d`.
inline GradedLimit graded_limit_check(Vector const &x, Vector const &y, LieAlgebraQ const &l,
                                      GradedDecomposition const &d, std::vector<long> const &scales)
{
	if (scales.empty())
		throw domain_error("graded_limit_check: empty scale list");
	for (size_t i = 0; i < scales.size(); ++i)
		if (scales[i] <= 0 || (i && scales[i] <= scales[i - 1]))
			throw domain_error("graded_limit_check: scales must be positive and increasing");
	LieAlgebraQ adapted = adapted_algebra(l, d);
	LieAlgebraQ graded = graded_algebra(l, d);
	size_t cls = lcs_algebra(l).nilpotency_class();
	GradedLimit out;
	out.scales = scales;
	out.graded_value = bch(graded, x, y, cls);
	for (long n : scales)
	{
		Rational t(n), inv(1, static_cast<unsigned long>(n));
		Vector z = dilate(inv, bch(adapted, dilate(t, x, d), dilate(t, y, d), cls), d);
		for (size_t k = 0; k < z.size(); ++k)
			z[k] -= out.graded_value[k];
		out.errors.push_back(max_abs(z));
	}
	for (size_t i = 1; i < out.errors.size(); ++i)
		if (out.errors[i].get_d() > out.errors[i - 1].get_d() * (1 + graded_limit_slack))
			out.nonincreasing = false;
	if (scales.back() >= 10 * scales.front())
		out.contracts = out.errors.back() * 4 <= out.errors.front();
	return out;
}

/// Points delta_{1/n}(log x) for x in V^n, unitriangular part only.
struct CloudSnapshot
{
	size_t radius = 0;
	size_t ball_size = 0; ///< |V^n| before subsampling
	std::vector<std::vector<double>> points;
	bool subsampled = false;
	size_t cap = 0;
	unsigned long long seed = 0;
};

inline constexpr size_t default_cloud_cap = 50'000;

/// Unipotent part of x (x itself when unitriangular).
inline RationalMatrix unipotent_part(RationalMatrix const &x)
{
	if (x.is_unitriangular())
		return x;
	return jordan_chevalley(x).unipotent;
}

inline CloudSnapshot ball_cloud(BallTable const &t, size_t n, MalcevAlgebra const &a,
                                GradedDecomposition const &d, size_t cap = default_cloud_cap,
                                unsigned long long seed = 1)
{
	if (n == 0 || n > t.max_radius())
		throw domain_error("ball_cloud: radius must lie in 1..horizon");
	CloudSnapshot s;
	s.radius = n;
	s.ball_size = t.sizes()[n];
	s.cap = cap;
	s.seed = seed;
	std::vector<size_t> idx(s.ball_size);
	std::iota(idx.begin(), idx.end(), size_t(0));
	if (idx.size() > cap)
	{
		std::vector<size_t> pick;
		std::mt19937_64 rng(seed);
		std::sample(idx.begin(), idx.end(), std::back_inserter(pick), cap, rng);
		idx = std::move(pick);
		s.subsampled = true;
	}
	if (idx.empty())
		throw domain_error("ball_cloud: empty snapshot");
	Rational inv(1, static_cast<unsigned long>(n));
	for (size_t i : idx)
	{
		auto c = a.try_coordinates(log_unipotent(unipotent_part(t.element(i))));
		if (!c)
			throw unsupported_input("ball_cloud: unipotent part of " + t.key(i) +
			                        " lies outside the Malcev algebra");
		s.points.push_back(to_doubles(dilate(inv, d.to_adapted(*c), d)));
	}
	return s;
}

/// Hausdorff distance between the point sets (Euclidean, brute force).
inline double cloud_distance(CloudSnapshot const &s1, CloudSnapshot const &s2)
{
	if (s1.points.empty() || s2.points.empty())
		throw domain_error("cloud_distance: empty snapshot");
	auto directed = [](auto const &p, auto const &q) {
		double worst = 0;
		for (auto const &x : p)
		{
			double best = std::numeric_limits<double>::infinity();
			for (auto const &y : q)
			{
				double s = 0;
				for (size_t k = 0; k < x.size() && s < best; ++k)
					s += (x[k] - y[k]) * (x[k] - y[k]);
				best = std::min(best, s);
				if (best <= worst)
					break; // cannot raise the max any more
			}
			worst = std::max(worst, best);
		}
		return std::sqrt(worst);
	};
	return std::max(directed(s1.points, s2.points), directed(s2.points, s1.points));
}

} // namespace nilgrowth
