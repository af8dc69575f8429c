#pragma once

#include "nilgrowth/errors.hpp"
#include "nilgrowth/nilgroup.hpp"
#include "nilgrowth/wordmetric.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace nilgrowth {

/// A weight omega on the group, evaluated in the log domain.
struct WeightSpec
{
	enum class Kind
	{
		constant_one,
		polynomial,             ///< (1 + tau)^s
		coordinate_exponential, ///< base^{|t_idx|}, t = Malcev coordinates
		table,                  ///< explicit canonical key -> value
	};
	Kind kind = Kind::constant_one;
	double exponent = 0; ///< s
	double base = 1;     ///< b
	size_t coordinate = 0;
	std::map<std::string, double> values;
	bool symmetrize = false;

	static WeightSpec constant() { return {}; }
	static WeightSpec polynomial(double s)
	{
		if (!(s >= 0))
			throw domain_error("polynomial weight needs s >= 0");
		WeightSpec w;
		w.kind = Kind::polynomial;
		w.exponent = s;
		return w;
	}
	static WeightSpec coordinate_exponential(double b, size_t index)
	{
		if (!(b > 1))
			throw domain_error("coordinate_exponential weight needs base > 1");
		WeightSpec w;
		w.kind = Kind::coordinate_exponential;
		w.base = b;
		w.coordinate = index;
		return w;
	}
	static WeightSpec table(std::map<std::string, double> values)
	{
		WeightSpec w;
		w.kind = Kind::table;
		w.values = std::move(values);
		return w;
	}

	std::string describe() const
	{
		std::string s;
		switch (kind)
		{
		case Kind::constant_one: s = "constant_one"; break;
		case Kind::polynomial: s = "polynomial(s=" + std::to_string(exponent) + ")"; break;
		case Kind::coordinate_exponential:
			s = "coordinate_exponential(b=" + std::to_string(base) +
			    ", index=" + std::to_string(coordinate) + ")";
			break;
		case Kind::table: s = "table(" + std::to_string(values.size()) + " entries)"; break;
		}
		return symmetrize ? s + ", symmetrized" : s;
	}
};

/// Evaluates log omega(x). Word lengths come from the search, coordinates
/// from the Malcev algebra (required for coordinate weights). Returns
/// nullopt when x lies beyond the reach of the data.
class WeightEvaluator
{
  public:
	WeightEvaluator(WeightSpec spec, HorizonSearch &search, MalcevAlgebra const *algebra = nullptr)
	    : spec_(std::move(spec)), search_(search), algebra_(algebra)
	{
		if (spec_.kind == WeightSpec::Kind::coordinate_exponential)
		{
			if (!algebra_)
				throw unsupported_input("coordinate weights need a unitriangular group");
			if (spec_.coordinate >= algebra_->dim())
				throw dimension_mismatch("weight coordinate index out of range");
		}
	}

	WeightSpec const &spec() const { return spec_; }

	std::optional<double> log_weight(RationalMatrix const &x)
	{
		auto v = raw(x);
		if (!spec_.symmetrize || !v)
			return v;
		auto w = raw(x.inverse());
		if (!w)
			return std::nullopt;
		return std::max(*v, *w);
	}

  private:
	std::optional<double> raw(RationalMatrix const &x)
	{
		switch (spec_.kind)
		{
		case WeightSpec::Kind::constant_one: return 0.0;
		case WeightSpec::Kind::polynomial:
		{
			auto t = search_.tau(x);
			if (!t)
				return std::nullopt;
			return spec_.exponent * std::log1p(static_cast<double>(*t));
		}
		case WeightSpec::Kind::coordinate_exponential:
		{
			Vector t = malcev_coordinates(x, *algebra_);
			return std::abs(t[spec_.coordinate].get_d()) * std::log(spec_.base);
		}
		case WeightSpec::Kind::table:
		{
			auto it = spec_.values.find(x.key());
			if (it == spec_.values.end())
				return std::nullopt;
			return std::log(it->second);
		}
		}
		return std::nullopt;
	}

	WeightSpec spec_;
	HorizonSearch &search_;
	MalcevAlgebra const *algebra_;
};

struct WeightAudit
{
	size_t elements_checked = 0;
	size_t pairs_checked = 0;
};

/// Spot-checks omega >= 1 and symmetry on every ball element and
/// submultiplicativity on `pairs` seeded random pairs from V^{R/2}; throws
/// invariant_violation on the first violation.
inline WeightAudit validate_weight(WeightEvaluator &w, BallTable const &t, size_t pairs = 1000,
                                   unsigned long long seed = 1)
{
	constexpr double eps = 1e-9;
	WeightAudit audit;
	for (size_t i = 0; i < t.size(); ++i)
	{
		RationalMatrix x = t.element(i);
		auto v = w.log_weight(x);
		if (!v)
			continue;
		if (*v < -eps)
			throw invariant_violation("weight below 1 at " + t.key(i));
		auto vi = w.log_weight(x.inverse());
		if (vi && std::abs(*vi - *v) > eps)
			throw invariant_violation("weight not symmetric at " + t.key(i));
		++audit.elements_checked;
	}
	size_t half = t.sizes()[t.max_radius() / 2];
	std::mt19937_64 rng(seed);
	std::uniform_int_distribution<size_t> pick(0, half - 1);
	for (size_t p = 0; p < pairs; ++p)
	{
		size_t i = pick(rng), j = pick(rng);
		RationalMatrix x = t.element(i), y = t.element(j);
		auto a = w.log_weight(x), b = w.log_weight(y), c = w.log_weight(x * y);
		if (!a || !b || !c)
			continue;
		if (*c > *a + *b + eps)
			throw invariant_violation("weight not submultiplicative at (" + t.key(i) + ", " +
			                          t.key(j) + ")");
		++audit.pairs_checked;
	}
	return audit;
}

// ---------------------------------------------------------------------------
// GNR and condition (S)
// ---------------------------------------------------------------------------

inline constexpr double gnr_tolerance = 0.05;

struct GnrVerdict
{
	enum class Kind
	{
		passes,
		fails,
		inconclusive,
	};
	Kind kind = Kind::inconclusive;
	/// omega(x^k)^{1/k} (or the ball maximum for condition (S)), k = 1..
	std::vector<double> sequence;
	/// Least-squares fit of log omega_k = L k + beta log k + c + c'/k over
	/// the tail; limit = e^L is the extrapolated k-th root limit.
	double limit = std::numeric_limits<double>::quiet_NaN();
	double beta = std::numeric_limits<double>::quiet_NaN();
	/// Slope of the k-th roots over the tail; <= 0 means decreasing trend.
	double trend = std::numeric_limits<double>::quiet_NaN();
	double tail_last = std::numeric_limits<double>::quiet_NaN();
	size_t fit_from = 0;
	double tolerance = gnr_tolerance;
};

inline char const *to_string(GnrVerdict::Kind k)
{
	switch (k)
	{
	case GnrVerdict::Kind::passes: return "passes";
	case GnrVerdict::Kind::fails: return "fails";
	case GnrVerdict::Kind::inconclusive: return "inconclusive";
	}
	return "?";
}

namespace detail {

/// Least squares for y ~ p0 k + p1 log k + p2 + p3 / k via the normal
/// equations; the 1/k term absorbs the leading correction of log(1 + k).
inline std::optional<std::array<double, 4>> fit_growth_model(std::vector<double> const &ks,
                                                             std::vector<double> const &ys)
{
	constexpr int p = 4;
	double m[p][p + 1] = {};
	for (size_t i = 0; i < ks.size(); ++i)
	{
		double f[p] = {ks[i], std::log(ks[i]), 1.0, 1.0 / ks[i]};
		for (int r = 0; r < p; ++r)
		{
			for (int c = 0; c < p; ++c)
				m[r][c] += f[r] * f[c];
			m[r][p] += f[r] * ys[i];
		}
	}
	for (int c = 0; c < p; ++c)
	{
		int piv = c;
		for (int r = c + 1; r < p; ++r)
			if (std::abs(m[r][c]) > std::abs(m[piv][c]))
				piv = r;
		if (std::abs(m[piv][c]) < 1e-12)
			return std::nullopt;
		std::swap(m[piv], m[c]);
		for (int r = 0; r < p; ++r)
			if (r != c)
			{
				double f = m[r][c] / m[c][c];
				for (int k = c; k <= p; ++k)
					m[r][k] -= f * m[c][k];
			}
	}
	std::array<double, p> out{};
	for (int r = 0; r < p; ++r)
		out[r] = m[r][p] / m[r][r];
	return out;
}

/// Verdict from log omega_k, k = 1..K: passes when the extrapolated limit
/// e^L is within tolerance of 1 and the k-th roots do not increase over the
/// tail; fails when e^L exceeds 1 + tolerance; fewer than 8 values are
/// inconclusive.
inline GnrVerdict kth_root_verdict(std::vector<double> const &log_values,
                                   double tolerance = gnr_tolerance)
{
	constexpr size_t min_values = 8;
	GnrVerdict v;
	v.tolerance = tolerance;
	for (size_t k = 1; k <= log_values.size(); ++k)
		v.sequence.push_back(std::exp(log_values[k - 1] / static_cast<double>(k)));
	if (log_values.size() < min_values)
		return v;
	size_t big = log_values.size();
	v.fit_from = (big + 1) / 2;
	std::vector<double> ks, ys, roots;
	for (size_t k = v.fit_from; k <= big; ++k)
	{
		ks.push_back(static_cast<double>(k));
		ys.push_back(log_values[k - 1]);
		roots.push_back(v.sequence[k - 1]);
	}
	v.tail_last = v.sequence.back();
	v.trend = ls_slope(ks, roots);
	auto fit = fit_growth_model(ks, ys);
	if (!fit)
		return v;
	v.limit = std::exp((*fit)[0]);
	v.beta = (*fit)[1];
	if (v.limit > 1 + tolerance)
		v.kind = GnrVerdict::Kind::fails;
	else if (v.trend <= 1e-12)
		v.kind = GnrVerdict::Kind::passes;
	return v;
}

} // namespace detail

/// GNR condition at x: omega(x^k)^{1/k} -> 1.
inline GnrVerdict gnr_at(RationalMatrix const &x, WeightEvaluator &w, size_t k_max,
                         double tolerance = gnr_tolerance)
{
	std::vector<double> logs;
	RationalMatrix p = RationalMatrix::identity(x.rows());
	for (size_t k = 1; k <= k_max; ++k)
	{
		p = p * x;
		auto v = w.log_weight(p);
		if (!v)
			break;
		logs.push_back(*v);
	}
	return detail::kth_root_verdict(logs, tolerance);
}

/// Condition (S): (max over V^k of omega)^{1/k} -> 1, for k = 1..R.
inline GnrVerdict condition_S(WeightEvaluator &w, BallTable const &t,
                              double tolerance = gnr_tolerance)
{
	std::vector<double> logs;
	double running = 0;
	for (size_t r = 1; r <= t.max_radius(); ++r)
	{
		auto [lo, hi] = t.sphere(r);
		bool ok = true;
		for (size_t i = lo; i < hi && ok; ++i)
		{
			auto v = w.log_weight(t.element(i));
			if (!v)
				ok = false;
			else
				running = std::max(running, *v);
		}
		if (!ok)
			break;
		logs.push_back(running);
	}
	return detail::kth_root_verdict(logs, tolerance);
}

// ---------------------------------------------------------------------------
// The test set B
// ---------------------------------------------------------------------------

struct TestSetB
{
	std::vector<size_t> generator_indices;
	std::vector<RationalMatrix> elements;
	std::vector<std::string> labels;
	/// True when the group is not certified nilpotent and B fell back to the
	/// full generator list.
	bool fallback = false;
};

/// Generators whose images span the layer-0 quotient G/H_1, chosen greedily
/// in generator order.
inline TestSetB build_B(MatrixGroupDescriptor const &g, MalcevAlgebra const &a)
{
	if (!g.certified_unitriangular)
		throw unsupported_input("build_B: " + g.label + " is not certified nilpotent");
	std::vector<size_t> top;
	for (size_t i = 0; i < a.dim(); ++i)
		if (a.layer_of[i] == 0)
			top.push_back(i);
	Subspace span(top.size());
	TestSetB b;
	for (size_t k = 0; k < g.generators.size() && span.dimension() < top.size(); ++k)
	{
		Vector c = a.coordinates(log_unitriangular(g.generators[k]));
		Vector image;
		for (size_t i : top)
			image.push_back(c[i]);
		if (span.insert(image))
		{
			b.generator_indices.push_back(k);
			b.elements.push_back(g.generators[k]);
			b.labels.push_back(g.generator_labels[k]);
		}
	}
	return b;
}

/// build_B for certified groups; otherwise every generator.
inline TestSetB build_B_or_generators(MatrixGroupDescriptor const &g, MalcevAlgebra const *a)
{
	if (g.certified_unitriangular && a)
		return build_B(g, *a);
	TestSetB b;
	b.fallback = true;
	for (size_t k = 0; k < g.generators.size(); ++k)
	{
		b.generator_indices.push_back(k);
		b.elements.push_back(g.generators[k]);
		b.labels.push_back(g.generator_labels[k]);
	}
	return b;
}

struct ConsistencyReport
{
	TestSetB B;
	std::vector<GnrVerdict> gnr; ///< one per element of B
	GnrVerdict condition_s;
	enum class Agreement
	{
		agree,
		disagree,
		inconclusive,
	};
	Agreement agreement = Agreement::inconclusive;
	bool all_gnr_pass() const
	{
		for (auto const &v : gnr)
			if (v.kind != GnrVerdict::Kind::passes)
				return false;
		return true;
	}
};

inline char const *to_string(ConsistencyReport::Agreement a)
{
	switch (a)
	{
	case ConsistencyReport::Agreement::agree: return "agree";
	case ConsistencyReport::Agreement::disagree: return "disagree";
	case ConsistencyReport::Agreement::inconclusive: return "inconclusive";
	}
	return "?";
}

/// Condition (S) against GNR on every element of B. Any inconclusive part
/// makes the agreement inconclusive.
inline ConsistencyReport theorem_4_2_consistency(MatrixGroupDescriptor const &g, WeightEvaluator &w,
                                                 BallTable const &t, size_t k_max,
                                                 MalcevAlgebra const *a = nullptr)
{
	ConsistencyReport r;
	r.B = build_B_or_generators(g, a);
	bool any_inconclusive = false, any_fail = false;
	for (auto const &x : r.B.elements)
	{
		r.gnr.push_back(gnr_at(x, w, k_max));
		any_inconclusive |= r.gnr.back().kind == GnrVerdict::Kind::inconclusive;
		any_fail |= r.gnr.back().kind == GnrVerdict::Kind::fails;
	}
	r.condition_s = condition_S(w, t);
	if (any_inconclusive || r.condition_s.kind == GnrVerdict::Kind::inconclusive)
		r.agreement = ConsistencyReport::Agreement::inconclusive;
	else if ((r.condition_s.kind == GnrVerdict::Kind::passes) == !any_fail)
		r.agreement = ConsistencyReport::Agreement::agree;
	else
		r.agreement = ConsistencyReport::Agreement::disagree;
	return r;
}

} // namespace nilgrowth
