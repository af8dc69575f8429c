#pragma once

#include "nilgrowth/errors.hpp"
#include "nilgrowth/linear.hpp"
#include "nilgrowth/rational.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nilgrowth {

/// Finite-dimensional Lie algebra over Q given by structure constants in a
/// fixed basis. Construction verifies antisymmetry and the Jacobi identity.
class LieAlgebraQ
{
  public:
	struct Bracket
	{
		size_t i, j;
		Vector value; ///< coefficients of [e_i, e_j]
	};

	LieAlgebraQ() = default;

	/// `brackets` lists [e_i,e_j] for some pairs; the rest follow from
	/// antisymmetry or are zero. A pair given twice (in either order) must agree.
	LieAlgebraQ(std::vector<std::string> labels, std::vector<Bracket> const &brackets)
	    : dim_(labels.size()), labels_(std::move(labels)),
	      table_(dim_ * dim_, zero_vector(dim_))
	{
		std::vector<bool> set(dim_ * dim_, false);
		for (auto const &b : brackets)
		{
			if (b.i >= dim_ || b.j >= dim_)
				throw dimension_mismatch("bracket index out of range");
			if (b.value.size() != dim_)
				throw dimension_mismatch("bracket value has wrong dimension");
			if (b.i == b.j)
			{
				if (!is_zero(b.value))
					throw invariant_violation("antisymmetry: [e_i, e_i] must vanish");
				continue;
			}
			Vector neg = b.value;
			for (auto &x : neg)
				x = -x;
			if ((set[b.i * dim_ + b.j] && table_[b.i * dim_ + b.j] != b.value) ||
			    (set[b.j * dim_ + b.i] && table_[b.j * dim_ + b.i] != neg))
				throw invariant_violation("antisymmetry: conflicting bracket entries");
			table_[b.i * dim_ + b.j] = b.value;
			table_[b.j * dim_ + b.i] = std::move(neg);
			set[b.i * dim_ + b.j] = set[b.j * dim_ + b.i] = true;
		}
		if (auto bad = jacobi_failure())
			throw invariant_violation("Jacobi identity fails for basis triple (" +
			                          labels_[bad->i] + ", " + labels_[bad->j] + ", " +
			                          labels_[bad->k] + ")");
	}

	/// Abelian algebra of the given dimension.
	static LieAlgebraQ abelian(size_t dim, std::string const &prefix = "e")
	{
		std::vector<std::string> labels;
		for (size_t i = 0; i < dim; ++i)
			labels.push_back(prefix + std::to_string(i + 1));
		return LieAlgebraQ(std::move(labels), {});
	}

	size_t dim() const { return dim_; }
	std::vector<std::string> const &labels() const { return labels_; }
	Vector const &structure(size_t i, size_t j) const { return table_[i * dim_ + j]; }

	template <class Scalar>
	std::vector<Scalar> bracket(std::vector<Scalar> const &x, std::vector<Scalar> const &y) const
	{
		std::vector<Scalar> out(dim_, Scalar(0));
		for (size_t i = 0; i < dim_; ++i)
		{
			if (x[i] == 0)
				continue;
			for (size_t j = 0; j < dim_; ++j)
			{
				if (y[j] == 0 || i == j)
					continue;
				Vector const &c = table_[i * dim_ + j];
				Scalar xy = x[i] * y[j];
				for (size_t k = 0; k < dim_; ++k)
					if (c[k] != 0)
						out[k] += xy * scalar_cast<Scalar>(c[k]);
			}
		}
		return out;
	}

	bool is_abelian() const
	{
		for (auto const &v : table_)
			if (!is_zero(v))
				return false;
		return true;
	}

	/// Pairs (i<j) with nonzero bracket.
	std::vector<Bracket> nonzero_brackets() const
	{
		std::vector<Bracket> out;
		for (size_t i = 0; i < dim_; ++i)
			for (size_t j = i + 1; j < dim_; ++j)
				if (!is_zero(structure(i, j)))
					out.push_back({i, j, structure(i, j)});
		return out;
	}

	struct Triple
	{
		size_t i, j, k;
	};
	/// First basis triple violating Jacobi, if any.
	std::optional<Triple> jacobi_failure() const
	{
		for (size_t i = 0; i < dim_; ++i)
			for (size_t j = i + 1; j < dim_; ++j)
				for (size_t k = j + 1; k < dim_; ++k)
				{
					auto ei = unit_vector(dim_, i), ej = unit_vector(dim_, j), ek = unit_vector(dim_, k);
					Vector a = bracket(ei, bracket(ej, ek));
					Vector b = bracket(ej, bracket(ek, ei));
					Vector c = bracket(ek, bracket(ei, ej));
					for (size_t t = 0; t < dim_; ++t)
						if (a[t] + b[t] + c[t] != 0)
							return Triple{i, j, k};
				}
		return std::nullopt;
	}

	friend bool operator==(LieAlgebraQ const &a, LieAlgebraQ const &b)
	{
		return a.dim_ == b.dim_ && a.table_ == b.table_;
	}

	template <class Scalar> static Scalar scalar_cast(Rational const &r)
	{
		if constexpr (std::is_same_v<Scalar, double>)
			return r.get_d();
		else
			return Scalar(r);
	}

  private:
	size_t dim_ = 0;
	std::vector<std::string> labels_;
	std::vector<Vector> table_; // dim*dim entries
};

// ---------------------------------------------------------------------------
// Lower central series
// ---------------------------------------------------------------------------

struct LcsChain
{
	/// bases[n] spans C_n (reduced echelon); the last entry is empty.
	std::vector<std::vector<Vector>> bases;
	std::vector<size_t> dims; ///< dim C_0 > dim C_1 > ... > 0

	/// Nilpotency class: the least c with C_c = 0.
	size_t nilpotency_class() const { return dims.empty() ? 0 : dims.size() - 1; }
};

/// C_0 = L, C_{n+1} = [L, C_n]. Throws invariant_violation when the chain
/// stalls above zero (the algebra is not nilpotent).
inline LcsChain lcs_algebra(LieAlgebraQ const &l)
{
	size_t n = l.dim();
	LcsChain chain;
	std::vector<Vector> current;
	for (size_t i = 0; i < n; ++i)
		current.push_back(unit_vector(n, i));
	chain.bases.push_back(current);
	chain.dims.push_back(n);
	while (!current.empty())
	{
		Subspace next(n);
		for (size_t i = 0; i < n; ++i)
			for (auto const &v : current)
				next.insert(l.bracket(unit_vector(n, i), v));
		if (next.dimension() == current.size())
			throw invariant_violation("lower central series stabilises at dimension " +
			                          std::to_string(current.size()) + ": algebra is not nilpotent");
		current = next.basis();
		chain.bases.push_back(current);
		chain.dims.push_back(current.size());
	}
	return chain;
}

/// d = sum_{n>=1} n * (dim C_{n-1} - dim C_n), equivalently sum_{n>=0} dim C_n.
inline long growth_degree_from_dims(std::vector<size_t> const &dims)
{
	long d = 0;
	for (size_t n = 1; n < dims.size(); ++n)
		d += static_cast<long>(n) * static_cast<long>(dims[n - 1] - dims[n]);
	return d;
}

inline long growth_degree_algebra(LieAlgebraQ const &l)
{
	return growth_degree_from_dims(lcs_algebra(l).dims);
}

// ---------------------------------------------------------------------------
// Gradings
// ---------------------------------------------------------------------------

/// A decomposition L = w_1 + ... + w_r with w_j + ... + w_r = C_{j-1}.
/// Stores the adapted basis (layer by layer, in original coordinates);
/// vectors passed to quasi_norm / dilate / graded operations are expressed
/// in this adapted basis.
class GradedDecomposition
{
  public:
	GradedDecomposition() = default;

	/// Validates the cofiltration property against the LCS of `l`.
	GradedDecomposition(LieAlgebraQ const &l, std::vector<std::vector<Vector>> layers)
	{
		auto chain = lcs_algebra(l);
		if (layers.size() != chain.nilpotency_class())
			throw invariant_violation("grading: layer count " + std::to_string(layers.size()) +
			                          " differs from nilpotency class " +
			                          std::to_string(chain.nilpotency_class()));
		std::vector<Vector> tail;
		for (size_t j = layers.size(); j-- > 0;)
		{
			tail.insert(tail.end(), layers[j].begin(), layers[j].end());
			auto span = rref_span(tail);
			if (span.dimension != tail.size() || span.basis != rref_span(chain.bases[j]).basis)
				throw invariant_violation("grading: layers " + std::to_string(j + 1) +
				                          ".. do not span C_" + std::to_string(j));
		}
		for (size_t j = 0; j < layers.size(); ++j)
		{
			ranges_.emplace_back(basis_.size(), basis_.size() + layers[j].size());
			for (auto &v : layers[j])
			{
				basis_.push_back(std::move(v));
				weight_.push_back(static_cast<unsigned>(j + 1));
			}
		}
		solver_ = BasisSolver(basis_);
	}

	size_t dim() const { return basis_.size(); }
	size_t layer_count() const { return ranges_.size(); }
	/// Layer j (1-based) occupies adapted indices [first, second).
	std::pair<size_t, size_t> layer_range(size_t j) const { return ranges_.at(j - 1); }
	/// 1-based layer of adapted index i.
	unsigned weight(size_t i) const { return weight_[i]; }
	std::vector<Vector> const &basis() const { return basis_; }

	Vector to_adapted(Vector const &x) const
	{
		auto c = solver_.solve(x);
		if (!c)
			throw domain_error("vector outside the graded algebra");
		return *c;
	}
	Vector from_adapted(Vector const &y) const { return solver_.combine(y); }

	/// Original-basis indices per layer, when every adapted vector is a
	/// standard unit vector.
	std::optional<std::vector<std::vector<size_t>>> index_sets() const
	{
		std::vector<std::vector<size_t>> out(layer_count());
		for (size_t i = 0; i < basis_.size(); ++i)
		{
			size_t hit = basis_[i].size();
			for (size_t k = 0; k < basis_[i].size(); ++k)
			{
				if (basis_[i][k] == 0)
					continue;
				if (basis_[i][k] != 1 || hit != basis_[i].size())
					return std::nullopt;
				hit = k;
			}
			out[weight_[i] - 1].push_back(hit);
		}
		return out;
	}

  private:
	std::vector<Vector> basis_;
	std::vector<unsigned> weight_;
	std::vector<std::pair<size_t, size_t>> ranges_;
	BasisSolver solver_;
};

/// w_j = complement of C_j in C_{j-1}, chosen by echelon extension.
inline GradedDecomposition default_grading(LieAlgebraQ const &l)
{
	auto chain = lcs_algebra(l);
	std::vector<std::vector<Vector>> layers;
	for (size_t j = 0; j + 1 < chain.bases.size(); ++j)
		layers.push_back(echelon_complement(chain.bases[j], chain.bases[j + 1]));
	return GradedDecomposition(l, std::move(layers));
}

/// The same algebra rewritten in the adapted basis of `d`.
inline LieAlgebraQ adapted_algebra(LieAlgebraQ const &l, GradedDecomposition const &d)
{
	std::vector<std::string> labels;
	std::vector<LieAlgebraQ::Bracket> br;
	auto const &b = d.basis();
	for (size_t i = 0; i < b.size(); ++i)
	{
		labels.push_back("w" + std::to_string(d.weight(i)) + "_" + std::to_string(i + 1));
		for (size_t j = i + 1; j < b.size(); ++j)
			br.push_back({i, j, d.to_adapted(l.bracket(b[i], b[j]))});
	}
	if (auto idx = d.index_sets())
	{
		// keep the user's labels when the adapted basis is a permutation of the original one
		labels.clear();
		for (auto const &v : b)
			for (size_t k = 0; k < v.size(); ++k)
				if (v[k] != 0)
					labels.push_back(l.labels()[k]);
	}
	return LieAlgebraQ(std::move(labels), br);
}

/// Associated graded algebra: [X,Y]^inf is the w_{i+j} component of [X,Y]
/// for X in w_i, Y in w_j. Output is in the adapted basis of `d`.
inline LieAlgebraQ graded_algebra(LieAlgebraQ const &l, GradedDecomposition const &d)
{
	LieAlgebraQ a = adapted_algebra(l, d);
	std::vector<LieAlgebraQ::Bracket> br;
	size_t n = a.dim();
	for (size_t i = 0; i < n; ++i)
		for (size_t j = i + 1; j < n; ++j)
		{
			Vector v = a.structure(i, j);
			unsigned target = d.weight(i) + d.weight(j);
			for (size_t k = 0; k < n; ++k)
				if (d.weight(k) != target)
					v[k] = 0;
			br.push_back({i, j, std::move(v)});
		}
	try
	{
		return LieAlgebraQ(a.labels(), br);
	}
	catch (invariant_violation const &e)
	{
		throw invariant_violation(std::string("graded_algebra: ") + e.what());
	}
}

// ---------------------------------------------------------------------------
// Cone vectors, BCH, dilations, quasi-norm
// ---------------------------------------------------------------------------

/// Coefficient vector tagged exact (rational) or approximate (double).
class ConeVector
{
  public:
	ConeVector() = default;
	ConeVector(Vector exact) : data_(std::move(exact)) {}
	ConeVector(std::vector<double> approx) : data_(std::move(approx)) {}

	bool exact() const { return std::holds_alternative<Vector>(data_); }
	size_t size() const
	{
		return exact() ? std::get<Vector>(data_).size() : std::get<std::vector<double>>(data_).size();
	}
	Vector const &rational() const
	{
		if (!exact())
			throw domain_error("ConeVector holds approximate coefficients");
		return std::get<Vector>(data_);
	}
	std::vector<double> approximate() const
	{
		return exact() ? to_doubles(std::get<Vector>(data_)) : std::get<std::vector<double>>(data_);
	}

	friend bool operator==(ConeVector const &, ConeVector const &) = default;

  private:
	std::variant<Vector, std::vector<double>> data_;
};

namespace detail {

/// Dynkin's form of the BCH series: coefficient of every right-nested word
/// [a1,[a2,...,[a_{m-1},a_m]]] in letters X=0, Y=1, up to length `cap`.
inline std::map<std::vector<unsigned char>, Rational> const &bch_word_coefficients(unsigned cap)
{
	static std::mutex mutex;
	static std::map<unsigned, std::map<std::vector<unsigned char>, Rational>> cache;
	std::lock_guard lock(mutex);
	if (auto it = cache.find(cap); it != cache.end())
		return it->second;

	std::vector<Integer> factorial(cap + 1, Integer(1));
	for (unsigned i = 1; i <= cap; ++i)
		factorial[i] = factorial[i - 1] * i;

	std::map<std::vector<unsigned char>, Rational> coeffs;
	std::vector<unsigned char> word;
	// blocks X^r Y^s with r+s >= 1; n = number of blocks
	auto rec = [&](auto &&self, unsigned n, Integer const &denominator) -> void {
		if (n > 0)
		{
			unsigned m = static_cast<unsigned>(word.size());
			Integer den = denominator * n * m;
			Rational c(Integer(1), den);
			c.canonicalize();
			if (n % 2 == 0)
				c = -c;
			// words ending in a repeated letter bracket to zero
			if (m == 1 || word[m - 1] != word[m - 2])
				coeffs[word] += c;
		}
		unsigned used = static_cast<unsigned>(word.size());
		for (unsigned total = 1; used + total <= cap; ++total)
			for (unsigned r = 0; r <= total; ++r)
			{
				unsigned s = total - r;
				word.insert(word.end(), r, 0);
				word.insert(word.end(), s, 1);
				self(self, n + 1, denominator * factorial[r] * factorial[s]);
				word.resize(used);
			}
	};
	rec(rec, 0, Integer(1));
	for (auto it = coeffs.begin(); it != coeffs.end();)
		it = it->second == 0 ? coeffs.erase(it) : std::next(it);
	return cache.emplace(cap, std::move(coeffs)).first->second;
}

} // namespace detail

/// Default ceiling on the nilpotency class accepted by bch.
inline constexpr unsigned bch_class_cap = 8;

/// log(exp X exp Y) in a nilpotent algebra, from the Dynkin series truncated
/// at the nilpotency class. Exact when Scalar is Rational.
template <class Scalar>
std::vector<Scalar> bch(LieAlgebraQ const &l, std::vector<Scalar> const &x,
                        std::vector<Scalar> const &y, size_t nilpotency_class,
                        unsigned cap = bch_class_cap)
{
	if (x.size() != l.dim() || y.size() != l.dim())
		throw dimension_mismatch("bch: vector dimension differs from algebra");
	if (nilpotency_class > cap)
		throw capacity_error("bch: nilpotency class " + std::to_string(nilpotency_class) +
		                     " exceeds cap " + std::to_string(cap));
	unsigned order = static_cast<unsigned>(std::max<size_t>(nilpotency_class, 1));
	auto const &coeffs = detail::bch_word_coefficients(order);

	// right-nested brackets memoised by suffix
	std::map<std::vector<unsigned char>, std::vector<Scalar>> memo;
	auto nested = [&](auto &&self, std::vector<unsigned char> const &w,
	                  size_t from) -> std::vector<Scalar> const & {
		std::vector<unsigned char> suffix(w.begin() + static_cast<long>(from), w.end());
		if (auto it = memo.find(suffix); it != memo.end())
			return it->second;
		std::vector<Scalar> v;
		auto const &letter = w[from] == 0 ? x : y;
		if (from + 1 == w.size())
			v = letter;
		else
			v = l.bracket(letter, self(self, w, from + 1));
		return memo.emplace(std::move(suffix), std::move(v)).first->second;
	};

	std::vector<Scalar> z(l.dim(), Scalar(0));
	for (auto const &[word, c] : coeffs)
	{
		auto const &v = nested(nested, word, 0);
		Scalar cs = LieAlgebraQ::scalar_cast<Scalar>(c);
		for (size_t k = 0; k < z.size(); ++k)
			if (v[k] != 0)
				z[k] += cs * v[k];
	}
	return z;
}

template <class Scalar>
std::vector<Scalar> bch(LieAlgebraQ const &l, std::vector<Scalar> const &x,
                        std::vector<Scalar> const &y)
{
	return bch(l, x, y, lcs_algebra(l).nilpotency_class());
}

inline ConeVector bch(LieAlgebraQ const &l, ConeVector const &x, ConeVector const &y)
{
	size_t cls = lcs_algebra(l).nilpotency_class();
	if (x.exact() && y.exact())
		return ConeVector(bch(l, x.rational(), y.rational(), cls));
	return ConeVector(bch(l, x.approximate(), y.approximate(), cls));
}

/// delta_t: multiplies the layer-j component (adapted coordinates) by t^j.
inline Vector dilate(Rational const &t, Vector x, GradedDecomposition const &d)
{
	if (t <= 0)
		throw domain_error("dilate: scale must be positive");
	if (x.size() != d.dim())
		throw dimension_mismatch("dilate: vector dimension differs from grading");
	for (size_t i = 0; i < x.size(); ++i)
		x[i] *= pow(t, d.weight(i));
	return x;
}

inline std::vector<double> dilate(double t, std::vector<double> x, GradedDecomposition const &d)
{
	if (!(t > 0))
		throw domain_error("dilate: scale must be positive");
	if (x.size() != d.dim())
		throw dimension_mismatch("dilate: vector dimension differs from grading");
	for (size_t i = 0; i < x.size(); ++i)
		x[i] *= std::pow(t, static_cast<double>(d.weight(i)));
	return x;
}

inline ConeVector dilate(Rational const &t, ConeVector const &x, GradedDecomposition const &d)
{
	if (x.exact())
		return ConeVector(dilate(t, x.rational(), d));
	return ConeVector(dilate(t.get_d(), x.approximate(), d));
}

/// Homogeneous quasi-norm phi(X) = max_j |X_j|^{1/j} with |.| the
/// max-abs-coefficient norm on each layer (adapted coordinates).
inline double quasi_norm(std::vector<double> const &x, GradedDecomposition const &d)
{
	if (x.size() != d.dim())
		throw dimension_mismatch("quasi_norm: vector dimension differs from grading");
	double phi = 0;
	for (size_t j = 1; j <= d.layer_count(); ++j)
	{
		auto [lo, hi] = d.layer_range(j);
		double m = 0;
		for (size_t i = lo; i < hi; ++i)
			m = std::max(m, std::abs(x[i]));
		if (m > 0)
			phi = std::max(phi, j == 1 ? m : std::pow(m, 1.0 / static_cast<double>(j)));
	}
	return phi;
}

inline double quasi_norm(ConeVector const &x, GradedDecomposition const &d)
{
	return quasi_norm(x.approximate(), d);
}

} // namespace nilgrowth
