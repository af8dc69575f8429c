#pragma once

#include "nilgrowth/errors.hpp"
#include "nilgrowth/matrix.hpp"
#include "nilgrowth/polynomial.hpp"
#include "nilgrowth/rational.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nilgrowth {

// ---------------------------------------------------------------------------
// Subspaces
// ---------------------------------------------------------------------------

struct SpanResult
{
	std::vector<Vector> basis; ///< reduced row echelon form, pivots increasing
	size_t dimension = 0;
};

namespace detail {

/// In-place reduced row echelon form on the first `width` columns (row
/// operations are applied to whole rows); returns pivot columns.
inline std::vector<size_t> rref(std::vector<Vector> &rows, size_t width)
{
	std::vector<size_t> pivots;
	size_t r = 0;
	for (size_t c = 0; c < width && r < rows.size(); ++c)
	{
		size_t p = r;
		while (p < rows.size() && rows[p][c] == 0)
			++p;
		if (p == rows.size())
			continue;
		std::swap(rows[p], rows[r]);
		size_t full = rows[r].size(); // may carry augmented columns past `width`
		Rational s = 1 / rows[r][c];
		for (size_t k = c; k < full; ++k)
			rows[r][k] *= s;
		for (size_t i = 0; i < rows.size(); ++i)
		{
			if (i == r || rows[i][c] == 0)
				continue;
			Rational f = rows[i][c];
			for (size_t k = c; k < full; ++k)
				rows[i][k] -= f * rows[r][k];
		}
		pivots.push_back(c);
		++r;
	}
	rows.resize(r);
	return pivots;
}

} // namespace detail

/// Reduced echelon basis of the span of `vectors`.
inline SpanResult rref_span(std::span<Vector const> vectors)
{
	SpanResult out;
	if (vectors.empty())
		return out;
	size_t width = vectors.front().size();
	for (auto const &v : vectors)
		if (v.size() != width)
			throw dimension_mismatch("rref_span: vectors of different ambient dimension");
	out.basis.assign(vectors.begin(), vectors.end());
	detail::rref(out.basis, width);
	out.dimension = out.basis.size();
	return out;
}

/// Incrementally grown subspace kept in reduced echelon form.
class Subspace
{
  public:
	explicit Subspace(size_t ambient) : ambient_(ambient) {}

	size_t ambient() const { return ambient_; }
	size_t dimension() const { return rows_.size(); }
	std::vector<Vector> const &basis() const { return rows_; }

	/// Residue of v after elimination against the current basis.
	Vector reduce(Vector v) const
	{
		if (v.size() != ambient_)
			throw dimension_mismatch("Subspace: vector of wrong dimension");
		for (size_t i = 0; i < rows_.size(); ++i)
		{
			Rational f = v[pivots_[i]];
			if (f == 0)
				continue;
			for (size_t k = pivots_[i]; k < ambient_; ++k)
				v[k] -= f * rows_[i][k];
		}
		return v;
	}

	bool contains(Vector const &v) const { return is_zero(reduce(v)); }

	/// Adds v to the span; returns false when it was already contained.
	bool insert(Vector const &v)
	{
		Vector r = reduce(v);
		size_t p = 0;
		while (p < ambient_ && r[p] == 0)
			++p;
		if (p == ambient_)
			return false;
		Rational s = 1 / r[p];
		for (size_t k = p; k < ambient_; ++k)
			r[k] *= s;
		for (auto &row : rows_)
		{
			Rational f = row[p];
			if (f == 0)
				continue;
			for (size_t k = p; k < ambient_; ++k)
				row[k] -= f * r[k];
		}
		auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), p) - pivots_.begin();
		pivots_.insert(pivots_.begin() + pos, p);
		rows_.insert(rows_.begin() + pos, std::move(r));
		return true;
	}

  private:
	size_t ambient_;
	std::vector<Vector> rows_;
	std::vector<size_t> pivots_;
};

/// Solves for coordinates with respect to a fixed list of linearly
/// independent vectors. Elimination is done once; each solve is O(m·N).
class BasisSolver
{
  public:
	BasisSolver() = default;
	explicit BasisSolver(std::vector<Vector> basis) : basis_(std::move(basis))
	{
		size_t m = basis_.size();
		if (m == 0)
			return;
		width_ = basis_.front().size();
		// Augment each row with the identity to record the row operations.
		std::vector<Vector> rows(m);
		for (size_t i = 0; i < m; ++i)
		{
			if (basis_[i].size() != width_)
				throw dimension_mismatch("BasisSolver: vectors of different ambient dimension");
			rows[i] = basis_[i];
			rows[i].resize(width_ + m, Rational(0));
			rows[i][width_ + i] = 1;
		}
		auto pivots = detail::rref(rows, width_);
		if (rows.size() != m)
			throw invariant_violation("BasisSolver: vectors are linearly dependent");
		for (size_t i = 0; i < m; ++i)
			if (pivots[i] >= width_)
				throw invariant_violation("BasisSolver: vectors are linearly dependent");
		pivots_ = pivots;
		reduced_.resize(m);
		transform_.resize(m);
		for (size_t i = 0; i < m; ++i)
		{
			reduced_[i].assign(rows[i].begin(), rows[i].begin() + static_cast<long>(width_));
			transform_[i].assign(rows[i].begin() + static_cast<long>(width_), rows[i].end());
		}
	}

	size_t size() const { return basis_.size(); }
	size_t ambient() const { return width_; }
	std::vector<Vector> const &basis() const { return basis_; }

	/// Coefficients c with sum c_i basis_i = v, or nullopt when v is outside
	/// the span.
	std::optional<Vector> solve(Vector const &v) const
	{
		size_t m = basis_.size();
		if (m == 0)
			return is_zero(v) ? std::optional<Vector>(Vector{}) : std::nullopt;
		if (v.size() != width_)
			throw dimension_mismatch("BasisSolver: vector of wrong dimension");
		// v = d^T R with d_k = v[pivot_k]
		Vector residual = v;
		for (size_t k = 0; k < m; ++k)
		{
			Rational d = v[pivots_[k]];
			if (d == 0)
				continue;
			for (size_t j = 0; j < width_; ++j)
				if (reduced_[k][j] != 0)
					residual[j] -= d * reduced_[k][j];
		}
		if (!is_zero(residual))
			return std::nullopt;
		Vector c(m, Rational(0));
		for (size_t k = 0; k < m; ++k)
		{
			Rational d = v[pivots_[k]];
			if (d == 0)
				continue;
			for (size_t i = 0; i < m; ++i)
				c[i] += d * transform_[k][i];
		}
		return c;
	}

	Vector combine(Vector const &coeffs) const
	{
		Vector v(width_, Rational(0));
		for (size_t i = 0; i < coeffs.size(); ++i)
		{
			if (coeffs[i] == 0)
				continue;
			for (size_t j = 0; j < width_; ++j)
				v[j] += coeffs[i] * basis_[i][j];
		}
		return v;
	}

  private:
	std::vector<Vector> basis_;
	std::vector<Vector> reduced_;
	std::vector<Vector> transform_;
	std::vector<size_t> pivots_;
	size_t width_ = 0;
};

/// Vectors of `inner` extending a basis of `inner_of` to one of `outer`,
/// picked greedily from the echelon basis of `outer` in pivot order.
inline std::vector<Vector> echelon_complement(std::vector<Vector> const &outer,
                                              std::vector<Vector> const &inner)
{
	size_t width = outer.empty() ? 0 : outer.front().size();
	Subspace acc(width);
	for (auto const &v : inner)
		acc.insert(v);
	std::vector<Vector> out;
	for (auto const &v : rref_span(outer).basis)
		if (acc.insert(v))
			out.push_back(v);
	return out;
}

// ---------------------------------------------------------------------------
// Integer lattices
// ---------------------------------------------------------------------------

/// Z^ambient_rank modulo a relation lattice.
struct IntegerLatticeQuotient
{
	size_t ambient_rank = 0;
	std::vector<Integer> invariant_factors; ///< positive, each divides the next
	size_t free_rank = 0;
};

/// Smith normal form of the relation matrix (one relation per row).
inline IntegerLatticeQuotient smith_quotient(RationalMatrix const &relations, size_t ambient_rank)
{
	if (relations.rows() > 0 && relations.cols() != ambient_rank)
		throw dimension_mismatch("smith_quotient: relation width differs from ambient rank");
	if (!relations.is_integer())
		throw unsupported_input("smith_quotient: relations must be integral");
	size_t rows = relations.rows(), cols = ambient_rank;
	std::vector<std::vector<Integer>> a(rows, std::vector<Integer>(cols));
	for (size_t i = 0; i < rows; ++i)
		for (size_t j = 0; j < cols; ++j)
			a[i][j] = relations(i, j).get_num();

	std::vector<Integer> diag;
	for (size_t t = 0; t < std::min(rows, cols); ++t)
	{
		// smallest nonzero entry of the trailing block becomes the pivot
		auto find_pivot = [&](size_t &pr, size_t &pc) {
			bool found = false;
			for (size_t i = t; i < rows; ++i)
				for (size_t j = t; j < cols; ++j)
					if (a[i][j] != 0 && (!found || abs(a[i][j]) < abs(a[pr][pc])))
					{
						pr = i;
						pc = j;
						found = true;
					}
			return found;
		};
		size_t pr = t, pc = t;
		if (!find_pivot(pr, pc))
			break;
		for (;;)
		{
			std::swap(a[t], a[pr]);
			for (auto &row : a)
				std::swap(row[t], row[pc]);
			bool clean = true;
			for (size_t i = t + 1; i < rows; ++i)
			{
				if (a[i][t] == 0)
					continue;
				Integer q;
				mpz_fdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
				for (size_t j = t; j < cols; ++j)
					a[i][j] -= q * a[t][j];
				if (a[i][t] != 0)
					clean = false;
			}
			for (size_t j = t + 1; j < cols; ++j)
			{
				if (a[t][j] == 0)
					continue;
				Integer q;
				mpz_fdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
				for (size_t i = t; i < rows; ++i)
					a[i][j] -= q * a[i][t];
				if (a[t][j] != 0)
					clean = false;
			}
			if (clean)
			{
				// divisibility: fold a row with a non-multiple into row t
				size_t bad = rows;
				for (size_t i = t + 1; i < rows && bad == rows; ++i)
					for (size_t j = t + 1; j < cols; ++j)
						if (a[i][j] % a[t][t] != 0)
						{
							bad = i;
							break;
						}
				if (bad == rows)
					break;
				for (size_t j = t; j < cols; ++j)
					a[t][j] += a[bad][j];
			}
			pr = t;
			pc = t;
			find_pivot(pr, pc);
		}
		diag.push_back(abs(a[t][t]));
	}
	IntegerLatticeQuotient q;
	q.ambient_rank = ambient_rank;
	q.invariant_factors = std::move(diag);
	q.free_rank = ambient_rank - q.invariant_factors.size();
	return q;
}

// ---------------------------------------------------------------------------
// Quasi-unipotence and Jordan-Chevalley
// ---------------------------------------------------------------------------

struct QuasiUnipotentVerdict
{
	bool quasi_unipotent = false;
	Polynomial characteristic;
	/// Cyclotomic indices m (with multiplicity) dividing the characteristic polynomial.
	std::vector<unsigned> cyclotomic_indices;
	/// Cofactor left after removing every cyclotomic factor; 1 iff quasi-unipotent.
	Polynomial remainder;

	std::string witness() const
	{
		if (!quasi_unipotent)
			return remainder.to_string();
		std::string s;
		std::vector<unsigned> idx = cyclotomic_indices;
		std::sort(idx.begin(), idx.end());
		for (size_t i = 0; i < idx.size();)
		{
			size_t j = i;
			while (j < idx.size() && idx[j] == idx[i])
				++j;
			if (!s.empty())
				s += "*";
			s += "Phi_" + std::to_string(idx[i]);
			if (j - i > 1)
				s += "^" + std::to_string(j - i);
			i = j;
		}
		return s;
	}
};

/// Integer matrix test: all eigenvalues are roots of unity, i.e. the
/// characteristic polynomial is a product of cyclotomic polynomials.
inline QuasiUnipotentVerdict quasi_unipotent_test(RationalMatrix const &a)
{
	if (!a.square())
		throw dimension_mismatch("quasi_unipotent_test: matrix must be square");
	if (!a.is_integer())
		throw unsupported_input("quasi_unipotent_test: only integer matrices are supported");
	if (a.determinant() == 0)
		throw singular_matrix("quasi_unipotent_test: matrix is singular");
	QuasiUnipotentVerdict v;
	v.characteristic = characteristic_polynomial(a);
	Polynomial rest = v.characteristic;
	size_t n = a.rows();
	// phi(m) >= sqrt(m/2), so every relevant index is at most 2 n^2
	unsigned bound = static_cast<unsigned>(2 * n * n + 2);
	for (unsigned m = 1; m <= bound && rest.degree() > 0; ++m)
	{
		Polynomial phi = Polynomial::cyclotomic(m);
		if (phi.degree() > rest.degree())
			continue;
		for (;;)
		{
			auto [q, r] = rest.divmod(phi);
			if (!r.is_zero())
				break;
			rest = q;
			v.cyclotomic_indices.push_back(m);
		}
	}
	v.remainder = rest.monic();
	v.quasi_unipotent = rest.degree() == 0;
	return v;
}

struct JordanChevalley
{
	RationalMatrix semisimple;
	RationalMatrix unipotent;
};

/// Multiplicative Jordan-Chevalley decomposition A = S U over the rationals,
/// with S found by Newton iteration on the squarefree part of the
/// characteristic polynomial.
inline JordanChevalley jordan_chevalley(RationalMatrix const &a)
{
	if (!a.square())
		throw dimension_mismatch("jordan_chevalley: matrix must be square");
	if (a.determinant() == 0)
		throw singular_matrix("jordan_chevalley: matrix is singular");
	Polynomial chi = characteristic_polynomial(a);
	Polynomial p = chi.divmod(gcd(chi, chi.derivative())).first;
	Polynomial dp = p.derivative();
	RationalMatrix s = a;
	// quadratic convergence: log2(n)+1 steps suffice; the cap guards bugs
	for (size_t iter = 0; iter <= a.rows() + 1; ++iter)
	{
		RationalMatrix ps = p.evaluate(s);
		if (ps.is_zero())
		{
			RationalMatrix u = s.inverse() * a;
			return {std::move(s), std::move(u)};
		}
		s = s - ps * dp.evaluate(s).inverse();
	}
	throw invariant_violation("jordan_chevalley: Newton iteration did not converge");
}

} // namespace nilgrowth
