#pragma once

#include "nilgrowth/errors.hpp"
#include "nilgrowth/liealg.hpp"
#include "nilgrowth/linear.hpp"
#include "nilgrowth/matrix.hpp"

#include <cctype>
#include <deque>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace nilgrowth {

/// Finitely generated group given by invertible rational generator
/// matrices. The word metric uses the generators, their inverses and the
/// identity as the generating neighbourhood.
struct MatrixGroupDescriptor
{
	std::string label;
	size_t ambient_size = 0;
	std::vector<std::string> generator_labels;
	std::vector<RationalMatrix> generators;
	/// Every generator checked to be upper unitriangular.
	bool certified_unitriangular = false;

	/// Validating constructor. `certify` requests the unitriangular
	/// certification; it is checked, never trusted.
	static MatrixGroupDescriptor make(std::string label, std::vector<std::string> names,
	                                  std::vector<RationalMatrix> gens, bool certify = false)
	{
		if (gens.empty())
			throw domain_error("group descriptor needs at least one generator");
		if (names.size() != gens.size())
			throw dimension_mismatch("generator label count differs from generator count");
		size_t n = gens.front().rows();
		for (size_t i = 0; i < gens.size(); ++i)
		{
			if (!gens[i].square() || gens[i].rows() != n)
				throw dimension_mismatch("generator " + names[i] + " is not " + std::to_string(n) +
				                         "x" + std::to_string(n));
			if (gens[i].determinant() == 0)
				throw singular_matrix("singular generator " + names[i]);
			if (certify && !gens[i].is_unitriangular())
				throw invariant_violation("generator " + names[i] +
				                          " is not upper unitriangular");
		}
		MatrixGroupDescriptor g;
		g.label = std::move(label);
		g.ambient_size = n;
		g.generator_labels = std::move(names);
		g.generators = std::move(gens);
		g.certified_unitriangular = certify;
		return g;
	}

	/// Certifies when every generator is unitriangular.
	static MatrixGroupDescriptor make_auto(std::string label, std::vector<std::string> names,
	                                       std::vector<RationalMatrix> gens)
	{
		bool uni = !gens.empty();
		for (auto const &g : gens)
			uni = uni && g.is_unitriangular();
		return make(std::move(label), std::move(names), std::move(gens), uni);
	}

	RationalMatrix identity() const { return RationalMatrix::identity(ambient_size); }

	std::optional<size_t> generator_index(std::string const &name) const
	{
		for (size_t i = 0; i < generator_labels.size(); ++i)
			if (generator_labels[i] == name)
				return i;
		return std::nullopt;
	}
};

/// Evaluates a word such as "a b a^-1 b^-1" (generator labels, optional
/// integer exponent, whitespace separated). The empty word is the identity.
inline RationalMatrix evaluate_word(MatrixGroupDescriptor const &g, std::string const &word)
{
	RationalMatrix x = g.identity();
	std::istringstream in(word);
	std::string token;
	while (in >> token)
	{
		auto caret = token.find('^');
		std::string name = token.substr(0, caret);
		long exponent = 1;
		if (caret != std::string::npos)
		{
			std::string e = token.substr(caret + 1);
			size_t used = 0;
			try
			{
				exponent = std::stol(e, &used);
			}
			catch (std::exception const &)
			{
				used = 0;
			}
			if (e.empty() || used != e.size())
				throw parse_error("malformed exponent", "token '" + token + "'",
				                  "expected an integer after '^'");
		}
		auto idx = g.generator_index(name);
		if (!idx)
			throw parse_error("unknown generator", "token '" + token + "'",
			                  "no generator named '" + name + "'");
		x = x * g.generators[*idx].power(exponent);
	}
	return x;
}

// ---------------------------------------------------------------------------
// log / exp
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_nilpotent(RationalMatrix const &x)
{
	if (x.is_strictly_upper())
		return true;
	return x.power(static_cast<long>(x.rows())).is_zero();
}

inline RationalMatrix log_series(RationalMatrix const &m)
{
	size_t n = m.rows();
	RationalMatrix nil = m - RationalMatrix::identity(n);
	RationalMatrix term = nil;
	RationalMatrix out(n, n);
	for (size_t k = 1; k < std::max<size_t>(n, 2) && !term.is_zero(); ++k)
	{
		Rational c(1, static_cast<unsigned long>(k));
		if (k % 2 == 0)
			c = -c;
		out += term * c;
		term = term * nil;
	}
	return out;
}

} // namespace detail

/// Logarithm of any unipotent matrix (M - I nilpotent); finite series.
inline RationalMatrix log_unipotent(RationalMatrix const &m)
{
	if (!m.square())
		throw dimension_mismatch("log: matrix must be square");
	if (!detail::is_nilpotent(m - RationalMatrix::identity(m.rows())))
		throw unsupported_input("log: matrix is not unipotent");
	return detail::log_series(m);
}

/// Exact logarithm sum (-1)^{k+1} (M-I)^k / k of an upper unitriangular matrix.
inline RationalMatrix log_unitriangular(RationalMatrix const &m)
{
	if (!m.is_unitriangular())
		throw unsupported_input("log_unitriangular: matrix is not upper unitriangular");
	return detail::log_series(m);
}

/// Exact exponential sum X^k / k! of a nilpotent matrix.
inline RationalMatrix exp_nilpotent(RationalMatrix const &x)
{
	if (!x.square())
		throw dimension_mismatch("exp: matrix must be square");
	if (!detail::is_nilpotent(x))
		throw unsupported_input("exp_nilpotent: matrix is not nilpotent");
	size_t n = x.rows();
	RationalMatrix out = RationalMatrix::identity(n);
	RationalMatrix term = x;
	Integer fact = 1;
	for (size_t k = 1; k <= n && !term.is_zero(); ++k)
	{
		fact *= static_cast<unsigned long>(k);
		out += term * Rational(Integer(1), fact);
		term = term * x;
	}
	return out;
}

// ---------------------------------------------------------------------------
// Malcev algebra
// ---------------------------------------------------------------------------

/// Rational Lie algebra of the Malcev completion of a unitriangular group,
/// realised inside the strictly upper triangular matrices.
struct MalcevAlgebra
{
	size_t ambient_size = 0;
	/// Adapted basis: grouped by LCS layer, pivot order inside each layer.
	std::vector<RationalMatrix> basis;
	/// 0-based LCS layer of each basis vector: basis[i] in C_{layer_of[i]}
	/// and outside C_{layer_of[i]+1}.
	std::vector<size_t> layer_of;
	std::vector<size_t> lcs_dims;
	/// Structure constants in `basis`.
	LieAlgebraQ algebra;
	BasisSolver solver;

	size_t dim() const { return basis.size(); }

	std::optional<Vector> try_coordinates(RationalMatrix const &x) const
	{
		return solver.solve(x.flat());
	}

	Vector coordinates(RationalMatrix const &x) const
	{
		auto c = try_coordinates(x);
		if (!c)
			throw domain_error("matrix lies outside the Malcev algebra");
		return *c;
	}

	RationalMatrix element(Vector const &coeffs) const
	{
		return RationalMatrix(ambient_size, ambient_size, solver.combine(coeffs));
	}

	/// The grading whose layers are the LCS layers of `basis`.
	GradedDecomposition grading() const { return default_grading(algebra); }
};

/// Smallest rational Lie subalgebra containing every log(g_i), with its
/// lower central series and adapted basis.
inline MalcevAlgebra malcev_lie_algebra(MatrixGroupDescriptor const &g)
{
	if (!g.certified_unitriangular)
		throw unsupported_input("malcev_lie_algebra: group " + g.label +
		                        " is not certified unitriangular");
	size_t n = g.ambient_size;
	size_t width = n * n;
	size_t bound = n * (n - 1) / 2;

	Subspace span(width);
	std::vector<RationalMatrix> elems;
	std::deque<size_t> pending;
	auto add = [&](RationalMatrix const &x) {
		if (span.insert(x.flat()))
		{
			if (span.dimension() > bound)
				throw invariant_violation("malcev_lie_algebra: closure exceeded dimension bound");
			elems.push_back(x);
			pending.push_back(elems.size() - 1);
		}
	};
	for (auto const &gen : g.generators)
		add(log_unitriangular(gen));
	while (!pending.empty())
	{
		size_t i = pending.front();
		pending.pop_front();
		for (size_t j = 0; j < elems.size(); ++j)
			if (j != i)
				add(commutator(elems[i], elems[j]));
	}

	// lower central series on the matrix side
	std::vector<std::vector<Vector>> lcs{span.basis()};
	while (!lcs.back().empty())
	{
		Subspace next(width);
		for (auto const &x : elems)
			for (auto const &c : lcs.back())
				next.insert(commutator(x, RationalMatrix(n, n, c)).flat());
		if (next.dimension() >= lcs.back().size())
			throw invariant_violation("malcev_lie_algebra: lower central series does not descend");
		lcs.push_back(next.basis());
	}

	MalcevAlgebra a;
	a.ambient_size = n;
	for (auto const &c : lcs)
		a.lcs_dims.push_back(c.size());
	std::vector<Vector> flat_basis;
	for (size_t k = 0; k + 1 < lcs.size(); ++k)
		for (auto &v : echelon_complement(lcs[k], lcs[k + 1]))
		{
			a.basis.emplace_back(n, n, v);
			a.layer_of.push_back(k);
			flat_basis.push_back(std::move(v));
		}
	a.solver = BasisSolver(flat_basis);

	std::vector<std::string> labels;
	std::vector<RationalMatrix> gen_logs;
	for (auto const &gen : g.generators)
		gen_logs.push_back(log_unitriangular(gen));
	for (size_t i = 0; i < a.basis.size(); ++i)
	{
		std::string name = "y" + std::to_string(i + 1);
		for (size_t k = 0; k < gen_logs.size(); ++k)
			if (gen_logs[k] == a.basis[i])
				name = "log " + g.generator_labels[k];
		labels.push_back(name);
	}
	std::vector<LieAlgebraQ::Bracket> brackets;
	for (size_t i = 0; i < a.basis.size(); ++i)
		for (size_t j = i + 1; j < a.basis.size(); ++j)
			brackets.push_back({i, j, a.coordinates(commutator(a.basis[i], a.basis[j]))});
	a.algebra = LieAlgebraQ(std::move(labels), brackets);
	return a;
}

struct GroupGrowthDegree
{
	long degree = 0;
	size_t rank = 0;                 ///< Hirsch rank = dim of the Malcev algebra
	std::vector<size_t> lcs_dims;    ///< dim C_0, dim C_1, ..., 0
	std::vector<size_t> layer_ranks; ///< dim C_{n-1}/C_n, n = 1..class
};

inline GroupGrowthDegree growth_degree_from_lcs(std::vector<size_t> const &dims)
{
	GroupGrowthDegree r;
	r.lcs_dims = dims;
	r.rank = dims.empty() ? 0 : dims.front();
	for (size_t k = 1; k < dims.size(); ++k)
		r.layer_ranks.push_back(dims[k - 1] - dims[k]);
	r.degree = growth_degree_from_dims(dims);
	return r;
}

/// d = sum_n n * rk(H_{n-1}/H_n) from the LCS of the Malcev algebra.
inline GroupGrowthDegree growth_degree_group(MatrixGroupDescriptor const &g)
{
	return growth_degree_from_lcs(malcev_lie_algebra(g).lcs_dims);
}

/// Largest n with log x in C_n, i.e. x in the isolator H_n; nullopt for the identity.
inline std::optional<size_t> layer(RationalMatrix const &x, MalcevAlgebra const &a)
{
	Vector c = a.coordinates(log_unipotent(x));
	for (size_t i = 0; i < c.size(); ++i)
		if (c[i] != 0)
		{
			size_t lowest = a.layer_of[i];
			for (size_t k = i; k < c.size(); ++k)
				if (c[k] != 0)
					lowest = std::min(lowest, a.layer_of[k]);
			return lowest;
		}
	return std::nullopt;
}

/// Coordinates of the second kind: x = exp(t_1 y_1) ... exp(t_m y_m) over
/// the adapted basis. Each tail span(y_i, ..., y_m) is an ideal, so t_i is
/// read off as the y_i-coefficient of log of the remaining factor.
inline Vector malcev_coordinates(RationalMatrix const &x, MalcevAlgebra const &a)
{
	Vector t(a.dim(), Rational(0));
	RationalMatrix rest = x;
	for (size_t i = 0; i < a.dim(); ++i)
	{
		Vector c = a.coordinates(log_unipotent(rest));
		t[i] = c[i];
		for (size_t k = 0; k < i; ++k)
			if (c[k] != 0)
				throw invariant_violation("malcev_coordinates: adapted basis is not ideal-compatible");
		if (t[i] != 0)
			rest = exp_nilpotent(a.basis[i] * Rational(-t[i])) * rest;
	}
	if (!rest.is_identity())
		throw invariant_violation("malcev_coordinates: residual factor is not the identity");
	return t;
}

/// Inverse of malcev_coordinates: the ordered product of exp(t_i y_i).
inline RationalMatrix malcev_element(Vector const &t, MalcevAlgebra const &a)
{
	RationalMatrix x = RationalMatrix::identity(a.ambient_size);
	for (size_t i = 0; i < t.size(); ++i)
		if (t[i] != 0)
			x = x * exp_nilpotent(a.basis[i] * t[i]);
	return x;
}

// ---------------------------------------------------------------------------
// Z^k x|_A Z
// ---------------------------------------------------------------------------

/// Nil-shadow Q^k x| Q of Z^k x|_A Z: A is replaced by its unipotent
/// Jordan component A_u, and [t, v_i] = log(A_u) v_i. Basis v_1..v_k, t.
inline LieAlgebraQ semidirect_nilshadow(RationalMatrix const &a, size_t k)
{
	if (a.rows() != k || a.cols() != k)
		throw dimension_mismatch("semidirect_nilshadow: A must be k x k");
	auto verdict = quasi_unipotent_test(a);
	if (!verdict.quasi_unipotent)
		throw not_polynomial_growth("Z^" + std::to_string(k) +
		                            " x| Z has exponential growth: characteristic factor " +
		                            verdict.witness() + " is not cyclotomic");
	RationalMatrix nlog = log_unipotent(jordan_chevalley(a).unipotent);
	std::vector<std::string> labels;
	for (size_t i = 0; i < k; ++i)
		labels.push_back("v" + std::to_string(i + 1));
	labels.push_back("t");
	std::vector<LieAlgebraQ::Bracket> br;
	for (size_t i = 0; i < k; ++i)
	{
		Vector v = zero_vector(k + 1);
		for (size_t j = 0; j < k; ++j)
			v[j] = nlog(j, i);
		br.push_back({k, i, std::move(v)});
	}
	return LieAlgebraQ(std::move(labels), br);
}

/// Faithful realisation of Z^k x|_A Z by (k+2)x(k+2) matrices
/// [[A^n, 0, v], [0, 1, n], [0, 0, 1]]: translations v_i = I + E_{i,k+1}
/// and t = diag(A, [[1,1],[0,1]]). Certified when A is unitriangular.
inline MatrixGroupDescriptor semidirect_matrix_group(RationalMatrix const &a, size_t k,
                                                     std::string label)
{
	if (a.rows() != k || a.cols() != k)
		throw dimension_mismatch("semidirect_matrix_group: A must be k x k");
	std::vector<RationalMatrix> gens;
	std::vector<std::string> names;
	for (size_t i = 0; i < k; ++i)
	{
		gens.push_back(RationalMatrix::elementary(k + 2, i, k + 1));
		names.push_back("v" + std::to_string(i + 1));
	}
	RationalMatrix t = RationalMatrix::elementary(k + 2, k, k + 1);
	for (size_t i = 0; i < k; ++i)
		for (size_t j = 0; j < k; ++j)
			t(i, j) = a(i, j);
	gens.push_back(t);
	names.push_back("t");
	return MatrixGroupDescriptor::make_auto(std::move(label), std::move(names), std::move(gens));
}

/// Affine action Z^k x| <A> by (k+1)x(k+1) matrices: v_i = I + E_{i,k},
/// t = diag(A, 1). When A has finite order m this is Z^k x| Z/m.
inline MatrixGroupDescriptor affine_matrix_group(RationalMatrix const &a, size_t k,
                                                 std::string label)
{
	if (a.rows() != k || a.cols() != k)
		throw dimension_mismatch("affine_matrix_group: A must be k x k");
	std::vector<RationalMatrix> gens;
	std::vector<std::string> names;
	for (size_t i = 0; i < k; ++i)
	{
		gens.push_back(RationalMatrix::elementary(k + 1, i, k));
		names.push_back("v" + std::to_string(i + 1));
	}
	RationalMatrix t = RationalMatrix::identity(k + 1);
	for (size_t i = 0; i < k; ++i)
		for (size_t j = 0; j < k; ++j)
			t(i, j) = a(i, j);
	gens.push_back(t);
	names.push_back("t");
	return MatrixGroupDescriptor::make_auto(std::move(label), std::move(names), std::move(gens));
}

// ---------------------------------------------------------------------------
// Group-side cross-check
// ---------------------------------------------------------------------------

struct GroupSideRanks
{
	/// rk(C_{w-1}(G)/C_w(G)) for w = 1..class, from weight-w group commutators.
	std::vector<size_t> ranks;
	long degree = 0;
	size_t hirsch_rank = 0;
};

/// Ranks of the LCS quotients of G computed from left-normed group
/// commutators of the generators: their layer components span a lattice whose
/// rank comes from smith_quotient.
inline GroupSideRanks group_side_ranks(MatrixGroupDescriptor const &g, MalcevAlgebra const &a)
{
	GroupSideRanks out;
	size_t cls = a.lcs_dims.size() - 1;
	std::vector<RationalMatrix> current = g.generators;
	for (size_t w = 1; w <= cls; ++w)
	{
		size_t layer_idx = w - 1;
		std::vector<size_t> cols;
		for (size_t i = 0; i < a.dim(); ++i)
			if (a.layer_of[i] == layer_idx)
				cols.push_back(i);
		std::vector<Vector> rows;
		for (auto const &c : current)
		{
			Vector coords = a.coordinates(log_unipotent(c));
			Vector row;
			Integer den = 1;
			for (size_t i : cols)
			{
				row.push_back(coords[i]);
				mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), coords[i].get_den_mpz_t());
			}
			for (auto &x : row)
				x *= den;
			rows.push_back(std::move(row));
		}
		Vector flat;
		for (auto const &r : rows)
			flat.insert(flat.end(), r.begin(), r.end());
		auto q = smith_quotient(RationalMatrix(rows.size(), cols.size(), std::move(flat)), cols.size());
		size_t rk = q.ambient_rank - q.free_rank;
		out.ranks.push_back(rk);
		out.hirsch_rank += rk;
		out.degree += static_cast<long>(w * rk);

		std::vector<RationalMatrix> next;
		for (auto const &gen : g.generators)
			for (auto const &c : current)
				next.push_back(group_commutator(gen, c));
		current = std::move(next);
	}
	return out;
}

} // namespace nilgrowth
