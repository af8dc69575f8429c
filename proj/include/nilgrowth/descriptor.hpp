#pragma once
// JSON descriptors for groups and algebras, and the built-in catalog.
//
//   {"kind": "matrix_group", "label": "...",
//    "generators": [{"name": "a", "matrix": [["1","1"],["0","1"]]}, ...]}
//   {"kind": "lie_algebra", "label": "...", "basis": ["x","y","z"],
//    "brackets": [{"i": 0, "j": 1, "value": [[2, "1"]]}],
//    "grading": [["x","y"], ["z"]]}                       (grading optional)
//   {"kind": "semidirect_ZkZ", "label": "...", "k": 2,
//    "A": [["0","-1"],["1","0"]]}
//
// Rationals are "p" or "p/q" strings; plain JSON integers are accepted too.
// Bracket values are sparse [index, coefficient] lists. Grading layers list
// basis labels or dense coefficient vectors.

#include "nilgrowth/errors.hpp"
#include "nilgrowth/liealg.hpp"
#include "nilgrowth/nilgroup.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace nilgrowth {

using json = nlohmann::json;

enum class DescriptorKind
{
	matrix_group,
	lie_algebra,
	semidirect_ZkZ
};

inline std::string to_string(DescriptorKind k)
{
	switch (k)
	{
	case DescriptorKind::matrix_group:
		return "matrix_group";
	case DescriptorKind::lie_algebra:
		return "lie_algebra";
	case DescriptorKind::semidirect_ZkZ:
		return "semidirect_ZkZ";
	}
	return "?";
}

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a64(std::string_view bytes)
{
	std::uint64_t h = 0xcbf29ce484222325ull;
	for (unsigned char c : bytes)
	{
		h ^= c;
		h *= 0x100000001b3ull;
	}
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
	return buf;
}

struct Descriptor
{
	DescriptorKind kind = DescriptorKind::matrix_group;
	std::string label;

	/// matrix_group, and the faithful realisation of semidirect_ZkZ.
	std::optional<MatrixGroupDescriptor> group;
	/// lie_algebra only.
	std::optional<LieAlgebraQ> algebra;
	/// Optional explicit grading of `algebra` (empty: default grading).
	std::vector<std::vector<Vector>> grading;
	/// semidirect_ZkZ only.
	size_t k = 0;
	RationalMatrix twist;

	json to_json() const;
	std::string canonical_text() const { return to_json().dump(); }
	std::string digest() const { return fnv1a64(canonical_text()); }

	/// Hirsch rank of the (virtual) nilpotent object, when known exactly.
	std::optional<size_t> rank() const;
};

namespace detail {

inline std::string pointer_join(std::string const &at, std::string const &key)
{
	std::string esc;
	for (char c : key)
	{
		if (c == '~')
			esc += "~0";
		else if (c == '/')
			esc += "~1";
		else
			esc += c;
	}
	return at + "/" + esc;
}
inline std::string pointer_join(std::string const &at, size_t i)
{
	return at + "/" + std::to_string(i);
}
inline std::string pointer_or_root(std::string const &at) { return at.empty() ? "/" : at; }

[[noreturn]] inline void fail(std::string kind, std::string const &at, std::string const &msg)
{
	throw parse_error(std::move(kind), pointer_or_root(at), msg);
}

inline void expect_object(json const &j, std::string const &at, std::set<std::string> const &allowed)
{
	if (!j.is_object())
		fail("type mismatch", at, "expected an object");
	for (auto it = j.begin(); it != j.end(); ++it)
		if (!allowed.count(it.key()))
			fail("unknown field", pointer_join(at, it.key()), "field '" + it.key() + "' is not allowed here");
}

inline json const &field(json const &j, std::string const &at, std::string const &key)
{
	auto it = j.find(key);
	if (it == j.end())
		fail("missing field", pointer_join(at, key), "required field '" + key + "' is absent");
	return *it;
}

inline std::string read_string(json const &j, std::string const &at)
{
	if (!j.is_string())
		fail("type mismatch", at, "expected a string");
	return j.get<std::string>();
}

inline size_t read_index(json const &j, std::string const &at)
{
	if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
		fail("type mismatch", at, "expected a non-negative integer");
	return j.get<size_t>();
}

inline Rational read_rational(json const &j, std::string const &at)
{
	if (j.is_number_integer())
		return Rational(Integer(std::to_string(j.get<long long>())));
	if (j.is_string())
		if (auto r = parse_rational(j.get<std::string>()))
			return *r;
	fail("malformed rational", at,
	     "expected a \"p/q\" string, got " + j.dump());
}

inline RationalMatrix read_square_matrix(json const &j, std::string const &at)
{
	if (!j.is_array() || j.empty())
		fail("non-square matrix", at, "expected a non-empty array of rows");
	size_t n = j.size();
	RationalMatrix m(n, n);
	for (size_t r = 0; r < n; ++r)
	{
		auto row_at = pointer_join(at, r);
		if (!j[r].is_array() || j[r].size() != n)
			fail("non-square matrix", row_at,
			     "row " + std::to_string(r) + " does not have " + std::to_string(n) + " entries");
		for (size_t c = 0; c < n; ++c)
			m(r, c) = read_rational(j[r][c], pointer_join(row_at, c));
	}
	return m;
}

inline bool valid_name(std::string const &s)
{
	if (s.empty())
		return false;
	for (char c : s)
		if (std::isspace(static_cast<unsigned char>(c)) || c == '^')
			return false;
	return true;
}

inline json matrix_json(RationalMatrix const &m)
{
	json rows = json::array();
	for (size_t r = 0; r < m.rows(); ++r)
	{
		json row = json::array();
		for (size_t c = 0; c < m.cols(); ++c)
			row.push_back(to_string(m(r, c)));
		rows.push_back(std::move(row));
	}
	return rows;
}

inline Descriptor parse_matrix_group(json const &j, std::string label)
{
	expect_object(j, "", {"kind", "label", "generators"});
	auto const &gens = field(j, "", "generators");
	if (!gens.is_array() || gens.empty())
		fail("type mismatch", "/generators", "expected a non-empty array");
	std::vector<std::string> names;
	std::vector<RationalMatrix> mats;
	for (size_t i = 0; i < gens.size(); ++i)
	{
		auto at = pointer_join("/generators", i);
		expect_object(gens[i], at, {"name", "matrix"});
		std::string name = read_string(field(gens[i], at, "name"), pointer_join(at, "name"));
		if (!valid_name(name))
			fail("invalid name", pointer_join(at, "name"),
			     "generator names must be non-empty and free of whitespace and '^'");
		for (auto const &prev : names)
			if (prev == name)
				fail("duplicate name", pointer_join(at, "name"), "generator '" + name + "' repeated");
		auto m = read_square_matrix(field(gens[i], at, "matrix"), pointer_join(at, "matrix"));
		if (!mats.empty() && m.rows() != mats.front().rows())
			fail("dimension mismatch", pointer_join(at, "matrix"),
			     "generator size " + std::to_string(m.rows()) + " differs from " +
			         std::to_string(mats.front().rows()));
		if (m.determinant() == 0)
			fail("singular generator", pointer_join(at, "matrix"),
			     "generator '" + name + "' has determinant 0");
		names.push_back(std::move(name));
		mats.push_back(std::move(m));
	}
	Descriptor d;
	d.kind = DescriptorKind::matrix_group;
	d.group = MatrixGroupDescriptor::make_auto(label, std::move(names), std::move(mats));
	d.label = std::move(label);
	return d;
}

inline Descriptor parse_lie_algebra(json const &j, std::string label)
{
	expect_object(j, "", {"kind", "label", "basis", "brackets", "grading"});
	auto const &basis = field(j, "", "basis");
	if (!basis.is_array() || basis.empty())
		fail("type mismatch", "/basis", "expected a non-empty array of labels");
	std::vector<std::string> labels;
	for (size_t i = 0; i < basis.size(); ++i)
	{
		auto name = read_string(basis[i], pointer_join("/basis", i));
		if (!valid_name(name))
			fail("invalid name", pointer_join("/basis", i), "basis labels must be non-empty, no whitespace");
		for (auto const &prev : labels)
			if (prev == name)
				fail("duplicate name", pointer_join("/basis", i), "basis label '" + name + "' repeated");
		labels.push_back(std::move(name));
	}
	size_t n = labels.size();
	std::vector<LieAlgebraQ::Bracket> brackets;
	if (auto it = j.find("brackets"); it != j.end())
	{
		if (!it->is_array())
			fail("type mismatch", "/brackets", "expected an array");
		for (size_t b = 0; b < it->size(); ++b)
		{
			auto at = pointer_join("/brackets", b);
			auto const &e = (*it)[b];
			expect_object(e, at, {"i", "j", "value"});
			size_t i = read_index(field(e, at, "i"), pointer_join(at, "i"));
			size_t jj = read_index(field(e, at, "j"), pointer_join(at, "j"));
			if (i >= n)
				fail("bracket index out of range", pointer_join(at, "i"),
				     std::to_string(i) + " >= dimension " + std::to_string(n));
			if (jj >= n)
				fail("bracket index out of range", pointer_join(at, "j"),
				     std::to_string(jj) + " >= dimension " + std::to_string(n));
			auto const &value = field(e, at, "value");
			auto vat = pointer_join(at, "value");
			if (!value.is_array())
				fail("type mismatch", vat, "expected a list of [index, coefficient] pairs");
			Vector v = zero_vector(n);
			for (size_t t = 0; t < value.size(); ++t)
			{
				auto tat = pointer_join(vat, t);
				if (!value[t].is_array() || value[t].size() != 2)
					fail("type mismatch", tat, "expected an [index, coefficient] pair");
				size_t idx = read_index(value[t][0], pointer_join(tat, 0));
				if (idx >= n)
					fail("bracket index out of range", pointer_join(tat, 0),
					     std::to_string(idx) + " >= dimension " + std::to_string(n));
				v[idx] += read_rational(value[t][1], pointer_join(tat, 1));
			}
			brackets.push_back({i, jj, std::move(v)});
		}
	}
	Descriptor d;
	d.kind = DescriptorKind::lie_algebra;
	try
	{
		d.algebra = LieAlgebraQ(labels, brackets);
	}
	catch (invariant_violation const &e)
	{
		fail("invalid algebra", "/brackets", e.what());
	}
	if (auto it = j.find("grading"); it != j.end())
	{
		if (!it->is_array())
			fail("type mismatch", "/grading", "expected an array of layers");
		for (size_t L = 0; L < it->size(); ++L)
		{
			auto at = pointer_join("/grading", L);
			auto const &layer = (*it)[L];
			if (!layer.is_array())
				fail("type mismatch", at, "expected an array");
			std::vector<Vector> vs;
			for (size_t t = 0; t < layer.size(); ++t)
			{
				auto tat = pointer_join(at, t);
				auto const &e = layer[t];
				if (e.is_string())
				{
					auto pos = std::find(labels.begin(), labels.end(), e.get<std::string>());
					if (pos == labels.end())
						fail("unknown basis label", tat, "no basis vector '" + e.get<std::string>() + "'");
					vs.push_back(unit_vector(n, static_cast<size_t>(pos - labels.begin())));
				}
				else if (e.is_array() && e.size() == n)
				{
					Vector v(n);
					for (size_t c = 0; c < n; ++c)
						v[c] = read_rational(e[c], pointer_join(tat, c));
					vs.push_back(std::move(v));
				}
				else
					fail("type mismatch", tat,
					     "expected a basis label or a vector of length " + std::to_string(n));
			}
			d.grading.push_back(std::move(vs));
		}
		try
		{
			GradedDecomposition(*d.algebra, d.grading);
		}
		catch (invariant_violation const &e)
		{
			fail("invalid grading", "/grading", e.what());
		}
	}
	d.label = std::move(label);
	return d;
}

inline Descriptor parse_semidirect(json const &j, std::string label)
{
	expect_object(j, "", {"kind", "label", "k", "A"});
	size_t k = read_index(field(j, "", "k"), "/k");
	if (k == 0)
		fail("type mismatch", "/k", "k must be positive");
	auto a = read_square_matrix(field(j, "", "A"), "/A");
	if (a.rows() != k)
		fail("dimension mismatch", "/A", "A must be " + std::to_string(k) + "x" + std::to_string(k));
	if (!a.is_integer())
		fail("type mismatch", "/A", "A must have integer entries");
	auto det = a.determinant();
	if (det != 1 && det != -1)
		fail("singular generator", "/A", "A must be invertible over Z (det = +-1), got det " + to_string(det));
	Descriptor d;
	d.kind = DescriptorKind::semidirect_ZkZ;
	d.k = k;
	d.twist = a;
	d.group = semidirect_matrix_group(a, k, label);
	d.label = std::move(label);
	return d;
}

} // namespace detail

inline Descriptor descriptor_from_json(json const &j)
{
	if (!j.is_object())
		detail::fail("type mismatch", "", "descriptor must be a JSON object");
	std::string kind = detail::read_string(detail::field(j, "", "kind"), "/kind");
	std::string label;
	if (auto it = j.find("label"); it != j.end())
		label = detail::read_string(*it, "/label");
	if (kind == "matrix_group")
		return detail::parse_matrix_group(j, label);
	if (kind == "lie_algebra")
		return detail::parse_lie_algebra(j, label);
	if (kind == "semidirect_ZkZ")
		return detail::parse_semidirect(j, label);
	detail::fail("unknown kind", "/kind", "'" + kind + "' is not one of matrix_group, lie_algebra, semidirect_ZkZ");
}

/// Parses descriptor text. Syntax errors are located by byte offset, semantic
/// ones by JSON pointer.
inline Descriptor parse_descriptor(std::string_view text)
{
	json j;
	try
	{
		j = json::parse(text.begin(), text.end());
	}
	catch (json::parse_error const &e)
	{
		throw parse_error("invalid json", "byte " + std::to_string(e.byte), e.what());
	}
	return descriptor_from_json(j);
}

inline json Descriptor::to_json() const
{
	json j;
	j["kind"] = nilgrowth::to_string(kind);
	j["label"] = label;
	switch (kind)
	{
	case DescriptorKind::matrix_group: {
		json gens = json::array();
		for (size_t i = 0; i < group->generators.size(); ++i)
			gens.push_back({{"name", group->generator_labels[i]},
			                {"matrix", detail::matrix_json(group->generators[i])}});
		j["generators"] = std::move(gens);
		break;
	}
	case DescriptorKind::lie_algebra: {
		auto const &l = *algebra;
		j["basis"] = l.labels();
		json br = json::array();
		for (size_t a = 0; a < l.dim(); ++a)
			for (size_t b = a + 1; b < l.dim(); ++b)
			{
				auto const &v = l.structure(a, b);
				if (is_zero(v))
					continue;
				json terms = json::array();
				for (size_t c = 0; c < v.size(); ++c)
					if (v[c] != 0)
						terms.push_back({c, to_string(v[c])});
				br.push_back({{"i", a}, {"j", b}, {"value", std::move(terms)}});
			}
		j["brackets"] = std::move(br);
		if (!grading.empty())
		{
			json layers = json::array();
			for (auto const &layer : grading)
			{
				json out = json::array();
				for (auto const &v : layer)
				{
					size_t hit = v.size(), nonzero = 0;
					for (size_t c = 0; c < v.size(); ++c)
						if (v[c] != 0)
						{
							++nonzero;
							hit = c;
						}
					if (nonzero == 1 && v[hit] == 1)
						out.push_back(l.labels()[hit]);
					else
					{
						json dense = json::array();
						for (auto const &x : v)
							dense.push_back(to_string(x));
						out.push_back(std::move(dense));
					}
				}
				layers.push_back(std::move(out));
			}
			j["grading"] = std::move(layers);
		}
		break;
	}
	case DescriptorKind::semidirect_ZkZ:
		j["k"] = k;
		j["A"] = detail::matrix_json(twist);
		break;
	}
	return j;
}

inline std::optional<size_t> Descriptor::rank() const
{
	switch (kind)
	{
	case DescriptorKind::lie_algebra:
		return algebra->dim();
	case DescriptorKind::semidirect_ZkZ:
		return k + 1;
	case DescriptorKind::matrix_group:
		if (group->certified_unitriangular)
			return malcev_lie_algebra(*group).dim();
		return std::nullopt;
	}
	return std::nullopt;
}

/// The nilpotent Lie algebra attached to the descriptor: the algebra itself,
/// the Malcev algebra of a unitriangular group, or the nil-shadow of
/// Z^k x|_A Z. Throws not_polynomial_growth for a non-quasi-unipotent A and
/// unsupported_input for a group that is not unitriangular.
inline LieAlgebraQ nil_shadow(Descriptor const &d)
{
	switch (d.kind)
	{
	case DescriptorKind::lie_algebra:
		return *d.algebra;
	case DescriptorKind::semidirect_ZkZ:
		return semidirect_nilshadow(d.twist, d.k);
	case DescriptorKind::matrix_group:
		if (!d.group->certified_unitriangular)
			throw unsupported_input("group '" + d.label +
			                        "' is not unitriangular; no exact nil-shadow available");
		return malcev_lie_algebra(*d.group).algebra;
	}
	throw unsupported_input("unknown descriptor kind");
}

/// The grading given in the descriptor, else the default one.
inline GradedDecomposition descriptor_grading(Descriptor const &d, LieAlgebraQ const &l)
{
	if (d.kind == DescriptorKind::lie_algebra && !d.grading.empty())
		return GradedDecomposition(l, d.grading);
	return default_grading(l);
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// What `selftest` checks for a catalog entry.
struct CatalogExpectation
{
	std::optional<long> degree;       ///< exact growth degree
	std::optional<size_t> rank;       ///< Hirsch rank
	bool polynomial = true;
	/// Radius at which the doubling classifier must agree (0: not checked).
	size_t classify_radius = 0;
	/// Degree the classifier should report, when it differs from `degree`.
	std::optional<long> empirical_degree;
};

struct CatalogEntry
{
	std::string name;
	std::string summary;
	std::string text; ///< descriptor JSON
	CatalogExpectation expect;
};

namespace detail {

inline std::string shear_group_text(size_t k)
{
	json gens = json::array();
	for (size_t i = 0; i < k; ++i)
	{
		json m = json::array();
		for (size_t r = 0; r <= k; ++r)
		{
			json row = json::array();
			for (size_t c = 0; c <= k; ++c)
				row.push_back((r == c || (r == 0 && c == i + 1)) ? "1" : "0");
			m.push_back(std::move(row));
		}
		gens.push_back({{"name", "x" + std::to_string(i + 1)}, {"matrix", std::move(m)}});
	}
	return json{{"kind", "matrix_group"}, {"label", "z" + std::to_string(k)}, {"generators", gens}}.dump();
}

} // namespace detail

inline std::vector<CatalogEntry> const &catalog()
{
	static std::vector<CatalogEntry> const entries = [] {
		std::vector<CatalogEntry> e;
		e.push_back({"heisenberg", "discrete Heisenberg group, 3x3 unitriangular",
		             R"({"kind":"matrix_group","label":"heisenberg","generators":[
		                 {"name":"a","matrix":[["1","1","0"],["0","1","0"],["0","0","1"]]},
		                 {"name":"b","matrix":[["1","0","0"],["0","1","1"],["0","0","1"]]}]})",
		             {4, 3, true, 12, std::nullopt}});
		for (size_t k = 1; k <= 4; ++k)
			e.push_back({"z" + std::to_string(k), "free abelian group of rank " + std::to_string(k),
			             detail::shear_group_text(k),
			             {long(k), k, true, k <= 3 ? size_t(12) : size_t(0), std::nullopt}});
		e.push_back({"ut4", "4x4 integer unitriangular group",
		             R"({"kind":"matrix_group","label":"ut4","generators":[
		                 {"name":"a","matrix":[["1","1","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","1"]]},
		                 {"name":"b","matrix":[["1","0","0","0"],["0","1","1","0"],["0","0","1","0"],["0","0","0","1"]]},
		                 {"name":"c","matrix":[["1","0","0","0"],["0","1","0","0"],["0","0","1","1"],["0","0","0","1"]]}]})",
		             {10, 6, true, 0, std::nullopt}});
		e.push_back({"ex14a_rotation", "Z^2 x| Z, A a rotation by a quarter turn",
		             R"({"kind":"semidirect_ZkZ","label":"ex14a_rotation","k":2,"A":[["0","-1"],["1","0"]]})",
		             {3, 3, true, 12, std::nullopt}});
		e.push_back({"ex14a_shear", "Z^2 x| Z, A a unipotent shear (a Heisenberg variant)",
		             R"({"kind":"semidirect_ZkZ","label":"ex14a_shear","k":2,"A":[["1","1"],["0","1"]]})",
		             {4, 3, true, 0, std::nullopt}});
		e.push_back({"ex14a_shadow", "nil-shadow of C^2 x| Z with a twisted shear",
		             R"({"kind":"lie_algebra","label":"ex14a_shadow","basis":["t","z1","z2","w1","w2"],
		                 "brackets":[{"i":0,"j":1,"value":[[3,"1"]]},{"i":0,"j":2,"value":[[4,"1"]]}]})",
		             {7, 5, true, 0, std::nullopt}});
		e.push_back({"ex14b_shadow", "nil-shadow of H_Z x| C: Heisenberg plus an abelian plane",
		             R"({"kind":"lie_algebra","label":"ex14b_shadow","basis":["k","l","m","u","v"],
		                 "brackets":[{"i":0,"j":1,"value":[[2,"1"]]}]})",
		             {6, 5, true, 0, std::nullopt}});
		e.push_back({"free2", "free group of rank 2 (Sanov matrices)",
		             R"({"kind":"matrix_group","label":"free2","generators":[
		                 {"name":"a","matrix":[["1","2"],["0","1"]]},
		                 {"name":"b","matrix":[["1","0"],["2","1"]]}]})",
		             {std::nullopt, std::nullopt, false, 10, std::nullopt}});
		e.push_back({"z2_rot4", "Z^2 x| Z/4, affine quarter turn (virtually Z^2)",
		             R"({"kind":"matrix_group","label":"z2_rot4","generators":[
		                 {"name":"v1","matrix":[["1","0","1"],["0","1","0"],["0","0","1"]]},
		                 {"name":"v2","matrix":[["1","0","0"],["0","1","1"],["0","0","1"]]},
		                 {"name":"t","matrix":[["0","-1","0"],["1","0","0"],["0","0","1"]]}]})",
		             {std::nullopt, std::nullopt, true, 12, 2}});
		return e;
	}();
	return entries;
}

inline CatalogEntry const &catalog_entry(std::string const &name)
{
	for (auto const &e : catalog())
		if (e.name == name)
			return e;
	std::string known;
	for (auto const &e : catalog())
		known += (known.empty() ? "" : ", ") + e.name;
	throw parse_error("unknown catalog entry", "catalog:" + name, "known entries: " + known);
}

/// "catalog:NAME" or a path to a descriptor file.
inline Descriptor load_descriptor(std::string const &source)
{
	static constexpr std::string_view prefix = "catalog:";
	if (source.rfind(prefix, 0) == 0)
		return parse_descriptor(catalog_entry(source.substr(prefix.size())).text);
	std::ifstream in(source, std::ios::binary);
	if (!in)
		throw parse_error("unreadable input", source, "cannot open descriptor file");
	std::stringstream buf;
	buf << in.rdbuf();
	return parse_descriptor(buf.str());
}

} // namespace nilgrowth
