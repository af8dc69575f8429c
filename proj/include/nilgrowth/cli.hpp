#pragma once
// Orchestration behind the nilgrowth tool: RunConfig -> JSON report + CSV
// side files + exit status. Kept in the library so tests can drive it.

#include "nilgrowth/cone.hpp"
#include "nilgrowth/descriptor.hpp"
#include "nilgrowth/weights.hpp"
#include "nilgrowth/wordmetric.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#ifndef NILGROWTH_VERSION
#define NILGROWTH_VERSION "0.1.0"
#endif

namespace nilgrowth {

inline constexpr char const *version = NILGROWTH_VERSION;

enum ExitCode : int
{
	exit_ok = 0,
	exit_usage = 1,
	exit_parse = 2,
	exit_budget = 3,
	exit_invariant = 4,
	exit_inconclusive = 5,
};

struct Tolerances
{
	double gamma_match = gamma_match_tolerance;
	double gnr = gnr_tolerance;
	double graded_limit_slack = nilgrowth::graded_limit_slack;
	double doubling_exponential_slope = nilgrowth::doubling_exponential_slope;
	double doubling_polynomial_slope = nilgrowth::doubling_polynomial_slope;
	long degree_agreement = 1; ///< |d-hat - d| allowed for "agree"

	json to_json() const
	{
		return {{"gamma_match", gamma_match},
		        {"gnr", gnr},
		        {"graded_limit_slack", graded_limit_slack},
		        {"doubling_exponential_slope", doubling_exponential_slope},
		        {"doubling_polynomial_slope", doubling_polynomial_slope},
		        {"degree_agreement", degree_agreement}};
	}
};

struct RunConfig
{
	std::string command;
	std::string input; ///< path or catalog:NAME
	size_t radius = 10;
	size_t k_max = 48;
	std::vector<long> n_list;
	unsigned long long seed = 1;
	size_t budget = default_ball_budget;
	std::string out_dir; ///< empty: report on stdout only
	bool strict = false;
	std::vector<std::string> elements; ///< words
	std::string weight = "constant";
	size_t cloud_cap = default_cloud_cap;
	Tolerances tol;
};

inline std::vector<std::string> const &commands()
{
	static std::vector<std::string> const c = {"growth", "balls", "gamma", "conj",     "layers", "coords",
	                                           "cone",   "clouds", "gnr",  "classify", "selftest"};
	return c;
}

/// Reads a JSON config file body; keys mirror the long flags.
inline RunConfig config_from_json(json const &j, RunConfig base = {})
{
	using detail::fail;
	using detail::pointer_join;
	detail::expect_object(j, "", {"command", "input", "radius", "kmax", "nlist", "seed", "budget", "out",
	                              "strict", "elements", "weight", "cloud_cap"});
	auto num = [&](char const *key, auto &dst) {
		if (auto it = j.find(key); it != j.end())
			dst = static_cast<std::decay_t<decltype(dst)>>(detail::read_index(*it, pointer_join("", key)));
	};
	auto str = [&](char const *key, std::string &dst) {
		if (auto it = j.find(key); it != j.end())
			dst = detail::read_string(*it, pointer_join("", key));
	};
	str("command", base.command);
	str("input", base.input);
	str("out", base.out_dir);
	str("weight", base.weight);
	num("radius", base.radius);
	num("kmax", base.k_max);
	num("seed", base.seed);
	num("budget", base.budget);
	num("cloud_cap", base.cloud_cap);
	if (auto it = j.find("strict"); it != j.end())
	{
		if (!it->is_boolean())
			fail("type mismatch", "/strict", "expected true or false");
		base.strict = it->get<bool>();
	}
	if (auto it = j.find("nlist"); it != j.end())
	{
		if (!it->is_array())
			fail("type mismatch", "/nlist", "expected an array of positive integers");
		base.n_list.clear();
		for (size_t i = 0; i < it->size(); ++i)
			base.n_list.push_back(static_cast<long>(detail::read_index((*it)[i], pointer_join("/nlist", i))));
	}
	if (auto it = j.find("elements"); it != j.end())
	{
		if (!it->is_array())
			fail("type mismatch", "/elements", "expected an array of words");
		base.elements.clear();
		for (size_t i = 0; i < it->size(); ++i)
			base.elements.push_back(detail::read_string((*it)[i], pointer_join("/elements", i)));
	}
	return base;
}

namespace detail {

/// Doubles in reports: rounded to 9 decimals so equal runs print equal bytes.
inline json num(double x)
{
	if (!std::isfinite(x))
		return nullptr;
	double r = std::round(x * 1e9) / 1e9;
	return r == 0 ? 0.0 : r;
}

inline std::string csv_num(double x)
{
	if (!std::isfinite(x))
		return "nan";
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.9g", x);
	return buf;
}

inline json exact(Vector const &v)
{
	json out = json::array();
	for (auto const &x : v)
		out.push_back(to_string(x));
	return out;
}

inline json doubles(std::vector<double> const &v)
{
	json out = json::array();
	for (double x : v)
		out.push_back(num(x));
	return out;
}

/// Weight grammar: constant | poly:S | coordexp:B:INDEX | table:PATH, with
/// an optional "+sym" suffix. Table files map words to weights.
inline WeightSpec parse_weight(std::string const &text, MatrixGroupDescriptor const *g)
{
	std::string body = text;
	bool sym = false;
	if (body.size() > 4 && body.compare(body.size() - 4, 4, "+sym") == 0)
	{
		sym = true;
		body.resize(body.size() - 4);
	}
	std::vector<std::string> parts;
	std::stringstream in(body);
	for (std::string p; std::getline(in, p, ':');)
		parts.push_back(p);
	auto bad = [&](std::string const &why) -> WeightSpec {
		throw parse_error("malformed weight", "--weight " + text, why);
	};
	auto real = [&](std::string const &s) {
		try
		{
			size_t used = 0;
			double v = std::stod(s, &used);
			if (used == s.size())
				return v;
		}
		catch (std::exception const &)
		{
		}
		bad("'" + s + "' is not a number");
		return 0.0;
	};
	WeightSpec w;
	if (parts.size() == 1 && parts[0] == "constant")
		w = WeightSpec::constant();
	else if (parts.size() == 2 && parts[0] == "poly")
		w = WeightSpec::polynomial(real(parts[1]));
	else if (parts.size() == 3 && parts[0] == "coordexp")
		w = WeightSpec::coordinate_exponential(real(parts[1]), static_cast<size_t>(real(parts[2])));
	else if (parts.size() >= 2 && parts[0] == "table")
	{
		if (!g)
			bad("table weights need a matrix group");
		std::string path = body.substr(6);
		std::ifstream f(path);
		if (!f)
			throw parse_error("unreadable input", path, "cannot open weight table");
		json j;
		try
		{
			j = json::parse(f);
		}
		catch (json::parse_error const &e)
		{
			throw parse_error("invalid json", path + " byte " + std::to_string(e.byte), e.what());
		}
		if (!j.is_object())
			throw parse_error("type mismatch", path, "weight table must map words to numbers");
		std::map<std::string, double> values;
		for (auto it = j.begin(); it != j.end(); ++it)
		{
			if (!it->is_number())
				throw parse_error("type mismatch", path + " /" + it.key(), "expected a number");
			values[evaluate_word(*g, it.key()).key()] = it->get<double>();
		}
		w = WeightSpec::table(std::move(values));
	}
	else
		bad("expected constant, poly:S, coordexp:B:INDEX or table:PATH");
	w.symmetrize = sym;
	return w;
}

/// Everything a command may need, built lazily from the descriptor.
class Session
{
  public:
	Session(RunConfig const &cfg, Descriptor d) : cfg_(cfg), d_(std::move(d)) {}

	Descriptor const &descriptor() const { return d_; }

	MatrixGroupDescriptor const &group() const
	{
		if (!d_.group)
			throw unsupported_input("'" + cfg_.command + "' needs a group; " + d_.label +
			                        " is a bare Lie algebra descriptor");
		return *d_.group;
	}

	bool certified() const { return d_.group && d_.group->certified_unitriangular; }

	MalcevAlgebra const &malcev()
	{
		if (!certified())
			throw unsupported_input("'" + cfg_.command + "' needs a unitriangular group; " + d_.label +
			                        " is not certified unitriangular");
		if (!malcev_)
			malcev_ = malcev_lie_algebra(*d_.group);
		return *malcev_;
	}
	MalcevAlgebra const *malcev_or_null() { return certified() ? &malcev() : nullptr; }

	BallTable const &table()
	{
		if (!table_)
			table_ = std::make_unique<BallTable>(balls(group(), cfg_.radius, cfg_.budget));
		return *table_;
	}
	HorizonSearch &search()
	{
		if (!search_)
			search_ = std::make_unique<HorizonSearch>(table());
		return *search_;
	}

	/// The configured words, else the generators and (for two or more
	/// generators) the commutator of the first two.
	std::vector<std::string> words() const
	{
		if (!cfg_.elements.empty())
			return cfg_.elements;
		auto const &g = group();
		std::vector<std::string> w = g.generator_labels;
		if (w.size() >= 2)
			w.push_back(w[0] + " " + w[1] + " " + w[0] + "^-1 " + w[1] + "^-1");
		return w;
	}
	RationalMatrix element(std::string const &word) const { return evaluate_word(group(), word); }

  private:
	RunConfig const &cfg_;
	Descriptor d_;
	std::optional<MalcevAlgebra> malcev_;
	std::unique_ptr<BallTable> table_;
	std::unique_ptr<HorizonSearch> search_;
};

struct CommandOutput
{
	json result = json::object();
	bool inconclusive = false;
	bool invariant_failed = false;
	std::map<std::string, std::string> csv; ///< file name -> body (without the header comment)
};

inline std::string sizes_csv(std::vector<size_t> const &sizes)
{
	std::string s = "radius,size,sphere\n";
	for (size_t r = 0; r < sizes.size(); ++r)
		s += std::to_string(r) + "," + std::to_string(sizes[r]) + "," +
		     std::to_string(sizes[r] - (r ? sizes[r - 1] : 0)) + "\n";
	return s;
}

inline json classification_json(DoublingVerdict const &v)
{
	return {{"kind", to_string(v.kind)},
	        {"degree", v.kind == DoublingVerdict::Kind::polynomial ? json(v.degree) : json(nullptr)},
	        {"log_ratios", doubles(v.log_ratios)},
	        {"tail_from", v.tail_from},
	        {"tail_slope", num(v.tail_slope)},
	        {"tail_median", num(v.tail_median)},
	        {"tail_max", num(v.tail_max)}};
}

inline json gnr_json(GnrVerdict const &v)
{
	return {{"verdict", to_string(v.kind)}, {"limit", num(v.limit)}, {"beta", num(v.beta)},
	        {"trend", num(v.trend)},        {"tail_last", num(v.tail_last)}, {"fit_from", v.fit_from},
	        {"sequence", doubles(v.sequence)}};
}

// --- commands --------------------------------------------------------------

inline CommandOutput cmd_growth(Session &s, RunConfig const &cfg)
{
	CommandOutput o;
	json alg;
	std::optional<long> degree;
	bool exponential_algebraic = false;
	try
	{
		LieAlgebraQ l = nil_shadow(s.descriptor());
		auto chain = lcs_algebra(l);
		auto g = growth_degree_from_lcs(chain.dims);
		degree = g.degree;
		alg = {{"available", true},      {"polynomial", true},      {"degree", g.degree},
		       {"rank", g.rank},          {"lcs_dims", g.lcs_dims}, {"layer_ranks", g.layer_ranks},
		       {"nilpotency_class", chain.nilpotency_class()}};
		if (s.certified())
		{
			auto side = group_side_ranks(s.group(), s.malcev());
			alg["group_side"] = {{"layer_ranks", side.ranks},
			                     {"degree", side.degree},
			                     {"hirsch_rank", side.hirsch_rank},
			                     {"consistent", side.ranks == g.layer_ranks}};
			if (side.ranks != g.layer_ranks)
				o.invariant_failed = true;
		}
	}
	catch (not_polynomial_growth const &e)
	{
		exponential_algebraic = true;
		alg = {{"available", true}, {"polynomial", false}, {"degree", nullptr}, {"witness", e.what()}};
	}
	catch (unsupported_input const &e)
	{
		alg = {{"available", false}, {"reason", e.what()}};
	}
	o.result["algebraic"] = alg;

	json emp = {{"available", false}};
	std::optional<DoublingVerdict> verdict;
	if (s.descriptor().group && cfg.radius > 0)
	{
		auto const &t = s.table();
		verdict = doubling_classifier(t.sizes());
		emp = {{"available", true},
		       {"radius", t.max_radius()},
		       {"sizes", t.sizes()},
		       {"fitted_exponent", num(fitted_growth_exponent(t.sizes()))},
		       {"classification", classification_json(*verdict)}};
		o.csv["balls.csv"] = sizes_csv(t.sizes());
	}
	else if (!s.descriptor().group)
		emp["reason"] = "no group realisation to enumerate";
	o.result["empirical"] = emp;

	std::string agreement = "n/a";
	bool algebraic_known = degree || exponential_algebraic;
	if (algebraic_known && verdict)
	{
		using K = DoublingVerdict::Kind;
		if (verdict->kind == K::inconclusive)
			agreement = "inconclusive";
		else if (exponential_algebraic)
			agreement = verdict->kind == K::exponential ? "agree" : "disagree";
		else
			agreement = verdict->kind == K::polynomial &&
			                    std::abs(verdict->degree - *degree) <= cfg.tol.degree_agreement
			                ? "agree"
			                : "disagree";
	}
	o.result["agreement"] = agreement;
	o.inconclusive = agreement == "inconclusive";
	return o;
}

inline CommandOutput cmd_balls(Session &s, RunConfig const &)
{
	CommandOutput o;
	auto const &t = s.table();
	o.result = {{"radius", t.max_radius()},
	            {"sizes", t.sizes()},
	            {"generating_set_size", t.steps().size()}};
	o.csv["balls.csv"] = sizes_csv(t.sizes());
	return o;
}

inline CommandOutput cmd_classify(Session &s, RunConfig const &)
{
	CommandOutput o;
	auto const &t = s.table();
	auto v = doubling_classifier(t.sizes());
	o.result = {{"radius", t.max_radius()},
	            {"sizes", t.sizes()},
	            {"fitted_exponent", num(fitted_growth_exponent(t.sizes()))},
	            {"classification", classification_json(v)}};
	o.inconclusive = v.kind == DoublingVerdict::Kind::inconclusive;
	o.csv["balls.csv"] = sizes_csv(t.sizes());
	return o;
}

inline CommandOutput cmd_gamma(Session &s, RunConfig const &cfg)
{
	CommandOutput o;
	json rows = json::array();
	for (auto const &w : s.words())
	{
		RationalMatrix x = s.element(w);
		auto g = gamma_estimate(x, s.search(), cfg.k_max, cfg.tol.gamma_match);
		json row = {{"element", w},
		            {"verdict", to_string(g.verdict)},
		            {"exponent", num(g.exponent)},
		            {"j", g.j ? json(g.j) : json(nullptr)},
		            {"resolved_k", g.tau_powers.size()},
		            {"fit_k", {g.fit_from, g.fit_to}},
		            {"tau_powers", g.tau_powers}};
		// Algebraic side: x in H_{m} \ H_{m+1} predicts gamma = 1/(m+1).
		std::string agreement = "n/a";
		if (s.certified())
		{
			auto m = layer(x, s.malcev());
			row["layer"] = m ? json(*m + 1) : json(nullptr);
			if (!m)
				agreement = g.verdict == GammaEstimate::Verdict::bounded ? "agree" : "disagree";
			else if (g.verdict == GammaEstimate::Verdict::matched)
				agreement = g.j == *m + 1 ? "agree" : "disagree";
			else if (g.verdict == GammaEstimate::Verdict::bounded)
				agreement = "disagree";
			else
				agreement = "inconclusive";
		}
		row["agreement"] = agreement;
		o.inconclusive |= agreement == "inconclusive" ||
		                  g.verdict == GammaEstimate::Verdict::inconclusive;
		rows.push_back(std::move(row));
	}
	o.result = {{"radius", s.table().max_radius()}, {"reach", s.search().reach()}, {"elements", rows}};
	return o;
}

inline CommandOutput cmd_conj(Session &s, RunConfig const &cfg)
{
	CommandOutput o;
	std::vector<long> ns = cfg.n_list;
	if (ns.empty())
		for (size_t n = 1; n <= s.table().max_radius(); ++n)
			ns.push_back(static_cast<long>(n));
	json rows = json::array();
	std::string csv = "element,n,value,exact,ratio\n";
	for (auto const &w : s.words())
	{
		RationalMatrix x = s.element(w);
		json vals = json::array();
		for (long n : ns)
		{
			if (n <= 0)
				throw domain_error("conj: n must be positive");
			auto c = conj_growth(x, static_cast<size_t>(n), s.search());
			double ratio = double(c.value) / double(n);
			vals.push_back({{"n", n}, {"value", c.value}, {"exact", c.exact}, {"ratio", num(ratio)}});
			o.inconclusive |= !c.exact;
			csv += "\"" + w + "\"," + std::to_string(n) + "," + std::to_string(c.value) + "," +
			       (c.exact ? "1" : "0") + "," + csv_num(ratio) + "\n";
		}
		rows.push_back({{"element", w}, {"values", vals}});
	}
	o.result = {{"radius", s.table().max_radius()}, {"reach", s.search().reach()}, {"elements", rows}};
	o.csv["conj.csv"] = csv;
	return o;
}

inline CommandOutput cmd_layers(Session &s, RunConfig const &)
{
	CommandOutput o;
	auto const &a = s.malcev();
	json rows = json::array();
	for (auto const &w : s.words())
	{
		auto m = layer(s.element(w), a);
		rows.push_back({{"element", w}, {"layer", m ? json(*m + 1) : json(nullptr)}});
	}
	o.result = {{"lcs_dims", a.lcs_dims}, {"layer_of_basis", a.layer_of}, {"elements", rows}};
	return o;
}

inline CommandOutput cmd_coords(Session &s, RunConfig const &cfg)
{
	CommandOutput o;
	auto const &a = s.malcev();
	json rows = json::array();
	for (auto const &w : s.words())
	{
		RationalMatrix x = s.element(w);
		rows.push_back({{"element", w},
		                {"second_kind", exact(malcev_coordinates(x, a))},
		                {"log", exact(a.coordinates(log_unipotent(x)))}});
	}
	o.result = {{"layer_of_basis", a.layer_of}, {"elements", rows}};
	if (cfg.radius > 0)
	{
		auto p = coordinate_growth_profile(s.table(), a);
		o.result["profile"] = {{"radius", s.table().max_radius()},
		                       {"fit_from", p.fit_from},
		                       {"exponents", doubles(p.exponents)},
		                       {"layer_of", p.layer_of}};
		std::string csv = "radius";
		for (size_t j = 0; j < a.dim(); ++j)
			csv += ",t" + std::to_string(j);
		csv += "\n";
		for (size_t r = 0; r < p.max_abs.size(); ++r)
		{
			csv += std::to_string(r);
			for (double v : p.max_abs[r])
				csv += "," + csv_num(v);
			csv += "\n";
		}
		o.csv["coords_profile.csv"] = csv;
	}
	return o;
}

inline CommandOutput cmd_cone(Session &s, RunConfig const &cfg)
{
	CommandOutput o;
	std::vector<long> ns = cfg.n_list.empty() ? std::vector<long>{10, 20, 40, 80} : cfg.n_list;
	LieAlgebraQ l = nil_shadow(s.descriptor());
	auto d = descriptor_grading(s.descriptor(), l);
	// Probe pair: the first two adapted vectors (both in layer 1 when it has
	// dimension >= 2).
	size_t n = d.dim();
	Vector x = unit_vector(n, 0), y = unit_vector(n, n > 1 ? 1 : 0);
	auto g = graded_limit_check(x, y, l, d, ns);
	json errs = json::array();
	for (auto const &e : g.errors)
		errs.push_back({{"exact", to_string(e)}, {"value", num(e.get_d())}});
	o.result["graded_limit"] = {{"scales", g.scales},
	                            {"errors", errs},
	                            {"graded_value", exact(g.graded_value)},
	                            {"nonincreasing", g.nonincreasing},
	                            {"contracts", g.contracts}};
	if (!g.nonincreasing || !g.contracts)
		o.invariant_failed = true;
	if (s.certified())
	{
		auto const &a = s.malcev();
		auto ad = a.grading();
		json pts = json::array();
		for (auto const &w : s.words())
		{
			RationalMatrix e = s.element(w);
			json per = json::array();
			for (long k : ns)
			{
				auto p = cone_point(e, k, a, ad);
				per.push_back({{"n", k}, {"point", exact(p.rational())}, {"quasi_norm", num(quasi_norm(p, ad))}});
			}
			pts.push_back({{"element", w}, {"points", per}});
		}
		o.result["cone_points"] = pts;
	}
	return o;
}

inline CommandOutput cmd_clouds(Session &s, RunConfig const &cfg)
{
	CommandOutput o;
	auto const &a = s.malcev();
	auto d = a.grading();
	std::vector<long> ns = cfg.n_list;
	if (ns.empty())
		for (size_t n = 2; n <= s.table().max_radius(); n += 2)
			ns.push_back(static_cast<long>(n));
	std::vector<CloudSnapshot> snaps;
	json meta = json::array();
	for (long n : ns)
	{
		if (n <= 0)
			throw domain_error("clouds: radii must be positive");
		snaps.push_back(ball_cloud(s.table(), static_cast<size_t>(n), a, d, cfg.cloud_cap, cfg.seed));
		auto const &c = snaps.back();
		meta.push_back({{"radius", n}, {"ball_size", c.ball_size}, {"points", c.points.size()}, {"subsampled", c.subsampled}});
		std::string csv;
		for (size_t j = 0; j < d.dim(); ++j)
			csv += (j ? ",x" : "x") + std::to_string(j);
		csv += "\n";
		for (auto const &p : c.points)
		{
			for (size_t j = 0; j < p.size(); ++j)
				csv += (j ? "," : "") + csv_num(p[j]);
			csv += "\n";
		}
		o.csv["cloud_" + std::to_string(n) + ".csv"] = csv;
	}
	json dist = json::array();
	std::vector<double> ds;
	std::string csv = "radius_a,radius_b,hausdorff\n";
	for (size_t i = 0; i + 1 < snaps.size(); ++i)
	{
		ds.push_back(cloud_distance(snaps[i], snaps[i + 1]));
		dist.push_back({{"pair", {ns[i], ns[i + 1]}}, {"hausdorff", num(ds.back())}});
		csv += std::to_string(ns[i]) + "," + std::to_string(ns[i + 1]) + "," + csv_num(ds.back()) + "\n";
	}
	size_t inversions = 0;
	for (size_t i = 1; i < ds.size(); ++i)
		inversions += ds[i] >= ds[i - 1];
	o.result = {{"snapshots", meta}, {"distances", dist}, {"inversions", inversions},
	            {"monotone_within_one_inversion", inversions <= 1}};
	o.inconclusive = inversions > 1;
	o.csv["cloud_distances.csv"] = csv;
	return o;
}

inline CommandOutput cmd_gnr(Session &s, RunConfig const &cfg)
{
	CommandOutput o;
	auto const &g = s.group();
	auto spec = parse_weight(cfg.weight, &g);
	WeightEvaluator w(spec, s.search(), s.malcev_or_null());
	auto audit = validate_weight(w, s.table(), 1000, cfg.seed);
	auto r = theorem_4_2_consistency(g, w, s.table(), cfg.k_max, s.malcev_or_null());
	json per = json::array();
	for (size_t i = 0; i < r.B.elements.size(); ++i)
		per.push_back({{"element", r.B.labels[i]}, {"gnr", gnr_json(r.gnr[i])}});
	o.result = {{"weight", spec.describe()},
	            {"audit", {{"elements_checked", audit.elements_checked}, {"pairs_checked", audit.pairs_checked}}},
	            {"B", {{"labels", r.B.labels}, {"fallback_to_generators", r.B.fallback}}},
	            {"gnr", per},
	            {"condition_S", gnr_json(r.condition_s)},
	            {"all_gnr_pass", r.all_gnr_pass()},
	            {"agreement", to_string(r.agreement)}};
	o.inconclusive = r.agreement == ConsistencyReport::Agreement::inconclusive;
	o.invariant_failed = r.agreement == ConsistencyReport::Agreement::disagree;
	return o;
}

inline CommandOutput cmd_selftest(RunConfig const &cfg)
{
	CommandOutput o;
	json rows = json::array();
	bool all = true;
	for (auto const &e : catalog())
	{
		json row = {{"name", e.name}};
		std::vector<std::string> failures;
		try
		{
			auto d = parse_descriptor(e.text);
			if (parse_descriptor(d.canonical_text()).canonical_text() != d.canonical_text())
				failures.push_back("round trip");
			if (e.expect.degree)
			{
				long got = growth_degree_algebra(nil_shadow(d));
				row["degree"] = got;
				if (got != *e.expect.degree)
					failures.push_back("degree " + std::to_string(got));
			}
			if (e.expect.rank)
			{
				auto got = d.rank();
				row["rank"] = got ? json(*got) : json(nullptr);
				if (got != e.expect.rank)
					failures.push_back("rank");
			}
			if (e.expect.classify_radius && d.group)
			{
				auto t = balls(*d.group, e.expect.classify_radius, cfg.budget);
				auto v = doubling_classifier(t.sizes());
				row["classification"] = to_string(v.kind);
				auto want = e.expect.empirical_degree ? e.expect.empirical_degree : e.expect.degree;
				bool ok = e.expect.polynomial
				              ? v.kind == DoublingVerdict::Kind::polynomial &&
				                    (!want || std::abs(v.degree - *want) <= cfg.tol.degree_agreement)
				              : v.kind == DoublingVerdict::Kind::exponential;
				if (v.kind == DoublingVerdict::Kind::polynomial)
					row["empirical_degree"] = v.degree;
				if (!ok)
					failures.push_back("classification");
			}
		}
		catch (std::exception const &ex)
		{
			failures.push_back(ex.what());
		}
		row["pass"] = failures.empty();
		row["failures"] = failures;
		all = all && failures.empty();
		rows.push_back(std::move(row));
	}
	o.result = {{"entries", rows}, {"all_pass", all}};
	o.invariant_failed = !all;
	return o;
}

inline void write_text(std::filesystem::path const &p, std::string const &body)
{
	std::ofstream f(p, std::ios::binary);
	if (!f)
		throw unsupported_input("cannot write " + p.string());
	f << body;
}

} // namespace detail

/// Runs one command. The report goes to `out` (and to DIR/<command>.json
/// with --out); diagnostics go to `err`.
inline int run(RunConfig const &cfg, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
	using namespace detail;
	json report = {{"tool", "nilgrowth"},
	               {"version", version},
	               {"command", cfg.command},
	               {"seed", cfg.seed},
	               {"tolerances", cfg.tol.to_json()},
	               {"parameters",
	                {{"radius", cfg.radius},
	                 {"kmax", cfg.k_max},
	                 {"nlist", cfg.n_list},
	                 {"budget", cfg.budget},
	                 {"cloud_cap", cfg.cloud_cap},
	                 {"weight", cfg.weight},
	                 {"elements", cfg.elements},
	                 {"strict", cfg.strict}}}};
	std::string csv_header = "# nilgrowth " + std::string(version) + " " + cfg.command +
	                         " seed=" + std::to_string(cfg.seed) + " tolerances=" +
	                         cfg.tol.to_json().dump() + "\n";
	int code = exit_ok;
	CommandOutput o;
	auto emit = [&]() {
		std::string text = report.dump(2) + "\n";
		out << text;
		if (!cfg.out_dir.empty())
		{
			std::filesystem::path dir(cfg.out_dir);
			std::filesystem::create_directories(dir);
			write_text(dir / (cfg.command + ".json"), text);
			for (auto const &[name, body] : o.csv)
				write_text(dir / name, csv_header + body);
		}
	};
	auto fail_with = [&](int c, std::string const &kind, std::string const &msg) {
		report["status"] = "error";
		report["error"] = {{"kind", kind}, {"message", msg}};
		err << "nilgrowth: " << msg << "\n";
		code = c;
	};
	try
	{
		auto const &cmds = commands();
		if (std::find(cmds.begin(), cmds.end(), cfg.command) == cmds.end())
			throw unsupported_input("unknown command '" + cfg.command + "'");
		if (cfg.command == "selftest")
			o = cmd_selftest(cfg);
		else
		{
			if (cfg.input.empty())
				throw unsupported_input("--input is required");
			Descriptor d = load_descriptor(cfg.input);
			report["input"] = {{"source", cfg.input},
			                   {"label", d.label},
			                   {"kind", to_string(d.kind)},
			                   {"digest", "fnv1a64:" + d.digest()}};
			Session s(cfg, std::move(d));
			static std::map<std::string, std::function<CommandOutput(Session &, RunConfig const &)>> const
			    table = {{"growth", cmd_growth}, {"balls", cmd_balls},   {"gamma", cmd_gamma},
			             {"conj", cmd_conj},     {"layers", cmd_layers}, {"coords", cmd_coords},
			             {"cone", cmd_cone},     {"clouds", cmd_clouds}, {"gnr", cmd_gnr},
			             {"classify", cmd_classify}};
			o = table.at(cfg.command)(s, cfg);
		}
		report["result"] = o.result;
		report["status"] = o.invariant_failed ? "invariant_violation" : o.inconclusive ? "inconclusive" : "ok";
		if (o.invariant_failed)
			code = exit_invariant;
		else if (o.inconclusive && cfg.strict)
			code = exit_inconclusive;
	}
	catch (parse_error const &e)
	{
		fail_with(exit_parse, "parse_error:" + e.kind(), e.what());
	}
	catch (budget_exceeded const &e)
	{
		fail_with(exit_budget, "budget_exceeded", e.what());
		if (e.partial())
			report["error"]["partial_sizes"] = e.partial()->sizes();
	}
	catch (capacity_error const &e)
	{
		fail_with(exit_budget, "capacity_error", e.what());
	}
	catch (invariant_violation const &e)
	{
		fail_with(exit_invariant, "invariant_violation", e.what());
	}
	catch (std::exception const &e)
	{
		fail_with(exit_usage, "error", e.what());
	}
	try
	{
		emit();
	}
	catch (std::exception const &e)
	{
		err << "nilgrowth: " << e.what() << "\n";
		if (code == exit_ok)
			code = exit_usage;
	}
	return code;
}

} // namespace nilgrowth
