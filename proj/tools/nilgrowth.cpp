// nilgrowth command-line front end. All work happens in nilgrowth::run.

#include "nilgrowth/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <utility>
#include <vector>

namespace {

char const *describe(std::string const &cmd)
{
	static std::map<std::string, char const *> const text = {
	    {"growth", "exact growth degree next to the empirical ball sizes"},
	    {"balls", "BFS ball sizes |V^n| (CSV: radius,size,sphere)"},
	    {"gamma", "local growth exponent of tau(x^k) per element"},
	    {"conj", "conjugacy operator growth ||x||_n"},
	    {"layers", "LCS layer of each element"},
	    {"coords", "Malcev coordinates and their growth over the balls"},
	    {"cone", "graded-limit check and scaled cone points"},
	    {"clouds", "rescaled ball snapshots and their Hausdorff distances"},
	    {"gnr", "GNR and condition (S) for a weight"},
	    {"classify", "polynomial / exponential verdict from doubling ratios"},
	    {"selftest", "check every catalog entry against its expected invariants"},
	};
	return text.at(cmd);
}

} // namespace

int main(int argc, char **argv)
{
	using namespace nilgrowth;
	CLI::App app{"nilgrowth: growth of nilpotent and polynomial-growth groups"};
	app.set_version_flag("--version", std::string(version));
	app.require_subcommand(1);
	bool list = false;
	app.add_flag("--list-catalog", list, "print the built-in catalog and exit");

	RunConfig flags;
	std::string config_path;
	// Overrides applied on top of --config, one per flag the user gave.
	std::vector<std::pair<CLI::Option *, std::function<void(RunConfig &)>>> given;
	auto track = [&](CLI::Option *o, std::function<void(RunConfig &)> f) { given.emplace_back(o, std::move(f)); };

	for (auto const &name : commands())
	{
		auto *sub = app.add_subcommand(name, describe(name));
		sub->fallthrough();
		if (name != "selftest")
			track(sub->add_option("--input,-i", flags.input, "descriptor file or catalog:NAME"),
			      [&](RunConfig &c) { c.input = flags.input; });
		track(sub->add_option("--radius,-r", flags.radius, "ball radius R")->check(CLI::NonNegativeNumber),
		      [&](RunConfig &c) { c.radius = flags.radius; });
		track(sub->add_option("--kmax,-k", flags.k_max, "largest power / sequence index")->check(CLI::PositiveNumber),
		      [&](RunConfig &c) { c.k_max = flags.k_max; });
		track(sub->add_option("--nlist", flags.n_list, "scales or radii (comma separated)")->delimiter(','),
		      [&](RunConfig &c) { c.n_list = flags.n_list; });
		track(sub->add_option("--seed", flags.seed, "random seed"), [&](RunConfig &c) { c.seed = flags.seed; });
		track(sub->add_option("--budget", flags.budget, "maximum number of ball elements")->check(CLI::PositiveNumber),
		      [&](RunConfig &c) { c.budget = flags.budget; });
		track(sub->add_option("--out,-o", flags.out_dir, "directory for the JSON report and CSV files"),
		      [&](RunConfig &c) { c.out_dir = flags.out_dir; });
		track(sub->add_flag("--strict", flags.strict, "treat inconclusive results as errors (exit 5)"),
		      [&](RunConfig &c) { c.strict = flags.strict; });
		track(sub->add_option("--element,-e", flags.elements, "word such as \"a b a^-1 b^-1\" (repeatable)"),
		      [&](RunConfig &c) { c.elements = flags.elements; });
		track(sub->add_option("--weight,-w", flags.weight, "constant | poly:S | coordexp:B:I | table:PATH [+sym]"),
		      [&](RunConfig &c) { c.weight = flags.weight; });
		track(sub->add_option("--cloud-cap", flags.cloud_cap, "subsampling cap per cloud")->check(CLI::PositiveNumber),
		      [&](RunConfig &c) { c.cloud_cap = flags.cloud_cap; });
		sub->add_option("--config,-c", config_path, "JSON file with the same keys as the flags");
	}

	try
	{
		app.parse(argc, argv);
	}
	catch (CLI::CallForHelp const &e)
	{
		return app.exit(e);
	}
	catch (CLI::CallForVersion const &e)
	{
		return app.exit(e);
	}
	catch (CLI::ParseError const &e)
	{
		if (list)
		{
			for (auto const &entry : catalog())
				std::cout << entry.name << "\t" << entry.summary << "\n";
			return exit_ok;
		}
		app.exit(e);
		return exit_usage;
	}

	if (list)
	{
		for (auto const &entry : catalog())
			std::cout << entry.name << "\t" << entry.summary << "\n";
		return exit_ok;
	}

	RunConfig cfg;
	cfg.command = app.get_subcommands().front()->get_name();
	if (!config_path.empty())
	{
		std::ifstream f(config_path);
		if (!f)
		{
			std::cerr << "nilgrowth: cannot open config " << config_path << "\n";
			return exit_parse;
		}
		try
		{
			cfg = config_from_json(json::parse(f), cfg);
		}
		catch (json::parse_error const &e)
		{
			std::cerr << "nilgrowth: " << config_path << ": " << e.what() << "\n";
			return exit_parse;
		}
		catch (parse_error const &e)
		{
			std::cerr << "nilgrowth: " << config_path << ": " << e.what() << "\n";
			return exit_parse;
		}
		if (cfg.command != app.get_subcommands().front()->get_name())
		{
			std::cerr << "nilgrowth: config names command '" << cfg.command << "'\n";
			return exit_usage;
		}
	}
	for (auto &[opt, apply] : given)
		if (opt->count() > 0)
			apply(cfg);
	return run(cfg);
}
