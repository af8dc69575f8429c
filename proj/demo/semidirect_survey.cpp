// Z^2 x|_A Z for a few integer matrices A: the cyclotomic test decides
// polynomial growth, the nil-shadow gives the degree, BFS double-checks.

#include "nilgrowth/nilgrowth.hpp"

#include <cstdio>

using namespace nilgrowth;

int main()
{
	struct Case
	{
		char const *name;
		RationalMatrix a;
	};
	std::vector<Case> cases = {
	    {"quarter turn", RationalMatrix{{0, -1}, {1, 0}}},
	    {"sixth turn", RationalMatrix{{0, -1}, {1, 1}}},
	    {"shear", RationalMatrix{{1, 1}, {0, 1}}},
	    {"minus shear", RationalMatrix{{-1, 1}, {0, -1}}},
	    {"cat map", RationalMatrix{{2, 1}, {1, 1}}},
	};
	for (auto const &c : cases)
	{
		std::printf("%-12s ", c.name);
		auto q = quasi_unipotent_test(c.a);
		if (q.quasi_unipotent)
			std::printf("quasi-unipotent, degree %ld", growth_degree_algebra(semidirect_nilshadow(c.a, 2)));
		else
			std::printf("not quasi-unipotent (factor %s)", q.witness().c_str());
		auto t = balls(semidirect_matrix_group(c.a, 2, c.name), 14);
		auto v = doubling_classifier(t.sizes());
		std::printf("; BFS says %s", to_string(v.kind));
		if (v.kind == DoublingVerdict::Kind::polynomial)
			std::printf(" %ld", v.degree);
		std::printf(" (|V^14| = %zu)\n", t.sizes().back());
	}
}
