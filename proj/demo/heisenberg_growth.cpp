// Word growth of the discrete Heisenberg group: exact degree from the
// Malcev algebra next to BFS ball counts.

#include "nilgrowth/nilgrowth.hpp"

#include <cmath>
#include <cstdio>

using namespace nilgrowth;

int main()
{
	auto g = MatrixGroupDescriptor::make(
	    "heisenberg", {"a", "b"},
	    {RationalMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}, RationalMatrix{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}}}, true);

	auto deg = growth_degree_group(g);
	std::printf("rank %zu, degree %ld\n", deg.rank, deg.degree);

	auto t = balls(g, 14);
	std::printf("%4s %10s %10s\n", "n", "|V^n|", "|V^n|/n^4");
	for (size_t n = 1; n <= t.max_radius(); ++n)
		std::printf("%4zu %10zu %10.4f\n", n, t.sizes()[n], t.sizes()[n] / std::pow(double(n), 4));

	auto v = doubling_classifier(t.sizes());
	std::printf("doubling classifier: %s, d-hat %ld\n", to_string(v.kind), v.degree);

	// the central commutator grows like k^(1/2)
	HorizonSearch s(t);
	auto z = evaluate_word(g, "a b a^-1 b^-1");
	auto gam = gamma_estimate(z, s, 56);
	std::printf("gamma([a,b]) = %.3f (%s, j = %u), layer %zu\n", gam.exponent, to_string(gam.verdict), gam.j,
	            *layer(z, malcev_lie_algebra(g)) + 1);
}
