// Two views of the asymptotic cone: the graded limit of a non-graded
// filiform algebra, and rescaled Heisenberg balls settling down.

#include "nilgrowth/nilgrowth.hpp"

#include <cstdio>

using namespace nilgrowth;

int main()
{
	// [e1,e2] = e3 + e4, [e1,e3] = e4: same LCS as the standard filiform
	// algebra but not graded in this basis
	auto one = [](size_t n, std::initializer_list<size_t> idx) {
		Vector v = zero_vector(n);
		for (size_t i : idx)
			v[i] = 1;
		return v;
	};
	LieAlgebraQ l({"e1", "e2", "e3", "e4"}, {{0, 1, one(4, {2, 3})}, {0, 2, one(4, {3})}});
	auto d = default_grading(l);
	auto r = graded_limit_check(unit_vector(4, 0), unit_vector(4, 1), l, d, {10, 20, 40, 80, 160});
	std::printf("graded limit, filiform variant:\n");
	for (size_t i = 0; i < r.scales.size(); ++i)
		std::printf("  n = %3ld  error %s\n", r.scales[i], to_string(r.errors[i]).c_str());

	auto g = MatrixGroupDescriptor::make(
	    "heisenberg", {"a", "b"},
	    {RationalMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}, RationalMatrix{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}}}, true);
	auto a = malcev_lie_algebra(g);
	auto t = balls(g, 12);
	std::vector<CloudSnapshot> s;
	for (size_t n = 4; n <= 12; n += 2)
		s.push_back(ball_cloud(t, n, a, a.grading()));
	std::printf("Hausdorff distance between rescaled balls:\n");
	for (size_t i = 0; i + 1 < s.size(); ++i)
		std::printf("  d(S%zu, S%zu) = %.4f\n", s[i].radius, s[i + 1].radius, cloud_distance(s[i], s[i + 1]));
}
