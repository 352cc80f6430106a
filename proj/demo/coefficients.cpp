// Rank coefficients of a small hand-made sample.

#include <cstdio>
#include <vector>

#include "ktau/rankcoef.hpp"

int main() {
    const std::vector<ktau::Point> pts{{1, 1}, {2, 3}, {3, 2}, {4, 4}, {5, 7}, {6, 5}};
    const auto c = ktau::compute_coefficients(pts);
    std::printf("kendall   %.6f\nspearman  %.6f\nblended_r %.6f\npearson   %.6f\n", *c.kendall, *c.spearman,
                *c.blended_r, *c.pearson);
    return 0;
}
