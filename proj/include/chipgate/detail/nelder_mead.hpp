#ifndef CHIPGATE_DETAIL_NELDER_MEAD_HPP
#define CHIPGATE_DETAIL_NELDER_MEAD_HPP

#include <algorithm>
#include <functional>
#include <vector>

namespace chipgate::detail {

/// Plain Nelder-Mead simplex minimization; deterministic for fixed inputs.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x0, double step, double tol,
                                       int max_iter) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
    for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    for (int it = 0; it < max_iter; ++it) {
        std::vector<std::size_t> order(n + 1);
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];
        if (vals[worst] - vals[best] < tol) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / double(n);
        }
        auto blend = [&](double alpha) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + alpha * (pts[worst][d] - centroid[d]);
            return p;
        };
        const auto refl = blend(-1.0);
        const double frefl = f(refl);
        if (frefl < vals[best]) {
            const auto expd = blend(-2.0);
            const double fexp = f(expd);
            if (fexp < frefl) {
                pts[worst] = expd;
                vals[worst] = fexp;
            } else {
                pts[worst] = refl;
                vals[worst] = frefl;
            }
        } else if (frefl < vals[second]) {
            pts[worst] = refl;
            vals[worst] = frefl;
        } else {
            const auto ctr = blend(0.5);
            const double fctr = f(ctr);
            if (fctr < vals[worst]) {
                pts[worst] = ctr;
                vals[worst] = fctr;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (vals[i] < vals[best]) best = i;
    return pts[best];
}

}  // namespace chipgate::detail

#endif
