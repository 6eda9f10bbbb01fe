#include "torus_atlas/quadrature.hpp"

#include "torus_atlas/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace torus_atlas {

namespace {

constexpr double xk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr double wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
// Gauss weights for xk[1], xk[3], xk[5], xk[7].
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece rule(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double k = wk[7] * fc, g = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double s = f(c - h * xk[i]) + f(c + h * xk[i]);
        k += wk[i] * s;
        if (i % 2 == 1) g += wg[i / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

QuadratureResult integrate_gk(const std::function<double(double)>& f, double a, double b, double abs_tol,
                              double rel_tol, int max_intervals) {
    std::priority_queue<Piece> heap;
    Piece first = rule(f, a, b);
    heap.push(first);
    double total = first.value, err = first.error;
    int n = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (!std::isfinite(total) || !std::isfinite(err))
            throw QuadratureError("integrand produced a non-finite value");
        if (n >= max_intervals)
            throw QuadratureError(fmt::format("no convergence after {} subintervals (error {:.3e})", n, err));
        Piece worst = heap.top();
        heap.pop();
        double m = 0.5 * (worst.a + worst.b);
        Piece l = rule(f, worst.a, m), r = rule(f, m, worst.b);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++n;
        // the running error sum drifts by cancellation, so refresh it now and then
        if (n % 64 == 0) {
            std::vector<Piece> all;
            double t = 0.0, e = 0.0;
            while (!heap.empty()) {
                all.push_back(heap.top());
                heap.pop();
            }
            std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
            for (const Piece& p : all) {
                t += p.value;
                e += p.error;
                heap.push(p);
            }
            total = t;
            err = e;
        }
    }
    // sum in interval order so results do not depend on heap internals
    std::vector<Piece> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    QuadratureResult out;
    for (const Piece& p : all) {
        out.value += p.value;
        out.error += p.error;
    }
    out.intervals = n;
    return out;
}

}  // namespace torus_atlas
