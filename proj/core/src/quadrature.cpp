#include "riskshare/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <vector>

namespace riskshare {

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (QUADPACK qk15 constants).
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Cell {
    double a, b, value, error;
};

Cell evaluate_cell(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b);
    double h = 0.5 * (b - a);
    double fc = f(c);
    double kronrod = wgk[7] * fc;
    double gauss = wg[3] * fc;
    for (int k = 0; k < 7; ++k) {
        double lo = f(c - h * xgk[k]);
        double hi = f(c + h * xgk[k]);
        kronrod += wgk[k] * (lo + hi);
        if (k % 2 == 1) gauss += wg[k / 2] * (lo + hi);
    }
    kronrod *= h;
    gauss *= h;
    return Cell{a, b, kronrod, std::abs(kronrod - gauss)};
}

struct WorstFirst {
    bool operator()(const Cell& lhs, const Cell& rhs) const {
        if (lhs.error != rhs.error) return lhs.error < rhs.error;
        return lhs.a > rhs.a; // position tie-break keeps splitting deterministic
    }
};

// Fixed left-to-right summation so results do not depend on heap layout.
double drain_sorted_sum(std::priority_queue<Cell, std::vector<Cell>, WorstFirst> heap) {
    std::vector<Cell> cells;
    while (!heap.empty()) {
        cells.push_back(heap.top());
        heap.pop();
    }
    std::sort(cells.begin(), cells.end(),
              [](const Cell& x, const Cell& y) { return x.a < y.a; });
    double value = 0.0;
    for (const Cell& c : cells) value += c.value;
    return value;
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, const QuadratureConfig& cfg) {
    if (cfg.max_subdivisions < 8)
        throw std::invalid_argument("integrate: max_subdivisions must be at least 8");
    if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");
    if (!(b > a)) return 0.0;

    std::vector<double> edges;
    edges.push_back(a);
    for (double bp : breakpoints)
        if (bp > a && bp < b) edges.push_back(bp);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [&](double x, double y) { return y - x < 1e-14 * (b - a); }),
                edges.end());
    if (edges.back() != b) edges.back() = b;

    std::priority_queue<Cell, std::vector<Cell>, WorstFirst> heap;
    double value_sum = 0.0, error_sum = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Cell cell = evaluate_cell(f, edges[i], edges[i + 1]);
        value_sum += cell.value;
        error_sum += cell.error;
        heap.push(cell);
    }

    double abs_target = cfg.abs_tol * std::max(1.0, b - a);
    int splits = 0;
    while (true) {
        double target = std::max(abs_target, cfg.rel_tol * std::abs(value_sum));
        if (error_sum <= target) return drain_sorted_sum(std::move(heap));
        if (splits >= cfg.max_subdivisions) {
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "integrate: tolerance not reached after %d subdivisions "
                          "(achieved error %.3e, target %.3e)",
                          splits, error_sum, target);
            throw QuadratureError(msg, drain_sorted_sum(std::move(heap)), error_sum);
        }
        Cell worst = heap.top();
        double mid = 0.5 * (worst.a + worst.b);
        if (worst.error == 0.0 || mid <= worst.a || mid >= worst.b) {
            // Best remaining cell is at floating-point resolution; no further
            // refinement can help.
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "integrate: cells exhausted at floating-point resolution "
                          "(achieved error %.3e, target %.3e)",
                          error_sum, target);
            throw QuadratureError(msg, drain_sorted_sum(std::move(heap)), error_sum);
        }
        heap.pop();
        value_sum -= worst.value;
        error_sum -= worst.error;
        Cell left = evaluate_cell(f, worst.a, mid);
        Cell right = evaluate_cell(f, mid, worst.b);
        value_sum += left.value + right.value;
        error_sum += left.error + right.error;
        heap.push(left);
        heap.push(right);
        ++splits;
    }
}

} // namespace riskshare
