#include "calgeo/field.hpp"
#include "calgeo/reduce.hpp"

#include <algorithm>
#include <cmath>

namespace calgeo {

void Density::recompute_total() {
    std::vector<double> terms(grid->nodes);
    for (std::size_t i = 0; i < grid->nodes; ++i)
        terms[i] = grid->weights[i] * ratio[i];
    total = pairwise_sum(terms);
}

double Density::min_ratio() const {
    return *std::min_element(ratio.begin(), ratio.end());
}

namespace {
template <typename F>
ScalarField zip(const ScalarField& a, const ScalarField& b, F f) {
    require_same_grid(a.grid, b.grid);
    ScalarField r(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) r.v[i] = f(a.v[i], b.v[i]);
    return r;
}
template <typename F>
SymTensorField zip(const SymTensorField& a, const SymTensorField& b, F f) {
    require_same_grid(a.grid, b.grid);
    SymTensorField r(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) r.v[i] = f(a.v[i], b.v[i]);
    return r;
}
} // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return zip(a, b, [](double x, double y) { return x + y; });
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return zip(a, b, [](double x, double y) { return x - y; });
}
ScalarField operator*(double c, const ScalarField& a) {
    ScalarField r = a;
    for (auto& x : r.v) x *= c;
    return r;
}
SymTensorField operator+(const SymTensorField& a, const SymTensorField& b) {
    return zip(a, b, [](double x, double y) { return x + y; });
}
SymTensorField operator-(const SymTensorField& a, const SymTensorField& b) {
    return zip(a, b, [](double x, double y) { return x - y; });
}
SymTensorField operator*(double c, const SymTensorField& a) {
    SymTensorField r = a;
    for (auto& x : r.v) x *= c;
    return r;
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_tensor(const SymTensorField& h) {
    double m = 0.0;
    for (double x : h.v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace calgeo
