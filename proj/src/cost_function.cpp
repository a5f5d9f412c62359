#include "congestion/cost_function.hpp"

#include <cmath>

namespace congestion {

static void check_nondecreasing(const std::vector<double>& v) {
    for (double x : v)
        if (!(x >= 0.0))
            throw std::invalid_argument("cost function must be nonnegative");
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] + 1e-12 < v[i - 1])
            throw std::invalid_argument("cost function must be non-decreasing");
}

CostFunction CostFunction::table(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("empty cost table");
    check_nondecreasing(v);
    CostFunction f;
    f.kind = Kind::Table;
    f.values = std::move(v);
    f.n_max = static_cast<int>(f.values.size());
    return f;
}

CostFunction CostFunction::monomial(int d) {
    if (d < 0) throw std::invalid_argument("negative degree");
    CostFunction f;
    f.kind = Kind::Monomial;
    f.degree = d;
    return f;
}

CostFunction CostFunction::polynomial(std::vector<double> a) {
    if (a.empty()) throw std::invalid_argument("empty coefficient list");
    for (double c : a)
        if (!(c >= 0.0))
            throw std::invalid_argument("polynomial coefficients must be nonnegative");
    CostFunction f;
    f.kind = Kind::Polynomial;
    f.coeffs = std::move(a);
    f.degree = static_cast<int>(f.coeffs.size()) - 1;
    return f;
}

CostFunction CostFunction::constant(double v) {
    return polynomial({v});
}

double CostFunction::eval(int load) const {
    if (load <= 0) return 0.0;
    switch (kind) {
        case Kind::Table: {
            int i = load <= n_max ? load : n_max;
            return values[static_cast<size_t>(i) - 1];
        }
        case Kind::Monomial:
            return std::pow(static_cast<double>(load), degree);
        case Kind::Polynomial: {
            double x = static_cast<double>(load), acc = 0.0;
            for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
            return acc;
        }
    }
    return 0.0;
}

int CostFunction::max_degree() const {
    if (kind == Kind::Table) return 0;
    if (kind == Kind::Monomial) return degree;
    int d = 0;
    for (size_t i = 0; i < coeffs.size(); ++i)
        if (coeffs[i] != 0.0) d = static_cast<int>(i);
    return d;
}

}  // namespace congestion
