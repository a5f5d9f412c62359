#pragma once
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace congestion {

// Per-resource latency f_e. Nonnegative and non-decreasing in the load,
// checked at construction. Table kind is defined on loads 1..n_max and is
// extended constantly beyond n_max (callers that must not rely on the
// extension check n_max themselves). Polynomial kinds evaluate anywhere.
struct CostFunction {
    enum class Kind { Table, Monomial, Polynomial };

    Kind kind = Kind::Monomial;
    std::vector<double> values;  // table: values[i-1] = f(i)
    int degree = 0;              // monomial: f(x) = x^degree
    std::vector<double> coeffs;  // polynomial: f(x) = sum coeffs[i] * x^i
    int n_max = std::numeric_limits<int>::max();

    static CostFunction table(std::vector<double> v);
    static CostFunction monomial(int d);
    static CostFunction polynomial(std::vector<double> a);
    static CostFunction constant(double v);

    double operator()(int load) const { return eval(load); }
    double eval(int load) const;

    bool is_polynomial_kind() const { return kind != Kind::Table; }
    // Highest exponent with a nonzero coefficient (0 for tables).
    int max_degree() const;
};

}  // namespace congestion
