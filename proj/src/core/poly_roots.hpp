#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nfloc {

// Coefficients in ascending order: c[0] + c[1] x + ... + c[n] x^n.
using Polynomial = std::vector<double>;

Polynomial poly_multiply(std::span<const double> a, std::span<const double> b);
Polynomial poly_add(std::span<const double> a, std::span<const double> b);
Polynomial poly_scale(std::span<const double> a, double s);
double poly_eval(std::span<const double> c, double x);

// All complex roots via eigenvalues of the companion matrix. Leading zero
// coefficients are dropped; a constant polynomial has no roots.
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

// Roots whose imaginary part is below imag_tolerance * max(1, |root|),
// sorted descending.
std::vector<double> real_roots(std::span<const double> coeffs, double imag_tolerance = 1e-8);

}  // namespace nfloc
