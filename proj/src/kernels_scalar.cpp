#include "sdax/kernels.hpp"

namespace sdax::kern::ref {

void matvec(const double* w, const double* x, const double* b, double* y,
            int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const double* wr = w + static_cast<std::size_t>(r) * cols;
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = b ? acc + b[r] : acc;
  }
}

void matvec_t_acc(const double* w, const double* c, double* xg, int rows,
                  int cols) {
  for (int r = 0; r < rows; ++r) {
    const double* wr = w + static_cast<std::size_t>(r) * cols;
    const double cr = c[r];
    for (int k = 0; k < cols; ++k) xg[k] += wr[k] * cr;
  }
}

void ger_acc(double* g, const double* c, const double* x, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    double* gr = g + static_cast<std::size_t>(r) * cols;
    const double cr = c[r];
    for (int k = 0; k < cols; ++k) gr[k] += cr * x[k];
  }
}

double dot(const double* a, const double* b, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace sdax::kern::ref
