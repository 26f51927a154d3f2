#include "sdax/kernels.hpp"

namespace sdax::kern {

namespace {

struct Vtable {
  void (*matvec)(const double*, const double*, const double*, double*, int, int);
  void (*matvec_t_acc)(const double*, const double*, double*, int, int);
  void (*ger_acc)(double*, const double*, const double*, int, int);
  double (*dot)(const double*, const double*, int);
  void (*axpy)(double, const double*, double*, int);
};

constexpr Vtable kScalar{ref::matvec, ref::matvec_t_acc, ref::ger_acc, ref::dot,
                         ref::axpy};
#ifdef SDAX_BUILD_AVX2
constexpr Vtable kAvx2{avx2::matvec, avx2::matvec_t_acc, avx2::ger_acc,
                       avx2::dot, avx2::axpy};
#endif

Isa g_isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;

const Vtable& table() {
#ifdef SDAX_BUILD_AVX2
  if (g_isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

}  // namespace

bool cpu_has_avx2() {
#ifdef SDAX_BUILD_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return g_isa; }

void force_isa(Isa isa) {
  g_isa = (isa == Isa::avx2 && cpu_has_avx2()) ? Isa::avx2 : Isa::scalar;
}

void matvec(const double* w, const double* x, const double* b, double* y,
            int rows, int cols) {
  table().matvec(w, x, b, y, rows, cols);
}
void matvec_t_acc(const double* w, const double* c, double* xg, int rows,
                  int cols) {
  table().matvec_t_acc(w, c, xg, rows, cols);
}
void ger_acc(double* g, const double* c, const double* x, int rows, int cols) {
  table().ger_acc(g, c, x, rows, cols);
}
double dot(const double* a, const double* b, int n) {
  return table().dot(a, b, n);
}
void axpy(double alpha, const double* x, double* y, int n) {
  table().axpy(alpha, x, y, n);
}

}  // namespace sdax::kern
