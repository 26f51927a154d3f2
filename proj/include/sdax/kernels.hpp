#pragma once
// Inner-loop arithmetic kernels. Scalar reference implementations live in
// kern::ref; the top-level entry points dispatch to the best ISA variant
// available on the running CPU (AVX2+FMA on x86-64, scalar otherwise).
// Dispatch is resolved once and stays fixed for the process lifetime, so
// results are deterministic on a given machine.

#include <cstddef>

namespace sdax::kern {

enum class Isa { scalar, avx2 };

// Variant currently selected by the dispatcher.
Isa active_isa();

// Override dispatch (tests use this to compare variants). Passing an ISA
// the CPU does not support falls back to scalar.
void force_isa(Isa isa);

bool cpu_has_avx2();

// y = W x + b.  W is row-major, rows x cols.  b may be null (treated as 0).
void matvec(const double* w, const double* x, const double* b, double* y,
            int rows, int cols);

// xg += W^T c.  Backward data pass of matvec.
void matvec_t_acc(const double* w, const double* c, double* xg, int rows,
                  int cols);

// G += c x^T (rank-1 accumulate into a row-major rows x cols matrix).
void ger_acc(double* g, const double* c, const double* x, int rows, int cols);

double dot(const double* a, const double* b, int n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, int n);

namespace ref {
void matvec(const double* w, const double* x, const double* b, double* y,
            int rows, int cols);
void matvec_t_acc(const double* w, const double* c, double* xg, int rows,
                  int cols);
void ger_acc(double* g, const double* c, const double* x, int rows, int cols);
double dot(const double* a, const double* b, int n);
void axpy(double alpha, const double* x, double* y, int n);
}  // namespace ref

#ifdef SDAX_BUILD_AVX2
namespace avx2 {
void matvec(const double* w, const double* x, const double* b, double* y,
            int rows, int cols);
void matvec_t_acc(const double* w, const double* c, double* xg, int rows,
                  int cols);
void ger_acc(double* g, const double* c, const double* x, int rows, int cols);
double dot(const double* a, const double* b, int n);
void axpy(double alpha, const double* x, double* y, int n);
}  // namespace avx2
#endif

}  // namespace sdax::kern
