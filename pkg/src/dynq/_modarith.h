/* Row operations over Z_p for several primes at once (one lane per prime).
 *
 * Entries are integers in [0, p) stored as doubles with p < 2**21, so every
 * product is exact; adding and subtracting 1.5 * 2**52 rounds the quotient
 * to an integer, and one conditional add or subtract restores [0, p).
 */
#ifndef DYNQ_MODARITH_H
#define DYNQ_MODARITH_H

static inline void dynq_axpy_mod(double *restrict dst, const double *restrict src,
                                 const double *restrict f, const double *restrict pd,
                                 const double *restrict invp, long P)
{
    const double rnd = 6755399441055744.0;
    for (long b = 0; b < P; b++) {
        double x = f[b] * src[b];
        double q = (x * invp[b] + rnd) - rnd;
        double t = dst[b] - (x - q * pd[b]);
        t = t + pd[b] * (t < 0.0);
        dst[b] = t - pd[b] * (t >= pd[b]);
    }
}

static inline void dynq_scale_mod(double *restrict row, const double *restrict f,
                                  const double *restrict pd, const double *restrict invp, long P)
{
    const double rnd = 6755399441055744.0;
    for (long b = 0; b < P; b++) {
        double x = f[b] * row[b];
        double q = (x * invp[b] + rnd) - rnd;
        double t = x - q * pd[b];
        t = t + pd[b] * (t < 0.0);
        row[b] = t - pd[b] * (t >= pd[b]);
    }
}

/* x[i] mod p for integers |x[i]| < 2**52 stored as doubles. */
static inline void dynq_reduce_mod(double *restrict x, double p, double invp, long m)
{
    const double rnd = 6755399441055744.0;
    for (long i = 0; i < m; i++) {
        double q = (x[i] * invp + rnd) - rnd;
        double t = x[i] - q * p;
        t = t + p * (t < 0.0);
        x[i] = t - p * (t >= p);
    }
}

#endif
