#!/usr/bin/env python3
"""Generate the Chebyshev coefficient tables used by src/specfun.cpp.

Small arguments (0 < x <= 2) use t = x^2/2 - 1:
    I0(x)            = sum a_k T_k(t)
    I1(x) / x        = sum b_k T_k(t)
    K0 + ln(x/2) I0  = sum c_k T_k(t)
    x (K1 - ln(x/2) I1) = sum d_k T_k(t)
Large arguments use u = 2/x on (2, 8] and (8, inf):
    sqrt(x) e^x K0(x), sqrt(x) e^x K1(x)

Run: python3 tools/gen_bessel_tables.py > /tmp/tables.txt
"""
import mpmath as mp

mp.mp.dps = 50


def cheb_coeffs(f, n):
    nodes = [mp.cos(mp.pi * (j + mp.mpf(1) / 2) / n) for j in range(n)]
    vals = [f(t) for t in nodes]
    out = []
    for k in range(n):
        s = mp.fsum(vals[j] * mp.cos(mp.pi * k * (j + mp.mpf(1) / 2) / n) for j in range(n))
        out.append(2 * s / n)
    out[0] /= 2
    return out


def trim(c, tol=mp.mpf("1e-19")):
    scale = max(abs(x) for x in c)
    while len(c) > 1 and abs(c[-1]) < tol * scale:
        c = c[:-1]
    return c


def x_small(t):
    return mp.sqrt(2 * (t + 1))


def small_tables():
    f_i0 = lambda t: mp.besseli(0, x_small(t))
    f_i1 = lambda t: mp.besseli(1, x_small(t)) / x_small(t) if t > -1 else mp.mpf(1) / 2

    def f_k0(t):
        x = x_small(t)
        return mp.besselk(0, x) + mp.log(x / 2) * mp.besseli(0, x)

    def f_k1(t):
        x = x_small(t)
        return x * (mp.besselk(1, x) - mp.log(x / 2) * mp.besseli(1, x))

    return {
        "kI0Small": f_i0,
        "kI1Small": f_i1,
        "kK0Small": f_k0,
        "kK1Small": f_k1,
    }


def large_tables(lo, hi, suffix):
    # u in (2/hi, 2/lo) mapped to t in [-1, 1]
    ulo = mp.mpf(2) / hi if hi != mp.inf else mp.mpf(0)
    uhi = mp.mpf(2) / lo

    def xu(t):
        u = ulo + (uhi - ulo) * (t + 1) / 2
        return 2 / u

    def f0(t):
        x = xu(t)
        return mp.sqrt(x) * mp.exp(x) * mp.besselk(0, x)

    def f1(t):
        x = xu(t)
        return mp.sqrt(x) * mp.exp(x) * mp.besselk(1, x)

    return {"kK0" + suffix: f0, "kK1" + suffix: f1}


def emit(name, coeffs):
    print(f"constexpr std::array<double, {len(coeffs)}> {name} = {{")
    for c in coeffs:
        print(f"    {mp.nstr(c, 20, min_fixed=1, max_fixed=0)},")
    print("};")


def main():
    tables = {}
    tables.update(small_tables())
    tables.update(large_tables(mp.mpf(2), mp.mpf(8), "Mid"))
    tables.update(large_tables(mp.mpf(8), mp.inf, "Far"))
    for name, f in tables.items():
        emit(name, trim(cheb_coeffs(f, 60)))


if __name__ == "__main__":
    main()
