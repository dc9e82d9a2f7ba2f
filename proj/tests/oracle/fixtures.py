"""Independent high-precision oracle for the frozen test fixtures.

Dense scan of the objective followed by golden-section refinement in
mpmath (50 digits). Run: python3 tests/oracle/fixtures.py
"""
import mpmath as mp

mp.mp.dps = 50


def objective(a, b, c, x, y, t, s):
    return (-x + b * s + c * t) ** 2 / (4 * (t + a * s)) + (y + s) ** 2 / (4 * t)


def argmin(a, b, c, x, y, t, s_hi=64, step=mp.mpf("1e-4")):
    a, b, c, x, y, t = map(mp.mpf, (a, b, c, x, y, t))
    best_s, best_f = mp.mpf(0), objective(a, b, c, x, y, t, 0)
    n = int(s_hi / step)
    for i in range(1, n + 1):
        s = i * step
        f = objective(a, b, c, x, y, t, s)
        if f < best_f:
            best_s, best_f = s, f
        elif s > best_s + 10 * step:
            break
    lo, hi = max(mp.mpf(0), best_s - step), best_s + step
    g = (mp.sqrt(5) - 1) / 2
    for _ in range(400):
        m1 = hi - g * (hi - lo)
        m2 = lo + g * (hi - lo)
        if objective(a, b, c, x, y, t, m1) < objective(a, b, c, x, y, t, m2):
            hi = m2
        else:
            lo = m1
    s = (lo + hi) / 2
    return s, objective(a, b, c, x, y, t, s)


def report(name, *args):
    s, f = argmin(*args)
    print(f"{name}: s* = {mp.nstr(s, 20)}  phi* = {mp.nstr(f, 20)}")
    return s, f


if __name__ == "__main__":
    report("core a=b=c=2 (4,0,1)", 2, 2, 2, 4, 0, 1)
    s, f = report("paths a=b=c=2 (6,0.5,1)", 2, 2, 2, 6, mp.mpf("0.5"), 1)
    a = b = c = mp.mpf(2); x, y, t = mp.mpf(6), mp.mpf("0.5"), mp.mpf(1)
    t0 = y * t / (y + s)
    x0 = x - y * t * (x + (a * c - b) * s) / ((y + s) * (t + a * s))
    print(f"  t0 = {mp.nstr(t0, 20)}  x0 = {mp.nstr(x0, 20)}")
    report("cone c=0 a_r=b_r=2 (4,0,1)", 2, 2, 0, 4, 0, 1)
    report("core a=b=c=2 scaled x10 (40,0,10)", 2, 2, 2, 40, 0, 10)
