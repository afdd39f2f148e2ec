"""Minimal double-double arithmetic (error-free transformations).

Used only to re-sum a hypergeometric Taylor series whose double-
precision evaluation loses digits to cancellation (oscillatory argument
of magnitude ~20-45).  A real dd number is a pair (hi, lo) of floats
with value hi + lo and |lo| <= ulp(hi)/2; a complex dd number is a pair
of real dd numbers.  Only the operations the series recurrence needs
are provided.
"""

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a: float, b: float):
    s = a + b
    return s, b - (s - a)


def split(a: float):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a: float, b: float):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dd_add(x, y):
    s, e = two_sum(x[0], y[0])
    e += x[1] + y[1]
    return quick_two_sum(s, e)


def dd_mul(x, y):
    p, e = two_prod(x[0], y[0])
    e += x[0] * y[1] + x[1] * y[0]
    return quick_two_sum(p, e)


def dd_div(x, y):
    q1 = x[0] / y[0]
    r = dd_add(x, dd_mul(y, (-q1, 0.0)))
    q2 = r[0] / y[0]
    r = dd_add(r, dd_mul(y, (-q2, 0.0)))
    q3 = r[0] / y[0]
    s, e = quick_two_sum(q1, q2)
    return quick_two_sum(s, e + q3)


def dd_from(a: float):
    return (float(a), 0.0)


# complex dd: ((re_hi, re_lo), (im_hi, im_lo))

def cdd_from(z: complex):
    return (dd_from(z.real), dd_from(z.imag))


def cdd_add(x, y):
    return (dd_add(x[0], y[0]), dd_add(x[1], y[1]))


def cdd_mul(x, y):
    re = dd_add(dd_mul(x[0], y[0]), dd_mul((-x[1][0], -x[1][1]), y[1]))
    im = dd_add(dd_mul(x[0], y[1]), dd_mul(x[1], y[0]))
    return (re, im)


def cdd_div(x, y):
    den = dd_add(dd_mul(y[0], y[0]), dd_mul(y[1], y[1]))
    conj = (y[0], (-y[1][0], -y[1][1]))
    num = cdd_mul(x, conj)
    return (dd_div(num[0], den), dd_div(num[1], den))


def cdd_to_complex(x) -> complex:
    return complex(x[0][0] + x[0][1], x[1][0] + x[1][1])


def cdd_abs2_hi(x) -> float:
    return x[0][0] * x[0][0] + x[1][0] * x[1][0]
