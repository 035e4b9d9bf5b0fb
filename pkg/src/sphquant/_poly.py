import math


def real_cubic_roots(c3, c2, c1, c0, polish=True):
    """Real roots of ``c3 x^3 + c2 x^2 + c1 x + c0`` (Cardano / trigonometric).

    Each root gets one Newton step on the original polynomial when
    ``polish`` is set.
    """
    if c3 == 0:
        raise ValueError("leading coefficient must be non-zero")
    b, c, d = c2 / c3, c1 / c3, c0 / c3
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    shift = -b / 3.0
    if disc > 0:
        sq = math.sqrt(disc)
        roots = [math.copysign(abs(-q / 2 + sq) ** (1 / 3), -q / 2 + sq)
                 + math.copysign(abs(-q / 2 - sq) ** (1 / 3), -q / 2 - sq) + shift]
    elif p == 0:
        roots = [shift]
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]
    if polish:
        out = []
        for x in roots:
            f = ((c3 * x + c2) * x + c1) * x + c0
            df = (3 * c3 * x + 2 * c2) * x + c1
            if df != 0:
                x -= f / df
            out.append(x)
        roots = out
    return sorted(roots)
