"""Adaptive Simpson quadrature used to cross-check the closed-form integrals."""


def adaptive_simpson(f, a, b, rtol=1e-10, max_depth=60):
    """Integrate ``f`` over ``[a, b]`` with recursive Simpson refinement.

    The tolerance is applied relative to the magnitude of the whole-interval
    estimate, with Richardson correction on accepted panels.
    """
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    # absolute target fixed up front so tiny sub-panels are not over-refined
    tol = max(rtol * abs(whole), 1e-300)
    return _refine(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _refine(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
    right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (_refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))
