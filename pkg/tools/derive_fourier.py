"""Generate ``src/spr/_fourier_coeffs.py``.

The lab-frame quadrupole field of the moving packet is Fourier transformed
over (x, t) symbolically.  Time is traded for the boosted longitudinal
coordinate ``u = gamma (z' - beta t)``, every monomial ``x^a u^n / R^nu`` is
mapped to ``(i d/dq_x)^a (i d/dkappa)^n J_nu`` where ``J_nu`` is the 2D
transform of ``R^-nu`` (a reverse Bessel polynomial times ``exp(-mu |y'|)``),
and the result is collected as a polynomial in ``(z', |y'|)``.

Run from the repository root::

    python tools/derive_fourier.py > src/spr/_fourier_coeffs.py
"""
import sympy as sp

MONOMIALS = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]

x, u, R = sp.symbols("x u R", real=True)
Y, mu, kap, b, g = sp.symbols("Y mu kappa beta gamma", positive=True)
qx, zp, s = sp.symbols("q_x z_p s", real=True)
_q = sp.symbols("q", positive=True)


def transform_2d(nu):
    """2D Fourier transform of (x^2 + u^2 + Y^2)^(-nu/2) at radial wavenumber _q."""
    n = (nu - 1) // 2
    k = n - 1
    theta = sum(
        sp.factorial(k + j) / (sp.factorial(k - j) * sp.factorial(j) * 2**j) * (_q * Y) ** (k - j)
        for j in range(k + 1)
    )
    return 2 * sp.pi * sp.exp(-_q * Y) * theta / (sp.factorial2(2 * n - 1) * Y ** (2 * n - 1))


def lab_quadrupole_field(q0, q2):
    y = s * Y
    t_z = (zp / g - u) / b
    S = R**2
    perp = sp.Rational(1, 4) * (
        3 * q0 / S * (1 - 5 * u**2 / S) + q2 * (3 * t_z**2 / S * (1 - 5 * u**2 / S) + 3 * u**2 / S - 1)
    )
    axial = sp.Rational(1, 4) * (
        3 * q0 / S * (3 - 5 * u**2 / S) + q2 * (3 * t_z**2 / S * (3 - 5 * u**2 / S) + 3 * u**2 / S - 1)
    )
    magnetic = -sp.Rational(3, 2) * g * b * q2 * t_z * u / R**5
    return (
        g * x / R**3 * perp + magnetic * x,
        g * y / R**3 * perp + magnetic * y,
        u / R**3 * axial,
    )


def fourier(expr):
    big = 20
    poly = sp.Poly(sp.expand(expr * R**big), x, u, R)
    total = 0
    for (a, n, r), c in poly.terms():
        d = transform_2d(big - r).subs(_q, sp.sqrt(qx**2 + kap**2))
        for _ in range(a):
            d = sp.I * sp.diff(d, qx)
        for _ in range(n):
            d = sp.I * sp.diff(d, kap)
        total += c * d
    total = total.subs(sp.sqrt(qx**2 + kap**2), mu)
    # dt = du / (gamma beta); the exp(i omega z'/beta - mu Y) factor is stripped
    total = sp.simplify(total * sp.exp(mu * Y) / (g * b))
    # mu^2 = q_x^2 + kappa^2 cancels the spurious 1/|y'| terms
    total = sp.expand(total).replace(
        lambda e: e.is_Pow and e.base == qx and e.exp >= 2,
        lambda e: qx ** (e.exp % 2) * (mu**2 - kap**2) ** (e.exp // 2),
    )
    total = sp.expand(total)
    return sp.Poly(total, zp, Y)


def main():
    printer = sp.printing.pycode
    out = [
        '"""Fourier coefficients of the lab-frame quadrupole field.',
        "",
        "Generated by tools/derive_fourier.py; do not edit by hand.",
        "",
        "Each function returns ``[monomial][component]`` nested lists for the",
        "monomials z'^a |y'|^b, (a, b) in MONOMIALS, with the common factor",
        "exp(i omega z'/beta - mu |y'|) removed.  ``s`` is sgn(y').",
        '"""',
        "from numpy import pi",
        "",
        f"MONOMIALS = {MONOMIALS!r}",
        "",
    ]
    for label, law in (("q0", (1, 0)), ("q2", (0, 1))):
        comps = [fourier(e) for e in lab_quadrupole_field(*law)]
        for comp in comps:
            for (a, bb), _ in comp.terms():
                assert (a, bb) in MONOMIALS, (a, bb)
        rows = []
        for mono in MONOMIALS:
            rows.append([sp.factor(comp.coeff_monomial(zp ** mono[0] * Y ** mono[1])) for comp in comps])
        flat = [e for row in rows for e in row]
        repl, reduced = sp.cse(flat, symbols=sp.numbered_symbols("c"))
        out.append(f"def {label}_coefficients(q_x, kappa, mu, beta, gamma, s):")
        for sym, val in repl:
            out.append(f"    {sym} = {printer(val).replace('math.pi', 'pi')}")
        out.append("    return [")
        for i in range(len(MONOMIALS)):
            items = ", ".join(printer(e).replace("math.pi", "pi") for e in reduced[3 * i : 3 * i + 3])
            out.append(f"        [{items}],")
        out.append("    ]")
        out.append("")
        out.append("")
    print("\n".join(out).rstrip() + "\n")


if __name__ == "__main__":
    main()
