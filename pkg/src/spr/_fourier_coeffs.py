"""Fourier coefficients of the lab-frame quadrupole field.

Generated by tools/derive_fourier.py; do not edit by hand.

Each function returns ``[monomial][component]`` nested lists for the
monomials z'^a |y'|^b, (a, b) in MONOMIALS, with the common factor
exp(i omega z'/beta - mu |y'|) removed.  ``s`` is sgn(y').
"""
from numpy import pi

MONOMIALS = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]

def q0_coefficients(q_x, kappa, mu, beta, gamma, s):
    c0 = (1/2)*pi/beta
    c1 = c0*kappa**2
    c2 = 1j/mu
    return [
        [-c1*c2*q_x, c1*s, -c0*c2*kappa**3/gamma],
        [0, 0, 0],
        [0, 0, 0],
        [0, 0, 0],
        [0, 0, 0],
        [0, 0, 0],
    ]


def q2_coefficients(q_x, kappa, mu, beta, gamma, s):
    c0 = kappa**2
    c1 = 3*c0
    c2 = mu**2
    c3 = -2*c2
    c4 = beta**2
    c5 = c2*c4
    c6 = c0 + c5
    c7 = (1/2)*1j
    c8 = c7*q_x
    c9 = pi/beta**3
    c10 = c9/mu**5
    c11 = c9*s
    c12 = kappa**4
    c13 = mu**4
    c14 = 7*c2
    c15 = 1/gamma
    c16 = 1j*c15
    c17 = (1/2)*c16
    c18 = c15*q_x
    c19 = mu**(-3)
    c20 = c19*c9
    c21 = c11*c16
    c22 = gamma**(-2)
    c23 = c22*c9
    c24 = c0*c19
    c25 = 1/c13
    c26 = -5*c2 + 3*c5
    c27 = (1/2)*c11
    c28 = kappa**3
    c29 = c28*c9
    c30 = 1/mu
    c31 = c30*c7
    c32 = 1/c2
    c33 = c12*c32
    return [
        [c10*c8*(c1 + c3)*(-c2 + c6), c11*(beta - 1)*(beta + 1), c10*c17*kappa*(-c0*c14 + c0*c5 + 3*c12 - 2*c13*c4 + 6*c13)],
        [c18*c20*kappa*(c3 + c6), c21*kappa*(c4 - 2), c23*c24*(c0 - 3*c2)],
        [c0*c25*c8*c9*(c1 + c26), -c24*c27*(c0 + c26), c17*c25*c29*(c1 - c14 + c5)],
        [-c0*c23*c31*q_x, c0*c22*c27, -c29*c31/gamma**3],
        [c18*c29*c32, c21*c28*c30, c23*c33],
        [c12*c20*c8, -c27*c33, c17*c20*kappa**5],
    ]

