"""Expanded polynomial coefficients for the essential-matrix constraints.

For a candidate ``e = b*m1 + g*m2 + m3`` placed into the yaw-only pattern
``E = [[e1, e2, e3], [e4, 0, e5], [-e3, e6, e1]]``, the determinant and the
six independent components of ``2 E E^T E - trace(E E^T) E`` are cubic
polynomials in (b, g).  ``constraint_rows`` returns their coefficients
over the monomial basis

    [b^3, b^2 g, b^2, b g^2, b g, b, g^3, g^2, g, 1]

as a 7x10 matrix.  The expansion is machine-generated from the symbolic
product (common subexpressions factored out); edit the symbolic source,
not this file.
"""

import numpy as np


def constraint_rows(m1, m2, m3):
    """Coefficients of the determinant and six trace-constraint cubics.

    Rows are expanded over the monomials
    [b^3, b^2 g, b^2, b g^2, b g, b, g^3, g^2, g, 1] for the essential-matrix
    candidate e = b*m1 + g*m2 + m3 placed in the yaw-only pattern.
    """
    m1_0 = m1[0]; m2_0 = m2[0]; m3_0 = m3[0]
    m1_1 = m1[1]; m2_1 = m2[1]; m3_1 = m3[1]
    m1_2 = m1[2]; m2_2 = m2[2]; m3_2 = m3[2]
    m1_3 = m1[3]; m2_3 = m2[3]; m3_3 = m3[3]
    m1_4 = m1[4]; m2_4 = m2[4]; m3_4 = m3[4]
    m1_5 = m1[5]; m2_5 = m2[5]; m3_5 = m3[5]
    x0 = m1_0*m1_1
    x1 = m1_0*m1_4
    x2 = m1_1*m1_2
    x3 = m1_0*m1_3
    x4 = m1_0*m1_5
    x5 = m1_1*m1_3
    x6 = m1_1*m1_4
    x7 = m1_2*m1_4
    x8 = m1_4*m1_5
    x9 = m1_0*m2_1
    x10 = m1_0*m2_4
    x11 = m1_1*m2_0
    x12 = m1_1*m2_2
    x13 = m1_2*m2_1
    x14 = m1_3*m2_0
    x15 = m1_4*m2_0
    x16 = m1_4*m2_1
    x17 = m1_5*m2_0
    x18 = m1_0*m3_1
    x19 = m1_0*m3_4
    x20 = m1_1*m3_0
    x21 = m1_1*m3_2
    x22 = m1_2*m3_1
    x23 = m1_3*m3_0
    x24 = m1_4*m3_1
    x25 = m1_4*m3_0
    x26 = m1_5*m3_0
    x27 = m2_0*m2_1
    x28 = m2_0*m2_4
    x29 = m2_1*m2_2
    x30 = m2_0*m3_1
    x31 = m2_0*m3_4
    x32 = m2_1*m3_0
    x33 = m2_1*m3_2
    x34 = m2_2*m3_1
    x35 = m2_4*m3_0
    x36 = m3_0*m3_1
    x37 = m3_1*m3_2
    x38 = m3_0*m3_4
    x39 = m1_1**2
    x40 = m1_3**2
    x41 = 2*x2
    x42 = 2*m1_2*m1_3
    x43 = m1_4**2
    x44 = m1_5**2
    x45 = 2*m2_1
    x46 = 2*m2_3
    x47 = 2*x1
    x48 = 2*x4
    x49 = m1_5*m2_2
    x50 = 2*m1_1
    x51 = m1_2*m1_5
    x52 = m1_3*m2_2
    x53 = 2*m1_4
    x54 = 2*m3_1
    x55 = 2*m3_3
    x56 = m1_5*m3_2
    x57 = m1_3*m3_2
    x58 = m2_1**2
    x59 = m2_3**2
    x60 = 2*m2_5
    x61 = m1_2*m2_3
    x62 = 2*m2_4
    x63 = m2_2*m2_3
    x64 = m2_4**2
    x65 = m2_5**2
    x66 = m2_3*m3_3
    x67 = m1_2*m3_3
    x68 = m2_2*m3_3
    x69 = m2_3*m3_2
    x70 = m2_5*m3_5
    x71 = m3_1**2
    x72 = m3_3**2
    x73 = 2*m3_5
    x74 = 2*m3_4
    x75 = m3_2*m3_3
    x76 = m3_4**2
    x77 = m3_5**2
    x78 = 2*m2_0
    x79 = 2*m3_0
    x80 = x39 - x40 - x43 + x44
    x81 = m1_3*m2_3
    x82 = m2_4*m3_4
    x83 = m2_1*m3_3
    x84 = m2_3*m3_1
    x85 = m1_3*m3_3
    x86 = x58 - x59 - x64 + x65
    x87 = x71 - x72 - x76 + x77
    x88 = 2*m1_5
    x89 = m1_4*m2_4
    x90 = 2*m2_2
    x91 = m1_4*m3_4
    x92 = 2*m3_2
    x93 = -x80
    x94 = m1_3*m1_5
    x95 = m1_1*m2_1
    x96 = m1_5*m2_5
    x97 = m2_1*m3_1
    x98 = m1_5*m3_5
    x99 = m1_1*m3_1
    x100 = -x86
    x101 = -x87
    return np.array([
        [m1_2*m1_3*m1_5 - m1_3*x0 - m1_4*x2 - m1_5*x1, m1_2*m1_3*m2_5 + m1_2*m1_5*m2_3 + m1_3*m1_5*m2_2 - m2_0*x5 - m2_0*x8 - m2_1*x3 - m2_1*x7 - m2_2*x6 - m2_3*x0 - m2_4*x2 - m2_4*x4 - m2_5*x1, m1_2*m1_3*m3_5 + m1_2*m1_5*m3_3 + m1_3*m1_5*m3_2 - m3_0*x5 - m3_0*x8 - m3_1*x3 - m3_1*x7 - m3_2*x6 - m3_3*x0 - m3_4*x2 - m3_4*x4 - m3_5*x1, m1_2*m2_3*m2_5 + m1_3*m2_2*m2_5 + m1_5*m2_2*m2_3 - m2_1*x14 - m2_2*x16 - m2_3*x11 - m2_3*x9 - m2_4*x12 - m2_4*x13 - m2_4*x17 - m2_5*x10 - m2_5*x15, m1_2*m2_3*m3_5 + m1_2*m2_5*m3_3 + m1_3*m2_2*m3_5 + m1_3*m2_5*m3_2 + m1_5*m2_2*m3_3 + m1_5*m2_3*m3_2 - m2_1*x23 - m2_2*x24 - m2_3*x18 - m2_3*x20 - m2_4*x21 - m2_4*x22 - m2_4*x26 - m2_5*x19 - m2_5*x25 - m3_1*x14 - m3_2*x16 - m3_3*x11 - m3_3*x9 - m3_4*x12 - m3_4*x13 - m3_4*x17 - m3_5*x10 - m3_5*x15, m1_2*m3_3*m3_5 + m1_3*m3_2*m3_5 + m1_5*m3_2*m3_3 - m3_1*x23 - m3_2*x24 - m3_3*x18 - m3_3*x20 - m3_4*x21 - m3_4*x22 - m3_4*x26 - m3_5*x19 - m3_5*x25, m2_2*m2_3*m2_5 - m2_3*x27 - m2_4*x29 - m2_5*x28, m2_2*m2_3*m3_5 + m2_2*m2_5*m3_3 + m2_3*m2_5*m3_2 - m2_3*x30 - m2_3*x32 - m2_4*x33 - m2_4*x34 - m2_5*x31 - m2_5*x35 - m3_3*x27 - m3_4*x29 - m3_5*x28, m2_2*m3_3*m3_5 + m2_3*m3_2*m3_5 - m2_3*x36 - m2_4*x37 + m2_5*m3_2*m3_3 - m2_5*x38 - m3_3*x30 - m3_3*x32 - m3_4*x33 - m3_4*x34 - m3_5*x31 - m3_5*x35, m3_2*m3_3*m3_5 - m3_3*x36 - m3_4*x37 - m3_5*x38],
        [m1_0*x39 + m1_0*x40 - m1_0*x43 - m1_0*x44 + m1_4*x42 - m1_5*x41, m2_0*x39 + m2_0*x40 - m2_0*x43 - m2_0*x44 + m2_4*x42 - m2_4*x47 - m2_5*x41 - m2_5*x48 + x0*x45 + x3*x46 - x45*x51 + x46*x7 - x49*x50 + x52*x53, m3_0*x39 + m3_0*x40 - m3_0*x43 - m3_0*x44 + m3_4*x42 - m3_4*x47 - m3_5*x41 - m3_5*x48 + x0*x54 + x3*x55 - x50*x56 - x51*x54 + x53*x57 + x55*x7, m1_0*x58 + m1_0*x59 - m1_0*x64 - m1_0*x65 + x11*x45 - x12*x60 - x13*x60 + x14*x46 - x15*x62 - x17*x60 - x45*x49 + x52*x62 + x53*x63 + x61*x62, 2*m1_0*x66 - 2*m1_0*x70 + 2*m1_4*x68 + 2*m1_4*x69 + 2*m2_1*x20 - 2*m2_1*x56 + 2*m2_3*x23 - 2*m2_4*x25 + 2*m2_4*x57 + 2*m2_4*x67 - 2*m2_5*x21 - 2*m2_5*x22 - 2*m2_5*x26 + 2*m3_1*x11 - 2*m3_1*x49 + 2*m3_1*x9 + 2*m3_3*x14 - 2*m3_4*x10 - 2*m3_4*x15 + 2*m3_4*x52 + 2*m3_4*x61 - 2*m3_5*x12 - 2*m3_5*x13 - 2*m3_5*x17, m1_0*x71 + m1_0*x72 - m1_0*x76 - m1_0*x77 + x20*x54 - x21*x73 - x22*x73 + x23*x55 - x25*x74 - x26*x73 + x53*x75 - x54*x56 + x57*x74 + x67*x74, m2_0*x58 + m2_0*x59 - m2_0*x64 - m2_0*x65 - x29*x60 + x62*x63, m3_0*x58 + m3_0*x59 - m3_0*x64 - m3_0*x65 + x27*x54 - x28*x74 - x29*x73 - x33*x60 - x34*x60 + x62*x68 + x62*x69 + x63*x74 + x66*x78 - x70*x78, m2_0*x71 + m2_0*x72 - m2_0*x76 - m2_0*x77 + x32*x54 - x33*x73 - x34*x73 - x35*x74 - x37*x60 + x62*x75 + x66*x79 + x68*x74 + x69*x74 - x70*x79, m3_0*x71 + m3_0*x72 - m3_0*x76 - m3_0*x77 - x37*x73 + x74*x75],
        [m1_1*x80, 2*m1_1*m1_5*m2_5 + 3*m2_1*x39 - m2_1*x40 - m2_1*x43 + m2_1*x44 - x46*x5 - x6*x62, 2*m1_1*m1_5*m3_5 + 3*m3_1*x39 - m3_1*x40 - m3_1*x43 + m3_1*x44 - x5*x55 - x6*x74, 3*m1_1*x58 - m1_1*x59 - m1_1*x64 + m1_1*x65 + 2*m1_5*m2_1*m2_5 - x16*x62 - x45*x81, 6*m1_1*m2_1*m3_1 + 2*m1_1*m2_5*m3_5 - 2*m1_1*x66 - 2*m1_1*x82 - 2*m1_3*x83 - 2*m1_3*x84 + 2*m1_5*m2_1*m3_5 + 2*m1_5*m2_5*m3_1 - 2*m2_4*x24 - 2*m3_4*x16, 3*m1_1*x71 - m1_1*x72 - m1_1*x76 + m1_1*x77 + 2*m1_5*m3_1*m3_5 - x24*x74 - x54*x85, m2_1*x86, 2*m2_1*m2_5*m3_5 + 3*m3_1*x58 - m3_1*x59 - m3_1*x64 + m3_1*x65 - x45*x66 - x45*x82, 3*m2_1*x71 - m2_1*x72 - m2_1*x76 + m2_1*x77 + 2*m2_5*m3_1*m3_5 - x54*x66 - x54*x82, m3_1*x87],
        [m1_2*x39 - m1_2*x40 + m1_2*x43 - m1_2*x44 + m1_3*x47 + x0*x88, m2_1*x41 + m2_1*x48 + m2_2*x39 - m2_2*x40 + m2_2*x43 - m2_2*x44 - m2_3*x42 + m2_3*x47 + x0*x60 + x11*x88 + x14*x53 + x3*x62 - x51*x60 + x62*x7, m3_1*x41 + m3_1*x48 + m3_2*x39 - m3_2*x40 + m3_2*x43 - m3_2*x44 - m3_3*x42 + m3_3*x47 + x0*x73 + x20*x88 + x23*x53 + x3*x74 - x51*x73 + x7*x74, m1_2*x58 - m1_2*x59 + m1_2*x64 - m1_2*x65 + x10*x46 + x11*x60 + x12*x45 + x14*x62 + x15*x46 + x17*x45 - x46*x52 - x49*x60 + x60*x9 + x89*x90, -2*m1_2*x70 + 2*m1_2*x82 + 2*m2_1*x21 + 2*m2_1*x26 + 2*m2_2*x91 + 2*m2_3*x19 + 2*m2_3*x25 - 2*m2_3*x57 + 2*m2_4*x23 + 2*m2_5*x18 + 2*m2_5*x20 - 2*m2_5*x56 + 2*m3_1*x12 + 2*m3_1*x13 + 2*m3_1*x17 + 2*m3_2*x89 + 2*m3_3*x10 + 2*m3_3*x15 - 2*m3_3*x52 - 2*m3_3*x61 + 2*m3_4*x14 + 2*m3_5*x11 - 2*m3_5*x49 + 2*m3_5*x9, m1_2*x71 - m1_2*x72 + m1_2*x76 - m1_2*x77 + x18*x73 + x19*x55 + x20*x73 + x21*x54 + x23*x74 + x25*x55 + x26*x54 - x55*x57 - x56*x73 + x91*x92, m2_2*x58 - m2_2*x59 + m2_2*x64 - m2_2*x65 + x27*x60 + x28*x46, m3_2*x58 - m3_2*x59 + m3_2*x64 - m3_2*x65 + x27*x73 + x28*x55 + x29*x54 + x30*x60 + x31*x46 + x32*x60 + x35*x46 - x55*x63 - x70*x90 + x82*x90, m2_2*x71 - m2_2*x72 + m2_2*x76 - m2_2*x77 + x30*x73 + x31*x55 + x32*x73 + x33*x54 + x35*x55 + x36*x60 + x38*x46 - x55*x69 - x70*x92 + x82*x92, m3_2*x71 - m3_2*x72 + m3_2*x76 - m3_2*x77 + x36*x73 + x38*x55],
        [m1_3*x93, 2*m1_3*m1_4*m2_4 - m2_3*x39 + 3*m2_3*x40 + m2_3*x43 - m2_3*x44 - x45*x5 - x60*x94, 2*m1_3*m1_4*m3_4 - m3_3*x39 + 3*m3_3*x40 + m3_3*x43 - m3_3*x44 - x5*x54 - x73*x94, -m1_3*x58 + 3*m1_3*x59 + m1_3*x64 - m1_3*x65 + 2*m1_4*m2_3*m2_4 - x46*x95 - x46*x96, -2*m1_1*x83 - 2*m1_1*x84 + 6*m1_3*m2_3*m3_3 + 2*m1_3*m2_4*m3_4 - 2*m1_3*x70 - 2*m1_3*x97 + 2*m1_4*m2_3*m3_4 + 2*m1_4*m2_4*m3_3 - 2*m2_3*x98 - 2*m3_3*x96, -m1_3*x71 + 3*m1_3*x72 + m1_3*x76 - m1_3*x77 + 2*m1_4*m3_3*m3_4 - x55*x98 - x55*x99, m2_3*x100, 2*m2_3*m2_4*m3_4 - m3_3*x58 + 3*m3_3*x59 + m3_3*x64 - m3_3*x65 - x45*x84 - x46*x70, -m2_3*x71 + 3*m2_3*x72 + m2_3*x76 - m2_3*x77 + 2*m2_4*m3_3*m3_4 - x54*x83 - x55*x70, m3_3*x101],
        [m1_4*x93, 2*m1_3*m1_4*m2_3 - m2_4*x39 + m2_4*x40 + 3*m2_4*x43 - m2_4*x44 - x45*x6 - x60*x8, 2*m1_3*m1_4*m3_3 - m3_4*x39 + m3_4*x40 + 3*m3_4*x43 - m3_4*x44 - x54*x6 - x73*x8, 2*m1_3*m2_3*m2_4 - m1_4*x58 + m1_4*x59 + 3*m1_4*x64 - m1_4*x65 - x62*x95 - x62*x96, 2*m1_3*m2_3*m3_4 + 2*m1_3*m2_4*m3_3 + 2*m1_4*m2_3*m3_3 + 6*m1_4*m2_4*m3_4 - 2*m1_4*x70 - 2*m2_4*x98 - 2*m2_4*x99 - 2*m3_1*x16 - 2*m3_4*x95 - 2*m3_4*x96, 2*m1_3*m3_3*m3_4 - m1_4*x71 + m1_4*x72 + 3*m1_4*x76 - m1_4*x77 - x74*x98 - x74*x99, m2_4*x100, 2*m2_3*m2_4*m3_3 - m3_4*x58 + m3_4*x59 + 3*m3_4*x64 - m3_4*x65 - x62*x70 - x62*x97, 2*m2_3*m3_3*m3_4 - m2_4*x71 + m2_4*x72 + 3*m2_4*x76 - m2_4*x77 - x70*x74 - x74*x97, m3_4*x101],
        [m1_5*x80, 2*m1_1*m1_5*m2_1 + m2_5*x39 - m2_5*x40 - m2_5*x43 + 3*m2_5*x44 - x46*x94 - x62*x8, 2*m1_1*m1_5*m3_1 + m3_5*x39 - m3_5*x40 - m3_5*x43 + 3*m3_5*x44 - x55*x94 - x74*x8, 2*m1_1*m2_1*m2_5 + m1_5*x58 - m1_5*x59 - m1_5*x64 + 3*m1_5*x65 - x60*x81 - x60*x89, 2*m1_1*m2_1*m3_5 + 2*m1_1*m2_5*m3_1 + 2*m1_5*m2_1*m3_1 + 6*m1_5*m2_5*m3_5 - 2*m1_5*x66 - 2*m1_5*x82 - 2*m2_5*x85 - 2*m2_5*x91 - 2*m3_5*x81 - 2*m3_5*x89, 2*m1_1*m3_1*m3_5 + m1_5*x71 - m1_5*x72 - m1_5*x76 + 3*m1_5*x77 - x73*x85 - x73*x91, m2_5*x86, 2*m2_1*m2_5*m3_1 + m3_5*x58 - m3_5*x59 - m3_5*x64 + 3*m3_5*x65 - x60*x66 - x60*x82, 2*m2_1*m3_1*m3_5 + m2_5*x71 - m2_5*x72 - m2_5*x76 + 3*m2_5*x77 - x66*x73 - x73*x82, m3_5*x87],
    ])
