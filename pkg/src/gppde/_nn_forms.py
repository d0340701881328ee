"""Closed-form mixed partials of the arcsine kernel.

Machine-generated by tools/gen_nn_kernel.py; do not edit by hand.
Arguments: x, xp are point arrays (broadcastable), s0 and s2 are the
positive variance hyperparameters.  Order (0, 0) lives in kernels.py
where the arcsine argument is clamped.
"""

import numpy as np

def nn_d01(x, xp, s0, s2):
    x0 = 2*s0
    x1 = xp**2
    x2 = 2*s2
    x3 = x1*x2 + 1
    x4 = 4*s0
    x5 = x**2
    x6 = s2*x4
    return 4*s2*(x*x0 + x - x0*xp)/(np.pi*(x0 + x3)*np.sqrt(-8*s0*s2*x*xp + x1*x6 + x2*x5 + x3 + x4 + x5*x6))

def nn_d02(x, xp, s0, s2):
    x0 = 4*s0
    x1 = xp**2
    x2 = 2*s2
    x3 = x1*x2
    x4 = x**2
    x5 = s2*x4
    x6 = s2*x1
    x7 = 8*s0
    x8 = s2*x*xp
    x9 = x2*x4 - x7*x8 + 1
    x10 = s0**2
    x11 = s0**3
    x12 = 24*x10
    x13 = xp**4
    x14 = s2**2
    x15 = x13*x14
    x16 = x10*x6
    x17 = x*x14*xp**3
    x18 = x**3*x14*xp
    x19 = 24*s0
    x20 = 16*x18
    x21 = x10*x15
    x22 = x1*x14*x4
    x23 = x10*x17
    x24 = x10*x22
    x25 = 16*x11
    x26 = xp**6
    x27 = s2**3
    x28 = 8*x27
    x29 = x13*x4
    x30 = s0*x27
    x31 = 16*x30
    x32 = 32*x8
    x33 = 32*s0
    return -8*s2*(s0*x20 - s0*x3 + 18*s0*x8 + s0 + x10*x20 + 6*x10 + 8*x11 + x12*x8 - x15*x7 - 8*x16 + x17*x19 + 6*x17 + 4*x18 - x19*x22 - 16*x21 + 48*x23 - 48*x24 + 3*x8)/(np.pi*np.sqrt(x0*x5 + x0*x6 + x0 + x3 + x9)*(48*s0*x15 + 12*s0*x5 + 36*s0*x6 - 32*x*x30*xp**5 - x10*x32 + 20*x10 - x11*x32 + x12*x5 + 12*x15 + 56*x16 - x17*x33 + 32*x21 + x22*x33 + 8*x22 - 64*x23 + 32*x24 + x25*x5 + x25*x6 + x25 + x26*x28 + x26*x31 + x28*x29 + x29*x31 + 6*x6 + x7 + x9))

def nn_d10(x, xp, s0, s2):
    x0 = 2*s0
    x1 = x**2
    x2 = 2*s2
    x3 = x1*x2 + 1
    x4 = 4*s0
    x5 = xp**2
    x6 = s2*x4
    return 4*s2*(-x*x0 + x0*xp + xp)/(np.pi*(x0 + x3)*np.sqrt(-8*s0*s2*x*xp + x1*x6 + x2*x5 + x3 + x4 + x5*x6))

def nn_d11(x, xp, s0, s2):
    x0 = 4*s0
    x1 = x0 + 1
    x2 = x**2
    x3 = 2*s2
    x4 = xp**2
    x5 = s2*x0
    return 4*s2*x1/(np.pi*(-8*s0*s2*x*xp + x1 + x2*x3 + x2*x5 + x3*x4 + x4*x5)**(3/2))

def nn_d12(x, xp, s0, s2):
    x0 = s2**2
    x1 = s0*x
    x2 = s0*xp
    x3 = s0**2
    x4 = 8*x3
    x5 = 4*s0
    x6 = x**2
    x7 = 2*s2
    x8 = xp**2
    x9 = 8*s0
    x10 = s2*xp
    x11 = x*x10
    x12 = s2*x5
    x13 = 16*x3
    x14 = 4*s2
    x15 = s2*x6
    x16 = 24*s0
    x17 = s2*x8
    x18 = x**4
    x19 = 4*x0
    x20 = xp**4
    x21 = 64*x3
    x22 = x0*x18
    x23 = 16*s0
    x24 = x0*x20
    x25 = 32*x3
    x26 = xp**3
    x27 = 32*x0
    x28 = x**3
    x29 = x0*x6*x8
    x30 = x0*x21
    return -24*x0*(-x*x4 - 2*x1 + 6*x2 + x4*xp + xp)/(np.pi*np.sqrt(-x11*x9 + x12*x6 + x12*x8 + x5 + x6*x7 + x7*x8 + 1)*(32*s0*x29 - x*x26*x30 - 16*x1*x10 - x1*x26*x27 - x11*x21 + x13*x22 + x13*x24 + x13 + x14*x6 + x14*x8 + x15*x16 + x15*x25 + x16*x17 + x17*x25 + x18*x19 + x19*x20 - x2*x27*x28 + x22*x23 + x23*x24 - x28*x30*xp + 96*x29*x3 + 8*x29 + x9 + 1))

def nn_d20(x, xp, s0, s2):
    x0 = 4*s0
    x1 = x**2
    x2 = 2*s2
    x3 = x1*x2
    x4 = s2*x1
    x5 = xp**2
    x6 = s2*x5
    x7 = 8*s0
    x8 = s2*x*xp
    x9 = x2*x5 - x7*x8 + 1
    x10 = s0**2
    x11 = s0**3
    x12 = 24*x10
    x13 = x**4
    x14 = s2**2
    x15 = x13*x14
    x16 = x10*x4
    x17 = x*x14*xp**3
    x18 = x**3*x14*xp
    x19 = 16*x17
    x20 = 24*s0
    x21 = x10*x15
    x22 = x1*x14*x5
    x23 = x10*x18
    x24 = x10*x22
    x25 = 16*x11
    x26 = x**6
    x27 = s2**3
    x28 = 8*x27
    x29 = x13*x5
    x30 = s0*x27
    x31 = 16*x30
    x32 = 32*x8
    x33 = 32*s0
    return -8*s2*(s0*x19 - s0*x3 + 18*s0*x8 + s0 + x10*x19 + 6*x10 + 8*x11 + x12*x8 - x15*x7 - 8*x16 + 4*x17 + x18*x20 + 6*x18 - x20*x22 - 16*x21 + 48*x23 - 48*x24 + 3*x8)/(np.pi*np.sqrt(x0*x4 + x0*x6 + x0 + x3 + x9)*(48*s0*x15 + 36*s0*x4 + 12*s0*x6 - 32*x**5*x30*xp - x10*x32 + 20*x10 - x11*x32 + x12*x6 + 12*x15 + 56*x16 - x18*x33 + 32*x21 + x22*x33 + 8*x22 - 64*x23 + 32*x24 + x25*x4 + x25*x6 + x25 + x26*x28 + x26*x31 + x28*x29 + x29*x31 + 6*x4 + x7 + x9))

def nn_d21(x, xp, s0, s2):
    x0 = s2**2
    x1 = s0*x
    x2 = s0*xp
    x3 = s0**2
    x4 = 8*x3
    x5 = 4*s0
    x6 = x**2
    x7 = 2*s2
    x8 = xp**2
    x9 = 8*s0
    x10 = s2*x
    x11 = x10*xp
    x12 = s2*x5
    x13 = 16*x3
    x14 = 4*s2
    x15 = s2*x6
    x16 = 24*s0
    x17 = s2*x8
    x18 = x**4
    x19 = 4*x0
    x20 = xp**4
    x21 = 64*x3
    x22 = x0*x18
    x23 = 16*s0
    x24 = x0*x20
    x25 = 32*x3
    x26 = xp**3
    x27 = 32*x0
    x28 = x**3
    x29 = x0*x6*x8
    x30 = x0*x21
    return -24*x0*(x*x4 + x + 6*x1 - 2*x2 - x4*xp)/(np.pi*np.sqrt(-x11*x9 + x12*x6 + x12*x8 + x5 + x6*x7 + x7*x8 + 1)*(32*s0*x29 - x*x26*x30 - x1*x26*x27 - 16*x10*x2 - x11*x21 + x13*x22 + x13*x24 + x13 + x14*x6 + x14*x8 + x15*x16 + x15*x25 + x16*x17 + x17*x25 + x18*x19 + x19*x20 - x2*x27*x28 + x22*x23 + x23*x24 - x28*x30*xp + 96*x29*x3 + 8*x29 + x9 + 1))

def nn_d22(x, xp, s0, s2):
    x0 = s2**2
    x1 = 4*s0
    x2 = x**2
    x3 = 2*s2
    x4 = xp**2
    x5 = 8*s0
    x6 = s2*x*xp
    x7 = s2*x1
    x8 = s0**2
    x9 = s0**3
    x10 = s0*x6
    x11 = s2*x2
    x12 = s2*x4
    x13 = x6*x8
    x14 = 48*x8
    x15 = 64*x9
    x16 = 6*s2
    x17 = 60*s0
    x18 = x**4
    x19 = 12*x0
    x20 = xp**4
    x21 = x**6
    x22 = s2**3
    x23 = 8*x22
    x24 = xp**6
    x25 = 384*x9
    x26 = x0*x18
    x27 = 96*s0
    x28 = x0*x20
    x29 = x21*x22
    x30 = 48*s0
    x31 = x22*x24
    x32 = 192*x11
    x33 = 192*x12
    x34 = xp**3
    x35 = x0*x27
    x36 = x**3
    x37 = x36*xp
    x38 = x*x22*xp**5
    x39 = x**5*x22*xp
    x40 = 240*x8
    x41 = 96*x8
    x42 = 192*x9
    x43 = 24*x2
    x44 = x0*x4
    x45 = x20*x22
    x46 = x18*x22*x4
    x47 = 192*s0
    x48 = x2*x44
    x49 = 144*s0
    x50 = x2*x45
    x51 = x22*x36
    x52 = x34*x8
    x53 = 576*x0
    x54 = 384*x8
    x55 = x34*x9
    x56 = 768*x0
    x57 = 672*x8
    x58 = 960*x9
    return 48*x0*(s0 + 40*x10 - x11*x14 - x11*x15 - x11*x5 - x12*x14 - x12*x15 - x12*x5 + 112*x13 + 128*x6*x9 + 5*x6 + 8*x8 + 16*x9)/(np.pi*np.sqrt(x1 + x2*x3 + x2*x7 + x3*x4 + x4*x7 - x5*x6 + 1)*(12*s0 - x*x34*x35 - x*x52*x53 - x*x55*x56 - 24*x10 + x11*x17 + x12*x17 - 192*x13 + x14 + x15*x29 + x15*x31 + x15 + x16*x2 + x16*x4 + x18*x19 + x19*x20 + x21*x23 + x23*x24 - x25*x38 - x25*x39 - x25*x6 + x26*x27 + x26*x40 + x26*x42 + x27*x28 - x27*x38 - x27*x39 + x28*x40 + x28*x42 + x29*x30 + x29*x41 + x30*x31 + x31*x41 + x32*x8 + x32*x9 + x33*x8 + x33*x9 - x34*x47*x51 - x35*x37 - x37*x53*x8 - x37*x56*x9 - x38*x54 - x39*x54 + x43*x44 + x43*x45 + x46*x49 + x46*x57 + x46*x58 + 24*x46 + x47*x48 + x48*x57 + 1152*x48*x9 + x49*x50 + x50*x57 + x50*x58 - 768*x51*x52 - 1280*x51*x55 + 1))

DERIVS = {(0, 1): nn_d01, (0, 2): nn_d02, (1, 0): nn_d10, (1, 1): nn_d11, (1, 2): nn_d12, (2, 0): nn_d20, (2, 1): nn_d21, (2, 2): nn_d22}
