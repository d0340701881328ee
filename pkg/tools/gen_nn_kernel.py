"""Generate closed-form mixed partials of the arcsine (neural-network) kernel.

Writes src/gppde/_nn_forms.py with one function per derivative order pair
(a, b), a, b in 0..2.  The (0, 0) case is hand-written in kernels.py because
it needs the arcsine domain clamp; everything else is emitted here from
symbolic differentiation and is purely algebraic (no arcsin calls).

Run from the repository root:

    python3 tools/gen_nn_kernel.py
"""

import pathlib

import sympy as sp
from sympy.printing.numpy import NumPyPrinter

x, y = sp.symbols("x y", real=True)
xp = sp.Symbol("xp", real=True)
s0, s2 = sp.symbols("s0 s2", positive=True)

num = 2 * (s0 + s2 * x * y)
den = sp.sqrt((1 + 2 * (s0 + s2 * x**2)) * (1 + 2 * (s0 + s2 * y**2)))
kernel = (2 / sp.pi) * sp.asin(num / den)

HEADER = '''"""Closed-form mixed partials of the arcsine kernel.

Machine-generated by tools/gen_nn_kernel.py; do not edit by hand.
Arguments: x, xp are point arrays (broadcastable), s0 and s2 are the
positive variance hyperparameters.  Order (0, 0) lives in kernels.py
where the arcsine argument is clamped.
"""

import numpy as np

'''


def emit(a, b, expr):
    printer = NumPyPrinter()
    replacements, reduced = sp.cse(expr, optimizations="basic")
    lines = [f"def nn_d{a}{b}(x, xp, s0, s2):"]
    for sym, sub in replacements:
        code = printer.doprint(sub).replace("numpy.", "np.")
        lines.append(f"    {sym} = {code}")
    code = printer.doprint(reduced[0]).replace("numpy.", "np.")
    lines.append(f"    return {code}")
    return "\n".join(lines) + "\n\n"


def main():
    out = HEADER
    names = []
    for a in range(3):
        for b in range(3):
            if a == 0 and b == 0:
                continue
            expr = sp.diff(kernel, x, a, y, b)
            expr = sp.cancel(sp.together(expr)).subs(y, xp)
            out += emit(a, b, expr)
            names.append((a, b))
    table = ", ".join(f"({a}, {b}): nn_d{a}{b}" for a, b in names)
    out += f"DERIVS = {{{table}}}\n"
    dest = pathlib.Path(__file__).resolve().parents[1] / "src" / "gppde" / "_nn_forms.py"
    dest.write_text(out)
    print(f"wrote {dest}")


if __name__ == "__main__":
    main()
